#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <complex>
#include <memory>

#include "beclab/grid.hpp"
#include "beclab/params.hpp"

namespace beclab {

using Complex = std::complex<double>;
using SparseMatrixC = Eigen::SparseMatrix<Complex>;

/// Complex order parameter sampled on the masked nodes of a grid.
struct ComplexField {
  std::shared_ptr<const Grid> grid;
  Eigen::VectorXcd values;

  ComplexField() = default;
  ComplexField(std::shared_ptr<const Grid> g, Eigen::VectorXcd v) : grid(std::move(g)), values(std::move(v)) {}
  explicit ComplexField(std::shared_ptr<const Grid> g)
      : grid(std::move(g)), values(Eigen::VectorXcd::Zero(grid->size())) {}
};

/// sum_k w_k |psi_k|^2.
double norm_squared(const ComplexField& psi);
/// sum_k w_k |psi_k|^4.
double l4_power4(const ComplexField& psi);
/// max_k |psi_k|^2.
double sup_density(const ComplexField& psi);
/// Returns psi / ||psi||_2.
ComplexField normalized(const ComplexField& psi);

struct EnergyBreakdown {
  double kinetic = 0.0;       // int |(grad - iA) psi|^2
  double centrifugal = 0.0;   // -int Omega^2 r^2 |psi|^2 / 4
  double interaction = 0.0;   // int |psi|^4 / eps^2
  double total = 0.0;
};

/// Discrete GP functional on a fixed grid at fixed parameters.
///
/// The covariant gradient uses Peierls links exp(-i int_a^b A.dl) with the
/// exact line integral of A = Omega/2 (-y, x). Only links inside the
/// masked region carry energy, which realizes the natural (magnetic
/// Neumann) boundary condition of the unconstrained H^1 problem.
class GpFunctional {
 public:
  GpFunctional(std::shared_ptr<const Grid> grid, const Params& params);

  EnergyBreakdown energy(const Eigen::VectorXcd& psi) const;
  /// Euclidean gradient dE / d conj(psi_k); dE = 2 Re <delta, gradient>.
  Eigen::VectorXcd gradient(const Eigen::VectorXcd& psi) const;
  /// Kinetic operator K with kinetic energy psi^* K psi.
  const SparseMatrixC& kinetic_matrix() const { return kinetic_; }
  /// Nodal centrifugal potential -Omega^2 r^2 / 4.
  const Eigen::VectorXd& potential() const { return potential_; }

  const Grid& grid() const { return *grid_; }
  std::shared_ptr<const Grid> grid_ptr() const { return grid_; }
  const Params& params() const { return params_; }

 private:
  std::shared_ptr<const Grid> grid_;
  Params params_;
  SparseMatrixC kinetic_;
  Eigen::VectorXd potential_;
};

/// Real weighted graph Laplacian of the grid (links without phases).
Eigen::SparseMatrix<double> graph_laplacian(const Grid& grid);

struct EnergyOptions {
  bool require_normalized = true;
  double normalization_tol = 1e-8;
};

/// Throws InvalidArgument for an unnormalized field unless disabled.
EnergyBreakdown gp_energy(const ComplexField& psi, const Params& params, const EnergyOptions& options = {});

struct Residual {
  ComplexField field;
  double mu = 0.0;
  double residual_norm = 0.0;
};

/// Residual of the stationary GP equation,
/// -(grad - iA)^2 psi - A^2 psi + 2 eps^-2 |psi|^2 psi - mu psi,
/// with mu = E + eps^-2 ||psi||_4^4.
Residual gp_residual(const ComplexField& psi, const Params& params);
Residual gp_residual(const GpFunctional& functional, const Eigen::VectorXcd& psi);

}  // namespace beclab
