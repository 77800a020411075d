#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "beclab/field.hpp"
#include "beclab/params.hpp"
#include "beclab/tf.hpp"

namespace beclab {

/// Vortex arrangement, named by the point pattern. Each point owns a
/// Voronoi cell of area 2 pi / Omega:
///  - Triangular: triangular points, hexagonal cells;
///  - Square: square points and cells;
///  - Hexagonal: honeycomb points, triangular cells.
enum class LatticeKind { Triangular, Square, Hexagonal };

std::string_view to_string(LatticeKind kind);
LatticeKind parse_lattice_kind(std::string_view name);

struct VortexLattice {
  LatticeKind kind = LatticeKind::Square;
  double ell = 0.0;        // nearest-neighbour spacing
  double cell_area = 0.0;  // 2 pi / Omega
  std::vector<Eigen::Vector2d> points;
  double core_radius = 0.0;
  int central_degree = 0;  // extra winding at the origin (pruned hole vortices)
  int count = 0;           // points in the unit disc
  int count_support = 0;   // points with rho^TF > 0

  double nearest_neighbour_distance() const { return ell; }
};

/// Primitive vectors and basis of the infinite lattice whose points own
/// cells of the given area. `ell` is the nearest-neighbour spacing.
struct LatticeGeometry {
  Eigen::Vector2d a1 = Eigen::Vector2d::Zero();
  Eigen::Vector2d a2 = Eigen::Vector2d::Zero();
  std::vector<Eigen::Vector2d> basis;
  double ell = 0.0;
};

LatticeGeometry lattice_geometry(LatticeKind kind, double cell_area);

struct LatticeSite {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  int basis = 0;
};

/// Sites with |position| < radius, one site at `offset`, sorted by (y, x).
std::vector<LatticeSite> lattice_sites(const LatticeGeometry& geometry, const Eigen::Vector2d& offset, double radius);

struct CoreRadiusOptions {
  double c_mid = 1.0;         // t = eps for Omega <= c_mid / eps
  double upper_factor = 0.5;  // t <= upper_factor * Omega^{-1/2}
};

/// t = eps below the c_mid/eps crossover, (eps/Omega)^{1/2} above it.
double core_radius(const Params& params, const CoreRadiusOptions& options = {});

/// Lattice points strictly inside the unit disc, one point at `offset`.
/// Throws InvalidArgument for Omega < 20.
VortexLattice build_lattice(const Params& params, LatticeKind kind,
                            const Eigen::Vector2d& offset = Eigen::Vector2d::Zero(),
                            const CoreRadiusOptions& core = {});

/// prod_i (z - z_i)/|z - z_i| via accumulated arguments; nodes within
/// 1e-12 of a vortex get 0.
ComplexField phase_factor(std::shared_ptr<const Grid> grid, const VortexLattice& lattice);
/// Same factor as a running product of unit numbers (cross-check).
ComplexField phase_factor_product(std::shared_ptr<const Grid> grid, const VortexLattice& lattice);

/// xi = min(1, |z - z_i| / t) over the vortex discs. Throws InvalidArgument
/// when core discs overlap.
Eigen::VectorXd cutoff(const Grid& grid, const VortexLattice& lattice);

/// Analytic phase gradient grad phi = sum_i e_z x (r - r_i) / |r - r_i|^2
/// (plus the central winding) at (x, y).
Eigen::Vector2d phase_gradient(const VortexLattice& lattice, double x, double y);

struct TrialOptions {
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();
  std::optional<double> core_radius;  // override t
  CoreRadiusOptions core;
  bool prune_hole_vortices = false;
};

struct TrialState {
  ComplexField psi;
  double c = 1.0;
  VortexLattice lattice;
  RegularizedDensity rho_used;
  std::vector<std::string> warnings;
};

/// psi = c sqrt(rho) xi g normalized on the grid.
TrialState assemble_trial(const Params& params, std::shared_ptr<const Grid> grid, LatticeKind kind,
                          const TrialOptions& options = {});

/// psi = c sqrt(rho) exp(i n theta); default n = round(Omega / 2).
/// Throws InvalidArgument when omega <= omega_h.
TrialState giant_vortex_trial(const Params& params, std::shared_ptr<const Grid> grid,
                              std::optional<int> n_winding = std::nullopt);

}  // namespace beclab
