#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "beclab/field.hpp"
#include "beclab/params.hpp"
#include "beclab/tf.hpp"

namespace beclab {

/// Discrete degree of every plaquette (i, j)-(i+1, j+1) of the lattice.
/// A plaquette is undefined when a corner is masked out or |psi| = 0 there.
struct WindingField {
  int n = 0;  // grid points per side; plaquettes per side = n - 1
  std::vector<int> degree;
  std::vector<std::uint8_t> defined;

  int side() const { return n - 1; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * side() + i; }
  int at(int i, int j) const { return degree[index(i, j)]; }
  bool is_defined(int i, int j) const { return defined[index(i, j)] != 0; }
  int count_nonzero() const;
  int count_undefined() const;
  int count_degree(int d) const;
};

/// With Omega > 0 the phase differences are taken covariantly: each edge
/// contributes principal_arg(conj(psi_a) e^{-i theta_ab} psi_b) + theta_ab,
/// theta_ab the line integral of A = Omega/2 (-y, x). The degree is still an
/// exact integer, but the wrapped differences stay small wherever the phase
/// gradient follows A, which avoids aliasing in dense lattices.
WindingField winding_field(const ComplexField& psi, double Omega = 0.0);

/// Winding of psi along the lattice boundary of the node rectangle
/// [i0, i1] x [j0, j1] (counter-clockwise). Throws InvalidArgument when the
/// contour leaves the mask or meets a zero of psi.
int contour_winding(const ComplexField& psi, int i0, int j0, int i1, int j1, double Omega = 0.0);

/// Winding of psi along the circle of given radius about `center`, sampled
/// by bilinear interpolation. Throws InvalidArgument if the circle leaves
/// the grid mask or meets an interpolated zero.
int circle_winding(const ComplexField& psi, double radius, const Eigen::Vector2d& center = Eigen::Vector2d::Zero(),
                   int samples = 0);

struct Vortex {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  int degree = 0;
  int plaquettes = 0;
  double isolation_radius = 0.0;    // cluster extent plus one grid spacing
  double boundary_amplitude = 0.0;  // min |psi| / ||psi||_inf just outside the cluster
  bool isolated = true;             // isolation_radius < Omega^{-1/2}
  bool amplitude_ok = true;         // boundary_amplitude >= threshold
};

struct VortexSet {
  std::vector<Vortex> entries;
  int total_degree = 0;
  int grid_n = 0;
  double threshold = 0.0;
  int undefined_plaquettes = 0;
  int cancelled_clusters = 0;  // clusters whose degrees summed to zero
};

/// Clusters nonzero plaquettes (merge radius 2h) into vortices. Omega sets the
/// gauge of the winding field and the isolation radius; pass 0 to disable both.
VortexSet extract_vortices(const ComplexField& psi, double amplitude_threshold, double Omega = 0.0);

struct Region {
  enum class Kind { Annulus, Box, Disc };
  Kind kind = Kind::Disc;
  double a = 0.0, b = 1.0, c = 0.0, d = 0.0;  // annulus: a < r < b; disc: r < b; box: [a,b] x [c,d]

  /// Factories throw InvalidArgument for empty or inverted extents.
  static Region annulus(double r1, double r2);
  static Region disc(double r);
  static Region box(double x0, double x1, double y0, double y1);
  /// "annulus:R1:R2", "disc:R" or "box:X0:X1:Y0:Y1".
  static Region parse(std::string_view text);

  bool contains(const Eigen::Vector2d& p) const;
  /// |region intersected with the annulus inner < r < outer|.
  double area_within(double inner, double outer) const;
  std::string describe() const;
};

struct VorticityMeasureReport {
  Region region;
  int degree_sum = 0;
  double measure_value = 0.0;    // (2 pi / Omega) sum of degrees in the region
  double reference_value = 0.0;  // |region intersected with supp rho^TF|
  double region_area = 0.0;      // |region intersected with B_1|
  double ratio = 0.0;            // NaN when reference_value = 0
};

/// Throws InvalidArgument for Omega <= 0 or a region of area below 0.05.
VorticityMeasureReport vorticity_measure(const VortexSet& vortices, const Params& params, const TFSolution& tf,
                                         const Region& region);

struct CellOptions {
  /// T = {rho^TF >= eta * max rho^TF} unless paper_threshold is set.
  double eta = 0.1;
  /// Use T = {rho^TF >= omega / |log delta|}.
  bool paper_threshold = false;
  /// Replaces sqrt(g(eps)) in the good-cell test.
  double slack = 0.5;
};

struct Cell {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double rho_center = 0.0;
  double energy = 0.0;  // E^(i)[u]
  double excess = 0.0;  // energy - Omega l^2 |log(eps^2 Omega)| / 2
  int degree = 0;       // sum of plaquette degrees with centres in the cell
  bool good = false;
};

struct CellReport {
  double ell_hat = 0.0;
  double t_threshold = 0.0;  // density threshold defining T
  double reference = 0.0;    // Omega l^2 |log(eps^2 Omega)| / 2
  std::vector<Cell> cells;
  int bad = 0;
  double bad_fraction = 0.0;  // NaN when no cell fits in T
  double riemann_sum = 0.0;   // sum rho^TF(r_i) l^2
  std::vector<std::string> warnings;
};

/// Square cells of side ell_hat centred on (m l, n l), kept when the closed
/// cell lies in T. Throws InvalidArgument when ell_hat < 3h.
CellReport good_bad_cells(const ComplexField& psi, const Params& params, const TFSolution& tf, double ell_hat,
                          const CellOptions& options = {});

}  // namespace beclab
