#pragma once

#include <Eigen/Dense>
#include <string_view>
#include <vector>

#include "beclab/params.hpp"
#include "beclab/tf.hpp"
#include "beclab/trial.hpp"

namespace beclab {

enum class CellShape { Square, Triangular, Hexagonal, Rectangle };

std::string_view to_string(CellShape shape);
CellShape parse_cell_shape(std::string_view name);

/// Neutral cell: a unit point charge at the centroid (the origin) and a
/// uniform background of density -1/|Q| on the convex polygon Q.
struct CellCharge {
  CellShape shape = CellShape::Square;
  std::vector<Eigen::Vector2d> vertices;  // counter-clockwise, centroid at the origin
  double area = 0.0;

  /// Regular cell of the given area (flat bottom edge).
  static CellCharge regular(CellShape shape, double area = 1.0);
  /// Axis-aligned rectangle width x height.
  static CellCharge rectangle(double width, double height);
  /// Polygon shifted so its centroid is the origin.
  static CellCharge polygon(CellShape shape, std::vector<Eigen::Vector2d> vertices);

  /// Closed-polygon membership.
  bool contains(const Eigen::Vector2d& x) const;
  double circumradius() const;
};

/// Voronoi cell of site `basis` (0 or 1 for the honeycomb) of the infinite
/// lattice with cells of the given area, relative to the site.
CellCharge lattice_cell(LatticeKind kind, double cell_area, int basis = 0);

struct MultipoleReport {
  double q = 0.0;
  int K = 0;
  Eigen::VectorXd C;  // C(k), k = 0..K, C(0) unused
  Eigen::VectorXd S;
  double decay_exponent = 0.0;  // p in |E| ~ |x|^-p, filled by fit_decay_exponent
};

/// q, C_k = k^-1 int sigma |x|^k cos k theta and S_k likewise, k = 1..K <= 12.
MultipoleReport multipole_moments(const CellCharge& cell, int K);

/// Field of the cell charge, x/|x|^2 - |Q|^-1 int_Q (x - y)/|x - y|^2 dy.
/// Throws InvalidArgument for x in the closed cell.
Eigen::Vector2d cell_field(const CellCharge& cell, const Eigen::Vector2d& x);

/// Minus the gradient of the truncated multipole potential
/// sum_k |x|^-k (C_k cos k theta + S_k sin k theta).
Eigen::Vector2d multipole_field(const MultipoleReport& moments, const Eigen::Vector2d& x);

/// Least-squares slope of log RMS_theta |E| against log r on
/// `radii` log-spaced circles in [r0, r1], returned as -slope.
double fit_decay_exponent(const CellCharge& cell, double r0 = 3.0, double r1 = 10.0, int radii = 16,
                          int angles = 64);

struct KineticBound {
  double lhs = 0.0;         // int xi^2 rho^TF |grad phi - A|^2
  double lhs_efield = 0.0;  // same integrand written as |sum (r - r_i)/|r - r_i|^2 - Omega r / 2|^2
  double log_term = 0.0;    // |log(t^2 Omega)|
  double rhs = 0.0;         // (Omega/2) log_term + slack Omega
  double ratio = 0.0;       // lhs / ((Omega/2) log_term)
};

/// Midpoint quadrature on the `quad_n` disc grid with the analytic phase
/// gradient of the lattice.
KineticBound vortex_kinetic_bound(const Params& params, const VortexLattice& lattice, const TFSolution& tf,
                                  int quad_n = 1024, double slack = 1.0);

struct RiemannGap {
  double gap = 0.0;    // |Q| sum_i sup_{Q_i} rho^TF - int rho^TF
  double scale = 0.0;  // (eps^2 Omega)^{1/2} (1 + Omega^{-1/2})
  int cells = 0;
};

/// Cells of the origin-centred lattice whose points lie in the unit disc;
/// the sup runs over the part of each cell inside the disc.
RiemannGap riemann_gap(const TFSolution& tf, double Omega, LatticeKind kind);

}  // namespace beclab
