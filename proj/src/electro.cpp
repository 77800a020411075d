#include "beclab/electro.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "beclab/error.hpp"
#include "beclab/grid.hpp"
#include "beclab/quadrature.hpp"

namespace beclab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kCellOrder = 32;

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Applies f(point, weight) over the Duffy-collapsed Gauss product rule on
/// the fan of triangles (origin, v_i, v_{i+1}).
template <typename F>
void for_each_cell_node(const CellCharge& cell, F&& f) {
  const quad::GaussRule& rule = quad::gauss_legendre(kCellOrder);
  const std::size_t nv = cell.vertices.size();
  for (std::size_t e = 0; e < nv; ++e) {
    const Eigen::Vector2d& p1 = cell.vertices[e];
    const Eigen::Vector2d& p2 = cell.vertices[(e + 1) % nv];
    const double jac = std::abs(cross(p1, p2));
    for (Eigen::Index a = 0; a < rule.nodes.size(); ++a) {
      const double s = 0.5 * (rule.nodes[a] + 1.0), ws = 0.5 * rule.weights[a];
      for (Eigen::Index b = 0; b < rule.nodes.size(); ++b) {
        const double t = 0.5 * (rule.nodes[b] + 1.0), wt = 0.5 * rule.weights[b];
        f(s * ((1.0 - t) * p1 + t * p2), ws * wt * s * jac);
      }
    }
  }
}

}  // namespace

std::string_view to_string(CellShape shape) {
  switch (shape) {
    case CellShape::Square: return "square";
    case CellShape::Triangular: return "triangular";
    case CellShape::Hexagonal: return "hexagonal";
    case CellShape::Rectangle: return "rectangle";
  }
  return "unknown";
}

CellShape parse_cell_shape(std::string_view name) {
  if (name == "square") return CellShape::Square;
  if (name == "triangular") return CellShape::Triangular;
  if (name == "hexagonal") return CellShape::Hexagonal;
  if (name == "rectangle") return CellShape::Rectangle;
  throw InvalidArgument("unknown cell shape '" + std::string(name) + "'");
}

CellCharge CellCharge::polygon(CellShape shape, std::vector<Eigen::Vector2d> vertices) {
  if (vertices.size() < 3) throw InvalidArgument("cell polygon needs at least three vertices");
  double area2 = 0.0;
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const auto& a = vertices[i];
    const auto& b = vertices[(i + 1) % vertices.size()];
    const double c = cross(a, b);
    area2 += c;
    centroid += c * (a + b);
  }
  if (!(area2 > 0.0)) throw InvalidArgument("cell polygon must be counter-clockwise with positive area");
  centroid /= 3.0 * area2;
  CellCharge cell;
  cell.shape = shape;
  cell.area = 0.5 * area2;
  for (auto& v : vertices) v -= centroid;
  cell.vertices = std::move(vertices);
  return cell;
}

CellCharge CellCharge::regular(CellShape shape, double area) {
  if (!(area > 0.0)) throw InvalidArgument("cell area must be positive");
  std::vector<Eigen::Vector2d> v;
  switch (shape) {
    case CellShape::Square:
    case CellShape::Rectangle: {
      const double s = 0.5 * std::sqrt(area);
      v = {{-s, -s}, {s, -s}, {s, s}, {-s, s}};
      break;
    }
    case CellShape::Triangular: {
      const double a = std::sqrt(4.0 * area / std::sqrt(3.0));
      const double h = 0.5 * std::sqrt(3.0) * a;
      v = {{-0.5 * a, -h / 3.0}, {0.5 * a, -h / 3.0}, {0.0, 2.0 * h / 3.0}};
      break;
    }
    case CellShape::Hexagonal: {
      const double s = std::sqrt(2.0 * area / (3.0 * std::sqrt(3.0)));
      for (int k = 0; k < 6; ++k) {
        const double angle = kPi / 3.0 * (k - 2);
        v.emplace_back(s * std::cos(angle), s * std::sin(angle));
      }
      break;
    }
  }
  return polygon(shape, std::move(v));
}

CellCharge CellCharge::rectangle(double width, double height) {
  if (!(width > 0.0 && height > 0.0)) throw InvalidArgument("rectangle sides must be positive");
  const double a = 0.5 * width, b = 0.5 * height;
  return polygon(CellShape::Rectangle, {{-a, -b}, {a, -b}, {a, b}, {-a, b}});
}

bool CellCharge::contains(const Eigen::Vector2d& x) const {
  const double tol = 1e-14 * std::max(1.0, circumradius());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const auto& a = vertices[i];
    const auto& b = vertices[(i + 1) % vertices.size()];
    if (cross(b - a, x - a) < -tol * (b - a).norm()) return false;
  }
  return true;
}

double CellCharge::circumradius() const {
  double r = 0.0;
  for (const auto& v : vertices) r = std::max(r, v.norm());
  return r;
}

CellCharge lattice_cell(LatticeKind kind, double cell_area, int basis) {
  const LatticeGeometry geo = lattice_geometry(kind, cell_area);
  if (basis < 0 || basis >= static_cast<int>(geo.basis.size())) throw InvalidArgument("lattice basis index out of range");
  const Eigen::Vector2d site = geo.basis[static_cast<std::size_t>(basis)];
  // Clip a large square by the bisector half-planes of nearby sites.
  const double big = 4.0 * geo.ell;
  std::vector<Eigen::Vector2d> poly = {{-big, -big}, {big, -big}, {big, big}, {-big, big}};
  for (const LatticeSite& other : lattice_sites(geo, Eigen::Vector2d::Zero(), site.norm() + 3.0 * geo.ell)) {
    const Eigen::Vector2d d = other.position - site;
    if (d.norm() < 1e-12 * geo.ell) continue;
    const double limit = 0.5 * d.squaredNorm();  // keep {x : x.d <= |d|^2 / 2}
    std::vector<Eigen::Vector2d> next;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Eigen::Vector2d& a = poly[i];
      const Eigen::Vector2d& b = poly[(i + 1) % poly.size()];
      const double fa = a.dot(d) - limit, fb = b.dot(d) - limit;
      if (fa <= 0.0) next.push_back(a);
      if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) next.push_back(a + (fa / (fa - fb)) * (b - a));
    }
    poly = std::move(next);
  }
  // Drop the near-duplicate and collinear vertices left where bisectors meet at a corner.
  const double tol = 1e-9 * geo.ell;
  for (bool changed = true; changed && poly.size() > 3;) {
    changed = false;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Eigen::Vector2d& prev = poly[(i + poly.size() - 1) % poly.size()];
      const Eigen::Vector2d& next = poly[(i + 1) % poly.size()];
      if ((poly[i] - prev).norm() < tol || std::abs(cross(poly[i] - prev, next - poly[i])) < tol * geo.ell) {
        poly.erase(poly.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  const CellShape shape = kind == LatticeKind::Square       ? CellShape::Square
                          : kind == LatticeKind::Triangular ? CellShape::Hexagonal
                                                            : CellShape::Triangular;
  return CellCharge::polygon(shape, std::move(poly));
}

MultipoleReport multipole_moments(const CellCharge& cell, int K) {
  if (K < 1 || K > 12) throw InvalidArgument("multipole order K must lie in [1, 12]");
  MultipoleReport rep;
  rep.K = K;
  // Point charge minus the background total, which is area / area = 1 exactly.
  rep.q = 1.0 - cell.area / cell.area;
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(K + 1);
  for_each_cell_node(cell, [&](const Eigen::Vector2d& y, double w) {
    const std::complex<double> z(y.x(), y.y());
    std::complex<double> zk = 1.0;
    for (int k = 1; k <= K; ++k) {
      zk *= z;
      acc(k) += w * zk;
    }
  });
  // The point charge sits at the centroid, where |x|^k vanishes for k >= 1.
  rep.C = Eigen::VectorXd::Zero(K + 1);
  rep.S = Eigen::VectorXd::Zero(K + 1);
  for (int k = 1; k <= K; ++k) {
    rep.C(k) = -acc(k).real() / (k * cell.area);
    rep.S(k) = -acc(k).imag() / (k * cell.area);
  }
  return rep;
}

Eigen::Vector2d cell_field(const CellCharge& cell, const Eigen::Vector2d& x) {
  if (cell.contains(x)) throw InvalidArgument("field point lies inside the cell");
  Eigen::Vector2d background = Eigen::Vector2d::Zero();
  for_each_cell_node(cell, [&](const Eigen::Vector2d& y, double w) {
    const Eigen::Vector2d d = x - y;
    background += w * d / d.squaredNorm();
  });
  return x / x.squaredNorm() - background / cell.area;
}

Eigen::Vector2d multipole_field(const MultipoleReport& m, const Eigen::Vector2d& x) {
  // Potential Re f(z) with f = sum_k (C_k + i S_k) z^-k; the field is -grad Re f = conj(-f'(z)).
  const std::complex<double> z(x.x(), x.y());
  std::complex<double> minus_df = 0.0;
  std::complex<double> zpow = 1.0 / z;
  for (int k = 1; k <= m.K; ++k) {
    zpow /= z;  // z^-(k+1)
    minus_df += static_cast<double>(k) * std::complex<double>(m.C(k), m.S(k)) * zpow;
  }
  const std::complex<double> e = std::conj(minus_df);
  return {e.real(), e.imag()};
}

double fit_decay_exponent(const CellCharge& cell, double r0, double r1, int radii, int angles) {
  if (!(r0 > cell.circumradius() && r1 > r0) || radii < 2 || angles < 1) {
    throw InvalidArgument("decay fit needs circumradius < r0 < r1 and at least two radii");
  }
  Eigen::VectorXd lx(radii), ly(radii);
  for (int i = 0; i < radii; ++i) {
    const double r = r0 * std::pow(r1 / r0, static_cast<double>(i) / (radii - 1));
    double ms = 0.0;
    for (int a = 0; a < angles; ++a) {
      const double theta = 2.0 * kPi * (a + 0.5) / angles;
      ms += cell_field(cell, {r * std::cos(theta), r * std::sin(theta)}).squaredNorm();
    }
    lx(i) = std::log(r);
    ly(i) = 0.5 * std::log(ms / angles);
  }
  const double mx = lx.mean(), my = ly.mean();
  const double slope = ((lx.array() - mx) * (ly.array() - my)).sum() / (lx.array() - mx).square().sum();
  return -slope;
}

KineticBound vortex_kinetic_bound(const Params& params, const VortexLattice& lattice, const TFSolution& tf,
                                  int quad_n, double slack) {
  const double t = lattice.core_radius;
  if (!(t > 0.0 && params.Omega > 0.0)) throw InvalidArgument("kinetic bound needs t > 0 and Omega > 0");
  const auto grid = make_grid(quad_n);
  const Grid& g = *grid;
  const Eigen::VectorXd xi = cutoff(g, lattice);
  const double half_Omega = 0.5 * params.Omega;
  KineticBound out;
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    if (xi(k) == 0.0) continue;
    const double rho = tf.density(std::min(1.0, g.radius()(k)));
    if (rho <= 0.0) continue;
    const double x = g.x()(k), y = g.y()(k);
    const Eigen::Vector2d grad = phase_gradient(lattice, x, y) - half_Omega * Eigen::Vector2d(-y, x);
    Eigen::Vector2d field = -half_Omega * Eigen::Vector2d(x, y);
    if (lattice.central_degree != 0) field += lattice.central_degree * Eigen::Vector2d(x, y) / (x * x + y * y);
    for (const auto& z : lattice.points) {
      const Eigen::Vector2d d(x - z.x(), y - z.y());
      field += d / d.squaredNorm();
    }
    const double wk = g.weights()(k) * xi(k) * xi(k) * rho;
    out.lhs += wk * grad.squaredNorm();
    out.lhs_efield += wk * field.squaredNorm();
  }
  out.log_term = std::abs(std::log(t * t * params.Omega));
  out.rhs = half_Omega * out.log_term + slack * params.Omega;
  out.ratio = out.lhs / (half_Omega * out.log_term);
  return out;
}

RiemannGap riemann_gap(const TFSolution& tf, double Omega, LatticeKind kind) {
  if (!(Omega > 0.0)) throw InvalidArgument("riemann gap needs Omega > 0");
  const double area = 2.0 * kPi / Omega;
  const LatticeGeometry geo = lattice_geometry(kind, area);
  std::vector<CellCharge> cells;
  for (int b = 0; b < static_cast<int>(geo.basis.size()); ++b) cells.push_back(lattice_cell(kind, area, b));
  RiemannGap out;
  double sum = 0.0;
  for (const LatticeSite& site : lattice_sites(geo, Eigen::Vector2d::Zero(), 1.0)) {
    // rho^TF is nondecreasing in r: the sup sits at the farthest point of the cell, clipped to the disc.
    double far = 0.0;
    for (const auto& v : cells[static_cast<std::size_t>(site.basis)].vertices) far = std::max(far, (site.position + v).norm());
    sum += tf.density(std::min(1.0, far));
    ++out.cells;
  }
  out.gap = area * sum - 1.0;
  const double eps2_Omega = tf.omega * tf.omega / Omega;
  out.scale = std::sqrt(eps2_Omega) * (1.0 + 1.0 / std::sqrt(Omega));
  return out;
}

}  // namespace beclab
