#include "beclab/trial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "beclab/error.hpp"

namespace beclab {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kVortexSnap = 1e-12;
}  // namespace

std::string_view to_string(LatticeKind kind) {
  switch (kind) {
    case LatticeKind::Triangular: return "triangular";
    case LatticeKind::Square: return "square";
    case LatticeKind::Hexagonal: return "hexagonal";
  }
  return "unknown";
}

LatticeKind parse_lattice_kind(std::string_view name) {
  if (name == "triangular" || name == "TRIANGULAR") return LatticeKind::Triangular;
  if (name == "square" || name == "SQUARE") return LatticeKind::Square;
  if (name == "hexagonal" || name == "HEXAGONAL") return LatticeKind::Hexagonal;
  throw InvalidArgument("unknown lattice kind '" + std::string(name) + "'");
}

double core_radius(const Params& p, const CoreRadiusOptions& options) {
  const double t = p.Omega <= options.c_mid / p.epsilon ? p.epsilon : std::sqrt(p.epsilon / p.Omega);
  const double lower = std::min(p.epsilon, std::sqrt(p.epsilon / p.Omega));
  const double upper = options.upper_factor / std::sqrt(p.Omega);
  if (lower > upper || t > upper) {
    throw InvalidArgument("core radius constraints incompatible: t = " + std::to_string(t) +
                          " exceeds " + std::to_string(upper));
  }
  return t;
}

LatticeGeometry lattice_geometry(LatticeKind kind, double cell_area) {
  if (!(cell_area > 0.0)) throw InvalidArgument("lattice cell area must be positive");
  LatticeGeometry geo;
  geo.basis.push_back(Eigen::Vector2d::Zero());
  switch (kind) {
    case LatticeKind::Square:
      geo.ell = std::sqrt(cell_area);
      geo.a1 = {geo.ell, 0.0};
      geo.a2 = {0.0, geo.ell};
      break;
    case LatticeKind::Triangular:
      geo.ell = std::sqrt(2.0 * cell_area / std::sqrt(3.0));
      geo.a1 = {geo.ell, 0.0};
      geo.a2 = {0.5 * geo.ell, 0.5 * std::sqrt(3.0) * geo.ell};
      break;
    case LatticeKind::Hexagonal: {
      // Honeycomb of side s: two points per hexagon of area (3 sqrt3 / 2) s^2.
      geo.ell = std::sqrt(4.0 * cell_area / (3.0 * std::sqrt(3.0)));
      const double a = std::sqrt(3.0) * geo.ell;
      geo.a1 = {a, 0.0};
      geo.a2 = {0.5 * a, 0.5 * std::sqrt(3.0) * a};
      geo.basis.push_back((geo.a1 + geo.a2) / 3.0);
      break;
    }
  }
  return geo;
}

std::vector<LatticeSite> lattice_sites(const LatticeGeometry& geo, const Eigen::Vector2d& offset, double radius) {
  // Index range large enough for the sheared basis: |m a1 + k a2| >= max(|m|, |k|) * height / 2.
  const double height = std::abs(geo.a1.x() * geo.a2.y() - geo.a1.y() * geo.a2.x()) /
                        std::max(geo.a1.norm(), geo.a2.norm());
  const int reach = static_cast<int>(std::ceil(2.0 * (radius + offset.norm()) / height)) + 2;
  std::vector<LatticeSite> sites;
  for (int m = -reach; m <= reach; ++m) {
    for (int k = -reach; k <= reach; ++k) {
      for (std::size_t b = 0; b < geo.basis.size(); ++b) {
        const Eigen::Vector2d z = offset + m * geo.a1 + k * geo.a2 + geo.basis[b];
        if (z.norm() < radius) sites.push_back({z, static_cast<int>(b)});
      }
    }
  }
  std::sort(sites.begin(), sites.end(), [](const LatticeSite& u, const LatticeSite& v) {
    return std::pair{u.position.y(), u.position.x()} < std::pair{v.position.y(), v.position.x()};
  });
  return sites;
}

VortexLattice build_lattice(const Params& p, LatticeKind kind, const Eigen::Vector2d& offset,
                            const CoreRadiusOptions& core) {
  if (p.Omega < 20.0) throw InvalidArgument("lattice trial needs Omega >= 20");
  VortexLattice lat;
  lat.kind = kind;
  lat.cell_area = 2.0 * kPi / p.Omega;
  lat.core_radius = core_radius(p, core);

  const LatticeGeometry geo = lattice_geometry(kind, lat.cell_area);
  lat.ell = geo.ell;
  const TFSolution tf = solve_tf(p.omega);
  for (const LatticeSite& site : lattice_sites(geo, offset, 1.0)) {
    lat.points.push_back(site.position);
    if (tf.density(site.position.norm()) > 0.0) ++lat.count_support;
  }
  lat.count = static_cast<int>(lat.points.size());
  return lat;
}

ComplexField phase_factor(std::shared_ptr<const Grid> grid, const VortexLattice& lat) {
  const Grid& g = *grid;
  ComplexField out(grid);
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    const double x = g.x()(k), y = g.y()(k);
    double phase = lat.central_degree * std::atan2(y, x);
    bool on_vortex = lat.central_degree != 0 && std::hypot(x, y) < kVortexSnap;
    for (const auto& z : lat.points) {
      const double dx = x - z.x(), dy = y - z.y();
      if (std::abs(dx) < kVortexSnap && std::abs(dy) < kVortexSnap) on_vortex = true;
      phase += std::atan2(dy, dx);
    }
    out.values(k) = on_vortex ? Complex(0.0) : std::polar(1.0, phase);
  }
  return out;
}

ComplexField phase_factor_product(std::shared_ptr<const Grid> grid, const VortexLattice& lat) {
  const Grid& g = *grid;
  ComplexField out(grid);
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    const Complex zeta(g.x()(k), g.y()(k));
    Complex value = std::abs(zeta) > 0.0 ? std::pow(zeta / std::abs(zeta), lat.central_degree) : Complex(0.0);
    for (const auto& z : lat.points) {
      const Complex d = zeta - Complex(z.x(), z.y());
      const double m = std::abs(d);
      value = m < kVortexSnap ? Complex(0.0) : value * (d / m);
    }
    out.values(k) = value;
  }
  return out;
}

Eigen::VectorXd cutoff(const Grid& g, const VortexLattice& lat) {
  const double t = lat.core_radius;
  if (!(t > 0.0)) throw InvalidArgument("cutoff needs a positive core radius");
  if (lat.points.size() > 1 && !(2.0 * t < lat.nearest_neighbour_distance() * (1.0 - 1e-9))) {
    throw InvalidArgument("vortex core discs overlap: 2t >= nearest-neighbour distance");
  }
  Eigen::VectorXd xi = Eigen::VectorXd::Ones(g.size());
  const double h = g.h();
  auto to_index = [&](double c) { return (c + 1.0) / h; };
  std::vector<Eigen::Vector2d> centres = lat.points;
  if (lat.central_degree != 0) centres.emplace_back(0.0, 0.0);
  for (const auto& z : centres) {
    const int i0 = std::max(0, static_cast<int>(std::floor(to_index(z.x() - t))));
    const int i1 = std::min(g.n() - 1, static_cast<int>(std::ceil(to_index(z.x() + t))));
    const int j0 = std::max(0, static_cast<int>(std::floor(to_index(z.y() - t))));
    const int j1 = std::min(g.n() - 1, static_cast<int>(std::ceil(to_index(z.y() + t))));
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        const Eigen::Index k = g.dof(i, j);
        if (k < 0) continue;
        const double d = std::hypot(g.x()(k) - z.x(), g.y()(k) - z.y());
        if (d < t) xi(k) = std::min(xi(k), d / t);
      }
    }
  }
  return xi;
}

Eigen::Vector2d phase_gradient(const VortexLattice& lat, double x, double y) {
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
  auto add = [&](double dx, double dy, double degree) {
    const double d2 = dx * dx + dy * dy;
    grad += degree * Eigen::Vector2d(-dy, dx) / d2;
  };
  if (lat.central_degree != 0) add(x, y, lat.central_degree);
  for (const auto& z : lat.points) add(x - z.x(), y - z.y(), 1.0);
  return grad;
}

namespace {

TrialState finish_trial(const Params& p, std::shared_ptr<const Grid> grid, VortexLattice lattice,
                        const RegularizedDensity& rho, const Eigen::VectorXd& xi, const ComplexField& g,
                        std::vector<std::string> warnings) {
  const Grid& gr = *grid;
  Eigen::VectorXcd values(gr.size());
  for (Eigen::Index k = 0; k < gr.size(); ++k) {
    values(k) = std::sqrt(rho(gr.radius()(k))) * xi(k) * g.values(k);
  }
  const double n2 = gr.weights().dot(values.cwiseAbs2());
  if (!(n2 > 0.0)) throw NumericalError("trial state vanishes on the grid");
  const double c = 1.0 / std::sqrt(n2);
  (void)p;
  return TrialState{ComplexField(grid, values * c), c, std::move(lattice), rho, std::move(warnings)};
}

}  // namespace

TrialState assemble_trial(const Params& p, std::shared_ptr<const Grid> grid, LatticeKind kind,
                          const TrialOptions& options) {
  std::vector<std::string> warnings;
  const Regime regime = classify(p, {1.0, options.core.c_mid, 1.0});
  if (regime.tag != RegimeTag::LatticeSlow && regime.tag != RegimeTag::LatticeFast) {
    warnings.push_back("lattice trial outside the lattice regimes (" + std::string(to_string(regime.tag)) + ")");
  }
  VortexLattice lattice = build_lattice(p, kind, options.offset, options.core);
  if (options.core_radius) lattice.core_radius = *options.core_radius;
  const TFSolution tf = solve_tf(p.omega);
  if (options.prune_hole_vortices && tf.has_hole()) {
    const auto before = lattice.points.size();
    std::erase_if(lattice.points, [&](const auto& z) { return z.norm() < tf.hole_radius; });
    lattice.central_degree = static_cast<int>(before - lattice.points.size());
  }
  const RegularizedDensity rho = regularized_density(tf, p.Omega);
  const Eigen::VectorXd xi = cutoff(*grid, lattice);
  const ComplexField g = phase_factor(grid, lattice);
  return finish_trial(p, std::move(grid), std::move(lattice), rho, xi, g, std::move(warnings));
}

TrialState giant_vortex_trial(const Params& p, std::shared_ptr<const Grid> grid, std::optional<int> n_winding) {
  const TFSolution tf = solve_tf(p.omega);
  if (!tf.has_hole()) throw InvalidArgument("giant vortex trial needs omega > omega_h (a TF hole)");
  VortexLattice lattice;
  lattice.cell_area = p.Omega > 0 ? 2.0 * kPi / p.Omega : 0.0;
  lattice.central_degree = n_winding.value_or(static_cast<int>(std::lround(0.5 * p.Omega)));
  const RegularizedDensity rho = regularized_density(tf, p.Omega);
  const ComplexField g = phase_factor(grid, lattice);
  const Eigen::VectorXd xi = Eigen::VectorXd::Ones(grid->size());
  return finish_trial(p, std::move(grid), std::move(lattice), rho, xi, g, {});
}

}  // namespace beclab
