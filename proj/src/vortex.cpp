#include "beclab/vortex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "beclab/error.hpp"
#include "beclab/grid.hpp"

namespace beclab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double phase_step(Complex from, Complex to) { return std::arg(to * std::conj(from)); }

/// Principal branch of the covariant difference, plus the link phase
/// theta = int_a^b A.dl it removed. Reduces to phase_step for Omega = 0.
double covariant_step(const Grid& g, Eigen::Index a, Eigen::Index b, Complex from, Complex to, double Omega) {
  if (Omega == 0.0) return phase_step(from, to);
  const double theta = 0.5 * Omega * (g.x()(a) * g.y()(b) - g.x()(b) * g.y()(a));
  return std::arg(to * std::conj(from) * std::polar(1.0, -theta)) + theta;
}

int to_degree(double total_phase) { return static_cast<int>(std::lround(total_phase / kTwoPi)); }

}  // namespace

int WindingField::count_nonzero() const {
  int count = 0;
  for (std::size_t p = 0; p < degree.size(); ++p) count += (defined[p] && degree[p] != 0) ? 1 : 0;
  return count;
}

int WindingField::count_undefined() const {
  return static_cast<int>(std::count(defined.begin(), defined.end(), std::uint8_t{0}));
}

int WindingField::count_degree(int d) const {
  int count = 0;
  for (std::size_t p = 0; p < degree.size(); ++p) count += (defined[p] && degree[p] == d) ? 1 : 0;
  return count;
}

WindingField winding_field(const ComplexField& psi, double Omega) {
  const Grid& g = *psi.grid;
  WindingField wf;
  wf.n = g.n();
  const std::size_t count = static_cast<std::size_t>(wf.side()) * wf.side();
  wf.degree.assign(count, 0);
  wf.defined.assign(count, 0);
  for (int j = 0; j + 1 < g.n(); ++j) {
    for (int i = 0; i + 1 < g.n(); ++i) {
      const Eigen::Index k[4] = {g.dof(i, j), g.dof(i + 1, j), g.dof(i + 1, j + 1), g.dof(i, j + 1)};
      if (std::any_of(k, k + 4, [](Eigen::Index v) { return v < 0; })) continue;
      Complex z[4];
      bool zero = false;
      for (int c = 0; c < 4; ++c) {
        z[c] = psi.values(k[c]);
        zero = zero || z[c] == Complex(0.0);
      }
      if (zero) continue;
      double total = 0.0;
      for (int c = 0; c < 4; ++c) total += covariant_step(g, k[c], k[(c + 1) % 4], z[c], z[(c + 1) % 4], Omega);
      wf.defined[wf.index(i, j)] = 1;
      wf.degree[wf.index(i, j)] = to_degree(total);
    }
  }
  return wf;
}

int contour_winding(const ComplexField& psi, int i0, int j0, int i1, int j1, double Omega) {
  const Grid& g = *psi.grid;
  if (i0 >= i1 || j0 >= j1 || i0 < 0 || j0 < 0 || i1 >= g.n() || j1 >= g.n()) {
    throw InvalidArgument("contour rectangle out of range");
  }
  std::vector<std::pair<int, int>> loop;
  for (int i = i0; i < i1; ++i) loop.emplace_back(i, j0);
  for (int j = j0; j < j1; ++j) loop.emplace_back(i1, j);
  for (int i = i1; i > i0; --i) loop.emplace_back(i, j1);
  for (int j = j1; j > j0; --j) loop.emplace_back(i0, j);
  std::vector<Eigen::Index> nodes;
  nodes.reserve(loop.size());
  for (const auto& [i, j] : loop) {
    const Eigen::Index k = g.dof(i, j);
    if (k < 0) throw InvalidArgument("contour leaves the grid mask");
    if (psi.values(k) == Complex(0.0)) throw InvalidArgument("contour meets a zero of the field");
    nodes.push_back(k);
  }
  double total = 0.0;
  for (std::size_t c = 0; c < nodes.size(); ++c) {
    const Eigen::Index a = nodes[c], b = nodes[(c + 1) % nodes.size()];
    total += covariant_step(g, a, b, psi.values(a), psi.values(b), Omega);
  }
  return to_degree(total);
}

namespace {

/// Bilinear interpolation; nullopt when a corner is masked out.
std::optional<Complex> interpolate(const ComplexField& psi, double x, double y) {
  const Grid& g = *psi.grid;
  const double fx = (x + 1.0) / g.h();
  const double fy = (y + 1.0) / g.h();
  const int i = std::clamp(static_cast<int>(std::floor(fx)), 0, g.n() - 2);
  const int j = std::clamp(static_cast<int>(std::floor(fy)), 0, g.n() - 2);
  const double s = fx - i, t = fy - j;
  const Eigen::Index k00 = g.dof(i, j), k10 = g.dof(i + 1, j), k01 = g.dof(i, j + 1), k11 = g.dof(i + 1, j + 1);
  if (k00 < 0 || k10 < 0 || k01 < 0 || k11 < 0) return std::nullopt;
  const auto& v = psi.values;
  return (1 - s) * (1 - t) * v(k00) + s * (1 - t) * v(k10) + (1 - s) * t * v(k01) + s * t * v(k11);
}

}  // namespace

int circle_winding(const ComplexField& psi, double radius, const Eigen::Vector2d& center, int samples) {
  if (!(radius > 0.0)) throw InvalidArgument("circle radius must be positive");
  if (samples <= 0) samples = std::max(64, static_cast<int>(std::ceil(8.0 * kTwoPi * radius / psi.grid->h())));
  std::vector<Complex> z(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) {
    const double theta = kTwoPi * s / samples;
    const auto value =
        interpolate(psi, center.x() + radius * std::cos(theta), center.y() + radius * std::sin(theta));
    if (!value) throw InvalidArgument("circle leaves the grid mask");
    if (*value == Complex(0.0)) throw InvalidArgument("circle meets a zero of the field");
    z[static_cast<std::size_t>(s)] = *value;
  }
  double total = 0.0;
  for (std::size_t c = 0; c < z.size(); ++c) total += phase_step(z[c], z[(c + 1) % z.size()]);
  return to_degree(total);
}

namespace {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

/// Zero of the least-squares linear fit of psi on the plaquette corners,
/// clamped to the plaquette.
Eigen::Vector2d plaquette_zero(const ComplexField& psi, int i, int j) {
  const Grid& g = *psi.grid;
  const Complex z00 = psi.values(g.dof(i, j)), z10 = psi.values(g.dof(i + 1, j));
  const Complex z01 = psi.values(g.dof(i, j + 1)), z11 = psi.values(g.dof(i + 1, j + 1));
  // Fit a + b s + c t on s, t in {-1/2, 1/2}: exact least squares for the square stencil.
  const Complex a = 0.25 * (z00 + z10 + z01 + z11);
  const Complex b = 0.5 * (z10 + z11 - z00 - z01);
  const Complex c = 0.5 * (z01 + z11 - z00 - z10);
  Eigen::Matrix2d m;
  m << b.real(), c.real(), b.imag(), c.imag();
  Eigen::Vector2d st = Eigen::Vector2d::Zero();
  if (std::abs(m.determinant()) > 1e-300) st = m.fullPivLu().solve(Eigen::Vector2d(-a.real(), -a.imag()));
  st = st.cwiseMax(-0.5).cwiseMin(0.5);
  const double h = g.h();
  return {g.coord(i) + (0.5 + st.x()) * h, g.coord(j) + (0.5 + st.y()) * h};
}

}  // namespace

VortexSet extract_vortices(const ComplexField& psi, double amplitude_threshold, double Omega) {
  if (!(amplitude_threshold > 0.0 && amplitude_threshold < 1.0)) {
    throw InvalidArgument("amplitude threshold must lie in (0, 1)");
  }
  const Grid& g = *psi.grid;
  const WindingField wf = winding_field(psi, Omega);
  VortexSet out;
  out.grid_n = g.n();
  out.threshold = amplitude_threshold;
  out.undefined_plaquettes = wf.count_undefined();

  std::vector<std::pair<int, int>> hits;
  std::unordered_map<std::size_t, int> slot;
  for (int j = 0; j < wf.side(); ++j) {
    for (int i = 0; i < wf.side(); ++i) {
      if (wf.is_defined(i, j) && wf.at(i, j) != 0) {
        slot[wf.index(i, j)] = static_cast<int>(hits.size());
        hits.emplace_back(i, j);
      }
    }
  }
  DisjointSets sets(static_cast<int>(hits.size()));
  for (std::size_t p = 0; p < hits.size(); ++p) {
    const auto [i, j] = hits[p];
    for (int dj = -2; dj <= 2; ++dj) {
      for (int di = -2; di <= 2; ++di) {
        if (di * di + dj * dj > 4) continue;
        const int ii = i + di, jj = j + dj;
        if (ii < 0 || jj < 0 || ii >= wf.side() || jj >= wf.side()) continue;
        const auto it = slot.find(wf.index(ii, jj));
        if (it != slot.end()) sets.unite(static_cast<int>(p), it->second);
      }
    }
  }
  std::unordered_map<int, std::vector<int>> clusters;
  for (std::size_t p = 0; p < hits.size(); ++p) clusters[sets.find(static_cast<int>(p))].push_back(static_cast<int>(p));
  std::vector<std::vector<int>> ordered;
  for (auto& [root, members] : clusters) ordered.push_back(std::move(members));
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });

  const double h = g.h();
  const double sup_amp = std::sqrt(sup_density(psi));
  const double isolation_limit = Omega > 0.0 ? 1.0 / std::sqrt(Omega) : std::numeric_limits<double>::infinity();
  for (const auto& members : ordered) {
    int degree = 0;
    Eigen::Vector2d position = Eigen::Vector2d::Zero();
    double weight_sum = 0.0;
    for (int p : members) {
      const auto [i, j] = hits[p];
      degree += wf.at(i, j);
      const double amp = 0.25 * (std::abs(psi.values(g.dof(i, j))) + std::abs(psi.values(g.dof(i + 1, j))) +
                                 std::abs(psi.values(g.dof(i, j + 1))) + std::abs(psi.values(g.dof(i + 1, j + 1))));
      const double weight = 1.0 / std::max(amp, 1e-300);
      position += weight * plaquette_zero(psi, i, j);
      weight_sum += weight;
    }
    if (degree == 0) {
      ++out.cancelled_clusters;
      continue;
    }
    Vortex v;
    v.position = position / weight_sum;
    v.degree = degree;
    v.plaquettes = static_cast<int>(members.size());
    double extent = 0.0;
    for (int p : members) {
      const auto [i, j] = hits[p];
      const Eigen::Vector2d centre(g.coord(i) + 0.5 * h, g.coord(j) + 0.5 * h);
      extent = std::max(extent, (centre - v.position).norm());
    }
    v.isolation_radius = extent + h;
    // Smallest amplitude on the ring of nodes just outside the cluster.
    double ring_min = std::numeric_limits<double>::infinity();
    const double r0 = v.isolation_radius, r1 = v.isolation_radius + h;
    const int i_lo = std::max(0, static_cast<int>(std::floor((v.position.x() - r1 + 1.0) / h)));
    const int i_hi = std::min(g.n() - 1, static_cast<int>(std::ceil((v.position.x() + r1 + 1.0) / h)));
    const int j_lo = std::max(0, static_cast<int>(std::floor((v.position.y() - r1 + 1.0) / h)));
    const int j_hi = std::min(g.n() - 1, static_cast<int>(std::ceil((v.position.y() + r1 + 1.0) / h)));
    for (int j = j_lo; j <= j_hi; ++j) {
      for (int i = i_lo; i <= i_hi; ++i) {
        const Eigen::Index k = g.dof(i, j);
        if (k < 0) continue;
        const double d = std::hypot(g.x()(k) - v.position.x(), g.y()(k) - v.position.y());
        if (d >= r0 && d <= r1) ring_min = std::min(ring_min, std::abs(psi.values(k)));
      }
    }
    v.boundary_amplitude = std::isfinite(ring_min) && sup_amp > 0.0 ? ring_min / sup_amp : 0.0;
    v.isolated = v.isolation_radius < isolation_limit;
    v.amplitude_ok = v.boundary_amplitude >= amplitude_threshold;
    out.total_degree += degree;
    out.entries.push_back(v);
  }
  return out;
}

Region Region::annulus(double r1, double r2) {
  if (!(r1 >= 0.0 && r1 < r2)) throw InvalidArgument("annulus needs 0 <= R1 < R2");
  return {Kind::Annulus, r1, r2, 0.0, 0.0};
}

Region Region::disc(double r) {
  if (!(r > 0.0)) throw InvalidArgument("disc needs a positive radius");
  return {Kind::Disc, 0.0, r, 0.0, 0.0};
}

Region Region::box(double x0, double x1, double y0, double y1) {
  if (!(x0 < x1 && y0 < y1)) throw InvalidArgument("box needs X0 < X1 and Y0 < Y1");
  return {Kind::Box, x0, x1, y0, y1};
}

Region Region::parse(std::string_view text) {
  std::vector<double> values;
  std::string head;
  std::stringstream ss{std::string(text)};
  std::string part;
  bool first = true;
  while (std::getline(ss, part, ':')) {
    if (first) {
      head = part;
      first = false;
      continue;
    }
    try {
      std::size_t used = 0;
      values.push_back(std::stod(part, &used));
      if (used != part.size()) throw InvalidArgument("");
    } catch (const std::exception&) {
      throw InvalidArgument("bad region number '" + part + "'");
    }
  }
  if (head == "annulus" && values.size() == 2) return annulus(values[0], values[1]);
  if (head == "disc" && values.size() == 1) return disc(values[0]);
  if (head == "box" && values.size() == 4) return box(values[0], values[1], values[2], values[3]);
  throw InvalidArgument("bad region '" + std::string(text) + "'");
}

bool Region::contains(const Eigen::Vector2d& p) const {
  const double r = p.norm();
  switch (kind) {
    case Kind::Annulus: return r > a && r < b && r < 1.0;
    case Kind::Disc: return r < b && r < 1.0;
    case Kind::Box: return p.x() > a && p.x() < b && p.y() > c && p.y() < d && r < 1.0;
  }
  return false;
}

double Region::area_within(double inner, double outer) const {
  const double pi = std::numbers::pi;
  switch (kind) {
    case Kind::Annulus: {
      const double lo = std::max(a, inner), hi = std::min(b, outer);
      return hi > lo ? pi * (hi * hi - lo * lo) : 0.0;
    }
    case Kind::Disc: {
      const double hi = std::min(b, outer);
      return hi > inner ? pi * (hi * hi - inner * inner) : 0.0;
    }
    case Kind::Box: {
      const double full = disc_rectangle_area(a, b, c, d, outer);
      return inner > 0.0 ? full - disc_rectangle_area(a, b, c, d, inner) : full;
    }
  }
  return 0.0;
}

std::string Region::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::Annulus: os << "annulus:" << a << ':' << b; break;
    case Kind::Disc: os << "disc:" << b; break;
    case Kind::Box: os << "box:" << a << ':' << b << ':' << c << ':' << d; break;
  }
  return os.str();
}

VorticityMeasureReport vorticity_measure(const VortexSet& vortices, const Params& params, const TFSolution& tf,
                                         const Region& region) {
  if (!(params.Omega > 0.0)) throw InvalidArgument("vorticity measure needs Omega > 0");
  VorticityMeasureReport rep;
  rep.region = region;
  rep.region_area = region.area_within(0.0, 1.0);
  if (rep.region_area < 0.05) throw InvalidArgument("region area below 0.05");
  for (const auto& v : vortices.entries) {
    if (region.contains(v.position)) rep.degree_sum += v.degree;
  }
  rep.measure_value = kTwoPi / params.Omega * rep.degree_sum;
  rep.reference_value = region.area_within(tf.hole_radius, 1.0);
  rep.ratio = rep.reference_value > 0.0 ? rep.measure_value / rep.reference_value
                                        : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

CellReport good_bad_cells(const ComplexField& psi, const Params& params, const TFSolution& tf, double ell_hat,
                          const CellOptions& options) {
  const Grid& g = *psi.grid;
  if (!(ell_hat >= 3.0 * g.h())) throw InvalidArgument("cell side must be at least three grid spacings");
  CellReport rep;
  rep.ell_hat = ell_hat;
  const double max_rho = tf.max_density();
  if (options.paper_threshold) {
    const double log_delta = std::abs(std::log(params.delta));
    rep.t_threshold = params.omega / log_delta;
    if (!(rep.t_threshold < max_rho)) rep.warnings.push_back("paper threshold exceeds max rho^TF: T is empty");
  } else {
    rep.t_threshold = options.eta * max_rho;
  }
  const double log_term = std::abs(std::log(params.epsilon * params.epsilon * params.Omega));
  rep.reference = 0.5 * params.Omega * ell_hat * ell_hat * log_term;
  const double lower = std::sqrt(params.log_eps_abs / params.Omega);
  const double upper = std::min(1.0, 1.0 / (params.omega * std::abs(std::log(params.delta))));
  if (!(lower < upper)) rep.warnings.push_back("admissible cell-size window is empty at these parameters");

  // rho^TF is nondecreasing in r, so a closed cell lies in T iff its nearest
  // point meets the threshold and its farthest corner stays in the disc.
  const double half = 0.5 * ell_hat;
  const int reach = static_cast<int>(std::ceil(1.0 / ell_hat)) + 1;
  std::unordered_map<long long, int> cell_of;
  auto key = [&](int m, int n) { return static_cast<long long>(m + 4 * reach) * (8LL * reach + 1) + (n + 4 * reach); };
  for (int n = -reach; n <= reach; ++n) {
    for (int m = -reach; m <= reach; ++m) {
      const double cx = m * ell_hat, cy = n * ell_hat;
      const double near = std::hypot(std::max(0.0, std::abs(cx) - half), std::max(0.0, std::abs(cy) - half));
      const double far = std::hypot(std::abs(cx) + half, std::abs(cy) + half);
      if (far > 1.0 || tf.density(near) < rep.t_threshold) continue;
      Cell cell;
      cell.center = {cx, cy};
      cell.rho_center = tf.density(std::hypot(cx, cy));
      cell_of[key(m, n)] = static_cast<int>(rep.cells.size());
      rep.cells.push_back(cell);
    }
  }
  auto locate = [&](double x, double y) -> int {
    const int m = static_cast<int>(std::floor(x / ell_hat + 0.5));
    const int n = static_cast<int>(std::floor(y / ell_hat + 0.5));
    const auto it = cell_of.find(key(m, n));
    return it == cell_of.end() ? -1 : it->second;
  };

  const double inv_eps2 = 1.0 / (params.epsilon * params.epsilon);
  Eigen::VectorXcd u = Eigen::VectorXcd::Zero(g.size());
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    const double rho = tf.density(g.radius()(k));
    if (rho > 0.0) u(k) = psi.values(k) / std::sqrt(rho);
  }
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    const int c = locate(g.x()(k), g.y()(k));
    if (c < 0) continue;
    const double defect = 1.0 - std::norm(u(k));
    rep.cells[c].energy += g.weights()(k) * inv_eps2 * rep.cells[c].rho_center * defect * defect;
  }
  const double inv_h2 = 1.0 / (g.h() * g.h());
  for (const Edge& e : g.edges()) {
    const int c = locate(0.5 * (g.x()(e.a) + g.x()(e.b)), 0.5 * (g.y()(e.a) + g.y()(e.b)));
    if (c < 0) continue;
    const double theta = 0.5 * params.Omega * (g.x()(e.a) * g.y()(e.b) - g.x()(e.b) * g.y()(e.a));
    rep.cells[c].energy += e.weight * inv_h2 * std::norm(u(e.a) - std::polar(1.0, -theta) * u(e.b));
  }
  const WindingField wf = winding_field(psi, params.Omega);
  for (int j = 0; j < wf.side(); ++j) {
    for (int i = 0; i < wf.side(); ++i) {
      if (!wf.is_defined(i, j) || wf.at(i, j) == 0) continue;
      const int c = locate(g.coord(i) + 0.5 * g.h(), g.coord(j) + 0.5 * g.h());
      if (c >= 0) rep.cells[c].degree += wf.at(i, j);
    }
  }
  for (auto& cell : rep.cells) {
    cell.excess = cell.energy - rep.reference;
    cell.good = cell.excess <= options.slack * 2.0 * rep.reference;
    rep.bad += cell.good ? 0 : 1;
    rep.riemann_sum += cell.rho_center * ell_hat * ell_hat;
  }
  rep.bad_fraction = rep.cells.empty() ? std::numeric_limits<double>::quiet_NaN()
                                       : static_cast<double>(rep.bad) / static_cast<double>(rep.cells.size());
  if (rep.cells.empty()) rep.warnings.push_back("no cell fits inside T");
  return rep;
}

}  // namespace beclab
