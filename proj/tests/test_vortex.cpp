#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "beclab/error.hpp"
#include "beclab/field.hpp"
#include "beclab/gp.hpp"
#include "beclab/params.hpp"
#include "beclab/tf.hpp"
#include "beclab/trial.hpp"
#include "beclab/vortex.hpp"

using namespace beclab;
using std::numbers::pi;

namespace {

ComplexField sample(std::shared_ptr<const Grid> grid, const std::function<Complex(double, double)>& f) {
  ComplexField psi(grid);
  for (Eigen::Index k = 0; k < grid->size(); ++k) psi.values[k] = f(grid->x()[k], grid->y()[k]);
  return psi;
}

// Lattice trial at Omega = 500 with omega = 2 (no TF hole): every core is a
// nonvanishing-amplitude zero away from the grid nodes.
struct LatticeFixture {
  Params params = derive(0.004, 500.0);
  std::shared_ptr<const Grid> grid = make_grid(256);
  TrialState trial = assemble_trial(params, grid, LatticeKind::Square);
};

const LatticeFixture& lattice_fixture() {
  static const LatticeFixture fixture;
  return fixture;
}

}  // namespace

TEST_CASE("single smooth vortex has exactly one unit plaquette") {
  const auto g = make_grid(128);
  const Eigen::Vector2d z0(0.0031, -0.0017);
  const ComplexField psi = sample(g, [&](double x, double y) {
    const Complex w(x - z0.x(), y - z0.y());
    return w * std::exp(-std::norm(w));
  });
  const WindingField wf = winding_field(psi);
  CHECK(wf.count_nonzero() == 1);
  CHECK(wf.count_degree(1) == 1);
  // Plaquette (i, j) spans [coord(i), coord(i+1)] x [coord(j), coord(j+1)].
  const int i = 63, j = 63;
  CHECK(g->coord(i) < z0.x());
  CHECK(g->coord(i + 1) > z0.x());
  CHECK(g->coord(j) < z0.y());
  CHECK(g->coord(j + 1) > z0.y());
  CHECK(wf.at(i, j) == 1);
}

TEST_CASE("a positive real field has no winding") {
  const auto g = make_grid(96);
  const WindingField wf = winding_field(sample(g, [](double x, double y) {
    return Complex(std::exp(-3.0 * (x * x + y * y)), 0.0);
  }));
  CHECK(wf.count_nonzero() == 0);
  const VortexSet vs = extract_vortices(sample(g, [](double, double) { return Complex(1.0, 0.0); }), 0.1);
  CHECK(vs.entries.empty());
  CHECK(vs.total_degree == 0);
}

TEST_CASE("undefined plaquettes at masked or vanishing corners") {
  const auto g = make_grid(65);
  // The node at the origin carries an exact zero.
  const WindingField wf = winding_field(sample(g, [](double x, double y) { return Complex(x, y); }));
  CHECK_FALSE(wf.is_defined(31, 31));
  CHECK_FALSE(wf.is_defined(32, 32));
  CHECK_FALSE(wf.is_defined(0, 0));
  CHECK(wf.is_defined(40, 40));
  CHECK(wf.count_undefined() > 4);
}

TEST_CASE("plain phase differences alias in the dense lattice") {
  const auto& fx = lattice_fixture();
  const WindingField plain = winding_field(fx.trial.psi);
  const WindingField covariant = winding_field(fx.trial.psi, fx.params.Omega);
  CHECK(plain.count_nonzero() != covariant.count_nonzero());
}

TEST_CASE("lattice trial has one unit plaquette per lattice point") {
  const auto& fx = lattice_fixture();
  const WindingField wf = winding_field(fx.trial.psi, fx.params.Omega);
  CHECK(wf.count_degree(1) == fx.trial.lattice.count);
  CHECK(wf.count_nonzero() == fx.trial.lattice.count);
}

TEST_CASE("extracted vortices sit on the lattice points") {
  const auto& fx = lattice_fixture();
  const VortexSet vs = extract_vortices(fx.trial.psi, 0.1, fx.params.Omega);
  REQUIRE(static_cast<int>(vs.entries.size()) == fx.trial.lattice.count);
  CHECK(vs.total_degree == fx.trial.lattice.count);
  const double h = fx.grid->h();
  for (const Vortex& v : vs.entries) {
    CHECK(v.degree == 1);
    double nearest = 10.0;
    for (const auto& z : fx.trial.lattice.points) nearest = std::min(nearest, (v.position - z).norm());
    // A point on or near a shared edge may be assigned to either plaquette.
    CHECK(nearest <= std::sqrt(2.0) * h);
    CHECK(v.isolated);
  }
  // (2 pi / Omega) N is the disc area up to the perimeter term bounded by 3 sqrt(Omega) points.
  const double area = 2.0 * pi / fx.params.Omega * vs.total_degree;
  CHECK(std::abs(area - pi) <= 6.0 * pi / std::sqrt(fx.params.Omega));
}

TEST_CASE("winding is additive on random rectangles") {
  const auto& fx = lattice_fixture();
  const ComplexField& psi = fx.trial.psi;
  const WindingField wf = winding_field(psi, fx.params.Omega);
  const int n = fx.grid->n();
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> pick(0, n - 1);
  int tested = 0, nontrivial = 0;
  while (tested < 100) {
    int i0 = pick(rng), i1 = pick(rng), j0 = pick(rng), j1 = pick(rng);
    if (i0 > i1) std::swap(i0, i1);
    if (j0 > j1) std::swap(j0, j1);
    if (i1 - i0 < 2 || j1 - j0 < 2) continue;
    bool in_mask = true;
    for (int i = i0; i <= i1 && in_mask; ++i) in_mask = fx.grid->inside(i, j0) && fx.grid->inside(i, j1);
    for (int j = j0; j <= j1 && in_mask; ++j) in_mask = fx.grid->inside(i0, j) && fx.grid->inside(i1, j);
    if (!in_mask) continue;
    int inside = 0;
    bool all_defined = true;
    for (int j = j0; j < j1; ++j) {
      for (int i = i0; i < i1; ++i) {
        all_defined = all_defined && wf.is_defined(i, j);
        inside += wf.at(i, j);
      }
    }
    if (!all_defined) continue;
    CHECK(contour_winding(psi, i0, j0, i1, j1, fx.params.Omega) == inside);
    nontrivial += inside != 0 ? 1 : 0;
    ++tested;
  }
  CHECK(nontrivial > 50);
}

TEST_CASE("conjugation reverses every degree") {
  const auto& fx = lattice_fixture();
  ComplexField conj = fx.trial.psi;
  conj.values = conj.values.conjugate();
  // The conjugate field lives in the gauge of -A.
  const WindingField a = winding_field(fx.trial.psi, fx.params.Omega);
  const WindingField b = winding_field(conj, -fx.params.Omega);
  REQUIRE(a.degree.size() == b.degree.size());
  for (std::size_t k = 0; k < a.degree.size(); ++k) {
    CHECK(a.defined[k] == b.defined[k]);
    if (a.defined[k]) CHECK(b.degree[k] == -a.degree[k]);
  }
}

TEST_CASE("contour winding rejects loops leaving the mask") {
  const auto& fx = lattice_fixture();
  CHECK_THROWS_AS(contour_winding(fx.trial.psi, 0, 0, 10, 10), InvalidArgument);
  CHECK_THROWS_AS(circle_winding(fx.trial.psi, 1.2), InvalidArgument);
}

TEST_CASE("regions") {
  const Region ann = Region::parse("annulus:0.5:0.8");
  CHECK(ann.kind == Region::Kind::Annulus);
  CHECK(ann.contains({0.6, 0.0}));
  CHECK_FALSE(ann.contains({0.3, 0.0}));
  CHECK(ann.area_within(0.0, 1.0) == doctest::Approx(pi * (0.64 - 0.25)).epsilon(1e-12));
  CHECK(ann.area_within(0.6, 1.0) == doctest::Approx(pi * (0.64 - 0.36)).epsilon(1e-12));

  const Region box = Region::parse("box:-0.2:0.3:0.1:0.4");
  CHECK(box.area_within(0.0, 1.0) == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(box.contains({0.0, 0.2}));
  const Region disc = Region::parse("disc:0.25");
  CHECK(disc.area_within(0.1, 1.0) == doctest::Approx(pi * (0.0625 - 0.01)).epsilon(1e-12));
  CHECK(Region::parse(ann.describe()).area_within(0.0, 1.0) == doctest::Approx(ann.area_within(0.0, 1.0)));
  CHECK_THROWS_AS(Region::parse("ring:1"), InvalidArgument);
  CHECK_THROWS_AS(Region::parse("annulus:0.8:0.5"), InvalidArgument);
}

TEST_CASE("vorticity measure inside the hole follows the lattice") {
  // The trial density vanishes in the hole, so vortices there are read off the
  // unit-modulus phase factor of the same lattice.
  const Params p = derive(0.02, 200.0);
  const TFSolution tf = solve_tf(p.omega);
  const auto grid = make_grid(256);
  const TrialState st = assemble_trial(p, grid, LatticeKind::Square);
  const VortexSet vs = extract_vortices(phase_factor(grid, st.lattice), 0.1, p.Omega);
  const Region inner = Region::disc(0.5 * tf.hole_radius);
  const VorticityMeasureReport rep = vorticity_measure(vs, p, tf, inner);

  int points = 0;
  for (const auto& z : st.lattice.points) points += inner.contains(z) ? 1 : 0;
  CHECK(rep.degree_sum == points);
  CHECK(rep.measure_value == doctest::Approx(2.0 * pi / p.Omega * points).epsilon(1e-14));
  CHECK(rep.reference_value == 0.0);
  CHECK(std::isnan(rep.ratio));
  CHECK(rep.region_area == doctest::Approx(pi * 0.25 * tf.hole_radius * tf.hole_radius).epsilon(1e-12));
  CHECK(rep.measure_value / rep.region_area == doctest::Approx(1.0).epsilon(0.3));

  const VorticityMeasureReport ann = vorticity_measure(vs, p, tf, Region::annulus(0.5, 0.9));
  CHECK(ann.reference_value == doctest::Approx(pi * (0.81 - tf.hole_radius * tf.hole_radius)).epsilon(1e-12));
  CHECK(ann.ratio == doctest::Approx(ann.measure_value / ann.reference_value).epsilon(1e-15));

  CHECK_THROWS_AS(vorticity_measure(vs, derive(0.02, 0.0), tf, inner), InvalidArgument);
  CHECK_THROWS_AS(vorticity_measure(vs, p, tf, Region::disc(0.1)), InvalidArgument);
}

TEST_CASE("cells of a lattice trial without a hole") {
  // omega = 1: T is the whole disc for eta = 0.1.
  const Params p = derive(0.01, 100.0);
  const TFSolution tf = solve_tf(p.omega);
  const auto g = make_grid(256);
  const TrialState st = assemble_trial(p, g, LatticeKind::Square);
  const double ell_hat = 0.05;
  const CellReport rep = good_bad_cells(st.psi, p, tf, ell_hat);

  // Independent count of the cells (m l, n l) whose closed square fits in the disc.
  int expected = 0;
  double riemann = 0.0;
  for (int m = -25; m <= 25; ++m) {
    for (int n = -25; n <= 25; ++n) {
      const double far = std::hypot(std::abs(m) * ell_hat + ell_hat / 2, std::abs(n) * ell_hat + ell_hat / 2);
      if (far > 1.0) continue;
      ++expected;
      riemann += tf.density(std::hypot(m * ell_hat, n * ell_hat)) * ell_hat * ell_hat;
    }
  }
  CHECK(static_cast<int>(rep.cells.size()) == expected);
  CHECK(rep.riemann_sum == doctest::Approx(riemann).epsilon(1e-12));
  CHECK(rep.riemann_sum >= 0.9);
  CHECK(rep.riemann_sum <= 1.0);
  CHECK(rep.reference == doctest::Approx(0.5 * 100.0 * ell_hat * ell_hat * std::log(100.0)).epsilon(1e-12));
  CHECK(rep.bad == static_cast<int>(std::count_if(rep.cells.begin(), rep.cells.end(), [](const Cell& c) { return !c.good; })));

  int degrees = 0;
  for (const Cell& c : rep.cells) degrees += c.degree;
  int points = 0;
  for (const auto& z : st.lattice.points) {
    const double far = std::hypot(std::abs(std::round(z.x() / ell_hat)) * ell_hat + ell_hat / 2,
                                  std::abs(std::round(z.y() / ell_hat)) * ell_hat + ell_hat / 2);
    points += far <= 1.0 ? 1 : 0;
  }
  CHECK(degrees == points);
  CHECK_THROWS_AS(good_bad_cells(st.psi, p, tf, 2.0 * g->h()), InvalidArgument);
}

TEST_CASE("vortex-free bulk cells of the giant vortex carry excess energy") {
  const Params p = derive(0.02, 200.0);
  const TFSolution tf = solve_tf(p.omega);
  const TrialState giant = giant_vortex_trial(p, make_grid(256));
  const CellReport rep = good_bad_cells(giant.psi, p, tf, 0.1);
  REQUIRE_FALSE(rep.cells.empty());
  double lo = 1e300, sum = 0.0;
  for (const Cell& c : rep.cells) {
    CHECK(c.degree == 0);
    lo = std::min(lo, c.energy);
    sum += c.energy;
  }
  // Every cell exceeds the per-cell lattice reference; with slack 1 most are bad.
  CHECK(lo > rep.reference);
  CHECK(sum / rep.cells.size() > 2.0 * rep.reference);
  CHECK(rep.bad_fraction > 0.5);
}

TEST_CASE("paper threshold warns when T is empty") {
  const Params p = derive(0.05, 60.0);
  const TFSolution tf = solve_tf(p.omega);
  CellOptions opts;
  opts.paper_threshold = true;
  const CellReport rep = good_bad_cells(assemble_trial(p, make_grid(128), LatticeKind::Square).psi, p, tf, 0.1, opts);
  CHECK(rep.t_threshold == doctest::Approx(p.omega / std::abs(std::log(p.delta))));
  if (rep.t_threshold >= tf.max_density()) {
    CHECK(rep.cells.empty());
    CHECK(std::isnan(rep.bad_fraction));
    CHECK_FALSE(rep.warnings.empty());
  }
}

TEST_CASE("cells of side 0.25 do not fit in T at (0.02, 200)") {
  // omega = 4: T is the annulus 0.68 < r < 1 and no square of side 0.25 centred
  // on the (m l, n l) lattice lies inside it.
  const Params p = derive(0.02, 200.0);
  const TFSolution tf = solve_tf(p.omega);
  const TrialState st = assemble_trial(p, make_grid(256), LatticeKind::Square);
  CellOptions opts;
  opts.slack = 0.5;
  const CellReport rep = good_bad_cells(st.psi, p, tf, 0.25, opts);
  CHECK(rep.cells.empty());
  CHECK(std::isnan(rep.bad_fraction));
  CHECK(rep.riemann_sum == 0.0);
  CHECK_FALSE(rep.warnings.empty());

  const CellReport finer = good_bad_cells(st.psi, p, tf, 0.1, opts);
  REQUIRE_FALSE(finer.cells.empty());
  for (const Cell& c : finer.cells) {
    CHECK(tf.density(c.center.norm()) >= 0.1 * tf.max_density());
    const double budget = opts.slack * p.Omega * 0.01 * std::abs(std::log(p.epsilon * p.epsilon * p.Omega));
    CHECK(c.good == (c.energy - finer.reference <= budget));
  }
}

TEST_CASE("converged minimizer: unit bulk degrees, stable under refinement") {
  const Params p = derive(0.05, 60.0);
  const TFSolution tf = solve_tf(p.omega);
  auto bulk = [&](int n) {
    const TrialState st = assemble_trial(p, make_grid(n), LatticeKind::Square);
    const MinimizeReport r = minimize_from(p, st.psi, MinimizeOptions{});
    std::vector<int> degrees;
    for (const Vortex& v : extract_vortices(r.psi, 0.1, p.Omega).entries) {
      if (v.position.norm() > tf.hole_radius) degrees.push_back(v.degree);
    }
    return degrees;
  };
  const std::vector<int> coarse = bulk(128), fine = bulk(256);
  REQUIRE_FALSE(fine.empty());
  for (int d : fine) CHECK(d == 1);
  int total_coarse = 0, total_fine = 0;
  for (int d : coarse) total_coarse += d;
  for (int d : fine) total_fine += d;
  CHECK(total_coarse == total_fine);
}
