#include "beclab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>

namespace beclab::quad {

const GaussRule& gauss_legendre(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(n); it != cache.end()) return it->second;

  // Jacobi matrix of the Legendre recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = beta;
    jacobi(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  GaussRule rule;
  rule.nodes = eig.eigenvalues();
  rule.weights = 2.0 * eig.eigenvectors().row(0).transpose().array().square();
  // Symmetrize to remove eigen-solver noise.
  for (int k = 0; k < n / 2; ++k) {
    const double x = 0.5 * (rule.nodes(n - 1 - k) - rule.nodes(k));
    const double w = 0.5 * (rule.weights(k) + rule.weights(n - 1 - k));
    rule.nodes(k) = -x;
    rule.nodes(n - 1 - k) = x;
    rule.weights(k) = rule.weights(n - 1 - k) = w;
  }
  if (n % 2 == 1) rule.nodes(n / 2) = 0.0;
  return cache.emplace(n, std::move(rule)).first->second;
}

namespace {

// QUADPACK G7/K15 abscissae and weights.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel kronrod(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    kron += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  return {a, b, kron * half, std::abs((kron - gauss) * half)};
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 std::initializer_list<double> breakpoints, double abs_tol, double rel_tol) {
  if (b == a) return 0.0;
  std::vector<double> cuts{a};
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  std::priority_queue<Panel> panels;
  double total = 0.0, error = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (cuts[k + 1] <= cuts[k]) continue;
    Panel p = kronrod(f, cuts[k], cuts[k + 1]);
    total += p.value;
    error += p.error;
    panels.push(p);
  }
  constexpr int kMaxPanels = 20000;
  while (error > std::max(abs_tol, rel_tol * std::abs(total)) &&
         static_cast<int>(panels.size()) < kMaxPanels) {
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) break;
    const Panel left = kronrod(f, worst.a, mid);
    const Panel right = kronrod(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }
  return total;
}

double radial_integral(const std::function<double(double)>& f, double radius,
                       std::initializer_list<double> breakpoints) {
  return 2.0 * std::numbers::pi *
         integrate([&](double r) { return f(r) * r; }, 0.0, radius, breakpoints);
}

}  // namespace beclab::quad
