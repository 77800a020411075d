#include "beclab/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "beclab/error.hpp"

namespace beclab {

namespace {

// int_0^x sqrt(R^2 - t^2) dt for |x| <= R.
double half_chord_primitive(double x, double R) {
  x = std::clamp(x, -R, R);
  return 0.5 * (x * std::sqrt(std::max(R * R - x * x, 0.0)) + R * R * std::asin(x / R));
}

// int_a^b clamp(c, -s(x), s(x)) dx with s(x) = sqrt(R^2 - x^2) on |x| <= R, 0 outside.
double clamped_chord_integral(double a, double b, double c, double R) {
  a = std::max(a, -R);
  b = std::min(b, R);
  if (b <= a) return 0.0;
  if (std::abs(c) >= R) {
    const double full = half_chord_primitive(b, R) - half_chord_primitive(a, R);
    return c > 0 ? full : -full;
  }
  const double xc = std::sqrt(R * R - c * c);
  std::array<double, 4> cuts{a, std::clamp(-xc, a, b), std::clamp(xc, a, b), b};
  double total = 0.0;
  const double sign = c > 0 ? 1.0 : (c < 0 ? -1.0 : 0.0);
  // Outer pieces: |x| > xc so s(x) < |c| and the clamp saturates.
  total += sign * (half_chord_primitive(cuts[1], R) - half_chord_primitive(cuts[0], R));
  total += c * (cuts[2] - cuts[1]);
  total += sign * (half_chord_primitive(cuts[3], R) - half_chord_primitive(cuts[2], R));
  return total;
}

double raw_area(double x0, double x1, double y0, double y1, double R) {
  if (x1 <= x0 || y1 <= y0) return 0.0;
  return std::max(clamped_chord_integral(x0, x1, y1, R) - clamped_chord_integral(x0, x1, y0, R), 0.0);
}

}  // namespace

double disc_rectangle_area(double x0, double x1, double y0, double y1, double radius) {
  // Reflect into a canonical orientation so symmetric rectangles get
  // bit-identical areas.
  if (x0 + x1 < 0) std::tie(x0, x1) = std::pair{-x1, -x0};
  if (y0 + y1 < 0) std::tie(y0, y1) = std::pair{-y1, -y0};
  if (std::pair{y0, y1} < std::pair{x0, x1}) {
    std::swap(x0, y0);
    std::swap(x1, y1);
  }
  return raw_area(x0, x1, y0, y1, radius);
}

std::shared_ptr<const Grid> make_grid(int n) {
  if (n < Grid::kMinPoints) {
    throw InvalidArgument("grid needs n >= 64 points per side, got " + std::to_string(n));
  }
  auto grid = std::shared_ptr<Grid>(new Grid());
  Grid& g = *grid;
  g.n_ = n;
  g.h_ = 2.0 / (n - 1);
  const double h = g.h_;
  // Cells clipped to a sliver carry no meaningful stencil; drop them.
  const double min_weight = 1e-2 * h * h;

  g.index_.assign(static_cast<std::size_t>(n) * n, -1);
  std::vector<double> w, xs, ys;
  for (int j = 0; j < n; ++j) {
    const double y = g.coord(j);
    for (int i = 0; i < n; ++i) {
      const double x = g.coord(i);
      const double area = disc_rectangle_area(x - 0.5 * h, x + 0.5 * h, y - 0.5 * h, y + 0.5 * h);
      if (area <= min_weight) continue;
      g.index_[static_cast<std::size_t>(j) * n + i] = static_cast<Eigen::Index>(w.size());
      g.column_.push_back(i);
      g.row_.push_back(j);
      w.push_back(area);
      xs.push_back(x);
      ys.push_back(y);
    }
  }
  const auto count = static_cast<Eigen::Index>(w.size());
  g.weights_ = Eigen::Map<Eigen::VectorXd>(w.data(), count);
  g.x_ = Eigen::Map<Eigen::VectorXd>(xs.data(), count);
  g.y_ = Eigen::Map<Eigen::VectorXd>(ys.data(), count);
  g.r_ = (g.x_.array().square() + g.y_.array().square()).sqrt();

  for (Eigen::Index k = 0; k < count; ++k) {
    const int i = g.column_[k], j = g.row_[k];
    const double x = g.x_(k), y = g.y_(k);
    bool on_boundary = false;
    if (i + 1 < n && g.inside(i + 1, j)) {
      const double area = disc_rectangle_area(x, x + h, y - 0.5 * h, y + 0.5 * h);
      if (area > 0.0) g.edges_.push_back({k, g.dof(i + 1, j), area});
    }
    if (j + 1 < n && g.inside(i, j + 1)) {
      const double area = disc_rectangle_area(x - 0.5 * h, x + 0.5 * h, y, y + h);
      if (area > 0.0) g.edges_.push_back({k, g.dof(i, j + 1), area});
    }
    for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      const int ii = i + di, jj = j + dj;
      if (ii < 0 || jj < 0 || ii >= n || jj >= n || !g.inside(ii, jj)) on_boundary = true;
    }
    if (on_boundary) g.boundary_.push_back(k);
  }
  return grid;
}

}  // namespace beclab
