#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <vector>

namespace beclab {

/// Area of the axis-aligned rectangle [x0,x1] x [y0,y1] intersected with
/// the disc of radius `radius` centred at the origin. Exact.
double disc_rectangle_area(double x0, double x1, double y0, double y1, double radius = 1.0);

/// Nearest-neighbour link of the lattice; `weight` is the clipped area of
/// the dual rectangle spanned by the link.
struct Edge {
  Eigen::Index a = 0;
  Eigen::Index b = 0;
  double weight = 0.0;
};

/// Square lattice on [-1,1]^2 restricted to nodes whose control cell
/// meets the unit disc. Degrees of freedom are the masked-in nodes.
class Grid {
 public:
  static constexpr int kMinPoints = 64;

  int n() const { return n_; }
  double h() const { return h_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(weights_.size()); }

  /// Lattice coordinate of column/row index k.
  double coord(int k) const { return static_cast<double>(2 * k - (n_ - 1)) / (n_ - 1); }

  /// Degree of freedom at lattice node (i = column/x, j = row/y), -1 if masked out.
  Eigen::Index dof(int i, int j) const { return index_[static_cast<std::size_t>(j) * n_ + i]; }
  bool inside(int i, int j) const { return dof(i, j) >= 0; }
  int column(Eigen::Index k) const { return column_[k]; }
  int row(Eigen::Index k) const { return row_[k]; }

  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::VectorXd& x() const { return x_; }
  const Eigen::VectorXd& y() const { return y_; }
  /// Distance of each node from the origin.
  const Eigen::VectorXd& radius() const { return r_; }
  std::span<const Edge> edges() const { return edges_; }

  /// Nodes with at least one missing lattice neighbour (staircase boundary).
  const std::vector<Eigen::Index>& boundary_nodes() const { return boundary_; }

 private:
  friend std::shared_ptr<const Grid> make_grid(int n);
  Grid() = default;

  int n_ = 0;
  double h_ = 0.0;
  std::vector<Eigen::Index> index_;
  std::vector<int> column_, row_;
  Eigen::VectorXd weights_, x_, y_, r_;
  std::vector<Edge> edges_;
  std::vector<Eigen::Index> boundary_;
};

/// Builds the n x n disc grid. Throws InvalidArgument for n < 64.
std::shared_ptr<const Grid> make_grid(int n);

}  // namespace beclab
