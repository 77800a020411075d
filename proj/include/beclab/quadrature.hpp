#pragma once

#include <Eigen/Dense>
#include <functional>
#include <initializer_list>
#include <vector>

namespace beclab::quad {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Nodes and weights of the order-`n` Gauss-Legendre rule (Golub-Welsch).
/// Rules are cached per order; the returned reference stays valid.
const GaussRule& gauss_legendre(int n);

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b]. Interior
/// `breakpoints` inside (a, b) start the subdivision so kinks are resolved.
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::initializer_list<double> breakpoints = {},
                 double abs_tol = 1e-13, double rel_tol = 1e-12);

/// Integral over the disc of radius `radius` of a radial function,
/// 2 pi int_0^R f(r) r dr.
double radial_integral(const std::function<double(double)>& f, double radius,
                       std::initializer_list<double> breakpoints = {});

}  // namespace beclab::quad
