#include "beclab/field.hpp"

#include <cmath>
#include <vector>

#include "beclab/error.hpp"

namespace beclab {

double norm_squared(const ComplexField& psi) {
  return psi.grid->weights().dot(psi.values.cwiseAbs2());
}

double l4_power4(const ComplexField& psi) {
  return psi.grid->weights().dot(psi.values.cwiseAbs2().cwiseAbs2());
}

double sup_density(const ComplexField& psi) {
  return psi.values.size() == 0 ? 0.0 : psi.values.cwiseAbs2().maxCoeff();
}

ComplexField normalized(const ComplexField& psi) {
  const double n2 = norm_squared(psi);
  if (!(n2 > 0.0)) throw InvalidArgument("cannot normalize a zero field");
  return {psi.grid, psi.values / std::sqrt(n2)};
}

GpFunctional::GpFunctional(std::shared_ptr<const Grid> grid, const Params& params)
    : grid_(std::move(grid)), params_(params) {
  const Grid& g = *grid_;
  const double inv_h2 = 1.0 / (g.h() * g.h());
  const double half_Omega = 0.5 * params.Omega;
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(g.edges().size() * 4);
  for (const Edge& e : g.edges()) {
    const double c = e.weight * inv_h2;
    // int_a^b A.dl along the straight link.
    const double theta = half_Omega * (g.x()(e.a) * g.y()(e.b) - g.x()(e.b) * g.y()(e.a));
    const Complex link = std::polar(1.0, -theta);
    triplets.emplace_back(e.a, e.a, c);
    triplets.emplace_back(e.b, e.b, c);
    triplets.emplace_back(e.a, e.b, -c * link);
    triplets.emplace_back(e.b, e.a, -c * std::conj(link));
  }
  kinetic_.resize(g.size(), g.size());
  kinetic_.setFromTriplets(triplets.begin(), triplets.end());
  potential_ = -0.25 * params.Omega * params.Omega * g.radius().array().square();
}

EnergyBreakdown GpFunctional::energy(const Eigen::VectorXcd& psi) const {
  const Eigen::VectorXd& w = grid_->weights();
  const Eigen::VectorXd rho = psi.cwiseAbs2();
  EnergyBreakdown e;
  e.kinetic = psi.dot(kinetic_ * psi).real();
  e.centrifugal = w.dot(potential_.cwiseProduct(rho));
  e.interaction = w.dot(rho.cwiseAbs2()) / (params_.epsilon * params_.epsilon);
  e.total = e.kinetic + e.centrifugal + e.interaction;
  return e;
}

Eigen::VectorXcd GpFunctional::gradient(const Eigen::VectorXcd& psi) const {
  const double g = 2.0 / (params_.epsilon * params_.epsilon);
  const Eigen::ArrayXd local = grid_->weights().array() * (potential_.array() + g * psi.cwiseAbs2().array());
  Eigen::VectorXcd out = kinetic_ * psi;
  out.array() += local * psi.array();
  return out;
}

Eigen::SparseMatrix<double> graph_laplacian(const Grid& g) {
  const double inv_h2 = 1.0 / (g.h() * g.h());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(g.edges().size() * 4);
  for (const Edge& e : g.edges()) {
    const double c = e.weight * inv_h2;
    triplets.emplace_back(e.a, e.a, c);
    triplets.emplace_back(e.b, e.b, c);
    triplets.emplace_back(e.a, e.b, -c);
    triplets.emplace_back(e.b, e.a, -c);
  }
  Eigen::SparseMatrix<double> L(g.size(), g.size());
  L.setFromTriplets(triplets.begin(), triplets.end());
  return L;
}

EnergyBreakdown gp_energy(const ComplexField& psi, const Params& params, const EnergyOptions& options) {
  if (options.require_normalized) {
    const double n2 = norm_squared(psi);
    if (std::abs(n2 - 1.0) > options.normalization_tol) {
      throw InvalidArgument("gp_energy expects a normalized field, ||psi||^2 = " + std::to_string(n2));
    }
  }
  return GpFunctional(psi.grid, params).energy(psi.values);
}

Residual gp_residual(const GpFunctional& functional, const Eigen::VectorXcd& psi) {
  const Eigen::VectorXd& w = functional.grid().weights();
  const Eigen::VectorXcd grad = functional.gradient(psi);
  Residual r;
  // For normalized psi this equals E + eps^-2 ||psi||_4^4.
  r.mu = psi.dot(grad).real() / w.dot(psi.cwiseAbs2());
  Eigen::VectorXcd res = grad.cwiseQuotient(w.cast<Complex>()) - r.mu * psi;
  r.residual_norm = std::sqrt(w.dot(res.cwiseAbs2()));
  r.field = ComplexField(functional.grid_ptr(), std::move(res));
  return r;
}

Residual gp_residual(const ComplexField& psi, const Params& params) {
  return gp_residual(GpFunctional(psi.grid, params), psi.values);
}

}  // namespace beclab
