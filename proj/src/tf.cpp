#include "beclab/tf.hpp"

#include <algorithm>

#include "beclab/error.hpp"

namespace beclab {

namespace {
constexpr double kPi = std::numbers::pi;
}

TFSolution solve_tf(double omega) {
  if (!(omega >= 0.0)) throw InvalidArgument("omega must be nonnegative");
  TFSolution tf;
  tf.omega = omega;
  const double w2 = omega * omega;
  if (omega <= tf.omega_h) {
    tf.scaled_energy = 1.0 / kPi - w2 / 8.0 - kPi * w2 * w2 / 768.0;
    tf.scaled_chemical_potential = 2.0 / kPi - w2 / 8.0;
    tf.hole_radius = 0.0;
  } else {
    tf.scaled_energy = -w2 / 4.0 * (1.0 - 8.0 / (3.0 * std::sqrt(kPi) * omega));
    tf.scaled_chemical_potential = -w2 / 4.0 * (1.0 - 4.0 / (std::sqrt(kPi) * omega));
    tf.hole_radius = std::sqrt(1.0 - tf.omega_h / omega);
  }
  return tf;
}

double TFSolution::density(double r) const {
  const double w2 = omega * omega;
  if (omega <= omega_h) return 1.0 / kPi + w2 / 16.0 - w2 / 8.0 * (1.0 - r * r);
  return std::max(omega / (2.0 * std::sqrt(kPi)) - w2 / 8.0 * (1.0 - r * r), 0.0);
}

double TFSolution::density_derivative(double r) const {
  if (has_hole() && r < hole_radius) return 0.0;
  return omega * omega * r / 4.0;
}

double TFSolution::density_l2_squared() const {
  // ||rho||_2^2 = mu - E in scaled units.
  return scaled_chemical_potential - scaled_energy;
}

double tf_energy_unscaled(const Params& params) {
  return solve_tf(params.omega).scaled_energy / (params.epsilon * params.epsilon);
}

RegularizedDensity::RegularizedDensity(const TFSolution& tf, double Omega) : tf_(tf), Omega_(Omega) {
  if (!(Omega > 0.0)) throw InvalidArgument("regularized density needs Omega > 0");
  if (!tf.has_hole()) return;
  regularized_ = true;
  ramp_start_ = tf.hole_radius;
  ramp_end_ = tf.hole_radius + 1.0 / Omega;
  if (ramp_end_ >= 1.0) {
    throw InvalidArgument("regularization shell 1/Omega does not fit between hole and boundary");
  }
  junction_ = tf.density(ramp_end_);
}

double RegularizedDensity::operator()(double r) const {
  if (!regularized_ || r >= ramp_end_) return tf_.density(r);
  if (r <= ramp_start_) return 0.0;
  const double s = r - ramp_start_;
  return junction_ * Omega_ * Omega_ * s * s;
}

double RegularizedDensity::derivative(double r) const {
  if (!regularized_ || r >= ramp_end_) return tf_.density_derivative(r);
  if (r <= ramp_start_) return 0.0;
  return 2.0 * junction_ * Omega_ * Omega_ * (r - ramp_start_);
}

RegularizedDensity regularized_density(const TFSolution& tf, double Omega) {
  return RegularizedDensity(tf, Omega);
}

}  // namespace beclab
