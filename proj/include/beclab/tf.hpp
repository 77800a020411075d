#pragma once

#include <cmath>
#include <numbers>

#include "beclab/params.hpp"

namespace beclab {

/// Rotation threshold above which the TF density develops a central hole.
inline const double kOmegaHole = 4.0 / std::sqrt(std::numbers::pi);

/// Closed-form Thomas-Fermi minimizer on the unit disc at fixed omega.
/// Energies and chemical potential are stored in the epsilon^2-scaled form.
struct TFSolution {
  double omega = 0.0;
  double scaled_energy = 0.0;              // eps^2 E^TF
  double scaled_chemical_potential = 0.0;  // eps^2 mu^TF
  double hole_radius = 0.0;                // 0 when omega <= omega_h
  double omega_h = kOmegaHole;

  bool has_hole() const { return omega > omega_h; }

  /// rho^TF(r). Defined for any r >= 0; grid nodes just outside the disc
  /// use the same polynomial.
  double density(double r) const;
  /// d rho^TF / dr.
  double density_derivative(double r) const;
  /// rho^TF(1) = sup rho^TF.
  double max_density() const { return density(1.0); }
  /// ||rho^TF||_2^2 in closed form.
  double density_l2_squared() const;
};

TFSolution solve_tf(double omega);

/// E^TF = eps^-2 (eps^2 E^TF).
double tf_energy_unscaled(const Params& params);

/// Regularized TF density used by the trial state: zero in the hole,
/// quadratic ramp over a shell of width 1/Omega, rho^TF beyond.
class RegularizedDensity {
 public:
  RegularizedDensity(const TFSolution& tf, double Omega);

  double operator()(double r) const;
  double derivative(double r) const;

  const TFSolution& tf() const { return tf_; }
  double ramp_start() const { return ramp_start_; }
  double ramp_end() const { return ramp_end_; }
  /// rho^TF at the end of the ramp; also the sup-distance to rho^TF.
  double junction_value() const { return junction_; }
  bool is_regularized() const { return regularized_; }

 private:
  TFSolution tf_;
  bool regularized_ = false;
  double ramp_start_ = 0.0;
  double ramp_end_ = 0.0;
  double junction_ = 0.0;
  double Omega_ = 0.0;
};

/// Throws InvalidArgument when omega > omega_h and the ramp would leave
/// the disc (1/Omega >= 1 - R_h) or Omega <= 0.
RegularizedDensity regularized_density(const TFSolution& tf, double Omega);

}  // namespace beclab
