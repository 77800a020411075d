#pragma once

#include <string_view>

namespace beclab {

/// Physical parameters of the rotating condensate and the derived
/// asymptotic scales. Immutable once built by derive().
struct Params {
  double epsilon = 0.0;      // coupling is 1/epsilon^2
  double Omega = 0.0;        // angular velocity
  double omega = 0.0;        // epsilon * Omega
  double delta = 0.0;        // epsilon^2 Omega |log epsilon|
  double gamma = 0.0;        // min(epsilon, epsilon^2 Omega)
  double log_eps_abs = 0.0;  // |log epsilon|, natural log
};

/// Builds Params; throws InvalidArgument unless 0 < epsilon < 1 and Omega >= 0.
Params derive(double epsilon, double Omega);

enum class RegimeTag { FewVortex, LatticeSlow, LatticeFast, GiantVortex };

std::string_view to_string(RegimeTag tag);

struct RegimeConstants {
  double c_low = 1.0;
  double c_mid = 1.0;
  double c_high = 1.0;
};

struct Regime {
  RegimeTag tag = RegimeTag::FewVortex;
  double few_vortex_threshold = 0.0;  // c_low |log eps|
  double fast_threshold = 0.0;        // c_mid / eps
  double giant_threshold = 0.0;       // c_high / (eps^2 |log eps|)
};

Regime classify(const Params& params, const RegimeConstants& constants = {});

}  // namespace beclab
