#include "beclab/params.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "beclab/error.hpp"

namespace beclab {

Params derive(double epsilon, double Omega) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw InvalidArgument("epsilon must lie in (0, 1), got " + std::to_string(epsilon));
  }
  if (!(Omega >= 0.0) || !std::isfinite(Omega)) {
    throw InvalidArgument("Omega must be finite and nonnegative, got " + std::to_string(Omega));
  }
  Params p;
  p.epsilon = epsilon;
  p.Omega = Omega;
  p.omega = epsilon * Omega;
  p.log_eps_abs = std::abs(std::log(epsilon));
  p.delta = epsilon * epsilon * Omega * p.log_eps_abs;
  p.gamma = std::min(epsilon, epsilon * epsilon * Omega);
  return p;
}

std::string_view to_string(RegimeTag tag) {
  switch (tag) {
    case RegimeTag::FewVortex: return "FEW_VORTEX";
    case RegimeTag::LatticeSlow: return "LATTICE_SLOW";
    case RegimeTag::LatticeFast: return "LATTICE_FAST";
    case RegimeTag::GiantVortex: return "GIANT_VORTEX";
  }
  return "UNKNOWN";
}

Regime classify(const Params& p, const RegimeConstants& c) {
  Regime r;
  r.few_vortex_threshold = c.c_low * p.log_eps_abs;
  r.fast_threshold = c.c_mid / p.epsilon;
  r.giant_threshold = c.c_high / (p.epsilon * p.epsilon * p.log_eps_abs);
  if (p.Omega <= r.few_vortex_threshold) {
    r.tag = RegimeTag::FewVortex;
  } else if (p.Omega <= r.fast_threshold) {
    r.tag = RegimeTag::LatticeSlow;
  } else if (p.Omega < r.giant_threshold) {
    r.tag = RegimeTag::LatticeFast;
  } else {
    r.tag = RegimeTag::GiantVortex;
  }
  return r;
}

}  // namespace beclab
