#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "beclab/error.hpp"
#include "beclab/field.hpp"
#include "beclab/tf.hpp"
#include "beclab/trial.hpp"

namespace beclab {

enum class InitKind { Uniform, TrialLattice, GiantVortex, File, Random };

std::string_view to_string(InitKind kind);

/// Starting field of the flow. Parsed from "uniform", "trial", "trial:hexagonal",
/// "giant", "giant:40", "file:PATH" or "random:SEED".
struct InitSpec {
  InitKind kind = InitKind::Uniform;
  std::uint64_t seed = 0;
  LatticeKind lattice = LatticeKind::Square;
  std::optional<int> winding;
  std::filesystem::path path;

  static InitSpec parse(std::string_view text);
  std::string describe() const;
};

/// Optional Omega ramp: `stages` flows at Omega values evenly spaced from
/// start_fraction * Omega up to (excluding) Omega, each capped at
/// iters_per_stage iterations, before the final flow at the target.
struct AnnealOptions {
  bool enabled = false;
  double start_fraction = 0.7;
  int stages = 3;
  int iters_per_stage = 300;
};

struct MinimizeOptions {
  int max_iters = 20000;
  double step = 1.0;              // initial step of the preconditioned flow
  double tol_residual = 1e-5;     // relative to 1 + ||(grad - iA) psi||_2
  InitSpec init;
  AnnealOptions anneal;
  /// Shift alpha of the preconditioner L + alpha M; <= 0 picks 2 rho^TF(1) / eps^2.
  double preconditioner_shift = 0.0;
  /// Polak-Ribiere momentum on top of the preconditioned gradient.
  bool conjugate = true;
};

struct MinimizeReport {
  ComplexField psi;
  EnergyBreakdown breakdown;
  double mu = 0.0;
  double residual_norm = 0.0;
  double residual_threshold = 0.0;
  int iters = 0;
  bool converged = false;
  /// One entry per accepted step of the final flow. A step may be accepted
  /// when the energy rises by less than its rounding level
  /// 1e-12 (|kinetic| + |centrifugal| + |interaction|), stored in
  /// energy_noise[i] for the step ending at entry i (energy_noise[0] = 0).
  std::vector<double> energy_history;
  std::vector<double> energy_noise;
  std::vector<double> residual_history;
  double sup_density = 0.0;
  std::string init;
};

/// Tolerance not reached within max_iters; carries the last iterate.
class NonConvergence : public NumericalError {
 public:
  explicit NonConvergence(MinimizeReport report);
  const MinimizeReport& report() const { return report_; }

 private:
  MinimizeReport report_;
};

/// Builds the starting field of the flow (normalized).
ComplexField initial_field(const Params& params, std::shared_ptr<const Grid> grid, const InitSpec& init);

/// Projected, preconditioned gradient flow for the discrete GP functional.
/// Throws NonConvergence when the residual tolerance is unmet and
/// NumericalError when step halving underflows.
MinimizeReport minimize(const Params& params, std::shared_ptr<const Grid> grid, const MinimizeOptions& options);
/// Same flow from an explicit starting field (normalized internally).
MinimizeReport minimize_from(const Params& params, const ComplexField& start, const MinimizeOptions& options);

/// sup |psi|^2 / rho^TF(1).
double check_sup_bound(const MinimizeReport& report, const TFSolution& tf);

struct TfDistance {
  double distance = 0.0;     // || |psi|^2 - rho^TF ||_2
  double bound_proxy = 0.0;  // sqrt(eps^2 (E - E^TF)), NaN when E < E^TF
};

TfDistance l2_distance_to_tf(const MinimizeReport& report, const TFSolution& tf, const Params& params);

}  // namespace beclab
