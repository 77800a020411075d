#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "beclab/gp.hpp"

namespace beclab {

/// Flat key-value configuration with [section] headers. Keys are stored as
/// "section.key"; '#' starts a comment.
class Config {
 public:
  static Config parse(std::istream& in);
  static Config load(const std::filesystem::path& path);

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct SweepPair {
  double epsilon = 0.0;
  double Omega = 0.0;
};

/// eps -> eps / 2, Omega -> 2 Omega, `steps` pairs starting at (eps0, Omega0).
std::vector<SweepPair> scaling_path(double epsilon0, double Omega0, int steps);
/// "0.08:40,0.05:60".
std::vector<SweepPair> parse_pairs(std::string_view text);

struct SweepSpec {
  std::vector<SweepPair> pairs;
  int n = 256;
  MinimizeOptions minimizer;
  /// Start each flow from the lowest-energy lattice trial when one exists.
  bool init_from_best_trial = true;
  std::vector<LatticeKind> kinds{LatticeKind::Triangular, LatticeKind::Square, LatticeKind::Hexagonal};
  std::filesystem::path output_dir;  // empty: nothing written
  bool snapshots = false;
  int threads = 0;  // 0: BECLAB_THREADS or the hardware count
};

/// Reads the [grid], [minimizer] and [sweep] sections.
SweepSpec sweep_spec_from_config(const Config& config);

inline constexpr int kSweepSchemaVersion = 1;

struct SweepRow {
  int index = 0;
  double epsilon = 0.0;
  double Omega = 0.0;
  std::string status = "OK";  // OK, NONCONVERGED, REJECTED, FAILED
  std::string message;
  std::string regime;
  double omega = 0.0;
  double gamma = 0.0;
  double E_TF = 0.0;
  std::vector<std::optional<double>> E_trial;  // per SweepSpec::kinds
  std::optional<EnergyBreakdown> trial_breakdown;  // best kind
  std::string best_kind;
  std::optional<EnergyBreakdown> gp;
  double mu = 0.0;
  double residual = 0.0;
  int iters = 0;
  int n_vortices = 0;
  int n_vortices_support = 0;
  std::optional<double> R_trial;  // (E - E^TF) / ((Omega/2) |log gamma|)
  std::optional<double> R_gp;
  std::optional<double> sup_ratio;
  std::optional<bool> sandwich;  // E_TF <= E_GP <= min E_trial within 1e-9
  std::uint64_t seed = 0;
  double runtime = 0.0;
};

/// Number of worker threads: BECLAB_THREADS when set (>= 1), else the
/// hardware count, capped by `requested` when positive.
int worker_count(int requested);

SweepRow run_sweep_row(const SweepSpec& spec, int index);
/// Runs every pair (in parallel slots) and writes sweep.csv plus optional
/// snapshots to spec.output_dir when set. Per-row failures are recorded.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

std::vector<std::string> sweep_columns(const SweepSpec& spec);
void write_sweep_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRow>& rows);

struct CrossoverSample {
  double Omega = 0.0;
  double E_lattice = 0.0;
  double E_giant = 0.0;
};

struct CrossoverResult {
  double Omega_star = 0.0;
  double predicted = 0.0;  // 1 / (eps^2 |log eps|)
  double lo = 0.0;
  double hi = 0.0;
  std::vector<CrossoverSample> samples;
};

struct CrossoverOptions {
  int n = 192;
  LatticeKind kind = LatticeKind::Triangular;
  double rel_tol = 1e-3;
  int max_bisections = 60;
};

/// The sign of E_lattice - E_giant does not change on the range.
class NoCrossing : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Lattice and giant-vortex trial energies at (epsilon, Omega) on the grid.
CrossoverSample crossover_sample(double epsilon, double Omega, std::shared_ptr<const Grid> grid, LatticeKind kind);

/// Bisection on sign(E_lattice - E_giant) over [Omega_lo, Omega_hi].
CrossoverResult locate_crossover(double epsilon, double Omega_lo, double Omega_hi, const CrossoverOptions& options = {});

}  // namespace beclab
