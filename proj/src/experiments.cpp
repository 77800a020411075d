#include "beclab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "beclab/snapshot.hpp"
#include "beclab/vortex.hpp"

namespace beclab {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw InvalidArgument("bad number for " + what + ": '" + text + "'");
}

std::string fmt(double v) {
  if (std::isnan(v)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "NA"; }

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Config Config::parse(std::istream& in) {
  Config cfg;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw InvalidArgument("config line " + std::to_string(lineno) + ": bad section header");
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw InvalidArgument("config line " + std::to_string(lineno) + ": empty key");
    cfg.set(section.empty() ? key : section + "." + key, trim(std::string_view(body).substr(eq + 1)));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config " + path.string());
  return parse(in);
}

std::optional<std::string> Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  return v ? to_double(*v, key) : fallback;
}

int Config::get_int(const std::string& key, int fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  const double d = to_double(*v, key);
  if (d != std::floor(d)) throw InvalidArgument("expected an integer for " + key);
  return static_cast<int>(d);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw InvalidArgument("expected a boolean for " + key);
}

std::vector<SweepPair> scaling_path(double epsilon0, double Omega0, int steps) {
  if (steps < 1) throw InvalidArgument("scaling path needs steps >= 1");
  std::vector<SweepPair> out;
  double eps = epsilon0, Omega = Omega0;
  for (int s = 0; s < steps; ++s) {
    out.push_back({eps, Omega});
    eps *= 0.5;
    Omega *= 2.0;
  }
  return out;
}

std::vector<SweepPair> parse_pairs(std::string_view text) {
  std::vector<SweepPair> out;
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw InvalidArgument("pair '" + item + "' is not epsilon:Omega");
    out.push_back({to_double(trim(item.substr(0, colon)), "epsilon"), to_double(trim(item.substr(colon + 1)), "Omega")});
  }
  return out;
}

SweepSpec sweep_spec_from_config(const Config& c) {
  SweepSpec spec;
  spec.n = c.get_int("grid.n", spec.n);
  auto& m = spec.minimizer;
  m.max_iters = c.get_int("minimizer.max_iters", m.max_iters);
  m.step = c.get_double("minimizer.step", m.step);
  m.tol_residual = c.get_double("minimizer.tol_residual", m.tol_residual);
  if (const auto init = c.get("minimizer.init")) {
    m.init = InitSpec::parse(*init);
    spec.init_from_best_trial = false;
  }
  if (c.has("minimizer.seed")) m.init.seed = static_cast<std::uint64_t>(c.get_int("minimizer.seed", 0));
  m.anneal.enabled = c.get_bool("minimizer.anneal", m.anneal.enabled);
  m.anneal.start_fraction = c.get_double("minimizer.anneal_start", m.anneal.start_fraction);
  m.preconditioner_shift = c.get_double("minimizer.preconditioner_shift", m.preconditioner_shift);
  spec.init_from_best_trial = c.get_bool("minimizer.init_from_best_trial", spec.init_from_best_trial);

  if (const auto pairs = c.get("sweep.pairs")) spec.pairs = parse_pairs(*pairs);
  if (const auto path = c.get("sweep.path")) {
    std::vector<double> v;
    std::stringstream ss(*path);
    std::string part;
    while (std::getline(ss, part, ':')) v.push_back(to_double(trim(part), "sweep.path"));
    if (v.size() != 3) throw InvalidArgument("sweep.path must be eps0:Omega0:steps");
    if (v[2] != std::floor(v[2])) throw InvalidArgument("sweep.path steps must be an integer");
    const auto more = scaling_path(v[0], v[1], static_cast<int>(v[2]));
    spec.pairs.insert(spec.pairs.end(), more.begin(), more.end());
  }
  if (const auto kinds = c.get("sweep.kinds")) {
    spec.kinds.clear();
    std::stringstream ss(*kinds);
    std::string part;
    while (std::getline(ss, part, ',')) spec.kinds.push_back(parse_lattice_kind(trim(part)));
  }
  if (const auto out = c.get("sweep.output")) spec.output_dir = *out;
  spec.snapshots = c.get_bool("sweep.snapshots", spec.snapshots);
  spec.threads = c.get_int("sweep.threads", spec.threads);
  return spec;
}

int worker_count(int requested) {
  int count = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("BECLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) count = static_cast<int>(v);
  }
  if (requested > 0) count = std::min(count, requested);
  return count;
}

SweepRow run_sweep_row(const SweepSpec& spec, int index) {
  const auto start = std::chrono::steady_clock::now();
  SweepRow row;
  row.index = index;
  row.epsilon = spec.pairs.at(static_cast<std::size_t>(index)).epsilon;
  row.Omega = spec.pairs.at(static_cast<std::size_t>(index)).Omega;
  row.E_trial.assign(spec.kinds.size(), std::nullopt);
  row.seed = spec.minimizer.init.seed + static_cast<std::uint64_t>(index);
  auto finish = [&] {
    row.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
  };

  Params p;
  try {
    p = derive(row.epsilon, row.Omega);
  } catch (const InvalidArgument& e) {
    row.status = "REJECTED";
    row.message = e.what();
    return finish();
  }
  try {
    row.regime = std::string(to_string(classify(p).tag));
    row.omega = p.omega;
    row.gamma = p.gamma;
    row.E_TF = tf_energy_unscaled(p);
    const TFSolution tf = solve_tf(p.omega);
    const auto grid = make_grid(spec.n);
    const double log_gamma = p.gamma > 0.0 ? std::abs(std::log(p.gamma)) : 0.0;
    auto ratio = [&](double E) -> std::optional<double> {
      if (!(p.Omega > 0.0 && log_gamma > 0.0)) return std::nullopt;
      return (E - row.E_TF) / (0.5 * p.Omega * log_gamma);
    };

    std::optional<ComplexField> best_psi;
    std::optional<double> best_energy;
    std::vector<std::string> notes;
    for (std::size_t k = 0; k < spec.kinds.size(); ++k) {
      try {
        const TrialState trial = assemble_trial(p, grid, spec.kinds[k]);
        const EnergyBreakdown e = gp_energy(trial.psi, p);
        row.E_trial[k] = e.total;
        if (!best_energy || e.total < *best_energy) {
          best_energy = e.total;
          best_psi = trial.psi;
          row.trial_breakdown = e;
          row.best_kind = std::string(to_string(spec.kinds[k]));
        }
      } catch (const InvalidArgument& e) {
        notes.push_back(std::string(to_string(spec.kinds[k])) + ": " + e.what());
      }
    }
    if (best_energy) row.R_trial = ratio(*best_energy);

    MinimizeOptions opts = spec.minimizer;
    if (opts.init.kind == InitKind::Random) opts.init.seed = row.seed;
    MinimizeReport report;
    try {
      if (spec.init_from_best_trial && best_psi) {
        report = minimize_from(p, *best_psi, opts);
      } else {
        report = minimize(p, grid, opts);
      }
    } catch (const NonConvergence& e) {
      report = e.report();
      row.status = "NONCONVERGED";
    }
    row.gp = report.breakdown;
    row.mu = report.mu;
    row.residual = report.residual_norm;
    row.iters = report.iters;
    row.R_gp = ratio(report.breakdown.total);
    row.sup_ratio = check_sup_bound(report, tf);
    const VortexSet vs = extract_vortices(report.psi, 0.1, p.Omega);
    row.n_vortices = static_cast<int>(vs.entries.size());
    for (const auto& v : vs.entries) row.n_vortices_support += v.position.norm() > tf.hole_radius ? 1 : 0;
    if (best_energy) {
      const double slack = 1e-9 * std::max(1.0, std::abs(row.E_TF));
      row.sandwich = row.E_TF <= report.breakdown.total + slack && report.breakdown.total <= *best_energy + slack;
    }
    if (spec.snapshots && !spec.output_dir.empty()) {
      write_snapshot(report.psi, spec.output_dir / ("row" + std::to_string(index) + ".gpf"));
    }
    for (const auto& note : notes) row.message += (row.message.empty() ? "" : "; ") + note;
  } catch (const std::exception& e) {
    row.status = "FAILED";
    row.message = e.what();
  }
  return finish();
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  const int count = static_cast<int>(spec.pairs.size());
  if (count == 0) throw InvalidArgument("sweep has no (epsilon, Omega) pairs");
  if (!spec.output_dir.empty()) std::filesystem::create_directories(spec.output_dir);
  std::vector<SweepRow> rows(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < count; i = next++) rows[static_cast<std::size_t>(i)] = run_sweep_row(spec, i);
  };
  const int workers = std::min(count, worker_count(spec.threads));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (!spec.output_dir.empty()) {
    std::ofstream out(spec.output_dir / "sweep.csv");
    write_sweep_csv(out, spec, rows);
    if (!out) throw InvalidArgument("cannot write sweep.csv in " + spec.output_dir.string());
  }
  return rows;
}

std::vector<std::string> sweep_columns(const SweepSpec& spec) {
  std::vector<std::string> cols = {"schema_version", "index", "epsilon", "Omega", "status", "regime", "omega", "gamma",
                                   "E_TF"};
  for (auto k : spec.kinds) cols.push_back("E_trial_" + std::string(to_string(k)));
  for (const char* c : {"best_kind", "trial_kinetic", "trial_centrifugal", "trial_interaction", "E_GP", "gp_kinetic",
                        "gp_centrifugal", "gp_interaction", "mu", "residual", "iters", "n_vortices",
                        "n_vortices_support", "R_trial", "R_gp", "sup_ratio", "sandwich", "seed", "runtime_s",
                        "message"}) {
    cols.emplace_back(c);
  }
  return cols;
}

void write_sweep_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  const auto cols = sweep_columns(spec);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : rows) {
    std::vector<std::string> f = {std::to_string(kSweepSchemaVersion), std::to_string(r.index), fmt(r.epsilon),
                                  fmt(r.Omega), r.status};
    const bool ran = r.status != "REJECTED";
    f.push_back(ran ? r.regime : "NA");
    f.push_back(ran ? fmt(r.omega) : "NA");
    f.push_back(ran ? fmt(r.gamma) : "NA");
    f.push_back(ran ? fmt(r.E_TF) : "NA");
    for (std::size_t k = 0; k < spec.kinds.size(); ++k) f.push_back(k < r.E_trial.size() ? fmt(r.E_trial[k]) : "NA");
    f.push_back(r.best_kind.empty() ? "NA" : r.best_kind);
    const auto& tb = r.trial_breakdown;
    f.push_back(tb ? fmt(tb->kinetic) : "NA");
    f.push_back(tb ? fmt(tb->centrifugal) : "NA");
    f.push_back(tb ? fmt(tb->interaction) : "NA");
    const auto& gb = r.gp;
    f.push_back(gb ? fmt(gb->total) : "NA");
    f.push_back(gb ? fmt(gb->kinetic) : "NA");
    f.push_back(gb ? fmt(gb->centrifugal) : "NA");
    f.push_back(gb ? fmt(gb->interaction) : "NA");
    f.push_back(gb ? fmt(r.mu) : "NA");
    f.push_back(gb ? fmt(r.residual) : "NA");
    f.push_back(gb ? std::to_string(r.iters) : "NA");
    f.push_back(gb ? std::to_string(r.n_vortices) : "NA");
    f.push_back(gb ? std::to_string(r.n_vortices_support) : "NA");
    f.push_back(fmt(r.R_trial));
    f.push_back(fmt(r.R_gp));
    f.push_back(fmt(r.sup_ratio));
    f.push_back(r.sandwich ? (*r.sandwich ? "true" : "false") : "NA");
    f.push_back(std::to_string(r.seed));
    f.push_back(fmt(r.runtime));
    f.push_back(quote(r.message));
    for (std::size_t i = 0; i < f.size(); ++i) out << (i ? "," : "") << f[i];
    out << '\n';
  }
}

CrossoverSample crossover_sample(double epsilon, double Omega, std::shared_ptr<const Grid> grid, LatticeKind kind) {
  const Params p = derive(epsilon, Omega);
  CrossoverSample s;
  s.Omega = Omega;
  s.E_lattice = gp_energy(assemble_trial(p, grid, kind).psi, p).total;
  s.E_giant = gp_energy(giant_vortex_trial(p, grid).psi, p).total;
  return s;
}

CrossoverResult locate_crossover(double epsilon, double Omega_lo, double Omega_hi, const CrossoverOptions& options) {
  if (!(Omega_lo > 0.0 && Omega_hi > Omega_lo)) throw InvalidArgument("crossover range must satisfy 0 < lo < hi");
  const auto grid = make_grid(options.n);
  CrossoverResult res;
  res.predicted = 1.0 / (epsilon * epsilon * std::abs(std::log(epsilon)));
  auto sign_at = [&](double Omega) {
    res.samples.push_back(crossover_sample(epsilon, Omega, grid, options.kind));
    return res.samples.back().E_lattice - res.samples.back().E_giant > 0.0;
  };
  double lo = Omega_lo, hi = Omega_hi;
  const bool s_lo = sign_at(lo);
  const bool s_hi = sign_at(hi);
  if (s_lo == s_hi) {
    throw NoCrossing("NO_CROSSING: E_lattice - E_giant keeps one sign on [" + std::to_string(lo) + ", " +
                     std::to_string(hi) + "]");
  }
  for (int it = 0; it < options.max_bisections && hi - lo > options.rel_tol * lo; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sign_at(mid) == s_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  res.lo = lo;
  res.hi = hi;
  res.Omega_star = 0.5 * (lo + hi);
  return res;
}

}  // namespace beclab
