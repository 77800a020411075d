// Command-line front end: tf, trial, minimize, vortices, electro, sweep, crossover.

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "beclab/electro.hpp"
#include "beclab/experiments.hpp"
#include "beclab/gp.hpp"
#include "beclab/snapshot.hpp"
#include "beclab/tf.hpp"
#include "beclab/trial.hpp"
#include "beclab/vortex.hpp"

using nlohmann::json;
using namespace beclab;

namespace {

constexpr int kExitError = 1;
constexpr int kExitNonConverged = 2;
constexpr int kExitNoCrossing = 3;

json to_json(const EnergyBreakdown& e) {
  return {{"kinetic", e.kinetic}, {"centrifugal", e.centrifugal}, {"interaction", e.interaction}, {"total", e.total}};
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void emit(const json& j, const std::string& format) {
  if (format == "json") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  // One CSV record: flattened keys as the header, values on the next line.
  const json flat = j.flatten();
  std::string header, row;
  for (const auto& item : flat.items()) {
    std::string key = item.key().substr(1);
    std::replace(key.begin(), key.end(), '/', '.');
    const auto& v = item.value();
    std::string text = v.is_string() ? v.get<std::string>() : v.dump();
    if (text.find_first_of(",\"") != std::string::npos) {
      std::string quoted = "\"";
      for (char ch : text) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      text = quoted + "\"";
    }
    header += (header.empty() ? "" : ",") + key;
    row += (row.empty() ? "" : ",") + text;
  }
  std::cout << header << '\n' << row << '\n';
}

void add_format(CLI::App* app, std::string& format) {
  app->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
}

json tf_json(const TFSolution& tf, int samples) {
  json density = json::array();
  for (int i = 0; i < samples; ++i) density.push_back(tf.density(static_cast<double>(i) / (samples - 1)));
  return {{"omega", tf.omega},
          {"omega_h", tf.omega_h},
          {"scaled_energy", tf.scaled_energy},
          {"scaled_mu", tf.scaled_chemical_potential},
          {"hole_radius", tf.hole_radius},
          {"max_density", tf.max_density()},
          {"density_at", density}};
}

int run_tf(std::optional<double> omega, std::optional<double> eps, std::optional<double> Omega, int samples,
           const std::string& format) {
  json j;
  if (eps && Omega) {
    const Params p = derive(*eps, *Omega);
    j = tf_json(solve_tf(p.omega), samples);
    j["epsilon"] = p.epsilon;
    j["Omega"] = p.Omega;
    j["delta"] = p.delta;
    j["gamma"] = p.gamma;
    j["regime"] = std::string(to_string(classify(p).tag));
    j["unscaled_energy"] = tf_energy_unscaled(p);
    j["unscaled_mu"] = j["scaled_mu"].get<double>() / (p.epsilon * p.epsilon);
  } else if (omega) {
    if (*omega < 0.0) throw InvalidArgument("omega must be nonnegative");
    j = tf_json(solve_tf(*omega), samples);
  } else {
    throw InvalidArgument("tf needs --omega or both --epsilon and --Omega");
  }
  emit(j, format);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for rotating condensates in the unit disc"};
  app.require_subcommand(1);
  std::string format = "json";

  // tf
  auto* tf_cmd = app.add_subcommand("tf", "Thomas-Fermi closed forms");
  std::optional<double> tf_omega, tf_eps, tf_Omega;
  int tf_points = 512;
  tf_cmd->add_option("--omega", tf_omega, "omega = epsilon * Omega");
  tf_cmd->add_option("--epsilon", tf_eps);
  tf_cmd->add_option("--Omega", tf_Omega);
  tf_cmd->add_option("--samples", tf_points, "Radii r = k/(samples-1) for density_at")->check(CLI::Range(2, 1000000))->capture_default_str();
  add_format(tf_cmd, format);

  // trial
  auto* trial_cmd = app.add_subcommand("trial", "Vortex-lattice or giant-vortex trial state");
  double eps = 0.05, Omega = 60.0;
  int n = 256;
  std::string kind = "square", dump;
  bool giant = false, prune = false;
  std::optional<int> winding;
  std::optional<double> core;
  double off_x = 0.0, off_y = 0.0;
  trial_cmd->add_option("--epsilon", eps)->capture_default_str();
  trial_cmd->add_option("--Omega", Omega)->capture_default_str();
  trial_cmd->add_option("--n", n, "Grid points per side")->capture_default_str();
  trial_cmd->add_option("--kind", kind)->check(CLI::IsMember({"triangular", "square", "hexagonal"}))->capture_default_str();
  trial_cmd->add_flag("--giant", giant, "Giant-vortex trial instead of the lattice");
  trial_cmd->add_option("--winding", winding, "Giant-vortex winding (default round(Omega/2))");
  trial_cmd->add_flag("--prune-hole-vortices", prune);
  trial_cmd->add_option("--core-radius", core, "Override the core radius t");
  trial_cmd->add_option("--offset-x", off_x);
  trial_cmd->add_option("--offset-y", off_y);
  trial_cmd->add_option("--dump-field", dump, "Write the GPF1 snapshot");
  add_format(trial_cmd, format);

  // minimize
  auto* min_cmd = app.add_subcommand("minimize", "Discrete GP minimization");
  MinimizeOptions mopts;
  std::string init = "uniform", history;
  min_cmd->add_option("--epsilon", eps)->capture_default_str();
  min_cmd->add_option("--Omega", Omega)->capture_default_str();
  min_cmd->add_option("--n", n)->capture_default_str();
  min_cmd->add_option("--init", init, "uniform | trial[:kind] | giant[:n] | file:PATH | random:SEED")->capture_default_str();
  min_cmd->add_option("--max-iters", mopts.max_iters)->capture_default_str();
  min_cmd->add_option("--step", mopts.step)->capture_default_str();
  min_cmd->add_option("--tol", mopts.tol_residual, "Relative residual tolerance")->capture_default_str();
  min_cmd->add_flag("--anneal", mopts.anneal.enabled, "Ramp Omega up from 0.7 Omega");
  min_cmd->add_option("--dump-field", dump);
  min_cmd->add_option("--history", history, "Write the energy history CSV");
  add_format(min_cmd, format);

  // vortices
  auto* vort_cmd = app.add_subcommand("vortices", "Extract vortices from a GPF1 snapshot");
  std::string field, region_text, csv_path, json_path;
  double threshold = 0.1;
  vort_cmd->add_option("--field", field)->required();
  vort_cmd->add_option("--epsilon", eps)->capture_default_str();
  vort_cmd->add_option("--Omega", Omega)->capture_default_str();
  vort_cmd->add_option("--region", region_text, "annulus:R1:R2 | disc:R | box:X0:X1:Y0:Y1");
  vort_cmd->add_option("--threshold", threshold, "Amplitude threshold relative to sup |psi|")->capture_default_str();
  vort_cmd->add_option("--csv", csv_path, "VortexSet CSV (default stdout)");
  vort_cmd->add_option("--json", json_path, "Measure report JSON (default stdout)");

  // electro
  auto* el_cmd = app.add_subcommand("electro", "Electrostatic cell oracle");
  std::string cell = "square";
  int K = 8;
  double area = 1.0;
  el_cmd->add_option("--cell", cell)->check(CLI::IsMember({"square", "triangular", "hexagonal"}))->capture_default_str();
  el_cmd->add_option("--K", K)->check(CLI::Range(1, 12))->capture_default_str();
  el_cmd->add_option("--area", area)->capture_default_str();
  add_format(el_cmd, format);
  auto* bound_cmd = el_cmd->add_subcommand("bound", "Vortex kinetic-energy bound");
  int quad_n = 1024;
  double slack = 1.0;
  bound_cmd->add_option("--epsilon", eps)->capture_default_str();
  bound_cmd->add_option("--Omega", Omega)->capture_default_str();
  bound_cmd->add_option("--kind", kind)->check(CLI::IsMember({"triangular", "square", "hexagonal"}))->capture_default_str();
  bound_cmd->add_option("--n", quad_n, "Quadrature grid points per side")->capture_default_str();
  bound_cmd->add_option("--slack", slack)->capture_default_str();
  add_format(bound_cmd, format);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Parameter sweep");
  std::string config_path;
  std::map<std::string, std::string> overrides;
  sweep_cmd->add_option("--config", config_path, "Key-value config with [grid], [minimizer], [sweep]");
  const std::vector<std::pair<std::string, std::string>> sweep_keys = {
      {"n", "grid.n"},
      {"max_iters", "minimizer.max_iters"},
      {"step", "minimizer.step"},
      {"tol_residual", "minimizer.tol_residual"},
      {"init", "minimizer.init"},
      {"seed", "minimizer.seed"},
      {"anneal", "minimizer.anneal"},
      {"anneal_start", "minimizer.anneal_start"},
      {"preconditioner_shift", "minimizer.preconditioner_shift"},
      {"init_from_best_trial", "minimizer.init_from_best_trial"},
      {"pairs", "sweep.pairs"},
      {"path", "sweep.path"},
      {"kinds", "sweep.kinds"},
      {"output", "sweep.output"},
      {"snapshots", "sweep.snapshots"},
      {"threads", "sweep.threads"}};
  for (const auto& [flag, key] : sweep_keys) sweep_cmd->add_option("--" + flag, overrides[key], "Overrides " + key);

  // crossover
  auto* cross_cmd = app.add_subcommand("crossover", "Lattice / giant-vortex trial-energy crossover");
  CrossoverOptions copts;
  double eps_c = 0.01, lo = 1000.0, hi = 20000.0;
  cross_cmd->add_option("--epsilon", eps_c)->capture_default_str();
  cross_cmd->add_option("--lo", lo)->capture_default_str();
  cross_cmd->add_option("--hi", hi)->capture_default_str();
  cross_cmd->add_option("--n", copts.n)->capture_default_str();
  cross_cmd->add_option("--kind", kind)->check(CLI::IsMember({"triangular", "square", "hexagonal"}));
  cross_cmd->add_option("--rel-tol", copts.rel_tol)->capture_default_str();
  add_format(cross_cmd, format);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*tf_cmd) return run_tf(tf_omega, tf_eps, tf_Omega, tf_points, format);

    if (*trial_cmd) {
      const Params p = derive(eps, Omega);
      const auto grid = make_grid(n);
      TrialOptions topts;
      topts.offset = {off_x, off_y};
      topts.core_radius = core;
      topts.prune_hole_vortices = prune;
      const TrialState st =
          giant ? giant_vortex_trial(p, grid, winding) : assemble_trial(p, grid, parse_lattice_kind(kind), topts);
      json j = {{"epsilon", p.epsilon},
                {"Omega", p.Omega},
                {"n", n},
                {"kind", giant ? std::string("giant") : kind},
                {"energy", to_json(gp_energy(st.psi, p))},
                {"E_TF", tf_energy_unscaled(p)},
                {"c", st.c},
                {"t", st.lattice.core_radius},
                {"ell", st.lattice.ell},
                {"N", st.lattice.count},
                {"N_support", st.lattice.count_support},
                {"central_degree", st.lattice.central_degree},
                {"warnings", st.warnings}};
      if (!dump.empty()) write_snapshot(st.psi, dump);
      emit(j, format);
      return 0;
    }

    if (*min_cmd) {
      const Params p = derive(eps, Omega);
      mopts.init = InitSpec::parse(init);
      MinimizeReport report;
      bool converged = true;
      try {
        report = minimize(p, make_grid(n), mopts);
      } catch (const NonConvergence& e) {
        report = e.report();
        converged = false;
      }
      const TFSolution tf = solve_tf(p.omega);
      const TfDistance dist = l2_distance_to_tf(report, tf, p);
      json j = {{"status", converged ? "CONVERGED" : "NONCONVERGED"},
                {"epsilon", p.epsilon},
                {"Omega", p.Omega},
                {"n", n},
                {"init", report.init},
                {"energy", to_json(report.breakdown)},
                {"E_TF", tf_energy_unscaled(p)},
                {"mu", report.mu},
                {"residual_norm", report.residual_norm},
                {"residual_threshold", report.residual_threshold},
                {"iters", report.iters},
                {"sup_density", report.sup_density},
                {"sup_ratio", check_sup_bound(report, tf)},
                {"l2_distance_to_tf", dist.distance},
                {"l2_bound_proxy", nullable(dist.bound_proxy)}};
      if (!dump.empty()) write_snapshot(report.psi, dump);
      if (!history.empty()) {
        std::ofstream out(history);
        out.precision(17);
        out << "iter,energy,residual,rise_tolerance\n";
        for (std::size_t i = 0; i < report.energy_history.size(); ++i) {
          out << i << ',' << report.energy_history[i] << ',';
          if (i < report.residual_history.size()) out << report.residual_history[i];
          out << ',' << report.energy_noise.at(i) << '\n';
        }
        if (!out) throw InvalidArgument("cannot write " + history);
      }
      emit(j, format);
      return converged ? 0 : kExitNonConverged;
    }

    if (*vort_cmd) {
      const ComplexField psi = read_snapshot(field);
      const VortexSet vs = extract_vortices(psi, threshold, Omega);
      std::ofstream csv_file;
      std::ostream& csv = csv_path.empty() ? std::cout : (csv_file.open(csv_path), csv_file);
      csv.precision(17);
      csv << "x,y,degree,isolated,amplitude_ok\n";
      for (const auto& v : vs.entries) {
        csv << v.position.x() << ',' << v.position.y() << ',' << v.degree << ',' << (v.isolated ? "true" : "false")
            << ',' << (v.amplitude_ok ? "true" : "false") << '\n';
      }
      json j = {{"total_degree", vs.total_degree},
                {"count", vs.entries.size()},
                {"undefined_plaquettes", vs.undefined_plaquettes},
                {"cancelled_clusters", vs.cancelled_clusters},
                {"threshold", vs.threshold},
                {"grid_n", vs.grid_n}};
      if (!region_text.empty()) {
        const Params p = derive(eps, Omega);
        const auto rep = vorticity_measure(vs, p, solve_tf(p.omega), Region::parse(region_text));
        j["measure"] = {{"region", rep.region.describe()},
                        {"degree_sum", rep.degree_sum},
                        {"measure_value", rep.measure_value},
                        {"reference_value", rep.reference_value},
                        {"region_area", rep.region_area},
                        {"ratio", nullable(rep.ratio)}};
      }
      if (json_path.empty()) {
        std::cout << j.dump(2) << '\n';
      } else {
        std::ofstream(json_path) << j.dump(2) << '\n';
      }
      return 0;
    }

    if (*bound_cmd) {
      const Params p = derive(eps, Omega);
      const VortexLattice lat = build_lattice(p, parse_lattice_kind(kind));
      const KineticBound b = vortex_kinetic_bound(p, lat, solve_tf(p.omega), quad_n, slack);
      emit({{"epsilon", p.epsilon},
            {"Omega", p.Omega},
            {"kind", kind},
            {"t", lat.core_radius},
            {"lhs", b.lhs},
            {"lhs_efield", b.lhs_efield},
            {"rhs", b.rhs},
            {"log_term", b.log_term},
            {"ratio", b.ratio}},
           format);
      return 0;
    }

    if (*el_cmd) {
      const CellCharge c = CellCharge::regular(parse_cell_shape(cell), area);
      MultipoleReport m = multipole_moments(c, K);
      m.decay_exponent = fit_decay_exponent(c, 3.0 * std::sqrt(area), 10.0 * std::sqrt(area));
      json moments = json::array();
      for (int k = 1; k <= K; ++k) moments.push_back({{"k", k}, {"C", m.C(k)}, {"S", m.S(k)}});
      emit({{"cell", cell}, {"area", c.area}, {"q", m.q}, {"K", K}, {"moments", moments}, {"decay_exponent", m.decay_exponent}},
           format);
      return 0;
    }

    if (*sweep_cmd) {
      Config cfg = config_path.empty() ? Config{} : Config::load(config_path);
      for (const auto& [key, value] : overrides) {
        if (!value.empty()) cfg.set(key, value);
      }
      const SweepSpec spec = sweep_spec_from_config(cfg);
      const auto rows = run_sweep(spec);
      write_sweep_csv(std::cout, spec, rows);
      return 0;
    }

    if (*cross_cmd) {
      copts.kind = kind.empty() ? LatticeKind::Triangular : parse_lattice_kind(kind);
      try {
        const CrossoverResult r = locate_crossover(eps_c, lo, hi, copts);
        json samples = json::array();
        for (const auto& s : r.samples) {
          samples.push_back({{"Omega", s.Omega}, {"E_lattice", s.E_lattice}, {"E_giant", s.E_giant}});
        }
        emit({{"epsilon", eps_c},
              {"Omega_star", r.Omega_star},
              {"predicted", r.predicted},
              {"ratio", r.Omega_star / r.predicted},
              {"bracket", {r.lo, r.hi}},
              {"samples", samples}},
             format);
        return 0;
      } catch (const NoCrossing& e) {
        std::cerr << e.what() << '\n';
        return kExitNoCrossing;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return 0;
}
