#include "beclab/gp.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>

#include "beclab/snapshot.hpp"

namespace beclab {

std::string_view to_string(InitKind kind) {
  switch (kind) {
    case InitKind::Uniform: return "uniform";
    case InitKind::TrialLattice: return "trial";
    case InitKind::GiantVortex: return "giant";
    case InitKind::File: return "file";
    case InitKind::Random: return "random";
  }
  return "unknown";
}

namespace {

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw InvalidArgument("bad " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

InitSpec InitSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  InitSpec spec;
  if (head == "uniform" || head == "UNIFORM") {
    spec.kind = InitKind::Uniform;
  } else if (head == "trial" || head == "TRIAL_LATTICE") {
    spec.kind = InitKind::TrialLattice;
    if (!arg.empty()) spec.lattice = parse_lattice_kind(arg);
  } else if (head == "giant" || head == "GIANT_VORTEX") {
    spec.kind = InitKind::GiantVortex;
    if (!arg.empty()) spec.winding = parse_number<int>(arg, "winding");
  } else if (head == "file" || head == "FILE") {
    spec.kind = InitKind::File;
    if (arg.empty()) throw InvalidArgument("file init needs a path");
    spec.path = std::string(arg);
  } else if (head == "random" || head == "RANDOM") {
    spec.kind = InitKind::Random;
    if (!arg.empty()) spec.seed = parse_number<std::uint64_t>(arg, "seed");
  } else {
    throw InvalidArgument("unknown init '" + std::string(text) + "'");
  }
  return spec;
}

std::string InitSpec::describe() const {
  std::string out(to_string(kind));
  switch (kind) {
    case InitKind::TrialLattice: out += ":" + std::string(to_string(lattice)); break;
    case InitKind::GiantVortex:
      if (winding) out += ":" + std::to_string(*winding);
      break;
    case InitKind::File: out += ":" + path.string(); break;
    case InitKind::Random: out += ":" + std::to_string(seed); break;
    case InitKind::Uniform: break;
  }
  return out;
}

NonConvergence::NonConvergence(MinimizeReport report)
    : NumericalError("minimizer did not reach the residual tolerance: residual " +
                     std::to_string(report.residual_norm) + " > " + std::to_string(report.residual_threshold) +
                     " after " + std::to_string(report.iters) + " iterations"),
      report_(std::move(report)) {}

ComplexField initial_field(const Params& params, std::shared_ptr<const Grid> grid, const InitSpec& init) {
  switch (init.kind) {
    case InitKind::Uniform:
      return normalized(ComplexField(grid, Eigen::VectorXcd::Ones(grid->size())));
    case InitKind::TrialLattice:
      return assemble_trial(params, grid, init.lattice).psi;
    case InitKind::GiantVortex:
      return giant_vortex_trial(params, grid, init.winding).psi;
    case InitKind::File: {
      ComplexField psi = read_snapshot(init.path);
      if (psi.grid->n() != grid->n()) {
        throw InvalidArgument("snapshot grid n = " + std::to_string(psi.grid->n()) + " does not match n = " +
                              std::to_string(grid->n()));
      }
      return normalized(ComplexField(grid, psi.values));
    }
    case InitKind::Random: {
      std::mt19937_64 rng(init.seed);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      Eigen::VectorXcd v(grid->size());
      for (Eigen::Index k = 0; k < v.size(); ++k) {
        const double a = u(rng);
        const double b = u(rng);
        v(k) = Complex(1.0 + 0.5 * a, 0.5 * b);
      }
      return normalized(ComplexField(grid, v));
    }
  }
  throw InvalidArgument("unknown init kind");
}

namespace {

using Factorization = Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>;

/// Solves (L + alpha M) z = rhs for complex rhs (real and imaginary parts as two columns).
Eigen::VectorXcd apply_preconditioner(const Factorization& solver, const Eigen::VectorXcd& rhs) {
  Eigen::MatrixXd b(rhs.size(), 2);
  b.col(0) = rhs.real();
  b.col(1) = rhs.imag();
  const Eigen::MatrixXd z = solver.solve(b);
  Eigen::VectorXcd out(rhs.size());
  out.real() = z.col(0);
  out.imag() = z.col(1);
  return out;
}

/// Re sum_k w_k conj(a_k) b_k.
double inner(const Eigen::VectorXd& w, const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  return (w.array() * (a.array().conjugate() * b.array()).real()).sum();
}

void project_out(const Eigen::VectorXd& w, const Eigen::VectorXcd& psi, Eigen::VectorXcd& d) {
  const Complex num = (w.cast<Complex>().array() * psi.array().conjugate() * d.array()).sum();
  const double den = w.dot(psi.cwiseAbs2());
  d -= (num / den) * psi;
}

struct FlowResult {
  Eigen::VectorXcd psi;
  int iters = 0;
  bool converged = false;
  double residual = 0.0;
  double threshold = 0.0;
  std::vector<double> energy;
  std::vector<double> noise;
  std::vector<double> residuals;
};

FlowResult run_flow(const GpFunctional& F, Eigen::VectorXcd psi, const MinimizeOptions& options, int max_iters,
                    const Factorization& solver) {
  const Eigen::VectorXd& w = F.grid().weights();
  auto normalize = [&](Eigen::VectorXcd& v) { v /= std::sqrt(w.dot(v.cwiseAbs2())); };
  normalize(psi);

  FlowResult out;
  double energy = F.energy(psi).total;
  out.energy.push_back(energy);
  out.noise.push_back(0.0);
  double tau = options.step;
  const double tau_floor = options.step * 1e-14;
  int streak = 0;
  Eigen::VectorXcd d_prev, r_prev;
  double rz_prev = 0.0;

  for (;;) {
    const Residual res = gp_residual(F, psi);
    const EnergyBreakdown parts = F.energy(psi);
    const double kinetic = std::max(0.0, parts.kinetic);
    out.residual = res.residual_norm;
    out.threshold = options.tol_residual * (1.0 + std::sqrt(kinetic));
    out.residuals.push_back(res.residual_norm);
    if (out.residual <= out.threshold) {
      out.converged = true;
      break;
    }
    if (out.iters >= max_iters) break;

    const Eigen::VectorXcd& r = res.field.values;
    Eigen::VectorXcd z = apply_preconditioner(solver, w.cast<Complex>().cwiseProduct(r));
    project_out(w, psi, z);
    const double rz = inner(w, z, r);
    Eigen::VectorXcd d = z;
    if (options.conjugate && rz_prev > 0.0) {
      const double beta = std::max(0.0, (rz - inner(w, z, r_prev)) / rz_prev);
      if (beta > 0.0) {
        d = z + beta * d_prev;
        project_out(w, psi, d);
        if (inner(w, d, r) <= 0.0) d = z;
      }
    }
    const double slope = 2.0 * inner(w, d, r);

    // Energy differences below this level are rounding noise.
    const double noise = 1e-12 * (std::abs(parts.kinetic) + std::abs(parts.centrifugal) + std::abs(parts.interaction));

    // Backtracking: halve the step until the energy does not increase.
    Eigen::VectorXcd trial;
    double trial_energy = 0.0;
    for (;;) {
      trial = psi - tau * d;
      normalize(trial);
      trial_energy = F.energy(trial).total;
      if (trial_energy <= energy + noise) break;
      tau *= 0.5;
      streak = 0;
      if (tau < tau_floor) throw NumericalError("gradient-flow step underflow (backtracking collapsed)");
    }
    // Secant refinement from the directional derivatives at 0 and tau; it
    // stays informative when energy differences drown in rounding.
    const double slope_tau = 2.0 * inner(w, d, gp_residual(F, trial).field.values);
    if (slope - slope_tau > 0.0) {
      const double s = std::clamp(tau * slope / (slope - slope_tau), 0.25 * tau, 4.0 * tau);
      if (std::abs(s - tau) > 0.1 * tau) {
        Eigen::VectorXcd alt = psi - s * d;
        normalize(alt);
        const double alt_energy = F.energy(alt).total;
        if (alt_energy <= std::min(trial_energy, energy) + noise) {
          trial = std::move(alt);
          trial_energy = alt_energy;
        }
      }
    }
    psi = std::move(trial);
    energy = trial_energy;
    out.energy.push_back(energy);
    out.noise.push_back(noise);
    ++out.iters;
    if (++streak >= 20) {
      tau *= 1.1;
      streak = 0;
    }
    d_prev = std::move(d);
    r_prev = r;
    rz_prev = rz;
  }
  out.psi = std::move(psi);
  return out;
}

MinimizeReport run_minimize(const Params& params, const ComplexField& start, const MinimizeOptions& options) {
  if (!(options.step > 0.0)) throw InvalidArgument("minimizer step must be positive");
  if (!(options.tol_residual > 0.0)) throw InvalidArgument("tol_residual must be positive");
  if (options.max_iters < 0) throw InvalidArgument("max_iters must be nonnegative");
  const auto grid = start.grid;
  const Eigen::VectorXd& w = grid->weights();

  double alpha = options.preconditioner_shift;
  if (!(alpha > 0.0)) {
    alpha = std::max(1.0, 2.0 * solve_tf(params.omega).max_density() / (params.epsilon * params.epsilon));
  }
  Eigen::SparseMatrix<double> P = graph_laplacian(*grid);
  for (Eigen::Index k = 0; k < P.rows(); ++k) P.coeffRef(k, k) += alpha * w(k);
  Factorization solver(P);
  if (solver.info() != Eigen::Success) throw NumericalError("preconditioner factorization failed");

  Eigen::VectorXcd psi = normalized(start).values;
  int total_iters = 0;
  if (options.anneal.enabled && params.Omega > 0.0) {
    const auto& a = options.anneal;
    for (int s = 0; s < a.stages; ++s) {
      const double Omega_s = params.Omega * (a.start_fraction + (1.0 - a.start_fraction) * s / a.stages);
      const GpFunctional Fs(grid, derive(params.epsilon, Omega_s));
      FlowResult stage = run_flow(Fs, psi, options, a.iters_per_stage, solver);
      psi = std::move(stage.psi);
      total_iters += stage.iters;
    }
  }

  const GpFunctional F(grid, params);
  FlowResult flow = run_flow(F, psi, options, options.max_iters, solver);

  MinimizeReport report;
  report.psi = ComplexField(grid, std::move(flow.psi));
  report.breakdown = F.energy(report.psi.values);
  report.mu = report.breakdown.total + l4_power4(report.psi) / (params.epsilon * params.epsilon);
  report.residual_norm = flow.residual;
  report.residual_threshold = flow.threshold;
  report.iters = total_iters + flow.iters;
  report.converged = flow.converged;
  report.energy_history = std::move(flow.energy);
  report.energy_noise = std::move(flow.noise);
  report.residual_history = std::move(flow.residuals);
  report.sup_density = sup_density(report.psi);
  if (!report.converged) throw NonConvergence(std::move(report));
  return report;
}

}  // namespace

MinimizeReport minimize(const Params& params, std::shared_ptr<const Grid> grid, const MinimizeOptions& options) {
  MinimizeReport report = [&] {
    try {
      return run_minimize(params, initial_field(params, grid, options.init), options);
    } catch (NonConvergence& e) {
      MinimizeReport r = e.report();
      r.init = options.init.describe();
      throw NonConvergence(std::move(r));
    }
  }();
  report.init = options.init.describe();
  return report;
}

MinimizeReport minimize_from(const Params& params, const ComplexField& start, const MinimizeOptions& options) {
  MinimizeReport report = run_minimize(params, start, options);
  report.init = "field";
  return report;
}

double check_sup_bound(const MinimizeReport& report, const TFSolution& tf) {
  return report.sup_density / tf.max_density();
}

TfDistance l2_distance_to_tf(const MinimizeReport& report, const TFSolution& tf, const Params& params) {
  const Grid& g = *report.psi.grid;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    const double diff = std::norm(report.psi.values(k)) - tf.density(g.radius()(k));
    acc += g.weights()(k) * diff * diff;
  }
  TfDistance out;
  out.distance = std::sqrt(acc);
  const double gap = params.epsilon * params.epsilon * (report.breakdown.total - tf_energy_unscaled(params));
  out.bound_proxy = gap >= 0.0 ? std::sqrt(gap) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace beclab
