#pragma once

// Executes a scenario and writes out/<scenario>/<experiment>/{report.json, table.csv, meta.json}.

#include "wwlab/scenario.hpp"

#include <chrono>
#include <concepts>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace wwlab {

enum ExitCode : int { kExitOk = 0, kExitSchema = 2, kExitHypothesis = 3, kExitNumerical = 4 };

inline constexpr const char* kFiniteDimNote =
    "finite-dimensional model: spectral measures are atomic; continuous-spectrum behaviour is represented by the "
    "geometric decay of strictly contractive channels";

struct RunOptions {
  std::filesystem::path out = "out";
  bool strict = false;
  bool write = true;
};

struct RunResult {
  int exit_code = kExitOk;
  std::string scenario;
  std::string experiment;
  std::vector<std::string> failures;  // asserted checks that did not pass
  std::vector<std::string> warnings;
  std::string error;  // message of the exception that ended the run, if any
  json report;
  std::string csv;
  std::filesystem::path dir;
};

/// CSV built row by row; numbers are written with %.17g so reruns are byte-identical.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header) { row_strings(header); }
  template <class... T>
  void row(const T&... v) {
    std::vector<std::string> cells{cell(v)...};
    row_strings(cells);
  }
  const std::string& str() const { return s_; }

 private:
  static std::string cell(double v) { return fmt(v); }
  static std::string cell(bool v) { return v ? "true" : "false"; }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
  template <std::integral I>
  static std::string cell(I v) { return std::to_string(v); }
  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s_ += ',';
      s_ += cells[i];
    }
    s_ += '\n';
  }
  std::string s_;
};

/// Averages export: (n, lambda_angle, sup_norm_one_sided, sup_norm_bilateral).
inline std::string trajectory_csv(const AverageTrajectory& t) {
  Csv csv({"n", "lambda_angle", "sup_norm_one_sided", "sup_norm_bilateral"});
  for (std::size_t i = 0; i < t.n_grid.size(); ++i)
    for (std::size_t j = 0; j < t.lambda_grid.size(); ++j)
      csv.row(t.n_grid[i], t.lambda_grid[j].turns(), t.one_sided[i][j], t.bilateral[i][j]);
  return csv.str();
}

inline json to_json(const DynamicsReport& r) {
  json j = {{"trace_preserving", r.trace_preserving},
            {"positive_on_samples", r.positive_on_samples},
            {"contraction_inf", r.contraction_inf},
            {"homomorphism", r.homomorphism},
            {"ergodic", r.ergodic},
            {"weakly_mixing", r.weakly_mixing},
            {"fixed_space_dim", r.fixed_space_dim},
            {"unimodular_spectrum", r.unimodular_spectrum},
            {"spectral_gap", r.spectral_gap},
            {"sector", to_string(r.sector)}};
  if (r.multiplicativity_witness) {
    const auto& [a, b] = *r.multiplicativity_witness;
    j["multiplicativity_witness"] = {{a.first, a.second}, {b.first, b.second}};
  }
  return j;
}

inline json to_json(const ProjectionWitness& w) {
  json methods = json::array();
  for (auto m : w.part_methods) methods.push_back(to_string(m));
  return {{"eps_achieved", w.eps_achieved}, {"delta_achieved", w.delta_achieved}, {"eps_target", w.eps_target},
          {"delta_target", w.delta_target}, {"horizon", w.horizon},             {"grid_size", w.grid_size},
          {"method", to_string(w.method)},  {"part_methods", methods},          {"rank", w.e.rank()},
          {"inconclusive", w.inconclusive}};
}

inline json to_json(const WwBoundPoint& p) {
  return {{"n", p.n},
          {"m", p.m},
          {"uniform_sup_sq", p.uniform_sup_sq},
          {"bound", p.bound},
          {"bound_padded", p.bound_padded},
          {"diag_term", p.diag_term},
          {"corr_terms", p.corr_terms},
          {"lipschitz_slack", p.lipschitz_slack}};
}

inline json to_json(const ConvergenceReport& r, const std::string& scenario) {
  json per = json::array();
  for (const auto& v : r.per_lambda) {
    const cplx t = trace(v.limit);
    per.push_back({{"angle", v.angle},
                   {"verdict", to_string(v.verdict)},
                   {"cauchy_tail", v.cauchy_tail},
                   {"final_norm", v.final_norm},
                   {"limit_trace", {t.real(), t.imag()}},
                   {"limit_norm", norm_inf(v.limit)},
                   {"limit_scalar_defect", v.limit_scalar_defect}});
  }
  return {{"scenario", scenario},
          {"mode", to_string(r.mode)},
          {"eps", r.eps},
          {"threshold", r.threshold},
          {"tau_p_perp", r.tau_p_perp},
          {"uniform_tail", r.uniform_tail},
          {"lipschitz_slack", r.lipschitz_slack},
          {"dim_k", r.dim_k},
          {"kperp_norm", r.kperp_norm},
          {"n_grid", r.n_grid},
          {"per_lambda", per},
          {"witness", to_json(r.projection)},
          {"warnings", r.warnings},
          {"vdc_chain", json::array()}};
}

namespace detail {

inline std::string verdict_csv(const ConvergenceReport& r) {
  Csv csv({"lambda_angle", "verdict", "cauchy_tail", "final_norm", "limit_norm", "limit_scalar_defect"});
  for (const auto& v : r.per_lambda)
    csv.row(v.angle, to_string(v.verdict), v.cauchy_tail, v.final_norm, norm_inf(v.limit), v.limit_scalar_defect);
  return csv.str();
}

inline std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline void run_validate(const ScenarioConfig& c, const Dynamics& d, RunResult& r) {
  const DynamicsReport rep = validate(d, c.params.samples, c.params.seed, c.sector);
  r.report["dynamics"] = to_json(rep);
  Csv csv({"quantity", "value"});
  csv.row("trace_preserving", rep.trace_preserving);
  csv.row("positive_on_samples", rep.positive_on_samples);
  csv.row("contraction_inf", rep.contraction_inf);
  csv.row("homomorphism", rep.homomorphism);
  csv.row("ergodic", rep.ergodic);
  csv.row("weakly_mixing", rep.weakly_mixing);
  csv.row("fixed_space_dim", rep.fixed_space_dim);
  csv.row("spectral_gap", rep.spectral_gap);
  for (double a : rep.unimodular_spectrum) csv.row("unimodular_angle", a);
  r.csv = csv.str();
  if (!rep.trace_preserving) r.failures.push_back("dynamics is not trace preserving");
  if (!rep.positive_on_samples) r.failures.push_back("dynamics is not positive on samples");
  if (!rep.contraction_inf) r.failures.push_back("dynamics is not an infinity-norm contraction");
}

inline void run_vdc(const ScenarioConfig& c, RunResult& r) {
  const auto& p = c.params;
  struct Row {
    VdcCertificate worst;
    std::uint64_t seed = 0;
    bool operator_ok = true;
    bool norm_ok = true;
  };
  std::vector<Row> rows(static_cast<std::size_t>(p.instances));
  parallel_for(rows.size(), [&](std::size_t i) {
    const std::uint64_t seed = p.seed + i;
    Rng rng(seed);
    const int n = p.n > 0 ? p.n : std::uniform_int_distribution<int>(1, p.n_max)(rng);
    const int dim = std::uniform_int_distribution<int>(1, p.dim_max)(rng);
    const AlgebraCtx ctx = AlgebraCtx::make(dim);
    std::vector<Operator> a;
    for (int k = 0; k < n; ++k) a.emplace_back(ctx, random_ginibre(rng, dim));
    Row row;
    row.seed = seed;
    double worst_rel = std::numeric_limits<double>::infinity();
    const int m_lo = p.m >= 0 ? p.m : 0;
    const int m_hi = p.m >= 0 ? p.m : n - 1;
    for (int m = m_lo; m <= m_hi; ++m) {
      const VdcCertificate cert = vdc_certificate(a, m);
      row.operator_ok = row.operator_ok && cert.operator_certified();
      row.norm_ok = row.norm_ok && cert.norm_certified();
      const double rel = cert.gap_min_eig / std::max(cert.gap_norm, 1e-300);
      if (rel < worst_rel) {
        worst_rel = rel;
        row.worst = cert;
      }
    }
    rows[i] = row;
  });
  Csv csv({"n", "m", "dim", "gap_min_eig", "lhs", "rhs", "seed"});
  int bad_op = 0, bad_norm = 0;
  double worst_rel = std::numeric_limits<double>::infinity();
  for (const auto& row : rows) {
    const auto& w = row.worst;
    csv.row(w.n, w.m, w.dim, w.gap_min_eig, w.lhs_norm, w.rhs_norm_bound, row.seed);
    bad_op += !row.operator_ok;
    bad_norm += !row.norm_ok;
    worst_rel = std::min(worst_rel, w.gap_min_eig / std::max(w.gap_norm, 1e-300));
  }
  r.csv = csv.str();
  r.report["instances"] = p.instances;
  r.report["padding"] = kVdcPadding;
  r.report["operator_failures"] = bad_op;
  r.report["norm_failures"] = bad_norm;
  r.report["worst_relative_gap"] = worst_rel;
  if (bad_op) r.failures.push_back(std::to_string(bad_op) + " instances fail the operator inequality");
  if (bad_norm) r.failures.push_back(std::to_string(bad_norm) + " instances fail the norm inequality");
}

inline void run_spectral(const ScenarioConfig& c, const Dynamics& d, const Operator& x, RunResult& r) {
  const int L = c.params.L >= 0 ? c.params.L : 4 * c.dim * c.dim;
  const CorrelationSequence g = correlation(d, x, L);
  const bool hom = is_homomorphism(d);
  json toeplitz = json::array();
  double min_eig = std::numeric_limits<double>::infinity();
  for (int m = 0; m <= std::min(c.params.toeplitz_m, L); ++m) {
    const double v = check_positive_definite(g, m);
    toeplitz.push_back(v);
    min_eig = std::min(min_eig, v);
  }
  r.report["L"] = L;
  r.report["homomorphism"] = hom;
  r.report["toeplitz_min_eig"] = toeplitz;
  r.report["wiener_average"] = wiener_criterion(g, L);
  r.report["notes"] = kFiniteDimNote;
  if (hom) {
    const SpectralMeasure m = spectral_measure(d, x, c.sector, L);
    json atoms = json::array();
    for (const auto& a : m.atoms) atoms.push_back({{"angle", a.angle}, {"mass", a.mass}});
    r.report["atoms"] = atoms;
    r.report["total"] = m.total;
    r.report["sum_squared_masses"] = m.sum_squared_masses();
    r.report["gamma_check_error"] = m.gamma_check_error;
    r.report["sign_convention"] = "gamma(l) = sum mass * exp(+2 pi i l angle)";
    if (m.gamma_check_error > 1e-9) r.failures.push_back("atomic reconstruction of gamma exceeds 1e-9");
    if (min_eig < -1e-10) r.failures.push_back("Toeplitz matrix of gamma is not positive semidefinite");
  } else {
    r.warnings.push_back("dynamics is not a homomorphism: no atomic measure; Toeplitz minima reported only");
  }
  Csv csv({"l", "re_gamma", "im_gamma", "abs_gamma_sq"});
  for (int l = -L; l <= L; ++l) {
    const cplx v = g(l);
    csv.row(l, v.real(), v.imag(), std::norm(v));
  }
  r.csv = csv.str();
}

inline void run_witness(const ScenarioConfig& c, const Dynamics& d, const Operator& x, RunResult& r) {
  const LambdaGrid grid = c.params.lambda_grid.build();
  const ProjectionWitness w = find_witness(d, x, c.params.eps, c.params.delta, c.params.N, grid, {c.sector});
  r.report["witness"] = to_json(w);
  Csv csv({"index", "witness_diagonal"});
  for (int i = 0; i < w.e.dim(); ++i) csv.row(i, w.e.mat()(i, i).real());
  r.csv = csv.str();
  if (w.inconclusive) r.warnings.push_back("witness missed its (eps, delta) target; achieved values reported");
}

inline void run_ww(const ScenarioConfig& c, const Dynamics& d, const Operator& x, RunResult& r) {
  const LambdaGrid grid = c.params.lambda_grid.build();
  const Mode mode = c.params.mode == "WW" ? Mode::OneSided : Mode::Bilateral;
  const ConvergenceReport rep =
      ww_verdict(d, x, c.params.eps, c.params.N, grid, mode, {c.params.threshold, c.params.delta, c.sector});
  r.report = to_json(rep, c.name);
  r.report["notes"] = kFiniteDimNote;
  r.csv = verdict_csv(rep);
  for (const auto& w : rep.warnings) r.warnings.push_back(w);
  int diverged = 0, inconclusive = 0;
  for (const auto& v : rep.per_lambda) {
    diverged += v.verdict == Verdict::Diverged;
    inconclusive += v.verdict == Verdict::Inconclusive;
  }
  if (diverged) r.failures.push_back(std::to_string(diverged) + " grid points diverge");
  if (inconclusive) r.warnings.push_back(std::to_string(inconclusive) + " grid points are inconclusive");
}

inline void run_theorem6(const ScenarioConfig& c, const Dynamics& d, const Operator& x, RunResult& r, bool strict) {
  const LambdaGrid grid = c.params.lambda_grid.build();
  Theorem6Options o;
  o.sector = c.sector;
  o.threshold = c.params.threshold;
  o.delta = c.params.delta;
  o.strict = strict;
  const Theorem6Report t = theorem6_experiment(d, x, c.params.eps, c.params.N, c.params.m_sweep, grid, o);
  r.report = to_json(t.bilateral, c.name);
  r.report["verdict"] = t.verdict;
  r.report["one_sided_uniform_tail"] = t.one_sided.uniform_tail;
  json chain = json::array();
  for (const auto& pt : t.chain) chain.push_back(to_json(pt));
  r.report["vdc_chain"] = chain;
  r.report["chain_holds"] = t.chain_holds;
  r.report["chain_holds_padded"] = t.chain_holds_padded;
  json asym = json::array();
  for (const auto& [m, v] : t.asymptotic_bound) asym.push_back({{"m", m}, {"bound", v}});
  r.report["asymptotic_bound"] = asym;
  r.report["final_uniform_sup_sq"] = t.final_uniform_sup_sq;
  r.report["last_bound"] = t.last_bound;
  r.report["tail_below_last_bound"] = t.tail_below_last_bound;
  r.report["scaling_spread"] = t.scaling_spread;
  r.report["scaling_within_factor2"] = t.scaling_within_factor2;
  r.report["orthogonality"] = t.orthogonality;
  r.report["invariance"] = t.invariance;
  r.report["closed_form_error"] = t.closed_form_error;
  r.report["dynamics"] = to_json(t.dynamics);
  r.report["notes"] = kFiniteDimNote;
  for (const auto& w : t.warnings) r.warnings.push_back(w);
  Csv csv({"n", "m", "uniform_sup_sq", "bound", "bound_padded", "lipschitz_slack"});
  for (const auto& pt : t.chain) csv.row(pt.n, pt.m, pt.uniform_sup_sq, pt.bound, pt.bound_padded, pt.lipschitz_slack);
  r.csv = csv.str();
  if (!t.chain_holds) r.failures.push_back("bound chain violated at some (n, m)");
  if (t.verdict == "none") r.failures.push_back("no bilateral convergence verdict on the grid");
  if (!t.tail_below_last_bound) r.warnings.push_back("uniform tail exceeds the bound at the largest m");
  if (!t.scaling_within_factor2) r.warnings.push_back("bound does not scale as 1/(m+1) within a factor 2");
}

inline void run_weakmix(const ScenarioConfig& c, const Dynamics& d, const Operator& x, RunResult& r) {
  const LambdaGrid grid = c.params.lambda_grid.build();
  const WeakMixingReport w =
      weak_mixing_experiment(d, x, c.params.eps, c.params.N, grid, {c.params.threshold, c.params.delta, c.sector});
  r.report = to_json(w.conv, c.name);
  r.report["max_final_ne1"] = w.max_final_ne1;
  r.report["lambda1_deviation"] = w.lambda1_deviation;
  r.report["max_limit_ne1"] = w.max_limit_ne1;
  r.report["tol_ne1"] = c.params.tol_ne1;
  r.report["tol_one"] = c.params.tol_one;
  r.report["notes"] = kFiniteDimNote;
  json curve = json::array();
  for (std::size_t i = 0; i < w.conv.n_grid.size(); ++i) {
    double mx = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j)
      if (grid[j].turns() != 0.0) mx = std::max(mx, w.conv.curve[i][j]);
    curve.push_back({{"n", w.conv.n_grid[i]}, {"max_ne1", mx}});
  }
  r.report["decay_curve"] = curve;
  for (const auto& s : w.conv.warnings) r.warnings.push_back(s);
  r.csv = verdict_csv(w.conv);
  if (w.max_final_ne1 > c.params.tol_ne1)
    r.failures.push_back("final compressed norm for lambda != 1 is " + fmt(w.max_final_ne1) + " > " + fmt(c.params.tol_ne1));
  if (w.lambda1_deviation > c.params.tol_one)
    r.failures.push_back("lambda = 1 limit deviates from tau(x) 1 by " + fmt(w.lambda1_deviation) + " > " +
                         fmt(c.params.tol_one));
}

inline void run_mean_ergodic(const ScenarioConfig& c, const Dynamics& d, const Operator& x, RunResult& r) {
  const ErgodicCurve e = mean_ergodic_check(d, x, c.params.N, {}, c.sector);
  r.report["spectral_gap"] = e.spectral_gap;
  r.report["final_deviation"] = e.deviation.back();
  Csv csv({"n", "deviation"});
  for (std::size_t i = 0; i < e.n.size(); ++i) csv.row(e.n[i], e.deviation[i]);
  r.csv = csv.str();
}

}  // namespace detail

/// Runs one scenario. Library errors are mapped to exit codes: schema 2,
/// hypothesis 3, numerical or failed assertion 4.
inline RunResult run_scenario(const ScenarioConfig& c, const RunOptions& opt = {}) {
  RunResult r;
  r.scenario = c.name;
  r.experiment = to_string(c.experiment);
  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = detail::iso_now();
  r.report = json::object();
  try {
    if (c.experiment == ExperimentKind::Vdc) {
      detail::run_vdc(c, r);
    } else {
      const AlgebraCtx ctx = c.ctx();
      const Dynamics d = build_dynamics(c.dynamics, ctx);
      const Operator x = build_observable(c.observable, d, c.sector);
      switch (c.experiment) {
        case ExperimentKind::Validate: detail::run_validate(c, d, r); break;
        case ExperimentKind::Spectral: detail::run_spectral(c, d, x, r); break;
        case ExperimentKind::Witness: detail::run_witness(c, d, x, r); break;
        case ExperimentKind::Ww: detail::run_ww(c, d, x, r); break;
        case ExperimentKind::Theorem6: detail::run_theorem6(c, d, x, r, opt.strict); break;
        case ExperimentKind::Weakmix: detail::run_weakmix(c, d, x, r); break;
        case ExperimentKind::MeanErgodic: detail::run_mean_ergodic(c, d, x, r); break;
        case ExperimentKind::Vdc: break;
      }
    }
    if (!r.failures.empty() || (opt.strict && !r.warnings.empty())) r.exit_code = kExitNumerical;
  } catch (const SchemaError& e) {
    r.exit_code = kExitSchema;
    r.error = e.what();
  } catch (const DomainError& e) {
    r.exit_code = kExitSchema;
    r.error = e.what();
  } catch (const DimensionError& e) {
    r.exit_code = kExitSchema;
    r.error = e.what();
  } catch (const HypothesisError& e) {
    r.exit_code = kExitHypothesis;
    r.error = e.what();
  } catch (const std::exception& e) {
    r.exit_code = kExitNumerical;
    r.error = e.what();
  }
  r.report["scenario"] = c.name;
  r.report["experiment"] = r.experiment;
  r.report["failures"] = r.failures;
  r.report["warnings"] = r.warnings;
  r.report["exit_code"] = r.exit_code;
  if (!r.error.empty()) r.report["error"] = r.error;

  if (opt.write) {
    r.dir = opt.out / c.name / r.experiment;
    std::filesystem::create_directories(r.dir);
    std::ofstream(r.dir / "report.json") << r.report.dump(2) << '\n';
    std::ofstream(r.dir / "table.csv") << r.csv;
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    const json meta = {{"started", started},
                       {"finished", detail::iso_now()},
                       {"elapsed_ms", ms},
                       {"threads", default_threads()},
                       {"strict", opt.strict},
                       {"config", to_json(c)}};
    std::ofstream(r.dir / "meta.json") << meta.dump(2) << '\n';
  }
  return r;
}

}  // namespace wwlab
