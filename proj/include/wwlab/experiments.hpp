#pragma once

// Experiments: equicontinuity witnesses, Wiener-Wintner convergence verdicts,
// the mean ergodic check, the weak-mixing dichotomy and the uniform bound
// experiment for ergodic homomorphisms.

#include "wwlab/vdc.hpp"

#include <array>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

namespace wwlab {

// ---------------------------------------------------------------------------
// Witness projections

enum class WitnessMethod { SpectralCut, GreedyPeel, Meet };

inline std::string to_string(WitnessMethod m) {
  switch (m) {
    case WitnessMethod::SpectralCut: return "SpectralCut";
    case WitnessMethod::GreedyPeel: return "GreedyPeel";
    case WitnessMethod::Meet: return "Meet";
  }
  return "?";
}

struct ProjectionWitness {
  Projection e = Projection::identity(AlgebraCtx{});
  double eps_achieved = 0.0;    // tau(1 - e)
  double delta_achieved = 0.0;  // max over n <= N and the grid of ||e a_n(x,lambda) e||
  double eps_target = 0.0;
  double delta_target = 0.0;
  int horizon = 0;
  std::size_t grid_size = 0;
  WitnessMethod method = WitnessMethod::SpectralCut;
  std::vector<WitnessMethod> part_methods;  // one per nonzero positive part
  bool inconclusive = false;

  bool eps_met() const { return eps_achieved <= eps_target + 1e-12; }
  bool delta_met() const { return delta_achieved <= delta_target; }
};

struct WitnessOptions {
  Sector sector = Sector::Full;
  int subgrid_points = 32;
};

/// max over n in `record_n` and lambda in the grid of ||e a_n(x,lambda) e||_inf.
inline double compressed_sup(const Dynamics& d, const Operator& x, const Projection& e, std::span<const int> record_n,
                             const LambdaGrid& grid, Sector sector) {
  const Mat& E = e.mat();
  const bool diag = sector == Sector::Diagonal && is_exactly_diagonal(E);
  const double scale = std::sqrt(static_cast<double>(x.dim()));
  double best = 0.0;
  accumulate_weighted(
      d, x, grid, record_n,
      [&](int, std::span<const Vec> avg) {
        for (const auto& c : avg) {
          if (diag) {
            for (Eigen::Index i = 0; i < c.size(); ++i)
              if (E(i, i).real() > 0.5) best = std::max(best, std::abs(c(i)) * scale);
            continue;
          }
          const Mat a = E * from_coords(x.ctx(), c, sector).mat() * E;
          if (a.norm() <= best) continue;
          best = std::max(best, op_norm(a));
        }
      },
      {sector, EvalPath::Naive});
  return best;
}

namespace detail {

struct JordanParts {
  std::array<Operator, 4> parts;  // x = (x1 - x2) + i (x3 - x4), all x_j >= 0
};

inline std::pair<Operator, Operator> jordan(const Operator& h) {
  const int n = h.dim();
  if (is_exactly_diagonal(h.mat())) {
    Mat pos = Mat::Zero(n, n), neg = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      const double v = h.mat()(i, i).real();
      (v >= 0 ? pos(i, i) : neg(i, i)) = std::abs(v);
    }
    return {Operator(h.ctx(), pos), Operator(h.ctx(), neg)};
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h.mat()));
  const Mat& v = es.eigenvectors();
  const Eigen::VectorXd ev = es.eigenvalues();
  const Eigen::VectorXd p = ev.cwiseMax(0.0);
  const Eigen::VectorXd m = (-ev).cwiseMax(0.0);
  return {Operator(h.ctx(), hermitian_part(v * p.cast<cplx>().asDiagonal() * v.adjoint())),
          Operator(h.ctx(), hermitian_part(v * m.cast<cplx>().asDiagonal() * v.adjoint()))};
}

inline JordanParts positive_parts(const Operator& x) {
  const Operator re(x.ctx(), hermitian_part(x.mat()));
  const Operator im(x.ctx(), hermitian_part(x.mat() * cplx(0.0, -1.0)));  // (x - x*)/(2i)
  auto [x1, x2] = jordan(re);
  auto [x3, x4] = jordan(im);
  return {{x1, x2, x3, x4}};
}

/// Projection for one positive part: spectral cut of z^2 = sum a_n(x_j)^2 over
/// the subgrid, with greedy peeling when the cut exceeds the trace budget.
inline std::pair<Projection, WitnessMethod> part_projection(const Dynamics& d, const Operator& xj, double budget,
                                                            double target, std::span<const int> subgrid,
                                                            Sector sector) {
  const AlgebraCtx ctx = xj.ctx();
  const int n = xj.dim();
  std::vector<Mat> avgs;
  const LambdaGrid one = LambdaGrid::single(UnitAngle::from_turns(0.0));
  accumulate_weighted(
      d, xj, one, subgrid,
      [&](int, std::span<const Vec> avg) { avgs.push_back(hermitian_part(from_coords(ctx, avg[0], sector).mat())); },
      {sector, EvalPath::Naive});

  Mat z2 = Mat::Zero(n, n);
  for (const auto& a : avgs) z2.noalias() += a * a;
  const Projection cut = spectral_projection(Operator(ctx, hermitian_part(z2)), -std::numeric_limits<double>::infinity(),
                                             target * target);
  if (cut.defect() <= budget + 1e-12) return {cut, WitnessMethod::SpectralCut};

  Mat e = Mat::Identity(n, n);
  int removed = 0;
  while (true) {
    double worst = 0.0;
    std::size_t at = 0;
    for (std::size_t i = 0; i < avgs.size(); ++i) {
      const double v = op_norm(e * avgs[i] * e);
      if (v > worst) {
        worst = v;
        at = i;
      }
    }
    if (worst <= target) break;
    if (static_cast<double>(removed + 1) / n > budget + 1e-12) break;
    const Mat c = hermitian_part(e * avgs[at] * e);
    Vec v;
    if (is_exactly_diagonal(c)) {
      Eigen::Index i = 0;
      c.diagonal().real().maxCoeff(&i);
      v = Vec::Zero(n);
      v(i) = 1.0;
    } else {
      Eigen::SelfAdjointEigenSolver<Mat> es(c);
      v = es.eigenvectors().col(n - 1);
    }
    e -= v * v.adjoint();
    if (!is_exactly_diagonal(e)) e = hermitian_part(e);
    ++removed;
  }
  return {Projection(Operator(ctx, e)), WitnessMethod::GreedyPeel};
}

}  // namespace detail

/// Projection e with small tau(e-perp) making every compression e a_n(x,lambda) e
/// (n <= N, lambda in the grid) small. The achieved pair is verified directly.
inline ProjectionWitness find_witness(const Dynamics& d, const Operator& x, double eps_budget, double delta_target,
                                      int N, const LambdaGrid& grid, WitnessOptions opt = {}) {
  require_same_dim(d.ctx(), x.ctx());
  if (!(eps_budget > 0.0 && eps_budget < 1.0)) throw DomainError("witness budget eps must lie in (0,1)");
  if (!(delta_target > 0.0)) throw DomainError("witness target delta must be positive");
  if (N < 1) throw DomainError("witness horizon N must be >= 1");
  const AlgebraCtx ctx = x.ctx();

  ProjectionWitness w{Projection::identity(ctx)};
  w.eps_target = eps_budget;
  w.delta_target = delta_target;
  w.horizon = N;
  w.grid_size = grid.size();

  const auto parts = detail::positive_parts(x);
  const std::vector<int> subgrid = log_grid(N, opt.subgrid_points);
  std::vector<Projection> ps;
  for (const auto& xj : parts.parts) {
    if (norm_inf(xj) <= ctx.tol) continue;
    auto [e, m] = detail::part_projection(d, xj, eps_budget / 4.0, delta_target / 24.0, subgrid, opt.sector);
    ps.push_back(std::move(e));
    w.part_methods.push_back(m);
  }
  if (!ps.empty()) w.e = meet(std::span<const Projection>(ps));
  if (ps.size() > 1) {
    w.method = WitnessMethod::Meet;
  } else if (ps.size() == 1) {
    w.method = w.part_methods.front();
  }

  std::vector<int> all(static_cast<std::size_t>(N));
  std::iota(all.begin(), all.end(), 1);
  w.eps_achieved = w.e.defect();
  w.delta_achieved = compressed_sup(d, x, w.e, all, grid, opt.sector);
  w.inconclusive = !w.eps_met() || !w.delta_met();
  return w;
}

// ---------------------------------------------------------------------------
// Convergence verdicts

enum class Verdict { Converged, Diverged, Inconclusive };
enum class Mode { OneSided, Bilateral };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Converged: return "Converged";
    case Verdict::Diverged: return "Diverged";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}
inline std::string to_string(Mode m) { return m == Mode::OneSided ? "WW" : "bWW"; }

struct LambdaVerdict {
  double angle = 0.0;
  Operator limit = Operator::zero(AlgebraCtx{});  // x_lambda
  double cauchy_tail = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  double limit_scalar_defect = 0.0;  // ||x_lambda - tau(x_lambda) 1||_inf
  double final_norm = 0.0;           // compressed ||a_N(x,lambda)||
};

struct ConvergenceReport {
  Mode mode = Mode::Bilateral;
  double eps = 0.0;
  double threshold = 1e-5;
  std::vector<LambdaVerdict> per_lambda;
  double uniform_tail = 0.0;
  ProjectionWitness projection;
  Projection p = Projection::identity(AlgebraCtx{});
  double tau_p_perp = 0.0;
  std::vector<int> n_grid;
  std::size_t window_start = 0;  // first index of the tail window in n_grid
  double lipschitz_slack = 0.0;
  int dim_k = 0;
  double kperp_norm = 0.0;
  /// [n index][lambda index] compressed norms of a_n(x, lambda)
  std::vector<std::vector<double>> curve;
  std::vector<std::string> warnings;

  bool all_converged() const {
    for (const auto& l : per_lambda)
      if (l.verdict != Verdict::Converged) return false;
    return true;
  }
};

struct VerdictOptions {
  double threshold = 1e-5;
  double delta = 0.1;  // witness target for the K-perp part
  Sector sector = Sector::Full;
};

/// 24 log-spaced points up to N/2 and 8 evenly spaced points on [N/2, N].
inline std::vector<int> verdict_n_grid(int N) {
  if (N < 2) return {1};
  std::vector<int> g = log_grid(std::max(1, N / 2), 24);
  for (int i = 0; i < 8; ++i) {
    const int n = N / 2 + static_cast<int>(std::lround(static_cast<double>(N - N / 2) * (i + 1) / 8.0));
    if (n > g.back()) g.push_back(n);
  }
  if (g.back() != N) g.push_back(N);
  return g;
}

namespace detail {

/// Grouped Kronecker part: sum over angle clusters of y_c with alpha(y_c) = mu_c y_c.
struct KPart {
  std::vector<double> angles;
  std::vector<Mat> blocks;
};

inline KPart group_k_part(const EigenSplit& split, const Vec& coeffs, AlgebraCtx ctx) {
  std::vector<double> angles;
  for (const auto& b : split.basis) angles.push_back(b.angle);
  KPart k;
  for (const auto& cl : cluster_angles(angles)) {
    Vec c = Vec::Zero(split.basis_coords.rows());
    for (auto i : cl.members) c += coeffs(static_cast<Eigen::Index>(i)) * split.basis_coords.col(static_cast<Eigen::Index>(i));
    k.angles.push_back(cl.angle);
    k.blocks.push_back(from_coords(ctx, c, split.sector).mat());
  }
  return k;
}

inline Mat k_average(const KPart& k, double lambda_turns, long long n, int dim) {
  Mat s = Mat::Zero(dim, dim);
  for (std::size_t c = 0; c < k.blocks.size(); ++c) s += geometric_mean(lambda_turns + k.angles[c], n) * k.blocks[c];
  return s;
}

inline Mat k_limit(const KPart& k, double lambda_turns, int dim) {
  Mat s = Mat::Zero(dim, dim);
  for (std::size_t c = 0; c < k.blocks.size(); ++c)
    if (circle_distance(lambda_turns + k.angles[c], 0.0) <= 1e-9) s += k.blocks[c];
  return s;
}

inline double compress_norm(const Mat& a, const Mat& p, Mode mode) {
  return mode == Mode::Bilateral ? op_norm(p * a * p) : op_norm(a * p);
}

}  // namespace detail

/// Per-lambda convergence verdicts for a_n(x, lambda) compressed by a projection
/// p = e ^ f ^ g: e a witness for the K-perp part, f and g the identity (the
/// K part converges in norm by its closed form, and all iterates are bounded).
inline ConvergenceReport ww_verdict(const Dynamics& d, const Operator& x, double eps, int N, const LambdaGrid& grid,
                                    Mode mode, VerdictOptions opt = {}) {
  require_same_dim(d.ctx(), x.ctx());
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("verdict eps must lie in (0,1)");
  if (N < 2) throw DomainError("verdict horizon N must be >= 2");
  const AlgebraCtx ctx = x.ctx();
  const int dim = x.dim();
  if (opt.sector == Sector::Diagonal && !in_sector(x, opt.sector))
    throw DomainError("observable is not in the diagonal sector");

  ConvergenceReport r{mode, eps, opt.threshold};
  r.projection = ProjectionWitness{Projection::identity(ctx)};
  r.p = Projection::identity(ctx);

  const EigenSplit split = eigen_split(d, opt.sector);
  if (!split.warning.empty()) r.warnings.push_back(split.warning);
  const KroneckerSplit ks = kronecker_split(split, x);
  const detail::KPart kp = detail::group_k_part(split, ks.coeffs, ctx);
  r.dim_k = split.dim_k();
  r.kperp_norm = norm2(ks.x_perp);

  const bool has_perp = norm_inf(ks.x_perp) > 1e-13 * std::max(1.0, norm_inf(x));
  if (has_perp) {
    r.projection = find_witness(d, ks.x_perp, eps / 3.0, opt.delta, N, grid, {opt.sector});
    if (r.projection.inconclusive)
      r.warnings.push_back("witness for the K-perp part missed its (eps, delta) target");
  } else {
    r.projection.eps_target = eps / 3.0;
    r.projection.delta_target = opt.delta;
    r.projection.horizon = N;
    r.projection.grid_size = grid.size();
  }
  const Projection id = Projection::identity(ctx);
  const Projection parts[] = {r.projection.e, id, id};
  r.p = meet(std::span<const Projection>(parts));
  r.tau_p_perp = r.p.defect();
  const Mat& P = r.p.mat();

  r.n_grid = verdict_n_grid(N);
  r.window_start = 0;
  while (r.window_start < r.n_grid.size() && 2 * r.n_grid[r.window_start] < N) ++r.window_start;
  r.lipschitz_slack = lipschitz_slack(x, N, grid);

  const std::size_t G = grid.size();
  std::vector<std::vector<Mat>> window(G);  // K-perp averages on the tail window
  std::vector<Mat> perp_final(G, Mat::Zero(dim, dim));
  std::size_t idx = 0;
  auto record = [&](int n, std::span<const Vec> avg) {
    std::vector<double> row(G);
    parallel_for(G, [&](std::size_t j) {
      const Mat ap = has_perp ? from_coords(ctx, avg[j], opt.sector).mat() : Mat::Zero(dim, dim);
      const Mat full = ap + detail::k_average(kp, grid[j].turns(), n, dim);
      row[j] = detail::compress_norm(full, P, mode);
      if (idx >= r.window_start) window[j].push_back(ap);
      if (n == N) perp_final[j] = ap;
    });
    r.curve.push_back(std::move(row));
    ++idx;
  };
  if (has_perp) {
    accumulate_weighted(d, ks.x_perp, grid, r.n_grid, record, {opt.sector, EvalPath::Auto});
  } else {
    const std::vector<Vec> zeros(G, Vec::Zero(sector_size(dim, opt.sector)));
    for (int n : r.n_grid) record(n, zeros);
  }

  r.per_lambda.resize(G);
  parallel_for(G, [&](std::size_t j) {
    LambdaVerdict& v = r.per_lambda[j];
    v.angle = grid[j].turns();
    const auto& w = window[j];
    double tail = 0.0;
    std::vector<double> steps;
    for (std::size_t a = 0; a < w.size(); ++a) {
      for (std::size_t b = a + 1; b < w.size(); ++b) tail = std::max(tail, detail::compress_norm(w[a] - w[b], P, mode));
      if (a + 1 < w.size()) steps.push_back(detail::compress_norm(w[a + 1] - w[a], P, mode));
    }
    v.cauchy_tail = tail;
    if (tail <= opt.threshold) {
      v.verdict = Verdict::Converged;
    } else if (!steps.empty() && std::is_sorted(steps.begin(), steps.end())) {
      v.verdict = Verdict::Diverged;
    } else {
      v.verdict = Verdict::Inconclusive;
    }
    v.limit = Operator(ctx, detail::k_limit(kp, v.angle, dim) + perp_final[j]);
    v.limit_scalar_defect = op_norm(v.limit.mat() - trace(v.limit) * Mat::Identity(dim, dim));
    v.final_norm = r.curve.back()[j];
  });
  for (const auto& v : r.per_lambda) r.uniform_tail = std::max(r.uniform_tail, v.cauchy_tail);
  return r;
}

/// Refinement p_lambda = p ^ e_lambda with tau(p - p_lambda) <= nu, where e_lambda
/// removes the dominant right-singular directions of a_{n0}(x,lambda) - x_lambda.
struct Refinement {
  double angle = 0.0;
  Projection p_lambda = Projection::identity(AlgebraCtx{});
  double tau_p_minus_p_lambda = 0.0;
  double tail_p = 0.0;         // sup over the tail window of the compressed ||a_n - x_lambda||
  double tail_p_lambda = 0.0;  // same with p_lambda
  bool below_p = false;        // p_lambda <= p
};

inline Refinement refine_projection(const ConvergenceReport& r, const Dynamics& d, const Operator& x,
                                    std::size_t lambda_idx, double nu, Sector sector = Sector::Full) {
  if (lambda_idx >= r.per_lambda.size()) throw DomainError("lambda index outside the report");
  if (!(nu > 0.0)) throw DomainError("refinement needs nu > 0");
  const AlgebraCtx ctx = x.ctx();
  const int dim = x.dim();
  const LambdaVerdict& v = r.per_lambda[lambda_idx];
  const LambdaGrid one = LambdaGrid::single(UnitAngle::from_turns(v.angle));
  std::vector<int> win(r.n_grid.begin() + static_cast<std::ptrdiff_t>(r.window_start), r.n_grid.end());
  std::vector<Mat> diffs;
  accumulate_weighted(
      d, x, one, win,
      [&](int, std::span<const Vec> avg) { diffs.push_back(from_coords(ctx, avg[0], sector).mat() - v.limit.mat()); },
      {sector, EvalPath::Naive});

  const int k = static_cast<int>(std::floor(nu * dim + 1e-12));
  Mat e = Mat::Identity(dim, dim);
  if (k > 0 && !diffs.empty()) {
    Eigen::JacobiSVD<Mat> svd(diffs.front() * r.p.mat(), Eigen::ComputeFullV);
    const Mat vk = svd.matrixV().leftCols(k);
    e = hermitian_part(e - vk * vk.adjoint());
  }
  Refinement out{v.angle, meet(r.p, Projection(Operator(ctx, e)))};
  out.tau_p_minus_p_lambda = r.p.measure() - out.p_lambda.measure();
  out.below_p = leq(out.p_lambda, r.p);
  for (const auto& dm : diffs) {
    out.tail_p = std::max(out.tail_p, detail::compress_norm(dm, r.p.mat(), r.mode));
    out.tail_p_lambda = std::max(out.tail_p_lambda, detail::compress_norm(dm, out.p_lambda.mat(), r.mode));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mean ergodic check

struct ErgodicCurve {
  std::vector<int> n;
  std::vector<double> deviation;  // ||a_n(x) - tau(x) 1||_2
  double spectral_gap = 0.0;
};

inline ErgodicCurve mean_ergodic_check(const Dynamics& d, const Operator& x, int N, std::vector<int> n_grid = {},
                                       Sector sector = Sector::Full) {
  require_same_dim(d.ctx(), x.ctx());
  if (N < 1) throw DomainError("mean ergodic check needs N >= 1");
  const DynamicsReport rep = validate(d, 8, 0, sector);
  if (!rep.ergodic)
    throw HypothesisError("mean ergodic check requires ergodic dynamics: fixed space has dimension " +
                          std::to_string(rep.fixed_space_dim));
  if (n_grid.empty()) n_grid = log_grid(N, 48);
  std::sort(n_grid.begin(), n_grid.end());
  n_grid.erase(std::unique(n_grid.begin(), n_grid.end()), n_grid.end());
  if (n_grid.front() < 1 || n_grid.back() > N) throw DomainError("n grid must lie in [1, N]");
  ErgodicCurve c;
  c.spectral_gap = rep.spectral_gap;
  const Vec target = to_coords(trace(x) * Operator::identity(x.ctx()), sector);
  const LambdaGrid one = LambdaGrid::single(UnitAngle::from_turns(0.0));
  accumulate_weighted(
      d, x, one, n_grid,
      [&](int n, std::span<const Vec> avg) {
        c.n.push_back(n);
        c.deviation.push_back((avg[0] - target).norm());
      },
      {sector, EvalPath::Naive});
  return c;
}

// ---------------------------------------------------------------------------
// Weak mixing

struct WeakMixingReport {
  ConvergenceReport conv;
  double max_final_ne1 = 0.0;      // max over lambda != 1 of ||p a_N(x,lambda) p||
  double lambda1_deviation = 0.0;  // ||x_1 - tau(x) 1||_inf
  double max_limit_ne1 = 0.0;      // max over lambda != 1 of ||x_lambda||_inf
  bool dichotomy(double tol_ne1 = 1e-5, double tol_one = 1e-6) const {
    return max_final_ne1 <= tol_ne1 && lambda1_deviation <= tol_one;
  }
};

inline WeakMixingReport weak_mixing_experiment(const Dynamics& d, const Operator& x, double eps, int N,
                                               const LambdaGrid& grid, VerdictOptions opt = {}) {
  const DynamicsReport rep = validate(d, 8, 0, opt.sector);
  if (!rep.weakly_mixing)
    throw HypothesisError("weak mixing experiment requires weakly mixing dynamics (1 the only unimodular eigenvalue)");
  WeakMixingReport w{ww_verdict(d, x, eps, N, grid, Mode::Bilateral, opt)};
  const cplx tx = trace(x);
  const Mat id = Mat::Identity(x.dim(), x.dim());
  bool saw_one = false;
  for (const auto& v : w.conv.per_lambda) {
    if (v.angle == 0.0) {
      saw_one = true;
      w.lambda1_deviation = op_norm(v.limit.mat() - tx * id);
    } else {
      w.max_final_ne1 = std::max(w.max_final_ne1, v.final_norm);
      w.max_limit_ne1 = std::max(w.max_limit_ne1, norm_inf(v.limit));
    }
  }
  if (!saw_one) w.conv.warnings.push_back("lambda grid does not contain 1");
  return w;
}

// ---------------------------------------------------------------------------
// Uniform bound experiment for ergodic homomorphisms

struct Theorem6Options {
  Sector sector = Sector::Full;
  double threshold = 1e-5;
  double delta = 0.1;
  bool strict = false;
  int chain_points = 16;  // log-spaced n values for the bound chain
};

struct Theorem6Report {
  DynamicsReport dynamics;
  ConvergenceReport bilateral;
  ConvergenceReport one_sided;
  std::string verdict;  // "WW", "bWW" or "none"
  double orthogonality = 0.0;   // |(x_K, x_perp)|
  double invariance = 0.0;      // ||P_K alpha(x_perp)||_2
  double kperp_norm = 0.0;
  double closed_form_error = 0.0;  // max ||a_n(x_K,lambda) - closed form||_2-Frobenius bound
  std::vector<WwBoundPoint> chain;
  bool chain_holds = false;
  bool chain_holds_padded = false;
  std::vector<std::pair<int, double>> asymptotic_bound;  // (m, value)
  double final_uniform_sup_sq = 0.0;  // mean-zero part at n = N
  double last_bound = 0.0;            // bound at n = N, largest m
  bool tail_below_last_bound = false;
  double scaling_spread = 0.0;  // max/min over m of (m+1) * bound at n = N
  bool scaling_within_factor2 = false;
  std::vector<std::string> warnings;
};

inline Theorem6Report theorem6_experiment(const Dynamics& d, const Operator& x, double eps, int N,
                                          std::vector<int> m_sweep, const LambdaGrid& grid, Theorem6Options opt = {}) {
  require_same_dim(d.ctx(), x.ctx());
  if (N < 2) throw DomainError("experiment horizon N must be >= 2");
  if (m_sweep.empty()) throw DomainError("m sweep must be nonempty");
  std::sort(m_sweep.begin(), m_sweep.end());
  if (m_sweep.front() < 0 || m_sweep.back() > N - 1) throw DomainError("m sweep must lie in [0, N-1]");
  if (!is_homomorphism(d)) throw HypothesisError("hypothesis violated: alpha is not a homomorphism");
  Theorem6Report r;
  r.dynamics = validate(d, 16, 0, opt.sector);
  if (!r.dynamics.trace_preserving) throw HypothesisError("hypothesis violated: tau o alpha != tau");
  if (!r.dynamics.contraction_inf) throw HypothesisError("hypothesis violated: alpha is not an infinity-norm contraction");
  if (!r.dynamics.ergodic) {
    const std::string msg = "alpha is not ergodic on the " + to_string(opt.sector) +
                            " sector (fixed space dimension " + std::to_string(r.dynamics.fixed_space_dim) + ")";
    if (opt.strict) throw HypothesisError("hypothesis violated: " + msg);
    r.warnings.push_back(msg);
  }

  const AlgebraCtx ctx = x.ctx();
  const int dim = x.dim();
  const EigenSplit split = eigen_split(d, opt.sector);
  const KroneckerSplit ks = kronecker_split(split, x);
  r.orthogonality = std::abs(inner(ks.x_k, ks.x_perp));
  r.invariance = kperp_invariance_defect(d, split, ks.x_perp);
  r.kperp_norm = norm2(ks.x_perp);

  // closed form of the K part against direct summation
  const detail::KPart kp = detail::group_k_part(split, ks.coeffs, ctx);
  const std::vector<int> check_n = log_grid(N, 16);
  accumulate_weighted(
      d, ks.x_k, grid, check_n,
      [&](int n, std::span<const Vec> avg) {
        for (std::size_t j = 0; j < avg.size(); ++j) {
          const Mat diff = from_coords(ctx, avg[j], opt.sector).mat() - detail::k_average(kp, grid[j].turns(), n, dim);
          r.closed_form_error = std::max(r.closed_form_error, diff.norm());
        }
      },
      {opt.sector, EvalPath::Auto});

  VerdictOptions vo{opt.threshold, opt.delta, opt.sector};
  r.bilateral = ww_verdict(d, x, eps, N, grid, Mode::Bilateral, vo);
  r.one_sided = ww_verdict(d, x, eps, N, grid, Mode::OneSided, vo);
  r.verdict = r.one_sided.all_converged() ? "WW" : (r.bilateral.all_converged() ? "bWW" : "none");

  // bound chain on the mean-zero part with p = 1
  const Operator x0 = x - trace(x) * Operator::identity(ctx);
  std::vector<int> chain_n = log_grid(N, opt.chain_points);
  r.chain = ww_bound_sweep(d, x0, Projection::identity(ctx), chain_n, m_sweep, grid, opt.sector);
  r.chain_holds = r.chain_holds_padded = true;
  for (const auto& pt : r.chain) {
    r.chain_holds = r.chain_holds && pt.holds();
    r.chain_holds_padded = r.chain_holds_padded && pt.holds_padded();
  }
  const CorrelationSequence g = correlation(d, x0, m_sweep.back());
  for (int m : m_sweep) r.asymptotic_bound.emplace_back(m, ww_bound_asymptotic(g, m));

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& pt : r.chain) {
    if (pt.n != N) continue;
    r.final_uniform_sup_sq = pt.uniform_sup_sq;
    if (pt.m == m_sweep.back()) r.last_bound = pt.bound;
    const double scaled = (pt.m + 1) * pt.bound;
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  r.tail_below_last_bound = r.final_uniform_sup_sq <= r.last_bound;
  r.scaling_spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  r.scaling_within_factor2 = r.scaling_spread <= 2.0;
  if (!split.warning.empty()) r.warnings.push_back(split.warning);
  return r;
}

}  // namespace wwlab
