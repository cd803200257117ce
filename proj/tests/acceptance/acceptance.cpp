// Acceptance suite: one PASS/FAIL line per criterion.
//
//   wwlab_acceptance                 run all criteria
//   wwlab_acceptance --criterion K   run criterion K only (exit 1 on failure)

#include "oracles.hpp"
#include "wwlab/wwlab.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace wwlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

std::vector<long double> grid_turns(const LambdaGrid& g) {
  std::vector<long double> t;
  for (const auto& p : g.points()) t.push_back(p.turns());
  return t;
}

// 1 and 2 share the instance suite.
struct VdcSuite {
  int instances = 0;
  int checks = 0;
  double worst_rel_gap = 0.0;    // min over checks of gap_min_eig / gap_norm
  double worst_oracle_diff = 0.0;  // |library gap - oracle gap| / scale
  double worst_norm_slack = 0.0;   // max of lhs_norm - rhs_norm_bound
  bool op_ok = true;
  bool norm_ok = true;
  double seconds = 0.0;
};

const VdcSuite& vdc_suite() {
  static const VdcSuite s = [] {
    VdcSuite r;
    const auto t0 = std::chrono::steady_clock::now();
    r.worst_rel_gap = std::numeric_limits<double>::infinity();
    r.worst_norm_slack = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 1000; ++i) {
      Rng rng(1000 + i);
      const int n = std::uniform_int_distribution<int>(1, 8)(rng);
      const int dim = std::uniform_int_distribution<int>(1, 6)(rng);
      const AlgebraCtx ctx = AlgebraCtx::make(dim);
      std::vector<Operator> a;
      std::vector<oracle::Mat> raw;
      for (int k = 0; k < n; ++k) {
        raw.push_back(random_ginibre(rng, dim));
        a.emplace_back(ctx, raw.back());
      }
      ++r.instances;
      for (int m = 0; m <= n - 1; ++m) {
        const VdcCertificate c = vdc_certificate(a, m);
        const oracle::Mat g = oracle::vdc_gap(raw, m);
        const double og = oracle::min_eig_general(0.5 * (g + g.adjoint()));
        ++r.checks;
        r.op_ok = r.op_ok && c.operator_certified(1e-9);
        r.norm_ok = r.norm_ok && c.norm_certified(1e-9);
        r.worst_rel_gap = std::min(r.worst_rel_gap, c.gap_min_eig / std::max(c.gap_norm, 1e-300));
        r.worst_oracle_diff =
            std::max(r.worst_oracle_diff, std::abs(c.gap_min_eig - og) / std::max(1.0, c.gap_norm));
        r.worst_norm_slack = std::max(r.worst_norm_slack, c.lhs_norm - c.rhs_norm_bound);
      }
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }();
  return s;
}

Outcome criterion1() {
  const VdcSuite& s = vdc_suite();
  const bool pass = s.op_ok && s.worst_oracle_diff <= 1e-9 && s.seconds < 30.0;
  return {pass, std::to_string(s.instances) + " instances, " + std::to_string(s.checks) +
                    " (n,m) checks; min gap_min_eig/gap_norm = " + num(s.worst_rel_gap) +
                    ", max |gap - oracle gap| = " + num(s.worst_oracle_diff) + ", " + num(s.seconds) + " s"};
}

Outcome criterion2() {
  const VdcSuite& s = vdc_suite();
  const bool pass = s.norm_ok && s.seconds < 30.0;
  return {pass, "max lhs_norm - rhs_norm_bound = " + num(s.worst_norm_slack) + " over " + std::to_string(s.checks) +
                    " checks"};
}

Outcome criterion3() {
  double worst = std::numeric_limits<double>::infinity();
  double worst_oracle = std::numeric_limits<double>::infinity();
  int homs = 0;
  for (int i = 0; i < 200; ++i) {
    Rng rng(5000 + i);
    const int dim = std::uniform_int_distribution<int>(1, 8)(rng);
    const AlgebraCtx ctx = AlgebraCtx::make(dim);
    const int kind = i % 3;
    std::optional<Dynamics> d;
    oracle::Step step;
    if (kind == 0) {
      const Mat u = random_unitary(rng, dim);
      d = Dynamics::unitary(Operator(ctx, u));
      step = oracle::conjugation(u);
    } else if (kind == 1) {
      std::vector<int> perm(static_cast<std::size_t>(dim));
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      d = Dynamics::permutation(ctx, perm);
      step = oracle::permutation(perm);
    } else {
      const Mat u = random_unitary(rng, dim);
      std::vector<int> perm(static_cast<std::size_t>(dim));
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      d = Dynamics::composition({Dynamics::unitary(Operator(ctx, u)), Dynamics::permutation(ctx, perm)});
      auto s1 = oracle::conjugation(u);
      auto s2 = oracle::permutation(perm);
      step = [s1, s2](const oracle::Mat& x) { return s2(s1(x)); };
    }
    homs += is_homomorphism(*d);
    const Mat xm = random_ginibre(rng, dim);
    const Operator x(ctx, xm);
    const CorrelationSequence g = correlation(*d, x, 16);
    const auto og = oracle::correlation(step, xm, 16);
    for (int m = 0; m <= 16; ++m) {
      worst = std::min(worst, check_positive_definite(g, m));
      worst_oracle = std::min(worst_oracle, oracle::toeplitz_min_eig(og, m));
    }
  }
  const bool pass = worst >= -1e-10 && worst_oracle >= -1e-10 && homs == 200;
  return {pass, "200 pairs (" + std::to_string(homs) + " homomorphisms), min Toeplitz eigenvalue " + num(worst) +
                    " (oracle " + num(worst_oracle) + ")"};
}

Outcome criterion4() {
  // u = diag(e^{2 pi i s_j}), x = e_{ij}: alpha(x) = mu x with mu = u_ii conj(u_jj)
  const AlgebraCtx ctx = AlgebraCtx::make(4);
  const double s[] = {0.0, 0.3, 0.125, 0.71};
  std::vector<cplx> diag;
  for (double v : s) diag.push_back(turn(v));
  const Dynamics d = Dynamics::unitary(Operator::diagonal(ctx, std::span<const cplx>(diag)));
  const LambdaGrid grid = LambdaGrid::uniform(1024);
  const std::size_t G = grid.size();
  constexpr int N = 10000;
  std::vector<int> all(N);
  std::iota(all.begin(), all.end(), 1);
  double worst = 0.0;
  const std::pair<int, int> units[] = {{0, 1}, {2, 3}, {1, 1}};
  using ldc = std::complex<long double>;
  for (auto [i, j] : units) {
    const Operator x = Operator::unit(ctx, i, j);
    const ldc mu = ldc(diag[static_cast<std::size_t>(i)]) * std::conj(ldc(diag[static_cast<std::size_t>(j)]));
    // running long-double partial sums of (lambda mu)^k
    std::vector<ldc> z(G), zk(G, ldc(1.0L)), sum(G, ldc(0.0L));
    for (std::size_t g = 0; g < G; ++g) z[g] = ldc(oracle::phase(grid[g].turns())) * mu;
    const Eigen::Index flat = static_cast<Eigen::Index>(j) * ctx.dim + i;  // column-major coordinate
    const double scale = std::sqrt(static_cast<double>(ctx.dim));
    accumulate_weighted(
        d, x, grid, all,
        [&](int n, std::span<const Vec> avg) {
          for (std::size_t g = 0; g < G; ++g) {
            sum[g] += zk[g];
            zk[g] *= z[g];
            const ldc e = sum[g] / static_cast<long double>(n);
            // ||A||_inf <= ||A||_F = sqrt(dim) |coords|
            const Vec& c = avg[g];
            double f2 = 0.0;
            for (Eigen::Index t = 0; t < c.size(); ++t) {
              const cplx v = t == flat ? c(t) - cplx(static_cast<double>(e.real()), static_cast<double>(e.imag())) / scale : c(t);
              f2 += std::norm(v);
            }
            worst = std::max(worst, std::sqrt(f2) * scale);
          }
        },
        {Sector::Full, EvalPath::Naive});
  }
  return {worst <= 1e-12, "max over n <= 1e4, 1024 lambdas, 3 matrix units of ||a_n - G_n x||_inf <= " + num(worst)};
}

Outcome criterion5() {
  // primitive qubit channel
  const ScenarioConfig cfg = bundled_config("channel-weakmix");
  const Dynamics d = build_dynamics(cfg.dynamics, cfg.ctx());
  const Operator x = build_observable(cfg.observable, d, cfg.sector);
  const DynamicsReport rep = validate(d, 8, 0);
  const double gap = rep.spectral_gap;
  const double target = 1e-6;
  const int n_allowed = static_cast<int>(std::floor(10.0 / gap * std::log(1.0 / target)));
  const int n_scan = std::max(n_allowed, 10000000);
  Mat s = Mat::Zero(2, 2);
  Operator y = x;
  const Mat mean = trace(x) * Mat::Identity(2, 2);
  int hit = -1;
  double at_allowed = 0.0;
  for (int n = 1; n <= n_scan; ++n) {
    s += y.mat();
    y = apply(d, y);
    const double dev = oracle::norm2(s / static_cast<double>(n) - mean);
    if (n == n_allowed) at_allowed = dev;
    if (dev <= target) {
      hit = n;
      break;
    }
  }
  const bool part1 = hit > 0 && hit <= n_allowed;

  // q-cycle: exact at multiples of q
  const AlgebraCtx ctx = AlgebraCtx::make(12);
  const Dynamics cyc = Dynamics::cyclic_shift(ctx);
  Rng rng(77);
  const Operator xq(ctx, Mat(random_hermitian(rng, 12).diagonal().asDiagonal()));
  const ErgodicCurve c = mean_ergodic_check(cyc, xq, 36, {12, 24, 36}, Sector::Diagonal);
  double worst_q = 0.0;
  for (double v : c.deviation) worst_q = std::max(worst_q, v);
  const bool part2 = worst_q <= 1e-13;
  std::string det = "channel gap " + num(gap) + ", allowed n <= " + std::to_string(n_allowed) + " (C = 10); deviation there " +
                    num(at_allowed) + "; first n with deviation <= 1e-6: " + (hit > 0 ? std::to_string(hit) : "none") +
                    " (C = " + (hit > 0 ? num(hit * gap / std::log(1.0 / target)) : std::string("-")) +
                    "); q-cycle max deviation at n = 12, 24, 36: " + num(worst_q);
  return {part1 && part2, det};
}

Outcome criterion6() {
  double orth = 0.0, inv = 0.0;
  int count = 0;
  for (const auto& b : bundled_scenarios()) {
    const ScenarioConfig cfg = bundled_config(b.name);
    const Dynamics d = build_dynamics(cfg.dynamics, cfg.ctx());
    const Operator x = build_observable(cfg.observable, d, cfg.sector);
    const EigenSplit split = eigen_split(d, cfg.sector);
    const KroneckerSplit ks = kronecker_split(split, x);
    orth = std::max(orth, std::abs(inner(ks.x_k, ks.x_perp)));
    inv = std::max(inv, kperp_invariance_defect(d, split, ks.x_perp));
    ++count;
  }
  return {orth <= 1e-10 && inv <= 1e-10, std::to_string(count) + " bundled scenarios; max |(x_K, x_perp)| = " + num(orth) +
                                             ", max ||P_K alpha(x_perp)||_2 = " + num(inv)};
}

Outcome criterion7() {
  double worst = 0.0;
  int cases = 0;
  for (int dim = 2; dim <= 8; ++dim) {
    for (int rep = 0; rep < 3; ++rep) {
      Rng rng(900 + 10 * dim + rep);
      const AlgebraCtx ctx = AlgebraCtx::make(dim);
      Mat u;
      if (rep == 0) {
        u = random_unitary(rng, dim);
      } else if (rep == 1) {
        std::vector<cplx> ph;
        std::uniform_real_distribution<double> U(0.0, 1.0);
        for (int i = 0; i < dim; ++i) ph.push_back(turn(U(rng)));
        u = Mat::Zero(dim, dim);
        for (int i = 0; i < dim; ++i) u(i, i) = ph[static_cast<std::size_t>(i)];
      } else {
        u = Mat::Zero(dim, dim);
        for (int i = 0; i < dim; ++i) u((i + 1) % dim, i) = 1.0;
      }
      const Dynamics d = Dynamics::unitary(Operator(ctx, u));
      const Mat xm = random_ginibre(rng, dim);
      const Operator x(ctx, xm);
      const SpectralMeasure m = spectral_measure(d, x, Sector::Full, 64);
      const auto og = oracle::correlation(oracle::conjugation(u), xm, 64);
      for (int l = -64; l <= 64; ++l) {
        const cplx g = l >= 0 ? og[static_cast<std::size_t>(l)] : std::conj(og[static_cast<std::size_t>(-l)]);
        worst = std::max(worst, std::abs(m.fourier(l) - g));
      }
      ++cases;
    }
  }
  return {worst <= 1e-9, std::to_string(cases) + " automorphisms, dim 2..8; max |sum atoms e^{2 pi i l t} - gamma(l)| over |l| <= 64 = " + num(worst)};
}

Outcome criterion8() {
  constexpr int q = 12;
  constexpr int m = 200 * q;
  const AlgebraCtx ctx = AlgebraCtx::make(q);
  const Dynamics d = Dynamics::cyclic_shift(ctx);
  std::vector<cplx> f(q, -1.0 / q);
  f[0] += 1.0;
  const Operator x = Operator::diagonal(ctx, std::span<const cplx>(f));
  const CorrelationSequence g = correlation(d, x, m);
  const double W = wiener_criterion(g, m);
  const auto masses = oracle::qcycle_masses(f);
  double S = 0.0;
  for (double v : masses) S += v * v;
  const SpectralMeasure sm = spectral_measure(d, x, Sector::Diagonal, 64);
  const double dev = std::abs(W - S);
  return {dev <= 1e-8 && std::abs(sm.sum_squared_masses() - S) <= 1e-12,
          "W_m = " + num(W) + ", brute-force sum of squared masses = " + num(S) + " (eigen atoms " +
              num(sm.sum_squared_masses()) + "); |W_m - S| = " + num(dev) + ", S/(m+1) = " + num(S / (m + 1))};
}

Outcome criterion9() {
  bool pass = true;
  std::string det;
  for (const char* name : {"classical-q12", "tensorshift-4q"}) {
    const ScenarioConfig cfg = bundled_config(name);
    const Dynamics d = build_dynamics(cfg.dynamics, cfg.ctx());
    const Operator x = build_observable(cfg.observable, d, cfg.sector);
    const LambdaGrid grid = cfg.params.lambda_grid.build();
    Theorem6Options o;
    o.sector = cfg.sector;
    const Theorem6Report r = theorem6_experiment(d, x, cfg.params.eps, cfg.params.N, cfg.params.m_sweep, grid, o);

    // oracle for the uniform sup at n = N
    const Mat x0 = x.mat() - trace(x) * Mat::Identity(x.dim(), x.dim());
    oracle::Step step;
    std::visit(
        [&](const auto& k) {
          if constexpr (std::is_same_v<std::decay_t<decltype(k)>, PermutationConjugation>) step = oracle::permutation(k.perm);
        },
        d.kind());
    const auto it = oracle::orbit(step, x0, cfg.params.N);
    double sup = 0.0;
    for (long double t : grid_turns(grid)) {
      Mat s = Mat::Zero(x.dim(), x.dim());
      for (int k = 0; k < cfg.params.N; ++k) s += oracle::phase(t * k) * it[static_cast<std::size_t>(k)];
      sup = std::max(sup, oracle::opnorm(s / static_cast<double>(cfg.params.N)));
    }
    const bool sup_ok = std::abs(sup * sup - r.final_uniform_sup_sq) <= 1e-9;
    const bool ok = r.chain_holds && r.tail_below_last_bound && r.scaling_within_factor2 && sup_ok;
    pass = pass && ok;
    det += std::string(name) + ": chain " + (r.chain_holds ? "holds" : "VIOLATED") + " at " +
           std::to_string(r.chain.size()) + " (n,m); sup^2(N) = " + num(r.final_uniform_sup_sq) + " (oracle " +
           num(sup * sup) + ") vs bound(m=64) = " + num(r.last_bound) + "; (m+1)*bound spread = " +
           num(r.scaling_spread) + (r.scaling_within_factor2 ? " (within 2)" : " (not within 2)") + ". ";
  }
  return {pass, det};
}

Outcome criterion10() {
  const ScenarioConfig cfg = bundled_config("channel-weakmix");
  const Dynamics d = build_dynamics(cfg.dynamics, cfg.ctx());
  const Operator x = build_observable(cfg.observable, d, cfg.sector);
  const LambdaGrid grid = cfg.params.lambda_grid.build();
  const WeakMixingReport w =
      weak_mixing_experiment(d, x, cfg.params.eps, cfg.params.N, grid, {cfg.params.threshold, cfg.params.delta, cfg.sector});
  // superoperator lower bound for the lambda = 1 average of a traceless x: ||a_n(x)||_2 >= ||x||_2 (1 - ||S^n x||/||x||)/(2n)
  Operator y = x;
  for (int k = 0; k < cfg.params.N; ++k) y = apply(d, y);
  const double lower = norm2(x) * (1.0 - norm2(y) / norm2(x)) / (2.0 * cfg.params.N);
  return {w.dichotomy(1e-5, 1e-6), "max over lambda != 1 of final ||p a_N p|| = " + num(w.max_final_ne1) +
                                       "; lambda = 1 deviation from tau(x)1 = " + num(w.lambda1_deviation) +
                                       " (L2 lower bound at N: " + num(lower) + ")"};
}

Outcome criterion11() {
  constexpr int q = 12;
  constexpr int N = 120;
  const AlgebraCtx ctx = AlgebraCtx::make(q);
  const Dynamics d = Dynamics::cyclic_shift(ctx);
  const LambdaGrid grid = LambdaGrid::uniform(1024);
  std::vector<int> perm(q);
  for (int j = 0; j < q; ++j) perm[static_cast<std::size_t>(j)] = (j + 1) % q;
  const oracle::Step step = oracle::permutation(perm);
  const double eps = 0.5, delta = 1.0;
  double deltas[2];
  bool ok = true;
  std::string det;
  const double gammas[] = {0.1, 0.01};
  for (int g = 0; g < 2; ++g) {
    const Operator x = (gammas[g] * q) * Operator::unit(ctx, 0, 0);  // ||x||_1 = gamma
    const ProjectionWitness w = find_witness(d, x, eps, delta, N, grid, {Sector::Diagonal});
    const auto M = oracle::diagonal_sup_profile(step, x.mat(), N, grid_turns(grid));
    // claimed sup for this e
    double claim = 0.0;
    for (int i = 0; i < q; ++i)
      if (w.e.mat()(i, i).real() > 0.5) claim = std::max(claim, M[static_cast<std::size_t>(i)]);
    // exhaustive: best sup among diagonal projections with the same trace budget
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 0; mask < (1u << q); ++mask) {
      const int kept = __builtin_popcount(mask);
      if (static_cast<double>(q - kept) / q > w.eps_achieved + 1e-12) continue;
      double s = 0.0;
      for (int i = 0; i < q; ++i)
        if (mask & (1u << i)) s = std::max(s, M[static_cast<std::size_t>(i)]);
      best = std::min(best, s);
    }
    const bool verified = w.eps_met() && w.delta_met() && !w.inconclusive;
    const bool sound = std::abs(claim - w.delta_achieved) <= 1e-12 && w.delta_achieved >= best - 1e-12;
    ok = ok && verified && sound;
    deltas[g] = w.delta_achieved;
    det += "gamma " + num(gammas[g]) + ": (eps', delta') = (" + num(w.eps_achieved) + ", " + num(w.delta_achieved) +
           "), oracle sup " + num(claim) + ", exhaustive optimum " + num(best) + "; ";
  }
  const double ratio = deltas[0] / deltas[1];
  const bool prop = ratio >= 10.0 / 4.0 && ratio <= 10.0 * 4.0;
  det += "delta' ratio " + num(ratio) + " (gamma ratio 10)";
  return {ok && prop, det};
}

Outcome criterion12() {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / ("wwlab_repro_" + std::to_string(::getpid()));
  int same = 0, total = 0;
  std::string diff;
  for (const auto& b : bundled_scenarios()) {
    const ScenarioConfig cfg = bundled_config(b.name);
    std::string bodies[2];
    for (int run = 0; run < 2; ++run) {
      RunOptions o;
      o.out = base / std::to_string(run);
      const RunResult r = run_scenario(cfg, o);
      std::ifstream in(r.dir / "table.csv", std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      bodies[run] = ss.str();
    }
    ++total;
    if (bodies[0] == bodies[1] && !bodies[0].empty()) {
      ++same;
    } else {
      diff += std::string(b.name) + " ";
    }
  }
  std::error_code ec;
  fs::remove_all(base, ec);
  return {same == total, std::to_string(same) + "/" + std::to_string(total) + " bundled scenarios byte-identical" +
                             (diff.empty() ? "" : "; differing: " + diff)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "Van der Corput operator inequality", 30, criterion1},
      {2, "Van der Corput norm form", 30, criterion2},
      {3, "positive-definiteness of gamma", 20, criterion3},
      {4, "eigenoperator closed form", 10, criterion4},
      {5, "mean ergodic theorem", 10, criterion5},
      {6, "Kronecker split invariants", 5, criterion6},
      {7, "spectral-measure reconstruction", 10, criterion7},
      {8, "Wiener criterion limit", 5, criterion8},
      {9, "bound chain and 1/(m+1) scaling", 120, criterion9},
      {10, "weak mixing dichotomy", 30, criterion10},
      {11, "witness soundness", 30, criterion11},
      {12, "reproducibility", 300, criterion12},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  int failed = 0;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("criterion %2d %-36s %s  [%.2f s / %.0f s] %s\n", c.id, c.name, pass ? "PASS" : "FAIL", secs, c.budget_s,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
