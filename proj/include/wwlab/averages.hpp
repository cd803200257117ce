#pragma once

// Ergodic averages a_n(x) = (1/n) sum_{k<n} alpha^k(x) and their weighted
// versions a_n(x, lambda) = (1/n) sum_{k<n} lambda^k alpha^k(x).

#include "wwlab/dynamics.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace wwlab {

/// Point of the unit circle stored as an angle in turns, lambda = e^{2 pi i t}.
class UnitAngle {
 public:
  UnitAngle() = default;
  static UnitAngle from_turns(double t) { return UnitAngle(wrap_turns(t)); }
  /// Rejects |z| != 1 (tolerance tol).
  static UnitAngle from_complex(cplx z, double tol = 1e-10) {
    if (std::abs(std::abs(z) - 1.0) > tol) throw DomainError("weight lambda must lie on the unit circle");
    return UnitAngle(angle_turns(z));
  }
  double turns() const { return t_; }
  cplx value() const { return turn(t_); }
  /// lambda^k computed from the reduced angle, not by repeated multiplication.
  cplx pow(long long k) const { return turn(std::fmod(static_cast<double>(k) * t_, 1.0)); }
  bool is_one() const { return t_ == 0.0; }

 private:
  explicit UnitAngle(double t) : t_(t) {}
  double t_ = 0.0;
};

/// Finite set of weights. Root-of-unity grids {j/q} enable the batched DFT path.
class LambdaGrid {
 public:
  static LambdaGrid roots_of_unity(int q) {
    if (q < 1) throw DomainError("lambda grid size must be >= 1");
    LambdaGrid g;
    g.roots_ = q;
    for (int j = 0; j < q; ++j) g.points_.push_back(UnitAngle::from_turns(static_cast<double>(j) / q));
    return g;
  }
  /// `size` equally spaced angles starting at 0 (the default grid has 1024).
  static LambdaGrid uniform(int size = 1024) { return roots_of_unity(size); }
  static LambdaGrid from_turns(std::span<const double> turns) {
    if (turns.empty()) throw DomainError("lambda grid must be nonempty");
    LambdaGrid g;
    for (double t : turns) g.points_.push_back(UnitAngle::from_turns(t));
    return g;
  }
  static LambdaGrid single(UnitAngle a) {
    LambdaGrid g;
    g.points_.push_back(a);
    return g;
  }

  std::size_t size() const { return points_.size(); }
  const UnitAngle& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<UnitAngle>& points() const { return points_; }
  /// q when the grid is exactly {j/q : j < q}, else 0.
  int roots_of_unity_order() const { return roots_; }

  /// Largest circular gap between consecutive grid angles, in turns.
  double max_gap() const {
    std::vector<double> t;
    for (const auto& p : points_) t.push_back(p.turns());
    std::sort(t.begin(), t.end());
    double g = 1.0 - t.back() + t.front();
    for (std::size_t i = 1; i < t.size(); ++i) g = std::max(g, t[i] - t[i - 1]);
    return g;
  }

 private:
  std::vector<UnitAngle> points_;
  int roots_ = 0;
};

/// Per-call orbit workspace: the first `budget` iterates are cached, later
/// ones are recomputed from the last cached element on demand.
class Orbit {
 public:
  static constexpr std::size_t kDefaultBudget = 512;

  Orbit(const Dynamics& d, Operator x, std::size_t budget = kDefaultBudget) : d_(d), budget_(std::max<std::size_t>(1, budget)) {
    require_same_dim(d.ctx(), x.ctx());
    cache_.push_back(std::move(x));
  }

  Operator at(std::size_t k) {
    if (k < cache_.size()) return cache_[k];
    Operator y = cache_.back();
    for (std::size_t j = cache_.size(); j <= k; ++j) {
      y = apply(d_, y);
      if (cache_.size() < budget_) cache_.push_back(y);
    }
    return y;
  }

  std::size_t cached() const { return cache_.size(); }

  /// Visits alpha^k(x) for k = 0..count-1 in order.
  void for_each(std::size_t count, const std::function<void(std::size_t, const Operator&)>& fn) {
    Operator y = cache_.front();
    for (std::size_t k = 0; k < count; ++k) {
      if (k < cache_.size()) {
        y = cache_[k];
      } else {
        y = apply(d_, y);
        if (cache_.size() < budget_) cache_.push_back(y);
      }
      fn(k, y);
    }
  }

 private:
  const Dynamics& d_;
  std::size_t budget_;
  std::vector<Operator> cache_;
};

/// a_n(x)
inline Operator ergodic_avg(const Dynamics& d, const Operator& x, int n) {
  if (n < 1) throw DomainError("average index n must be >= 1");
  require_same_dim(d.ctx(), x.ctx());
  CompensatedSum acc(static_cast<Eigen::Index>(x.mat().size()));
  Operator y = x;
  for (int k = 0; k < n; ++k) {
    acc.add(Eigen::Map<const Vec>(y.mat().data(), y.mat().size()));
    if (k + 1 < n) y = apply(d, y);
  }
  const Vec v = acc.value() / static_cast<double>(n);
  return {x.ctx(), Eigen::Map<const Mat>(v.data(), x.dim(), x.dim())};
}

/// a_n(x, lambda)
inline Operator weighted_avg(const Dynamics& d, const Operator& x, UnitAngle lambda, int n) {
  if (n < 1) throw DomainError("average index n must be >= 1");
  require_same_dim(d.ctx(), x.ctx());
  CompensatedSum acc(static_cast<Eigen::Index>(x.mat().size()));
  Operator y = x;
  for (int k = 0; k < n; ++k) {
    acc.add_scaled(lambda.pow(k), Eigen::Map<const Vec>(y.mat().data(), y.mat().size()));
    if (k + 1 < n) y = apply(d, y);
  }
  const Vec v = acc.value() / static_cast<double>(n);
  return {x.ctx(), Eigen::Map<const Mat>(v.data(), x.dim(), x.dim())};
}

inline Operator weighted_avg(const Dynamics& d, const Operator& x, cplx lambda, int n) {
  return weighted_avg(d, x, UnitAngle::from_complex(lambda, x.ctx().tol), n);
}

/// (1/n) sum_{k<n} z^k for z = e^{2 pi i t}, via the Dirichlet-kernel closed form.
inline cplx geometric_mean(double t, long long n) {
  if (n < 1) throw DomainError("geometric mean needs n >= 1");
  double phi = wrap_turns(t);
  if (phi > 0.5) phi -= 1.0;
  if (phi == 0.0) return 1.0;
  const double s = std::sin(std::numbers::pi * std::fmod(static_cast<double>(n) * phi, 2.0)) /
                   (static_cast<double>(n) * std::sin(std::numbers::pi * phi));
  return turn(std::fmod(0.5 * static_cast<double>(n - 1) * phi, 1.0)) * s;
}

// ---------------------------------------------------------------------------
// Batched evaluation over a lambda grid

enum class EvalPath { Auto, Naive, Dft };

struct AccumulateOptions {
  Sector sector = Sector::Full;
  EvalPath path = EvalPath::Auto;
};

/// Streams the orbit once and reports, at every n in `record_n` (strictly
/// increasing, >= 1), the coordinates of a_n(x, lambda) for each grid point.
/// The visitor receives (n, averages) with averages[j] for grid point j.
inline void accumulate_weighted(const Dynamics& d, const Operator& x, const LambdaGrid& grid,
                                std::span<const int> record_n,
                                const std::function<void(int, std::span<const Vec>)>& visit,
                                AccumulateOptions opt = {}) {
  require_same_dim(d.ctx(), x.ctx());
  if (grid.size() == 0) throw DomainError("lambda grid must be nonempty");
  if (record_n.empty()) return;
  for (std::size_t i = 0; i < record_n.size(); ++i) {
    if (record_n[i] < 1 || (i > 0 && record_n[i] <= record_n[i - 1]))
      throw DomainError("recorded n values must be increasing and >= 1");
  }
  const int n_max = record_n.back();
  const std::size_t G = grid.size();
  const int q = grid.roots_of_unity_order();
  const Eigen::Index dimc = sector_size(x.dim(), opt.sector);

  bool use_dft = false;
  if (opt.path == EvalPath::Dft) {
    if (q == 0) throw DomainError("DFT path requires a root-of-unity grid");
    use_dft = true;
  } else if (opt.path == EvalPath::Auto && q > 0) {
    const double naive = static_cast<double>(n_max) * static_cast<double>(G);
    const double fast = static_cast<double>(n_max) + static_cast<double>(record_n.size()) * G * G;
    use_dft = fast < naive;
  }

  std::vector<cplx> roots;
  if (q > 0) {
    roots.resize(static_cast<std::size_t>(q));
    for (int r = 0; r < q; ++r) roots[r] = turn(static_cast<double>(r) / q);
  }

  std::vector<Vec> out(G, Vec::Zero(dimc));
  std::size_t next_record = 0;
  Operator y = x;

  if (use_dft) {
    // fold[r] = sum_{k = r mod q} y_k ; a_n(lambda_j) = (1/n) sum_r w^{jr} fold[r]
    std::vector<CompensatedSum> fold(static_cast<std::size_t>(q), CompensatedSum(dimc));
    for (int k = 0; k < n_max; ++k) {
      fold[static_cast<std::size_t>(k % q)].add(to_coords(y, opt.sector));
      if (k + 1 == record_n[next_record]) {
        std::vector<Vec> folded(static_cast<std::size_t>(q));
        for (int r = 0; r < q; ++r) folded[r] = fold[r].value();
        const int n = k + 1;
        parallel_for(G, [&](std::size_t j) {
          Vec s = Vec::Zero(dimc);
          for (int r = 0; r < q; ++r) {
            const auto idx = static_cast<std::size_t>((static_cast<long long>(j) * r) % q);
            s.noalias() += roots[idx] * folded[r];
          }
          out[j] = s / static_cast<double>(n);
        });
        visit(n, out);
        if (++next_record == record_n.size()) return;
      }
      if (k + 1 < n_max) y = apply(d, y);
    }
    return;
  }

  std::vector<CompensatedSum> acc(G, CompensatedSum(dimc));
  for (int k = 0; k < n_max; ++k) {
    const Vec c = to_coords(y, opt.sector);
    parallel_for(G, [&](std::size_t j) {
      const cplx w = q > 0 ? roots[static_cast<std::size_t>((static_cast<long long>(j) * k) % q)] : grid[j].pow(k);
      acc[j].add_scaled(w, c);
    });
    if (k + 1 == record_n[next_record]) {
      const int n = k + 1;
      for (std::size_t j = 0; j < G; ++j) acc[j].mean_into(out[j], static_cast<double>(n));
      visit(n, out);
      if (++next_record == record_n.size()) return;
    }
    if (k + 1 < n_max) y = apply(d, y);
  }
}

/// Log-spaced integers in [1, n_max] (always containing 1 and n_max).
inline std::vector<int> log_grid(int n_max, int points) {
  if (n_max < 1) throw DomainError("n_max must be >= 1");
  std::vector<int> out;
  const int pts = std::max(2, points);
  for (int i = 0; i < pts; ++i) {
    const double v = std::exp(std::log(static_cast<double>(n_max)) * i / (pts - 1));
    int n = std::clamp(static_cast<int>(std::lround(v)), 1, n_max);
    if (out.empty() || n > out.back()) out.push_back(n);
  }
  if (out.back() != n_max) out.push_back(n_max);
  return out;
}

// ---------------------------------------------------------------------------
// Trajectories

struct TrajectoryOptions {
  std::vector<int> n_grid;                 // empty -> log grid up to n_max
  std::optional<Projection> compression;   // norms are taken against this projection (default 1)
  bool keep_operators = false;
  Sector sector = Sector::Full;
  EvalPath path = EvalPath::Auto;
};

struct AverageTrajectory {
  std::vector<int> n_grid;
  LambdaGrid lambda_grid = LambdaGrid::uniform(1);
  /// [n index][lambda index] of ||a_n(x,lambda) p||_inf and ||p a_n(x,lambda) p||_inf
  std::vector<std::vector<double>> one_sided;
  std::vector<std::vector<double>> bilateral;
  /// [n index][lambda index], present when keep_operators was requested
  std::vector<std::vector<Operator>> values;

  const Operator& value(std::size_t n_idx, std::size_t lambda_idx) const { return values.at(n_idx).at(lambda_idx); }
};

inline AverageTrajectory trajectory(const Dynamics& d, const Operator& x, int n_max, const LambdaGrid& grid,
                                    TrajectoryOptions opt = {}) {
  if (n_max < 1) throw DomainError("trajectory needs n_max >= 1");
  AverageTrajectory t;
  t.n_grid = opt.n_grid.empty() ? log_grid(n_max, 24) : opt.n_grid;
  if (t.n_grid.back() > n_max) throw DomainError("n grid exceeds n_max");
  t.lambda_grid = grid;
  const Projection p = opt.compression.value_or(Projection::identity(x.ctx()));
  accumulate_weighted(
      d, x, grid, t.n_grid,
      [&](int, std::span<const Vec> avg) {
        std::vector<double> one(avg.size()), bil(avg.size());
        std::vector<Operator> ops;
        for (std::size_t j = 0; j < avg.size(); ++j) {
          Operator a = from_coords(x.ctx(), avg[j], opt.sector);
          const Mat ap = a.mat() * p.mat();
          one[j] = op_norm(ap);
          bil[j] = op_norm(p.mat() * ap);
          if (opt.keep_operators) ops.push_back(std::move(a));
        }
        t.one_sided.push_back(std::move(one));
        t.bilateral.push_back(std::move(bil));
        if (opt.keep_operators) t.values.push_back(std::move(ops));
      },
      {opt.sector, opt.path});
  return t;
}

struct UniformSup {
  double value = 0.0;            // max over the grid
  double lipschitz_slack = 0.0;  // bound on (sup over the whole circle) - value
  std::size_t argmax = 0;
};

/// Grid bound on the circle derivative: |d/dtheta a_n| <= 2 pi (n-1) max_k ||alpha^k x||_inf,
/// and max_k ||alpha^k x||_inf = ||x||_inf for contractions.
inline double lipschitz_slack(const Operator& x, int n, const LambdaGrid& grid) {
  return kTwoPi * (n - 1) * norm_inf(x) * 0.5 * grid.max_gap();
}

/// max over the grid of ||a_n(x,lambda) p||_inf (or ||p a_n(x,lambda) p||_inf when bilateral).
inline UniformSup uniform_sup(const Dynamics& d, const Operator& x, const Projection& p, int n,
                              const LambdaGrid& grid, bool bilateral, Sector sector = Sector::Full) {
  if (n < 1) throw DomainError("uniform_sup needs n >= 1");
  UniformSup r;
  r.lipschitz_slack = lipschitz_slack(x, n, grid);
  if (p.rank() == 0 && op_norm(p.mat()) == 0.0) return r;
  const int rec[] = {n};
  accumulate_weighted(
      d, x, grid, rec,
      [&](int, std::span<const Vec> avg) {
        for (std::size_t j = 0; j < avg.size(); ++j) {
          const Mat a = from_coords(x.ctx(), avg[j], sector).mat();
          Mat c = a * p.mat();
          if (bilateral) c = p.mat() * c;
          if (c.norm() <= r.value) continue;  // Frobenius dominates the operator norm
          const double v = op_norm(c);
          if (v > r.value) {
            r.value = v;
            r.argmax = j;
          }
        }
      },
      {sector, EvalPath::Auto});
  return r;
}

}  // namespace wwlab
