#pragma once

// Operator Van der Corput inequality, its norm forms, and the bound chain for
// uniform weighted averages.
//
// Shifted products a_k* a_{k+l} with k + l >= n are taken as zero.

#include "wwlab/spectral.hpp"

#include <deque>
#include <string>
#include <vector>

namespace wwlab {

inline constexpr const char* kVdcPadding = "zero";

struct VdcCertificate {
  int n = 0;
  int m = 0;
  int dim = 0;
  double gap_min_eig = 0.0;  // smallest eigenvalue of RHS - LHS
  double gap_norm = 0.0;     // ||RHS - LHS||_inf
  double lhs_norm = 0.0;     // ||(1/n) sum a_k||^2
  double rhs_norm_bound = 0.0;
  double lhs_sum_norm = 0.0;  // ||sum a_k||^2
  double rhs_sum_bound = 0.0;  // coefficient form with ||.|| applied termwise
  std::string padding = kVdcPadding;

  /// PSD up to 1e-9 relative to the gap, with a rounding floor for gaps that cancel exactly.
  bool operator_certified(double rel = 1e-9) const {
    return gap_min_eig >= -(rel * gap_norm + 1e-13 * (lhs_sum_norm + rhs_sum_bound));
  }
  bool norm_certified(double tol = 1e-9) const { return lhs_norm <= rhs_norm_bound + tol; }
  bool sum_norm_certified(double tol = 1e-9) const { return lhs_sum_norm <= rhs_sum_bound + tol * std::max(1.0, rhs_sum_bound); }
};

namespace detail {

inline void check_vdc_args(std::span<const Operator> a, int m) {
  if (a.empty()) throw DomainError("Van der Corput needs n >= 1 terms");
  const int n = static_cast<int>(a.size());
  if (m < 0 || m > n - 1)
    throw DomainError("Van der Corput needs 0 <= m <= n-1, got m = " + std::to_string(m) + ", n = " + std::to_string(n));
  for (const auto& x : a) require_same_dim(a.front().ctx(), x.ctx());
}

}  // namespace detail

/// Certifies both the operator inequality and its norm consequences for a_0..a_{n-1}.
inline VdcCertificate vdc_certificate(std::span<const Operator> a, int m) {
  detail::check_vdc_args(a, m);
  const int n = static_cast<int>(a.size());
  const int d = a.front().dim();
  VdcCertificate c;
  c.n = n;
  c.m = m;
  c.dim = d;

  Mat sum = Mat::Zero(d, d);
  for (const auto& x : a) sum += x.mat();
  const Mat lhs = sum.adjoint() * sum;

  Mat diag = Mat::Zero(d, d);
  for (const auto& x : a) diag.noalias() += x.mat().adjoint() * x.mat();

  const double coef = static_cast<double>(n + m) / (m + 1);
  Mat rhs = coef * diag;
  double shifted_norms = 0.0;       // sum_l ||(1/n) sum_k a_k* a_{k+l}||
  double shifted_weighted = 0.0;    // sum_l (m-l+1)/(m+1) ||sum_k a_k* a_{k+l}||
  for (int l = 1; l <= m; ++l) {
    Mat s = Mat::Zero(d, d);
    for (int k = 0; k + l < n; ++k) s.noalias() += a[k].mat().adjoint() * a[k + l].mat();
    const double w = static_cast<double>(m - l + 1) / (m + 1);
    rhs += (2.0 * coef * w) * hermitian_part(s);
    const double sn = op_norm(s);
    shifted_norms += sn / n;
    shifted_weighted += w * sn;
  }
  const Mat gap = hermitian_part(rhs - lhs);
  c.gap_min_eig = min_hermitian_eigenvalue(gap);
  c.gap_norm = op_norm(gap);

  const double sum_norm = op_norm(sum);
  const double diag_norm = op_norm(diag);
  c.lhs_sum_norm = sum_norm * sum_norm;
  c.rhs_sum_bound = coef * diag_norm + 2.0 * coef * shifted_weighted;
  c.lhs_norm = c.lhs_sum_norm / (static_cast<double>(n) * n);
  c.rhs_norm_bound = 2.0 / (m + 1) * diag_norm / n + 4.0 / (m + 1) * shifted_norms;
  return c;
}

inline VdcCertificate vdc_gap(std::span<const Operator> a, int m) { return vdc_certificate(a, m); }
inline VdcCertificate vdc_norm_bound(std::span<const Operator> a, int m) { return vdc_certificate(a, m); }

/// ||(ae)*(be) - e a* b e||_inf
inline double lemma2_identity_check(const Operator& a, const Operator& b, const Projection& e) {
  require_same_dim(a.ctx(), b.ctx());
  require_same_dim(a.ctx(), e.ctx());
  const Mat ae = a.mat() * e.mat();
  const Mat be = b.mat() * e.mat();
  return op_norm(ae.adjoint() * be - e.mat() * a.mat().adjoint() * be);
}

// ---------------------------------------------------------------------------
// Bound chain for a_k = lambda^k alpha^k(x) p

struct WwBoundPoint {
  int n = 0;
  int m = 0;
  double uniform_sup_sq = 0.0;  // max over the grid of ||a_n(x,lambda) p||^2
  double bound = 0.0;           // 2/(m+1)||p a_n(x*x) p|| + 4/(m+1) sum_l ||p a_n(x* alpha^l x) p||
  double bound_padded = 0.0;    // same with shifted sums truncated at k + l < n
  double diag_term = 0.0;       // ||p a_n(x*x) p||
  std::vector<double> corr_terms;  // ||p a_n(x* alpha^l x) p||, l = 1..m
  double lipschitz_slack = 0.0;

  bool holds(double tol = 1e-10) const { return uniform_sup_sq <= bound + tol; }
  bool holds_padded(double tol = 1e-10) const { return uniform_sup_sq <= bound_padded + tol; }
};

/// Evaluates the chain at every n in `n_grid` and m in `m_sweep` with m <= n-1.
/// Uses the multiplicativity alpha^k(x)* alpha^{k+l}(x) = alpha^k(x* alpha^l(x)).
inline std::vector<WwBoundPoint> ww_bound_sweep(const Dynamics& d, const Operator& x, const Projection& p,
                                                std::vector<int> n_grid, std::vector<int> m_sweep,
                                                const LambdaGrid& grid, Sector sector = Sector::Full) {
  require_same_dim(d.ctx(), x.ctx());
  require_same_dim(d.ctx(), p.ctx());
  if (!is_homomorphism(d)) throw HypothesisError("bound chain requires a homomorphism: alpha is not multiplicative");
  if (n_grid.empty() || m_sweep.empty()) throw DomainError("bound chain needs nonempty n and m lists");
  std::sort(n_grid.begin(), n_grid.end());
  n_grid.erase(std::unique(n_grid.begin(), n_grid.end()), n_grid.end());
  if (n_grid.front() < 1) throw DomainError("bound chain needs n >= 1");
  for (int m : m_sweep)
    if (m < 0) throw DomainError("bound chain needs m >= 0");
  const int n_max = n_grid.back();
  const int m_max = *std::max_element(m_sweep.begin(), m_sweep.end());
  const int dim = x.dim();
  const Mat& P = p.mat();

  // uniform sup at each grid n
  std::map<int, double> sup_sq;
  accumulate_weighted(
      d, x, grid, n_grid,
      [&](int n, std::span<const Vec> avg) {
        double best = 0.0;
        for (const auto& c : avg) {
          const Mat ap = from_coords(x.ctx(), c, sector).mat() * P;
          if (ap.norm() <= best) continue;
          best = std::max(best, op_norm(ap));
        }
        sup_sq[n] = best * best;
      },
      {sector, EvalPath::Auto});

  // S_l(r) = sum_{k<r} alpha^k(x)* alpha^{k+l}(x), needed at r = n and r = n - l
  std::vector<std::map<int, double>> s_norm(static_cast<std::size_t>(m_max) + 1);
  std::vector<std::vector<int>> want(static_cast<std::size_t>(m_max) + 1);
  for (int l = 0; l <= m_max; ++l) {
    auto& w = want[static_cast<std::size_t>(l)];
    for (int n : n_grid) {
      w.push_back(n);
      if (n - l >= 1) w.push_back(n - l);
    }
    std::sort(w.begin(), w.end());
    w.erase(std::unique(w.begin(), w.end()), w.end());
  }
  std::vector<Mat> acc(static_cast<std::size_t>(m_max) + 1, Mat::Zero(dim, dim));
  std::vector<std::size_t> cursor(static_cast<std::size_t>(m_max) + 1, 0);
  std::deque<Mat> window;  // alpha^k(x) .. alpha^{k+m_max}(x)
  Operator y = x;
  for (int j = 0; j <= m_max; ++j) {
    window.push_back(y.mat());
    y = apply(d, y);
  }
  for (int k = 0; k < n_max; ++k) {
    const Mat left = window.front().adjoint();
    for (int l = 0; l <= m_max; ++l) {
      auto& a = acc[static_cast<std::size_t>(l)];
      a.noalias() += left * window[static_cast<std::size_t>(l)];
      auto& cur = cursor[static_cast<std::size_t>(l)];
      const auto& w = want[static_cast<std::size_t>(l)];
      if (cur < w.size() && w[cur] == k + 1) {
        s_norm[static_cast<std::size_t>(l)][k + 1] = op_norm(P * a * P);
        ++cur;
      }
    }
    window.pop_front();
    window.push_back(y.mat());
    y = apply(d, y);
  }

  std::vector<WwBoundPoint> out;
  for (int n : n_grid) {
    for (int m : m_sweep) {
      if (m > n - 1) continue;
      WwBoundPoint pt;
      pt.n = n;
      pt.m = m;
      pt.uniform_sup_sq = sup_sq.at(n);
      pt.lipschitz_slack = lipschitz_slack(x, n, grid);
      pt.diag_term = s_norm[0].at(n) / n;
      double corr = 0.0;
      double corr_padded = 0.0;
      for (int l = 1; l <= m; ++l) {
        const double t = s_norm[static_cast<std::size_t>(l)].at(n) / n;
        pt.corr_terms.push_back(t);
        corr += t;
        corr_padded += s_norm[static_cast<std::size_t>(l)].at(n - l) / n;
      }
      pt.bound = 2.0 / (m + 1) * pt.diag_term + 4.0 / (m + 1) * corr;
      pt.bound_padded = 2.0 / (m + 1) * pt.diag_term + 4.0 / (m + 1) * corr_padded;
      out.push_back(std::move(pt));
    }
  }
  return out;
}

inline WwBoundPoint ww_bound_chain(const Dynamics& d, const Operator& x, const Projection& p, int n, int m,
                                   const LambdaGrid& grid, Sector sector = Sector::Full) {
  if (m < 0 || m > n - 1) throw DomainError("bound chain needs 0 <= m <= n-1");
  auto pts = ww_bound_sweep(d, x, p, {n}, {m}, grid, sector);
  return pts.front();
}

/// Large-n value of the bound: 2/(m+1) ||x||_2^2 + 4/(m+1) sum_{l<=m} |gamma(l)|.
inline double ww_bound_asymptotic(const CorrelationSequence& g, int m) {
  if (m < 0 || m > g.horizon()) throw DomainError("asymptotic bound needs 0 <= m <= L");
  double s = 0.0;
  for (int l = 1; l <= m; ++l) s += std::abs(g(l));
  return 2.0 / (m + 1) * g(0).real() + 4.0 / (m + 1) * s;
}

}  // namespace wwlab
