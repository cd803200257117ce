#pragma once

// Dense complex linear-algebra helpers shared by every module.

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

namespace wwlab {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// e^{2 pi i t}
inline cplx turn(double t) {
  const double a = kTwoPi * t;
  return {std::cos(a), std::sin(a)};
}

/// Reduce an angle measured in turns to [0, 1).
inline double wrap_turns(double t) {
  double r = t - std::floor(t);
  if (r >= 1.0) r = 0.0;
  return r;
}

/// Angle of a nonzero complex number in turns, in [0, 1).
inline double angle_turns(cplx z) { return wrap_turns(std::arg(z) / kTwoPi); }

/// Shortest distance between two angles on the circle (in turns).
inline double circle_distance(double a, double b) {
  double d = std::abs(wrap_turns(a) - wrap_turns(b));
  return std::min(d, 1.0 - d);
}

inline bool is_exactly_diagonal(const Mat& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j && a(i, j) != cplx{0.0, 0.0}) return false;
  return true;
}

/// Operator (spectral) norm, i.e. the largest singular value.
inline double op_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  if (is_exactly_diagonal(a)) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < std::min(a.rows(), a.cols()); ++i) m = std::max(m, std::abs(a(i, i)));
    return m;
  }
  if (a.rows() == 2 && a.cols() == 2) {
    const double f = a.squaredNorm();
    const double det = std::abs(a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0));
    const double disc = std::max(0.0, f * f - 4.0 * det * det);
    return std::sqrt(0.5 * (f + std::sqrt(disc)));
  }
  if (a.rows() <= 24) return Eigen::JacobiSVD<Mat>(a).singularValues()(0);
  return Eigen::BDCSVD<Mat>(a).singularValues()(0);
}

/// Singular values, descending.
inline Eigen::VectorXd singular_values(const Mat& a) {
  if (a.rows() <= 24) return Eigen::JacobiSVD<Mat>(a).singularValues();
  return Eigen::BDCSVD<Mat>(a).singularValues();
}

inline Mat hermitian_part(const Mat& a) { return 0.5 * (a + a.adjoint()); }

/// Smallest eigenvalue of the Hermitian part of `a`.
inline double min_hermitian_eigenvalue(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Gram-Schmidt friendly orthonormal basis of the column span (rank by tolerance).
inline Mat orthonormal_columns(const Mat& a, double rank_tol) {
  if (a.cols() == 0) return Mat(a.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU);
  Eigen::Index r = 0;
  const auto& s = svd.singularValues();
  while (r < s.size() && s(r) > rank_tol) ++r;
  return svd.matrixU().leftCols(r);
}

/// Neumaier-compensated running sum of complex vectors, applied componentwise
/// to real and imaginary parts.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(Eigen::Index size) : sum_(Vec::Zero(size)), comp_(Vec::Zero(size)) {}

  void add(const Vec& term) {
    double* s = reinterpret_cast<double*>(sum_.data());
    double* c = reinterpret_cast<double*>(comp_.data());
    const double* t = reinterpret_cast<const double*>(term.data());
    const Eigen::Index len = 2 * sum_.size();
    // Knuth two-sum, branch free
    for (Eigen::Index i = 0; i < len; ++i) {
      const double u = s[i] + t[i];
      const double bp = u - s[i];
      c[i] += (s[i] - (u - bp)) + (t[i] - bp);
      s[i] = u;
    }
  }

  /// Adds w * term.
  void add_scaled(cplx w, const Vec& term) {
    double* s = reinterpret_cast<double*>(sum_.data());
    double* c = reinterpret_cast<double*>(comp_.data());
    const double* t = reinterpret_cast<const double*>(term.data());
    const double wr = w.real(), wi = w.imag();
    for (Eigen::Index k = 0; k < sum_.size(); ++k) {
      const double tr = t[2 * k], ti = t[2 * k + 1];
      const double v[2] = {wr * tr - wi * ti, wr * ti + wi * tr};
      for (int h = 0; h < 2; ++h) {
        const Eigen::Index i = 2 * k + h;
        const double u = s[i] + v[h];
        const double bp = u - s[i];
        c[i] += (s[i] - (u - bp)) + (v[h] - bp);
        s[i] = u;
      }
    }
  }

  Vec value() const { return sum_ + comp_; }
  /// out = value() / n, reusing the storage of `out`.
  void mean_into(Vec& out, double n) const {
    out.resize(sum_.size());
    out.noalias() = (sum_ + comp_) / n;
  }
  Eigen::Index size() const { return sum_.size(); }

 private:
  Vec sum_;
  Vec comp_;
};

// ---------------------------------------------------------------------------
// Threading

namespace detail {
inline std::atomic<int>& thread_setting() {
  static std::atomic<int> n{1};
  return n;
}
}  // namespace detail

/// Process-wide worker count used by parallel loops (CLI `--threads`).
inline void set_default_threads(int n) { detail::thread_setting() = std::max(1, n); }
inline int default_threads() { return detail::thread_setting(); }

/// Runs fn(i) for i in [0, count). Each index is handled by exactly one worker;
/// results written per index are therefore independent of scheduling.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                         int threads = default_threads()) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

// ---------------------------------------------------------------------------
// Deterministic random generation

using Rng = std::mt19937_64;

inline Mat random_ginibre(Rng& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      m(i, j) = {re, im};
    }
  return m;
}

/// Haar-distributed unitary via QR of a Ginibre matrix with the phase fix.
inline Mat random_unitary(Rng& rng, int n) {
  Eigen::HouseholderQR<Mat> qr(random_ginibre(rng, n));
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const cplx d = r(j, j);
    const double a = std::abs(d);
    if (a > 0.0) q.col(j) *= d / a;
  }
  return q;
}

inline Mat random_hermitian(Rng& rng, int n) {
  Mat g = random_ginibre(rng, n);
  return hermitian_part(g);
}

}  // namespace wwlab
