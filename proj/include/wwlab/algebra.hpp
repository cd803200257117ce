#pragma once

// Finite-dimensional tracial algebra (M_n(C), tau = Tr/n): operators, L^p
// norms, the projection lattice and neighbourhoods of the measure topology.

#include "wwlab/error.hpp"
#include "wwlab/linalg.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wwlab {

struct AlgebraCtx {
  int dim = 1;
  double tol = 1e-10;

  static AlgebraCtx make(int dim, double tol = 1e-10) {
    if (dim < 1) throw DomainError("algebra dimension must be >= 1, got " + std::to_string(dim));
    if (!(tol >= 0.0)) throw DomainError("tolerance must be non-negative");
    return {dim, tol};
  }
};

inline void require_same_dim(const AlgebraCtx& a, const AlgebraCtx& b) {
  if (a.dim != b.dim)
    throw DimensionError("algebra dimension mismatch: " + std::to_string(a.dim) + " vs " +
                         std::to_string(b.dim));
}

/// Element of M_n(C) together with the algebra it belongs to.
class Operator {
 public:
  Operator(AlgebraCtx ctx, Mat entries) : ctx_(ctx), m_(std::move(entries)) {
    if (m_.rows() != ctx_.dim || m_.cols() != ctx_.dim)
      throw DimensionError("operator must be " + std::to_string(ctx_.dim) + "x" +
                           std::to_string(ctx_.dim) + ", got " + std::to_string(m_.rows()) +
                           "x" + std::to_string(m_.cols()));
  }

  static Operator zero(AlgebraCtx ctx) { return {ctx, Mat::Zero(ctx.dim, ctx.dim)}; }
  static Operator identity(AlgebraCtx ctx) { return {ctx, Mat::Identity(ctx.dim, ctx.dim)}; }
  /// Matrix unit e_{ij}.
  static Operator unit(AlgebraCtx ctx, int i, int j) {
    if (i < 0 || j < 0 || i >= ctx.dim || j >= ctx.dim) throw DomainError("matrix unit index out of range");
    Mat m = Mat::Zero(ctx.dim, ctx.dim);
    m(i, j) = 1.0;
    return {ctx, std::move(m)};
  }
  static Operator diagonal(AlgebraCtx ctx, std::span<const cplx> d) {
    if (static_cast<int>(d.size()) != ctx.dim) throw DimensionError("diagonal length mismatch");
    Mat m = Mat::Zero(ctx.dim, ctx.dim);
    for (int i = 0; i < ctx.dim; ++i) m(i, i) = d[i];
    return {ctx, std::move(m)};
  }
  static Operator diagonal(AlgebraCtx ctx, std::span<const double> d) {
    std::vector<cplx> c(d.begin(), d.end());
    return diagonal(ctx, std::span<const cplx>(c));
  }

  const AlgebraCtx& ctx() const { return ctx_; }
  const Mat& mat() const { return m_; }
  int dim() const { return ctx_.dim; }

  Operator adjoint() const { return {ctx_, m_.adjoint()}; }
  bool is_hermitian() const { return op_norm(m_ - m_.adjoint()) <= ctx_.tol * std::max(1.0, op_norm(m_)); }

  Operator& operator+=(const Operator& o) {
    require_same_dim(ctx_, o.ctx_);
    m_ += o.m_;
    return *this;
  }
  Operator& operator-=(const Operator& o) {
    require_same_dim(ctx_, o.ctx_);
    m_ -= o.m_;
    return *this;
  }
  Operator& operator*=(cplx s) {
    m_ *= s;
    return *this;
  }

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator-(Operator a) {
    a.m_ = -a.m_;
    return a;
  }
  friend Operator operator*(cplx s, Operator a) { return a *= s; }
  friend Operator operator*(Operator a, cplx s) { return a *= s; }
  friend Operator operator*(const Operator& a, const Operator& b) {
    require_same_dim(a.ctx_, b.ctx_);
    return {a.ctx_, a.m_ * b.m_};
  }

 private:
  AlgebraCtx ctx_;
  Mat m_;
};

/// Normalized trace tau(x) = Tr(x)/n.
inline cplx trace(const Operator& x) { return x.mat().trace() / static_cast<double>(x.dim()); }

/// (x, y)_tau = tau(x* y).
inline cplx inner(const Operator& x, const Operator& y) {
  require_same_dim(x.ctx(), y.ctx());
  // sum_ij conj(x_ij) y_ij, without forming the product
  return x.mat().conjugate().cwiseProduct(y.mat()).sum() / static_cast<double>(x.dim());
}

/// Sentinel for the uniform norm.
inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

/// ||x||_p = (tau(|x|^p))^{1/p}; p = infinity gives the operator norm.
inline double lp_norm(const Operator& x, double p) {
  if (std::isnan(p) || p < 1.0) throw DomainError("L^p norm requires p >= 1");
  if (std::isinf(p)) return op_norm(x.mat());
  if (p == 2.0) return std::sqrt(x.mat().squaredNorm() / x.dim());
  const Eigen::VectorXd s = singular_values(x.mat());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(s(i), p);
  return std::pow(acc / x.dim(), 1.0 / p);
}

inline double norm2(const Operator& x) { return lp_norm(x, 2.0); }
inline double norm_inf(const Operator& x) { return lp_norm(x, kInfNorm); }

/// |x| = (x* x)^{1/2}, computed from the SVD x = U S V*, |x| = V S V*.
inline Operator abs(const Operator& x) {
  Eigen::JacobiSVD<Mat> svd(x.mat(), Eigen::ComputeFullV);
  const Mat& v = svd.matrixV();
  Mat r = v * svd.singularValues().cast<cplx>().asDiagonal() * v.adjoint();
  return {x.ctx(), hermitian_part(r)};
}

/// Hermitian idempotent. Construction validates the invariants.
class Projection {
 public:
  explicit Projection(Operator p) : op_(std::move(p)) {
    const Mat& m = op_.mat();
    const double tol = op_.ctx().tol;
    const double herm = op_norm(m - m.adjoint());
    const double idem = op_norm(m * m - m);
    if (herm > tol || idem > tol)
      throw DomainError("not a projection: ||p - p*|| = " + std::to_string(herm) +
                        ", ||p^2 - p|| = " + std::to_string(idem));
  }

  static Projection identity(AlgebraCtx ctx) { return Projection(Operator::identity(ctx)); }
  static Projection zero(AlgebraCtx ctx) { return Projection(Operator::zero(ctx)); }

  /// Orthogonal projection onto the span of the given orthonormal columns.
  static Projection onto(AlgebraCtx ctx, const Mat& orthonormal_cols) {
    if (orthonormal_cols.cols() == 0) return zero(ctx);
    Mat p = orthonormal_cols * orthonormal_cols.adjoint();
    return Projection(Operator(ctx, hermitian_part(p)));
  }

  const Operator& op() const { return op_; }
  const Mat& mat() const { return op_.mat(); }
  const AlgebraCtx& ctx() const { return op_.ctx(); }
  int dim() const { return op_.dim(); }

  /// p-perp = 1 - p.
  Projection complement() const {
    return Projection(Operator(ctx(), Mat::Identity(dim(), dim()) - mat()));
  }
  /// tau(p)
  double measure() const { return trace(op_).real(); }
  /// tau(p-perp)
  double defect() const { return 1.0 - measure(); }
  int rank() const { return static_cast<int>(std::lround(mat().trace().real())); }

 private:
  Operator op_;
};

/// Orthonormal eigenbasis columns of a Hermitian operator whose eigenvalues
/// fall in [lo, hi].
inline Mat spectral_subspace(const Operator& x, double lo, double hi) {
  if (!x.is_hermitian()) throw DomainError("spectral projection requires a Hermitian operator");
  if (is_exactly_diagonal(x.mat())) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < x.dim(); ++i) {
      const double ev = x.mat()(i, i).real();
      if (ev >= lo && ev <= hi) keep.push_back(i);
    }
    Mat cols = Mat::Zero(x.dim(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) cols(keep[k], static_cast<Eigen::Index>(k)) = 1.0;
    return cols;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(x.mat()));
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()(i);
    if (ev >= lo && ev <= hi) keep.push_back(i);
  }
  Mat cols(x.dim(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) cols.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(keep[k]);
  return cols;
}

/// Spectral projection of a Hermitian x for the closed interval [a, b].
inline Projection spectral_projection(const Operator& x, double a, double b) {
  if (a > b) {
    if (!x.is_hermitian()) throw DomainError("spectral projection requires a Hermitian operator");
    return Projection::zero(x.ctx());
  }
  return Projection::onto(x.ctx(), spectral_subspace(x, a, b));
}

/// e ^ f: projection onto ran(e) intersected with ran(f), read off the null
/// space of (1 - e) + (1 - f).
inline Projection meet(const Projection& e, const Projection& f) {
  require_same_dim(e.ctx(), f.ctx());
  const int n = e.dim();
  if (is_exactly_diagonal(e.mat()) && is_exactly_diagonal(f.mat())) {
    Mat d = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
      if (e.mat()(i, i).real() > 0.5 && f.mat()(i, i).real() > 0.5) d(i, i) = 1.0;
    return Projection(Operator(e.ctx(), std::move(d)));
  }
  const Mat id = Mat::Identity(n, n);
  const Mat g = hermitian_part((id - e.mat()) + (id - f.mat()));
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  const double thr = std::max(e.ctx().tol, 64.0 * std::numeric_limits<double>::epsilon() * n);
  Eigen::Index k = 0;
  while (k < n && es.eigenvalues()(k) <= thr) ++k;
  return Projection::onto(e.ctx(), es.eigenvectors().leftCols(k));
}

inline Projection meet(std::span<const Projection> ps) {
  if (ps.empty()) throw DomainError("meet of an empty family");
  Projection acc = ps[0];
  for (std::size_t i = 1; i < ps.size(); ++i) acc = meet(acc, ps[i]);
  return acc;
}

/// e <= f in the projection order (ran e inside ran f).
inline bool leq(const Projection& e, const Projection& f) {
  return op_norm(f.mat() * e.mat() - e.mat()) <= 10.0 * e.ctx().tol;
}

struct NeighbourhoodMembership {
  bool member = false;
  std::optional<Projection> witness;
};

/// Membership of x in V(eps, delta) = { x : exists e, tau(e-perp) <= eps, ||x e|| <= delta }.
/// Decided exactly from the singular values: the right-singular cut is optimal.
inline NeighbourhoodMembership measure_nbhd(const Operator& x, double eps, double delta) {
  if (!(eps >= 0.0) || !(delta >= 0.0)) throw DomainError("measure neighbourhood needs eps, delta >= 0");
  const int n = x.dim();
  Eigen::JacobiSVD<Mat> svd(x.mat(), Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  int big = 0;
  while (big < n && s(big) > delta) ++big;
  if (static_cast<double>(big) > eps * n + 1e-12) return {false, std::nullopt};
  Mat w = Mat::Identity(n, n);
  if (big > 0) {
    const Mat vb = svd.matrixV().leftCols(big);
    w -= vb * vb.adjoint();
  }
  return {true, Projection(Operator(x.ctx(), hermitian_part(w)))};
}

}  // namespace wwlab
