#pragma once

// The L^2 layer: eigenoperators and the Kronecker factor K, correlation
// sequences gamma_x(l) = tau(x* alpha^l(x)), atomic spectral measures and
// Wiener averages.

#include "wwlab/averages.hpp"

#include <map>
#include <string>
#include <vector>

namespace wwlab {

// ---------------------------------------------------------------------------
// Correlation sequences

class CorrelationSequence {
 public:
  /// values[l] = gamma(l) for l = 0..L; gamma(0) is stored as a real number.
  explicit CorrelationSequence(std::vector<cplx> nonneg) : v_(std::move(nonneg)) {
    if (v_.empty()) throw DomainError("correlation sequence needs gamma(0)");
    v_[0] = v_[0].real();
  }

  int horizon() const { return static_cast<int>(v_.size()) - 1; }

  /// gamma(l) for |l| <= L, with gamma(-l) = conj(gamma(l)).
  cplx operator()(int l) const {
    if (std::abs(l) > horizon()) throw DomainError("correlation lag outside the computed horizon");
    return l >= 0 ? v_[static_cast<std::size_t>(l)] : std::conj(v_[static_cast<std::size_t>(-l)]);
  }

  const std::vector<cplx>& nonnegative() const { return v_; }

 private:
  std::vector<cplx> v_;
};

inline CorrelationSequence correlation(const Dynamics& d, const Operator& x, int L) {
  if (L < 0) throw DomainError("correlation horizon must be >= 0");
  std::vector<cplx> g;
  g.reserve(static_cast<std::size_t>(L) + 1);
  Orbit orbit(d, x);
  orbit.for_each(static_cast<std::size_t>(L) + 1, [&](std::size_t, const Operator& y) { g.push_back(inner(x, y)); });
  return CorrelationSequence(std::move(g));
}

/// Smallest eigenvalue of the (m+1)x(m+1) Toeplitz matrix [gamma(i - j)].
inline double check_positive_definite(const CorrelationSequence& c, int m) {
  if (m < 0 || m > c.horizon()) throw DomainError("Toeplitz order must satisfy 0 <= m <= L");
  Mat t(m + 1, m + 1);
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j) t(i, j) = c(i - j);
  return min_hermitian_eigenvalue(t);
}

/// W_m = (1/(m+1)) sum_{l=1}^m |gamma(l)|^2.
inline double wiener_criterion(const CorrelationSequence& c, int m) {
  if (m < 0 || m > c.horizon()) throw DomainError("Wiener average order must satisfy 0 <= m <= L");
  double s = 0.0;
  for (int l = 1; l <= m; ++l) s += std::norm(c(l));
  return s / (m + 1);
}

/// (1/n) sum_{l=1}^n e^{2 pi i l t} gamma(l); tends to the mass of sigma_x at -t mod 1.
inline cplx atom_estimate(const CorrelationSequence& c, double t, int n) {
  if (n < 1 || n > c.horizon()) throw DomainError("atom estimate needs 1 <= n <= L");
  const UnitAngle w = UnitAngle::from_turns(t);
  CompensatedSum acc(1);
  Vec one(1);
  for (int l = 1; l <= n; ++l) {
    one(0) = c(l);
    acc.add_scaled(w.pow(l), one);
  }
  return acc.value()(0) / static_cast<double>(n);
}

inline cplx atom_estimate(const Dynamics& d, const Operator& x, double t, int n) {
  if (n < 1) throw DomainError("atom estimate needs n >= 1");
  return atom_estimate(correlation(d, x, n), t, n);
}

// ---------------------------------------------------------------------------
// Eigenoperators and the Kronecker factor

struct EigenOperator {
  Operator op;       // unit L^2 norm
  double angle = 0;  // eigenvalue e^{2 pi i angle}
  cplx eigenvalue() const { return turn(angle); }
};

struct EigenSplit {
  Sector sector = Sector::Full;
  std::vector<EigenOperator> basis;
  Mat basis_coords;  // columns: sector coordinates of the basis elements
  Mat projector;     // orthogonal projection of L^2 (sector) onto K
  bool homomorphism = true;
  std::string warning;

  int dim_k() const { return static_cast<int>(basis.size()); }
};

namespace detail {

/// Makes the first component of magnitude > 1e-12 real and positive.
inline void fix_phase(Eigen::Ref<Vec> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > 1e-12) {
      v *= std::conj(v(i)) / a;
      return;
    }
  }
}

inline Eigen::Index first_support(const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > 1e-12) return i;
  return v.size();
}

}  // namespace detail

/// Orthonormal eigenbasis of the unimodular spectrum of alpha on L^2 (sector).
/// For *-automorphisms this spans all of L^2. For other maps the unimodular
/// eigenvectors that exist are extracted and `warning` is set.
inline EigenSplit eigen_split(const Dynamics& d, Sector sector = Sector::Full) {
  EigenSplit out;
  out.sector = sector;
  out.homomorphism = is_homomorphism(d);
  if (!out.homomorphism)
    out.warning = "dynamics is not a homomorphism; only existing unimodular eigenvectors are used";

  const Mat S = superoperator(d, sector);
  const Eigen::Index N = S.rows();
  const bool normal = (S * S.adjoint() - S.adjoint() * S).norm() <= 1e-10 * std::max(1.0, S.squaredNorm());

  Eigen::ComplexSchur<Mat> schur(S);
  const Mat& T = schur.matrixT();
  std::vector<double> angles;
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < N; ++i) {
    const cplx mu = T(i, i);
    if (std::abs(std::abs(mu) - 1.0) <= kUnimodularTol) {
      angles.push_back(angle_turns(mu));
      idx.push_back(i);
    }
  }

  const Vec one = to_coords(Operator::identity(d.ctx()), sector);  // unit norm
  struct Item {
    double angle;
    Vec v;
  };
  std::vector<Item> items;
  for (const auto& cl : cluster_angles(angles)) {
    const auto s = static_cast<Eigen::Index>(cl.members.size());
    Mat cols(N, s);
    if (normal) {
      for (Eigen::Index k = 0; k < s; ++k) cols.col(k) = schur.matrixU().col(idx[cl.members[k]]);
    } else {
      // null space of S - mu: right singular vectors of the s smallest singular values
      const Mat shifted = S - turn(cl.angle) * Mat::Identity(N, N);
      Eigen::BDCSVD<Mat> svd(shifted, Eigen::ComputeFullV);
      cols = svd.matrixV().rightCols(s);
    }
    if (cl.angle == 0.0) {
      // 1/||1||_2 leads the fixed-point block
      Mat rest = cols - one * (one.adjoint() * cols);
      Mat q = orthonormal_columns(rest, 1e-6);
      items.push_back({0.0, one});
      for (Eigen::Index k = 0; k < std::min<Eigen::Index>(q.cols(), s - 1); ++k) items.push_back({0.0, q.col(k)});
    } else {
      Mat q = orthonormal_columns(cols, 1e-6);
      for (Eigen::Index k = 0; k < q.cols(); ++k) items.push_back({cl.angle, q.col(k)});
    }
  }
  for (std::size_t i = 0; i < items.size(); ++i)
    if (!(items[i].angle == 0.0 && i == 0)) detail::fix_phase(items[i].v);

  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.angle != b.angle) return a.angle < b.angle;
    return detail::first_support(a.v) < detail::first_support(b.v);
  });

  out.basis_coords.resize(N, static_cast<Eigen::Index>(items.size()));
  for (std::size_t i = 0; i < items.size(); ++i) {
    out.basis_coords.col(static_cast<Eigen::Index>(i)) = items[i].v;
    out.basis.push_back({from_coords(d.ctx(), items[i].v, sector), items[i].angle});
  }
  out.projector = out.basis_coords * out.basis_coords.adjoint();
  return out;
}

struct KroneckerSplit {
  Operator x_k;
  Operator x_perp;
  Vec coeffs;  // (b, x)_tau for each basis element b
};

inline KroneckerSplit kronecker_split(const EigenSplit& split, const Operator& x) {
  const Vec c = to_coords(x, split.sector);
  const Vec coeffs = split.basis_coords.adjoint() * c;
  const Operator xk = from_coords(x.ctx(), split.basis_coords * coeffs, split.sector);
  return {xk, x - xk, coeffs};
}

inline KroneckerSplit kronecker_split(const Dynamics& d, const Operator& x, Sector sector = Sector::Full) {
  return kronecker_split(eigen_split(d, sector), x);
}

/// ||P_K alpha(y)||_2 for y in K-perp; vanishes when alpha(K-perp) is inside K-perp.
inline double kperp_invariance_defect(const Dynamics& d, const EigenSplit& split, const Operator& x_perp) {
  const Vec c = to_coords(apply(d, x_perp), split.sector);
  return (split.projector * c).norm();
}

// ---------------------------------------------------------------------------
// Spectral measures

struct Atom {
  double angle = 0.0;
  double mass = 0.0;
};

/// Atomic measure with gamma(l) = sum_atoms mass * e^{+2 pi i l angle}.
struct SpectralMeasure {
  std::vector<Atom> atoms;  // sorted by angle
  double total = 0.0;
  double gamma_check_error = 0.0;
  int gamma_check_horizon = 0;

  cplx fourier(int l) const {
    cplx s{};
    for (const auto& a : atoms) s += a.mass * turn(std::fmod(static_cast<double>(l) * a.angle, 1.0));
    return s;
  }
  double sum_squared_masses() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.mass * a.mass;
    return s;
  }
};

inline SpectralMeasure spectral_measure(const EigenSplit& split, const Dynamics& d, const Operator& x, int L = -1) {
  if (!split.homomorphism)
    throw HypothesisError("spectral measure from eigenoperators requires a homomorphism (unitary superoperator)");
  const Vec c = to_coords(x, split.sector);
  const Vec coeffs = split.basis_coords.adjoint() * c;
  std::vector<double> angles;
  for (const auto& b : split.basis) angles.push_back(b.angle);
  SpectralMeasure m;
  // masses at rounding level (relative to ||x||_2^2) are dropped, not reported as atoms
  const double mass_floor = 1e-24 * std::max(1.0, c.squaredNorm());
  for (const auto& cl : cluster_angles(angles)) {
    double mass = 0.0;
    for (auto i : cl.members) mass += std::norm(coeffs(static_cast<Eigen::Index>(i)));
    m.total += mass;
    if (mass > mass_floor) m.atoms.push_back({cl.angle, mass});
  }
  const int horizon = L >= 0 ? L : 4 * x.dim() * x.dim();
  const CorrelationSequence g = correlation(d, x, horizon);
  m.gamma_check_horizon = horizon;
  for (int l = -horizon; l <= horizon; ++l) m.gamma_check_error = std::max(m.gamma_check_error, std::abs(g(l) - m.fourier(l)));
  return m;
}

inline SpectralMeasure spectral_measure(const Dynamics& d, const Operator& x, Sector sector = Sector::Full, int L = -1) {
  if (!is_homomorphism(d))
    throw HypothesisError("spectral measure from eigenoperators requires a homomorphism (unitary superoperator)");
  return spectral_measure(eigen_split(d, sector), d, x, L);
}

}  // namespace wwlab
