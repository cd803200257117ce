#pragma once

// The map alpha: positive, trace-preserving dynamics given constructively as
// conjugations and convex combinations of conjugations.

#include "wwlab/algebra.hpp"

#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace wwlab {

class Dynamics;

struct UnitaryConjugation {
  Operator u;  // x -> u x u*
};

struct PermutationConjugation {
  std::vector<int> perm;  // basis e_j -> e_{perm[j]}; x -> P x P*
};

struct KrausTerm {
  double weight;
  Operator u;
};

struct KrausChannel {
  std::vector<KrausTerm> terms;  // x -> sum_i w_i u_i* x u_i
};

struct Composition {
  std::vector<Dynamics> parts;  // applied in list order
};

struct Power {
  std::shared_ptr<const Dynamics> base;
  int k = 0;
};

/// Immutable description of alpha. Factories validate the invariants of each kind.
class Dynamics {
 public:
  using Kind = std::variant<UnitaryConjugation, PermutationConjugation, KrausChannel, Composition, Power>;

  static Dynamics unitary(Operator u) {
    const double tol = u.ctx().tol;
    const int n = u.dim();
    const double defect = op_norm(u.mat().adjoint() * u.mat() - Mat::Identity(n, n));
    if (defect > std::max(tol, 1e-12 * n))
      throw DomainError("unitary conjugation: u*u differs from 1 by " + std::to_string(defect));
    const AlgebraCtx ctx = u.ctx();
    return Dynamics(ctx, UnitaryConjugation{std::move(u)});
  }

  static Dynamics permutation(AlgebraCtx ctx, std::vector<int> perm) {
    if (static_cast<int>(perm.size()) != ctx.dim) throw DimensionError("permutation length must equal dim");
    std::vector<int> seen(perm.size(), 0);
    for (int p : perm) {
      if (p < 0 || p >= ctx.dim || seen[p]++) throw DomainError("not a permutation of {0..n-1}");
    }
    return Dynamics(ctx, PermutationConjugation{std::move(perm)});
  }

  static Dynamics kraus(std::vector<KrausTerm> terms) {
    if (terms.empty()) throw DomainError("Kraus channel needs at least one term");
    const AlgebraCtx ctx = terms.front().u.ctx();
    double total = 0.0;
    for (const auto& t : terms) {
      require_same_dim(ctx, t.u.ctx());
      if (!(t.weight > 0.0)) throw DomainError("Kraus weights must be positive");
      total += t.weight;
      const double defect = op_norm(t.u.mat().adjoint() * t.u.mat() - Mat::Identity(ctx.dim, ctx.dim));
      if (defect > std::max(ctx.tol, 1e-12 * ctx.dim)) throw DomainError("Kraus operators must be unitary");
    }
    if (std::abs(total - 1.0) > std::max(ctx.tol, 1e-12)) throw DomainError("Kraus weights must sum to 1");
    return Dynamics(ctx, KrausChannel{std::move(terms)});
  }

  static Dynamics composition(std::vector<Dynamics> parts) {
    if (parts.empty()) throw DomainError("composition of an empty list");
    const AlgebraCtx ctx = parts.front().ctx();
    for (const auto& p : parts) require_same_dim(ctx, p.ctx());
    return Dynamics(ctx, Composition{std::move(parts)});
  }

  static Dynamics power(Dynamics base, int k) {
    if (k < 0) throw DomainError("power must be non-negative");
    const AlgebraCtx ctx = base.ctx();
    return Dynamics(ctx, Power{std::make_shared<const Dynamics>(std::move(base)), k});
  }

  static Dynamics identity(AlgebraCtx ctx) {
    std::vector<int> id(static_cast<std::size_t>(ctx.dim));
    std::iota(id.begin(), id.end(), 0);
    return permutation(ctx, std::move(id));
  }

  /// Cyclic shift j -> j+1 mod n of the standard basis.
  static Dynamics cyclic_shift(AlgebraCtx ctx) {
    std::vector<int> p(static_cast<std::size_t>(ctx.dim));
    for (int j = 0; j < ctx.dim; ++j) p[j] = (j + 1) % ctx.dim;
    return permutation(ctx, std::move(p));
  }

  /// Cyclic shift of tensor factors on (C^2)^{(x) qubits}: site s -> s+1.
  /// Basis index bits are rotated; bit s of the index is site s.
  static Dynamics tensor_shift(int qubits) {
    if (qubits < 1 || qubits > 10) throw DomainError("tensor shift supports 1..10 qubits");
    const int n = 1 << qubits;
    std::vector<int> p(static_cast<std::size_t>(n));
    for (int b = 0; b < n; ++b) {
      const int top = (b >> (qubits - 1)) & 1;
      p[b] = ((b << 1) & (n - 1)) | top;
    }
    return permutation(AlgebraCtx::make(n), std::move(p));
  }

  const AlgebraCtx& ctx() const { return ctx_; }
  int dim() const { return ctx_.dim; }
  const Kind& kind() const { return kind_; }

 private:
  Dynamics(AlgebraCtx ctx, Kind k) : ctx_(ctx), kind_(std::move(k)) {}

  AlgebraCtx ctx_;
  Kind kind_;
};

/// alpha(x)
inline Operator apply(const Dynamics& d, const Operator& x) {
  require_same_dim(d.ctx(), x.ctx());
  return std::visit(
      [&](const auto& k) -> Operator {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, UnitaryConjugation>) {
          return {x.ctx(), k.u.mat() * x.mat() * k.u.mat().adjoint()};
        } else if constexpr (std::is_same_v<K, PermutationConjugation>) {
          const int n = x.dim();
          Mat r(n, n);
          for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) r(k.perm[i], k.perm[j]) = x.mat()(i, j);
          return {x.ctx(), std::move(r)};
        } else if constexpr (std::is_same_v<K, KrausChannel>) {
          Mat r = Mat::Zero(x.dim(), x.dim());
          for (const auto& t : k.terms) r.noalias() += t.weight * (t.u.mat().adjoint() * x.mat() * t.u.mat());
          return {x.ctx(), std::move(r)};
        } else if constexpr (std::is_same_v<K, Composition>) {
          Operator y = x;
          for (const auto& p : k.parts) y = apply(p, y);
          return y;
        } else {
          Operator y = x;
          for (int i = 0; i < k.k; ++i) y = apply(*k.base, y);
          return y;
        }
      },
      d.kind());
}

/// [x, alpha(x), ..., alpha^k(x)]
inline std::vector<Operator> iterate(const Dynamics& d, const Operator& x, int k) {
  if (k < 0) throw DomainError("iterate needs k >= 0");
  std::vector<Operator> out;
  out.reserve(static_cast<std::size_t>(k) + 1);
  out.push_back(x);
  for (int j = 1; j <= k; ++j) out.push_back(apply(d, out.back()));
  return out;
}

/// Structural certificate that alpha is multiplicative (a *-automorphism):
/// conjugations, Kraus channels with a single term, and their compositions/powers.
inline bool is_homomorphism_by_construction(const Dynamics& d) {
  return std::visit(
      [](const auto& k) -> bool {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, UnitaryConjugation> || std::is_same_v<K, PermutationConjugation>) {
          return true;
        } else if constexpr (std::is_same_v<K, KrausChannel>) {
          return k.terms.size() == 1;
        } else if constexpr (std::is_same_v<K, Composition>) {
          for (const auto& p : k.parts)
            if (!is_homomorphism_by_construction(p)) return false;
          return true;
        } else {
          return k.k == 0 || is_homomorphism_by_construction(*k.base);
        }
      },
      d.kind());
}

// ---------------------------------------------------------------------------
// Sectors: the algebra on which a scenario lives. Coordinates are taken in
// the tau-orthonormal basis {sqrt(n) e_ij} (Full) or {sqrt(n) e_ii} (Diagonal).

enum class Sector { Full, Diagonal };

inline std::string to_string(Sector s) { return s == Sector::Full ? "full" : "diagonal"; }

inline Eigen::Index sector_size(int dim, Sector s) {
  return s == Sector::Full ? static_cast<Eigen::Index>(dim) * dim : dim;
}

inline bool in_sector(const Operator& x, Sector s) {
  if (s == Sector::Full) return true;
  Mat off = x.mat();
  off.diagonal().setZero();
  return off.norm() <= x.ctx().tol * std::max(1.0, x.mat().norm());
}

/// Coordinates of x in the sector's orthonormal basis (column-major vec / sqrt(n)).
inline Vec to_coords(const Operator& x, Sector s) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(x.dim()));
  if (s == Sector::Full) return Eigen::Map<const Vec>(x.mat().data(), x.mat().size()) * scale;
  if (!in_sector(x, s)) throw DomainError("operator is not in the diagonal sector");
  return x.mat().diagonal() * scale;
}

inline Operator from_coords(AlgebraCtx ctx, const Vec& c, Sector s) {
  const double scale = std::sqrt(static_cast<double>(ctx.dim));
  if (c.size() != sector_size(ctx.dim, s)) throw DimensionError("coordinate vector has wrong length");
  if (s == Sector::Full) return {ctx, Eigen::Map<const Mat>(c.data(), ctx.dim, ctx.dim) * scale};
  Mat m = Mat::Zero(ctx.dim, ctx.dim);
  m.diagonal() = c * scale;
  return {ctx, std::move(m)};
}

/// Basis element with coordinate index `idx`, as an operator of unit L^2 norm.
inline Operator sector_basis(AlgebraCtx ctx, Sector s, Eigen::Index idx) {
  Vec c = Vec::Zero(sector_size(ctx.dim, s));
  c(idx) = 1.0;
  return from_coords(ctx, c, s);
}

/// Matrix of alpha on (L^2, (.,.)_tau) restricted to the sector, in the basis above.
inline Mat superoperator(const Dynamics& d, Sector s = Sector::Full) {
  const Eigen::Index size = sector_size(d.dim(), s);
  Mat S(size, size);
  for (Eigen::Index c = 0; c < size; ++c) {
    const Operator img = apply(d, sector_basis(d.ctx(), s, c));
    if (s == Sector::Diagonal && !in_sector(img, s))
      throw HypothesisError("dynamics does not leave the diagonal subalgebra invariant");
    S.col(c) = to_coords(img, s);
  }
  return S;
}

// ---------------------------------------------------------------------------
// Validation

struct DynamicsReport {
  bool trace_preserving = false;
  bool positive_on_samples = false;
  bool contraction_inf = false;
  bool homomorphism = false;
  bool ergodic = false;
  bool weakly_mixing = false;
  int fixed_space_dim = 0;
  std::vector<double> unimodular_spectrum;  // distinct clustered angles in [0,1)
  double spectral_gap = 0.0;                // 1 - max |mu| over the non-unimodular spectrum
  std::optional<std::pair<std::pair<int, int>, std::pair<int, int>>> multiplicativity_witness;
  Sector sector = Sector::Full;
};

inline constexpr double kUnimodularTol = 1e-8;

/// Groups angles (turns) whose circular neighbours are closer than tol.
/// Returns clusters as lists of indices into `angles`, each with a representative angle.
struct AngleCluster {
  double angle = 0.0;
  std::vector<std::size_t> members;
};

inline std::vector<AngleCluster> cluster_angles(const std::vector<double>& angles, double tol = kUnimodularTol) {
  std::vector<std::size_t> order(angles.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return angles[a] < angles[b]; });
  std::vector<AngleCluster> out;
  for (std::size_t idx : order) {
    if (!out.empty() && angles[idx] - angles[out.back().members.back()] <= tol) {
      out.back().members.push_back(idx);
    } else {
      out.push_back({0.0, {idx}});
    }
  }
  // merge across the 1 -> 0 seam
  if (out.size() > 1) {
    const double first = angles[out.front().members.front()];
    const double last = angles[out.back().members.back()];
    if (first + 1.0 - last <= tol) {
      auto tail = std::move(out.back());
      out.pop_back();
      out.front().members.insert(out.front().members.begin(), tail.members.begin(), tail.members.end());
    }
  }
  for (auto& c : out) {
    cplx s{};
    for (auto m : c.members) s += turn(angles[m]);
    double a = angle_turns(s);
    if (a <= tol || 1.0 - a <= tol) a = 0.0;
    c.angle = a;
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.angle < b.angle; });
  return out;
}

/// Dimension of ker(S - 1) by singular values at threshold kUnimodularTol.
inline int fixed_space_dimension(const Mat& S) {
  const Mat t = S - Mat::Identity(S.rows(), S.cols());
  const Eigen::VectorXd s = singular_values(t);
  int k = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) <= kUnimodularTol) ++k;
  return k;
}

/// Exact multiplicativity test on all matrix-unit pairs: alpha(e_ij e_kl) = alpha(e_ij) alpha(e_kl).
inline std::optional<std::pair<std::pair<int, int>, std::pair<int, int>>> find_multiplicativity_failure(
    const Dynamics& d) {
  const int n = d.dim();
  std::vector<Mat> img(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) img[static_cast<std::size_t>(i) * n + j] = apply(d, Operator::unit(d.ctx(), i, j)).mat();
  const double tol = std::max(d.ctx().tol, 1e-12);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Mat prod = img[static_cast<std::size_t>(i) * n + j] * img[static_cast<std::size_t>(k) * n + l];
          if (j == k) prod -= img[static_cast<std::size_t>(i) * n + l];
          if (prod.norm() > tol) return std::make_pair(std::make_pair(i, j), std::make_pair(k, l));
        }
  return std::nullopt;
}

inline bool is_homomorphism(const Dynamics& d) {
  return is_homomorphism_by_construction(d) || !find_multiplicativity_failure(d).has_value();
}

/// Hypothesis checks on alpha: trace preservation, positivity and infinity-norm
/// contraction on seeded random samples, exact multiplicativity, and the
/// unimodular spectrum of the superoperator on the chosen sector.
inline DynamicsReport validate(const Dynamics& d, int samples, std::uint64_t seed, Sector sector = Sector::Full) {
  if (samples < 1) throw DomainError("validate needs at least one sample");
  const AlgebraCtx ctx = d.ctx();
  const int n = ctx.dim;
  const double tol = std::max(ctx.tol, 1e-12);
  DynamicsReport r;
  r.sector = sector;
  r.trace_preserving = r.positive_on_samples = r.contraction_inf = true;

  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    Mat g = random_ginibre(rng, n);
    if (sector == Sector::Diagonal) g = Mat(g.diagonal().asDiagonal());
    const Operator x(ctx, g);
    const Operator ax = apply(d, x);
    if (std::abs(trace(ax) - trace(x)) > tol * std::max(1.0, norm2(x))) r.trace_preserving = false;
    if (norm_inf(ax) > norm_inf(x) * (1.0 + tol) + tol) r.contraction_inf = false;
    const Operator pos = x.adjoint() * x;
    const Operator apos = apply(d, pos);
    if (min_hermitian_eigenvalue(apos.mat()) < -tol * std::max(1.0, norm_inf(pos)) ||
        !apos.is_hermitian())
      r.positive_on_samples = false;
  }
  // trace preservation on the spanning set of matrix units as well
  for (int i = 0; i < n && r.trace_preserving; ++i)
    for (int j = 0; j < n; ++j) {
      const Operator e = Operator::unit(ctx, i, j);
      if (std::abs(trace(apply(d, e)) - trace(e)) > tol) {
        r.trace_preserving = false;
        break;
      }
    }

  if (is_homomorphism_by_construction(d)) {
    r.homomorphism = true;
  } else {
    r.multiplicativity_witness = find_multiplicativity_failure(d);
    r.homomorphism = !r.multiplicativity_witness.has_value();
  }
  if (r.homomorphism && !r.positive_on_samples) r.homomorphism = false;

  const Mat S = superoperator(d, sector);
  r.fixed_space_dim = fixed_space_dimension(S);
  const Vec one = to_coords(Operator::identity(ctx), sector);
  const bool identity_fixed = (S * one - one).norm() <= 1e-8;
  r.ergodic = identity_fixed && r.fixed_space_dim == 1;

  Eigen::ComplexEigenSolver<Mat> ces(S, false);
  std::vector<double> uni;
  double inner_radius = 0.0;
  for (Eigen::Index i = 0; i < ces.eigenvalues().size(); ++i) {
    const cplx mu = ces.eigenvalues()(i);
    if (std::abs(std::abs(mu) - 1.0) <= kUnimodularTol) {
      uni.push_back(angle_turns(mu));
    } else {
      inner_radius = std::max(inner_radius, std::abs(mu));
    }
  }
  r.spectral_gap = 1.0 - inner_radius;
  for (const auto& c : cluster_angles(uni)) r.unimodular_spectrum.push_back(c.angle);
  r.weakly_mixing = r.ergodic && r.unimodular_spectrum.size() == 1 && r.unimodular_spectrum.front() == 0.0;
  return r;
}

}  // namespace wwlab
