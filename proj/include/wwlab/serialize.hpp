#pragma once

// JSON (de)serialization of values. Matrices use { "n": int, "re": [[...]], "im": [[...]] }.

#include "wwlab/dynamics.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <string>

namespace wwlab {

using json = nlohmann::json;

inline json matrix_to_json(const Mat& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array(), c = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      r.push_back(m(i, j).real());
      c.push_back(m(i, j).imag());
    }
    re.push_back(std::move(r));
    im.push_back(std::move(c));
  }
  return {{"n", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline Mat matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("re")) throw SchemaError("matrix needs fields n and re");
  const int n = j.at("n").get<int>();
  if (n < 1) throw SchemaError("matrix size n must be >= 1");
  const json& re = j.at("re");
  const json im = j.contains("im") ? j.at("im") : json();
  auto check = [n](const json& a, const char* what) {
    if (!a.is_array() || static_cast<int>(a.size()) != n) throw SchemaError(std::string(what) + " must have n rows");
    for (const auto& row : a)
      if (!row.is_array() || static_cast<int>(row.size()) != n) throw SchemaError(std::string(what) + " rows must have n entries");
  };
  check(re, "re");
  if (!im.is_null()) check(im, "im");
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double r = re[i][k].get<double>();
      const double c = im.is_null() ? 0.0 : im[i][k].get<double>();
      m(i, k) = {r, c};
    }
  return m;
}

inline json to_json(const Operator& x) { return matrix_to_json(x.mat()); }

inline Operator operator_from_json(const json& j, AlgebraCtx ctx) {
  Mat m = matrix_from_json(j);
  if (m.rows() != ctx.dim) throw SchemaError("matrix size does not match algebra dimension");
  return {ctx, std::move(m)};
}

inline json to_json(const Dynamics& d) {
  return std::visit(
      [&](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, UnitaryConjugation>) {
          return {{"kind", "unitary"}, {"u", to_json(k.u)}};
        } else if constexpr (std::is_same_v<K, PermutationConjugation>) {
          return {{"kind", "permutation"}, {"perm", k.perm}};
        } else if constexpr (std::is_same_v<K, KrausChannel>) {
          json terms = json::array();
          for (const auto& t : k.terms) terms.push_back({{"weight", t.weight}, {"u", to_json(t.u)}});
          return {{"kind", "kraus"}, {"terms", std::move(terms)}};
        } else if constexpr (std::is_same_v<K, Composition>) {
          json parts = json::array();
          for (const auto& p : k.parts) parts.push_back(to_json(p));
          return {{"kind", "composition"}, {"parts", std::move(parts)}};
        } else {
          return {{"kind", "power"}, {"base", to_json(*k.base)}, {"k", k.k}};
        }
      },
      d.kind());
}

namespace detail {
inline void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw SchemaError("unknown field '" + key + "' in " + where);
  }
}
}  // namespace detail

/// Parses the explicit kinds: unitary, permutation, kraus, composition, power.
inline Dynamics dynamics_from_json(const json& j, AlgebraCtx ctx) {
  if (!j.is_object() || !j.contains("kind")) throw SchemaError("dynamics needs a kind");
  const std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "unitary") {
      detail::require_keys(j, {"kind", "u"}, "unitary dynamics");
      return Dynamics::unitary(operator_from_json(j.at("u"), ctx));
    }
    if (kind == "permutation") {
      detail::require_keys(j, {"kind", "perm"}, "permutation dynamics");
      return Dynamics::permutation(ctx, j.at("perm").get<std::vector<int>>());
    }
    if (kind == "kraus") {
      detail::require_keys(j, {"kind", "terms"}, "kraus dynamics");
      std::vector<KrausTerm> terms;
      for (const auto& t : j.at("terms")) {
        detail::require_keys(t, {"weight", "u"}, "kraus term");
        terms.push_back({t.at("weight").get<double>(), operator_from_json(t.at("u"), ctx)});
      }
      return Dynamics::kraus(std::move(terms));
    }
    if (kind == "composition") {
      detail::require_keys(j, {"kind", "parts"}, "composition dynamics");
      std::vector<Dynamics> parts;
      for (const auto& p : j.at("parts")) parts.push_back(dynamics_from_json(p, ctx));
      return Dynamics::composition(std::move(parts));
    }
    if (kind == "power") {
      detail::require_keys(j, {"kind", "base", "k"}, "power dynamics");
      return Dynamics::power(dynamics_from_json(j.at("base"), ctx), j.at("k").get<int>());
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed dynamics: ") + e.what());
  } catch (const DomainError& e) {
    throw SchemaError(std::string("invalid dynamics: ") + e.what());
  } catch (const DimensionError& e) {
    throw SchemaError(std::string("invalid dynamics: ") + e.what());
  }
  throw SchemaError("unknown dynamics kind '" + kind + "'");
}

/// Shortest round-trip decimal form of a double ("%.17g").
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace wwlab
