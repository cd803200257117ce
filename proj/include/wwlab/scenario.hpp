#pragma once

// Scenario configuration: a versioned JSON document naming an algebra, the
// dynamics, an observable, an experiment and its parameters.

#include "wwlab/experiments.hpp"
#include "wwlab/serialize.hpp"

#include <cctype>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace wwlab {

inline constexpr int kSchemaVersion = 1;

enum class ExperimentKind { Validate, Vdc, Spectral, Witness, Ww, Theorem6, Weakmix, MeanErgodic };

inline std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Validate: return "validate";
    case ExperimentKind::Vdc: return "vdc";
    case ExperimentKind::Spectral: return "spectral";
    case ExperimentKind::Witness: return "witness";
    case ExperimentKind::Ww: return "ww";
    case ExperimentKind::Theorem6: return "theorem6";
    case ExperimentKind::Weakmix: return "weakmix";
    case ExperimentKind::MeanErgodic: return "mean_ergodic";
  }
  return "?";
}

inline ExperimentKind experiment_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::Validate, ExperimentKind::Vdc, ExperimentKind::Spectral, ExperimentKind::Witness,
                 ExperimentKind::Ww, ExperimentKind::Theorem6, ExperimentKind::Weakmix, ExperimentKind::MeanErgodic})
    if (to_string(k) == s) return k;
  throw SchemaError("unknown experiment '" + s + "'");
}

inline Sector sector_from_string(const std::string& s) {
  if (s == "full") return Sector::Full;
  if (s == "diagonal") return Sector::Diagonal;
  throw SchemaError("unknown sector '" + s + "' (expected full or diagonal)");
}

struct LambdaGridSpec {
  int size = 1024;         // equally spaced angles j/size
  int roots_of_unity = 0;  // when > 0, the grid {j/q}
  LambdaGrid build() const { return roots_of_unity > 0 ? LambdaGrid::roots_of_unity(roots_of_unity) : LambdaGrid::uniform(size); }
  bool operator==(const LambdaGridSpec&) const = default;
};

struct ScenarioParams {
  int N = 1000;
  std::vector<int> m_sweep{0, 4, 16, 64};
  LambdaGridSpec lambda_grid;
  double eps = 0.3;
  double delta = 0.1;
  double threshold = 1e-5;
  std::uint64_t seed = 1;
  // vdc
  int instances = 1000;
  int n_max = 8;
  int dim_max = 6;
  int n = 0;   // fixed number of terms (0: random per instance)
  int m = -1;  // fixed m (-1: all 0 <= m <= n-1)
  // validate / spectral
  int samples = 16;
  int L = -1;
  int toeplitz_m = 16;
  // ww
  std::string mode = "bWW";
  // weakmix dichotomy tolerances
  double tol_ne1 = 1e-5;
  double tol_one = 1e-6;
  bool operator==(const ScenarioParams&) const = default;
};

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  std::string name;
  std::string description;
  std::string exercises;  // mathematical statement the scenario exercises
  int dim = 1;
  Sector sector = Sector::Full;
  double tol = 1e-10;
  json dynamics;    // canonical description (explicit kinds or generators)
  json observable;  // canonical description (explicit operator or generator)
  ExperimentKind experiment = ExperimentKind::Validate;
  ScenarioParams params;

  AlgebraCtx ctx() const { return AlgebraCtx::make(dim, tol); }
  bool operator==(const ScenarioConfig& o) const {
    return schema_version == o.schema_version && name == o.name && description == o.description &&
           exercises == o.exercises && dim == o.dim && sector == o.sector && tol == o.tol && dynamics == o.dynamics &&
           observable == o.observable && experiment == o.experiment && params == o.params;
  }
};

namespace detail {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("field '") + key + "': " + e.what());
  }
}

inline json canonical_dynamics(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) throw SchemaError("dynamics needs a string kind");
  const std::string kind = j.at("kind");
  if (kind == "cyclic_shift") {
    require_keys(j, {"kind"}, "cyclic_shift dynamics");
    return {{"kind", kind}};
  }
  if (kind == "tensor_shift") {
    require_keys(j, {"kind", "qubits"}, "tensor_shift dynamics");
    return {{"kind", kind}, {"qubits", get_or<int>(j, "qubits", 1)}};
  }
  if (kind == "random_kraus") {
    require_keys(j, {"kind", "terms", "seed"}, "random_kraus dynamics");
    if (!j.contains("seed")) throw SchemaError("random_kraus needs a seed");
    return {{"kind", kind}, {"terms", get_or<int>(j, "terms", 2)}, {"seed", get_or<std::uint64_t>(j, "seed", 0)}};
  }
  if (kind == "diagonal_unitary") {
    require_keys(j, {"kind", "angles"}, "diagonal_unitary dynamics");
    return {{"kind", kind}, {"angles", get_or<std::vector<double>>(j, "angles", {})}};
  }
  if (kind == "composition") {
    require_keys(j, {"kind", "parts"}, "composition dynamics");
    json parts = json::array();
    for (const auto& p : j.at("parts")) parts.push_back(canonical_dynamics(p));
    return {{"kind", kind}, {"parts", parts}};
  }
  if (kind == "power") {
    require_keys(j, {"kind", "base", "k"}, "power dynamics");
    return {{"kind", kind}, {"base", canonical_dynamics(j.at("base"))}, {"k", get_or<int>(j, "k", 1)}};
  }
  if (kind == "unitary" || kind == "permutation" || kind == "kraus") return j;
  throw SchemaError("unknown dynamics kind '" + kind + "'");
}

inline json canonical_observable(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) throw SchemaError("observable needs a string kind");
  const std::string kind = j.at("kind");
  json out;
  if (kind == "operator") {
    require_keys(j, {"kind", "value", "normalize", "scale"}, "operator observable");
    if (!j.contains("value")) throw SchemaError("operator observable needs a value");
    out = {{"kind", kind}, {"value", j.at("value")}};
  } else if (kind == "random_hermitian" || kind == "traceless_random") {
    require_keys(j, {"kind", "seed", "normalize", "scale"}, kind + " observable");
    if (!j.contains("seed")) throw SchemaError(kind + " needs a seed");
    out = {{"kind", kind}, {"seed", get_or<std::uint64_t>(j, "seed", 0)}};
  } else if (kind == "diagonal_indicator") {
    require_keys(j, {"kind", "index", "mean_zero", "normalize", "scale"}, "diagonal_indicator observable");
    out = {{"kind", kind}, {"index", get_or<int>(j, "index", 0)}, {"mean_zero", get_or<bool>(j, "mean_zero", false)}};
  } else if (kind == "eigenoperator_index") {
    require_keys(j, {"kind", "index", "normalize", "scale"}, "eigenoperator_index observable");
    out = {{"kind", kind}, {"index", get_or<int>(j, "index", 0)}};
  } else if (kind == "site_pauli_z") {
    require_keys(j, {"kind", "site", "normalize", "scale"}, "site_pauli_z observable");
    out = {{"kind", kind}, {"site", get_or<int>(j, "site", 0)}};
  } else {
    throw SchemaError("unknown observable kind '" + kind + "'");
  }
  out["normalize"] = get_or<bool>(j, "normalize", true);
  out["scale"] = get_or<double>(j, "scale", 1.0);
  return out;
}

}  // namespace detail

inline ScenarioParams params_from_json(const json& j) {
  detail::require_keys(j,
                       {"N", "m_sweep", "lambda_grid", "eps", "delta", "threshold", "seed", "instances", "n_max",
                        "dim_max", "n", "m", "samples", "L", "toeplitz_m", "mode", "tol_ne1", "tol_one"},
                       "params");
  ScenarioParams p;
  using detail::get_or;
  p.N = get_or(j, "N", p.N);
  p.m_sweep = get_or(j, "m_sweep", p.m_sweep);
  if (j.contains("lambda_grid")) {
    const json& g = j.at("lambda_grid");
    detail::require_keys(g, {"size", "roots_of_unity"}, "lambda_grid");
    p.lambda_grid.size = get_or(g, "size", p.lambda_grid.size);
    p.lambda_grid.roots_of_unity = get_or(g, "roots_of_unity", 0);
  }
  p.eps = get_or(j, "eps", p.eps);
  p.delta = get_or(j, "delta", p.delta);
  p.threshold = get_or(j, "threshold", p.threshold);
  p.seed = get_or(j, "seed", p.seed);
  p.instances = get_or(j, "instances", p.instances);
  p.n_max = get_or(j, "n_max", p.n_max);
  p.dim_max = get_or(j, "dim_max", p.dim_max);
  p.n = get_or(j, "n", p.n);
  p.m = get_or(j, "m", p.m);
  p.samples = get_or(j, "samples", p.samples);
  p.L = get_or(j, "L", p.L);
  p.toeplitz_m = get_or(j, "toeplitz_m", p.toeplitz_m);
  p.mode = get_or(j, "mode", p.mode);
  p.tol_ne1 = get_or(j, "tol_ne1", p.tol_ne1);
  p.tol_one = get_or(j, "tol_one", p.tol_one);

  if (p.N < 1) throw SchemaError("params.N must be >= 1");
  if (p.lambda_grid.size < 1 || p.lambda_grid.roots_of_unity < 0) throw SchemaError("lambda grid size must be >= 1");
  for (int m : p.m_sweep)
    if (m < 0) throw SchemaError("params.m_sweep entries must be >= 0");
  if (!(p.eps > 0.0 && p.eps < 1.0)) throw SchemaError("params.eps must lie in (0,1)");
  if (!(p.delta > 0.0)) throw SchemaError("params.delta must be positive");
  if (!(p.threshold > 0.0)) throw SchemaError("params.threshold must be positive");
  if (p.instances < 1 || p.n_max < 1 || p.dim_max < 1) throw SchemaError("vdc sizes must be >= 1");
  if (p.n < 0) throw SchemaError("params.n must be >= 0");
  if (p.samples < 1) throw SchemaError("params.samples must be >= 1");
  if (p.mode != "WW" && p.mode != "bWW") throw SchemaError("params.mode must be WW or bWW");
  return p;
}

inline json to_json(const ScenarioParams& p) {
  json j = {{"N", p.N},
            {"m_sweep", p.m_sweep},
            {"eps", p.eps},
            {"delta", p.delta},
            {"threshold", p.threshold},
            {"seed", p.seed},
            {"instances", p.instances},
            {"n_max", p.n_max},
            {"dim_max", p.dim_max},
            {"n", p.n},
            {"m", p.m},
            {"samples", p.samples},
            {"L", p.L},
            {"toeplitz_m", p.toeplitz_m},
            {"mode", p.mode},
            {"tol_ne1", p.tol_ne1},
            {"tol_one", p.tol_one}};
  j["lambda_grid"] = {{"size", p.lambda_grid.size}, {"roots_of_unity", p.lambda_grid.roots_of_unity}};
  return j;
}

inline ScenarioConfig config_from_json(const json& j) {
  detail::require_keys(j,
                       {"schema_version", "name", "description", "exercises", "algebra", "dynamics", "observable",
                        "experiment", "params"},
                       "scenario");
  ScenarioConfig c;
  using detail::get_or;
  c.schema_version = get_or(j, "schema_version", 0);
  if (c.schema_version != kSchemaVersion)
    throw SchemaError("unsupported schema_version " + std::to_string(c.schema_version) + " (expected 1)");
  if (!j.contains("name") || !j.at("name").is_string() || j.at("name").get<std::string>().empty())
    throw SchemaError("scenario needs a nonempty name");
  c.name = j.at("name");
  for (char ch : c.name)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.'))
      throw SchemaError("scenario name may only contain letters, digits, '-', '_' and '.'");
  c.description = get_or<std::string>(j, "description", "");
  c.exercises = get_or<std::string>(j, "exercises", "");
  if (!j.contains("algebra")) throw SchemaError("scenario needs an algebra");
  const json& a = j.at("algebra");
  detail::require_keys(a, {"dim", "sector", "tol"}, "algebra");
  c.dim = get_or(a, "dim", 0);
  if (c.dim < 1) throw SchemaError("algebra.dim must be >= 1");
  c.sector = sector_from_string(get_or<std::string>(a, "sector", "full"));
  c.tol = get_or(a, "tol", 1e-10);
  if (!(c.tol >= 0.0)) throw SchemaError("algebra.tol must be non-negative");
  if (!j.contains("dynamics")) throw SchemaError("scenario needs dynamics");
  c.dynamics = detail::canonical_dynamics(j.at("dynamics"));
  c.observable = j.contains("observable") ? detail::canonical_observable(j.at("observable"))
                                          : detail::canonical_observable({{"kind", "random_hermitian"}, {"seed", 0}});
  if (!j.contains("experiment") || !j.at("experiment").is_string()) throw SchemaError("scenario needs an experiment");
  c.experiment = experiment_from_string(j.at("experiment"));
  c.params = params_from_json(j.contains("params") ? j.at("params") : json::object());
  if (c.experiment == ExperimentKind::Vdc && c.params.n > 0 && c.params.m > c.params.n - 1)
    throw SchemaError("vdc needs m <= n-1, got m = " + std::to_string(c.params.m) + ", n = " + std::to_string(c.params.n));
  if (c.experiment == ExperimentKind::Vdc && c.params.n == 0 && c.params.m > c.params.n_max - 1)
    throw SchemaError("vdc needs m <= n_max-1");
  return c;
}

inline json to_json(const ScenarioConfig& c) {
  return {{"schema_version", c.schema_version},
          {"name", c.name},
          {"description", c.description},
          {"exercises", c.exercises},
          {"algebra", {{"dim", c.dim}, {"sector", to_string(c.sector)}, {"tol", c.tol}}},
          {"dynamics", c.dynamics},
          {"observable", c.observable},
          {"experiment", to_string(c.experiment)},
          {"params", to_json(c.params)}};
}

inline ScenarioConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

/// Replaces every seed (params and generators) with `seed`.
inline void override_seeds(ScenarioConfig& c, std::uint64_t seed) {
  c.params.seed = seed;
  std::function<void(json&)> walk = [&](json& j) {
    if (j.is_object()) {
      if (j.contains("seed")) j["seed"] = seed;
      for (auto& [k, v] : j.items()) walk(v);
    } else if (j.is_array()) {
      for (auto& v : j) walk(v);
    }
  };
  walk(c.dynamics);
  walk(c.observable);
}

// ---------------------------------------------------------------------------
// Materialization

inline Dynamics build_dynamics(const json& spec, AlgebraCtx ctx) {
  const std::string kind = spec.at("kind");
  if (kind == "cyclic_shift") return Dynamics::cyclic_shift(ctx);
  if (kind == "tensor_shift") {
    const int q = spec.at("qubits");
    if (q < 1 || q > 10 || (1 << q) != ctx.dim) throw SchemaError("tensor_shift needs algebra.dim = 2^qubits");
    return Dynamics::tensor_shift(q);
  }
  if (kind == "random_kraus") {
    const int terms = spec.at("terms");
    if (terms < 1) throw SchemaError("random_kraus needs terms >= 1");
    Rng rng(spec.at("seed").get<std::uint64_t>());
    std::vector<KrausTerm> ts;
    for (int i = 0; i < terms; ++i) ts.push_back({1.0 / terms, Operator(ctx, random_unitary(rng, ctx.dim))});
    return Dynamics::kraus(std::move(ts));
  }
  if (kind == "diagonal_unitary") {
    const auto angles = spec.at("angles").get<std::vector<double>>();
    if (static_cast<int>(angles.size()) != ctx.dim) throw SchemaError("diagonal_unitary needs dim angles");
    std::vector<cplx> d;
    for (double t : angles) d.push_back(turn(t));
    return Dynamics::unitary(Operator::diagonal(ctx, std::span<const cplx>(d)));
  }
  if (kind == "composition") {
    std::vector<Dynamics> parts;
    for (const auto& p : spec.at("parts")) parts.push_back(build_dynamics(p, ctx));
    return Dynamics::composition(std::move(parts));
  }
  if (kind == "power") return Dynamics::power(build_dynamics(spec.at("base"), ctx), spec.at("k").get<int>());
  return dynamics_from_json(spec, ctx);
}

inline Operator build_observable(const json& spec, const Dynamics& d, Sector sector) {
  const AlgebraCtx ctx = d.ctx();
  const int n = ctx.dim;
  const std::string kind = spec.at("kind");
  Operator x = Operator::zero(ctx);
  if (kind == "operator") {
    x = operator_from_json(spec.at("value"), ctx);
  } else if (kind == "random_hermitian" || kind == "traceless_random") {
    Rng rng(spec.at("seed").get<std::uint64_t>());
    Mat h = random_hermitian(rng, n);
    if (sector == Sector::Diagonal) h = Mat(h.diagonal().asDiagonal());
    x = Operator(ctx, h);
    if (kind == "traceless_random") x -= trace(x) * Operator::identity(ctx);
  } else if (kind == "diagonal_indicator") {
    const int i = spec.at("index");
    if (i < 0 || i >= n) throw SchemaError("diagonal_indicator index out of range");
    x = Operator::unit(ctx, i, i);
    if (spec.at("mean_zero").get<bool>()) x -= trace(x) * Operator::identity(ctx);
  } else if (kind == "eigenoperator_index") {
    const EigenSplit split = eigen_split(d, sector);
    const int i = spec.at("index");
    if (i < 0 || i >= split.dim_k()) throw SchemaError("eigenoperator_index out of range");
    x = split.basis[static_cast<std::size_t>(i)].op;
  } else if (kind == "site_pauli_z") {
    const int s = spec.at("site");
    if ((n & (n - 1)) != 0 || s < 0 || (1 << s) >= n) throw SchemaError("site_pauli_z needs dim = 2^q and site < q");
    Mat m = Mat::Zero(n, n);
    for (int b = 0; b < n; ++b) m(b, b) = ((b >> s) & 1) ? -1.0 : 1.0;
    x = Operator(ctx, m);
  }
  if (spec.at("normalize").get<bool>()) {
    const double nx = norm2(x);
    if (nx > 0.0) x *= 1.0 / nx;
  }
  x *= spec.at("scale").get<double>();
  if (!in_sector(x, sector)) throw SchemaError("observable does not lie in the scenario sector");
  return x;
}

}  // namespace wwlab
