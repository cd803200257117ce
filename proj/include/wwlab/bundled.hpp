#pragma once

// Scenarios shipped with the library.

#include "wwlab/scenario.hpp"

#include <string_view>
#include <vector>

namespace wwlab {

struct BundledScenario {
  std::string_view name;
  std::string_view exercises;
  std::string_view runtime;  // rough wall time on one core
  std::string_view json;
};

inline const std::vector<BundledScenario>& bundled_scenarios() {
  static const std::vector<BundledScenario> all = {
      {"classical-q12", "bilateral WW convergence for a homomorphism via the bound chain", "~2 s", R"({
  "schema_version": 1,
  "name": "classical-q12",
  "description": "12-cycle acting on the diagonal algebra; mean-zero indicator of a point",
  "exercises": "bilateral WW convergence for a homomorphism via the bound chain",
  "algebra": {"dim": 12, "sector": "diagonal"},
  "dynamics": {"kind": "cyclic_shift"},
  "observable": {"kind": "diagonal_indicator", "index": 0, "mean_zero": true},
  "experiment": "theorem6",
  "params": {"N": 600, "m_sweep": [0, 4, 16, 64], "lambda_grid": {"size": 1024}}
})"},
      {"tensorshift-4q", "bound chain for a non-classical automorphism", "~10 s", R"({
  "schema_version": 1,
  "name": "tensorshift-4q",
  "description": "cyclic shift of 4 qubit tensor factors; Pauli Z on the first site",
  "exercises": "bound chain for a non-classical automorphism",
  "algebra": {"dim": 16, "sector": "full"},
  "dynamics": {"kind": "tensor_shift", "qubits": 4},
  "observable": {"kind": "site_pauli_z", "site": 0},
  "experiment": "theorem6",
  "params": {"N": 200, "m_sweep": [0, 4, 16, 64], "lambda_grid": {"size": 1024}}
})"},
      {"channel-weakmix", "weak mixing dichotomy for a primitive channel", "~5 s", R"({
  "schema_version": 1,
  "name": "channel-weakmix",
  "description": "mixture of two random qubit unitaries; traceless random observable",
  "exercises": "weak mixing dichotomy for a primitive channel",
  "algebra": {"dim": 2, "sector": "full"},
  "dynamics": {"kind": "random_kraus", "terms": 2, "seed": 7},
  "observable": {"kind": "traceless_random", "seed": 11},
  "experiment": "weakmix",
  "params": {"N": 10000, "delta": 2.0, "lambda_grid": {"size": 1024}}
})"},
      {"vdc-fuzz-1000", "operator Van der Corput inequality and its norm form", "~3 s", R"({
  "schema_version": 1,
  "name": "vdc-fuzz-1000",
  "description": "random Ginibre sequences, dim <= 6, n <= 8, every 0 <= m <= n-1",
  "exercises": "operator Van der Corput inequality and its norm form",
  "algebra": {"dim": 1},
  "dynamics": {"kind": "cyclic_shift"},
  "experiment": "vdc",
  "params": {"instances": 1000, "n_max": 8, "dim_max": 6, "seed": 1}
})"},
      {"channel-ww", "one-sided WW convergence for a Markov channel", "~3 s", R"({
  "schema_version": 1,
  "name": "channel-ww",
  "description": "mixture of three random qutrit unitaries",
  "exercises": "one-sided WW convergence for a Markov channel",
  "algebra": {"dim": 3, "sector": "full"},
  "dynamics": {"kind": "random_kraus", "terms": 3, "seed": 3},
  "observable": {"kind": "random_hermitian", "seed": 5},
  "experiment": "ww",
  "params": {"N": 2000, "mode": "WW", "delta": 2.0, "threshold": 1e-2, "lambda_grid": {"size": 256}}
})"},
      {"qcycle-witness", "projection witness for weighted averages", "~1 s", R"({
  "schema_version": 1,
  "name": "qcycle-witness",
  "description": "12-cycle on the diagonal algebra; indicator of a point",
  "exercises": "projection witness for weighted averages",
  "algebra": {"dim": 12, "sector": "diagonal"},
  "dynamics": {"kind": "cyclic_shift"},
  "observable": {"kind": "diagonal_indicator", "index": 0, "normalize": false, "scale": 0.1},
  "experiment": "witness",
  "params": {"N": 120, "eps": 0.5, "delta": 1.0, "lambda_grid": {"size": 256}}
})"},
      {"rotation-spectral", "spectral measure and Wiener criterion of an automorphism", "<1 s", R"({
  "schema_version": 1,
  "name": "rotation-spectral",
  "description": "conjugation by a diagonal unitary with incommensurate phases",
  "exercises": "spectral measure and Wiener criterion of an automorphism",
  "algebra": {"dim": 4, "sector": "full"},
  "dynamics": {"kind": "diagonal_unitary", "angles": [0.0, 0.1414213562373095, 0.3183098861837907, 0.7071067811865476]},
  "observable": {"kind": "random_hermitian", "seed": 13},
  "experiment": "spectral",
  "params": {"L": 64, "toeplitz_m": 16}
})"},
      {"qcycle-mean-ergodic", "mean ergodic theorem for an ergodic automorphism", "<1 s", R"({
  "schema_version": 1,
  "name": "qcycle-mean-ergodic",
  "description": "12-cycle on the diagonal algebra; random observable",
  "exercises": "mean ergodic theorem for an ergodic automorphism",
  "algebra": {"dim": 12, "sector": "diagonal"},
  "dynamics": {"kind": "cyclic_shift"},
  "observable": {"kind": "random_hermitian", "seed": 17},
  "experiment": "mean_ergodic",
  "params": {"N": 360}
})"},
      {"channel-validate", "standing hypotheses on a kernel", "<1 s", R"({
  "schema_version": 1,
  "name": "channel-validate",
  "description": "mixture of two random qutrit unitaries",
  "exercises": "standing hypotheses on a kernel",
  "algebra": {"dim": 3, "sector": "full"},
  "dynamics": {"kind": "random_kraus", "terms": 2, "seed": 19},
  "observable": {"kind": "random_hermitian", "seed": 23},
  "experiment": "validate",
  "params": {"samples": 32}
})"},
  };
  return all;
}

inline const BundledScenario* find_bundled(std::string_view name) {
  for (const auto& s : bundled_scenarios())
    if (s.name == name) return &s;
  return nullptr;
}

inline ScenarioConfig bundled_config(std::string_view name) {
  const BundledScenario* s = find_bundled(name);
  if (!s) throw SchemaError("no bundled scenario named '" + std::string(name) + "'");
  return parse_config(std::string(s->json));
}

}  // namespace wwlab
