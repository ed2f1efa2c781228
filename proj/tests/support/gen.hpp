#pragma once

// Deterministic random-instance generators shared by unit and acceptance tests.

#include <vector>

#include "circuit.hpp"

namespace mlsieve::testgen {

// Random DAG circuit over n variables with at most max_gates gates.
// Biased toward small constants and reuse of earlier gates.
inline Circuit random_circuit(SeededRng& rng, uint32_t n, size_t max_gates) {
  Circuit c;
  c.set_nvars(n);
  std::vector<int> pool;
  for (uint32_t i = 1; i <= n; ++i) pool.push_back(c.add_input(i));
  size_t extra = 1 + rng.below(max_gates > n ? max_gates - n : 1);
  for (size_t g = 0; g < extra; ++g) {
    uint64_t pick = rng.below(10);
    if (pick == 0) {
      pool.push_back(c.add_const(static_cast<int64_t>(rng.below(7)) - 3));
    } else {
      int a = pool[rng.below(pool.size())];
      int b = pool[rng.below(pool.size())];
      pool.push_back(pick < 6 ? c.add_add(a, b) : c.add_mul(a, b));
    }
  }
  c.set_output(pool.back());
  return c;
}

inline LinearForm random_linear_form(const Ring& ring, SeededRng& rng, uint32_t n,
                                     bool homogeneous = true) {
  LinearForm f;
  f.constant = ring.zero();
  for (uint32_t v = 1; v <= n; ++v) {
    if (rng.below(3) == 0) continue;  // keep forms sparse-ish
    Scalar coeff = ring.is_field() ? ring.uniform(rng)
                                   : ring.from_int64(static_cast<int64_t>(rng.below(9)) - 4);
    f.add_coeff(ring, v, coeff);
  }
  if (f.coeffs.empty()) f.add_coeff(ring, 1 + static_cast<uint32_t>(rng.below(n)), ring.one());
  if (!homogeneous && rng.below(2) == 0) {
    f.constant = ring.is_field() ? ring.uniform(rng)
                                 : ring.from_int64(static_cast<int64_t>(rng.below(9)) - 4);
  }
  return f;
}

inline PiSigma random_pisigma(const Ring& ring, SeededRng& rng, uint32_t n, uint32_t k) {
  PiSigma ps;
  for (uint32_t j = 0; j < k; ++j) ps.forms.push_back(random_linear_form(ring, rng, n));
  return ps;
}

// Random point with all coordinates sampled; integer mode draws small values.
inline std::vector<Scalar> random_point(const Ring& ring, SeededRng& rng, uint32_t n) {
  std::vector<Scalar> pt;
  for (uint32_t i = 0; i < n; ++i) {
    pt.push_back(ring.is_field() ? ring.uniform(rng)
                                 : ring.from_int64(static_cast<int64_t>(rng.below(11)) - 5));
  }
  return pt;
}

}  // namespace mlsieve::testgen
