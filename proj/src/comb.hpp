#pragma once

#include <cstdint>
#include <vector>

#include "common.hpp"

namespace mlsieve {

// Binomial coefficients as big integers (exact for any size).
inline BigInt binom_big(uint64_t n, int64_t k) {
  if (k < 0 || static_cast<uint64_t>(k) > n) return 0;
  BigInt r = 1;
  for (int64_t i = 0; i < k; ++i) {
    r *= static_cast<int64_t>(n) - i;
    r /= i + 1;
  }
  return r;
}

// C(n, 0) + C(n, 1) + ... + C(n, k)  ("binomial with a down-arrow")
inline BigInt binom_down_big(uint64_t n, int64_t k) {
  BigInt r = 0;
  for (int64_t i = 0; i <= k; ++i) r += binom_big(n, i);
  return r;
}

// Small Pascal table for subset ranking; n stays far below 64 here.
class Binomial {
 public:
  explicit Binomial(int n) : n_(n), table_(static_cast<size_t>(n + 1) * (n + 1), 0) {
    for (int i = 0; i <= n; ++i) {
      at(i, 0) = 1;
      for (int j = 1; j <= i; ++j) {
        at(i, j) = at(i - 1, j - 1) + (j <= i - 1 ? at(i - 1, j) : 0);
      }
    }
  }

  uint64_t operator()(int n, int k) const {
    if (k < 0 || k > n || n < 0) return 0;
    return table_[static_cast<size_t>(n) * (n_ + 1) + k];
  }

 private:
  uint64_t& at(int i, int j) { return table_[static_cast<size_t>(i) * (n_ + 1) + j]; }
  int n_;
  std::vector<uint64_t> table_;
};

// Colex rank of a sorted combination {c_0 < c_1 < ...} of 0-based elements.
inline uint64_t colex_rank(const Binomial& binom, const std::vector<int>& elems) {
  uint64_t r = 0;
  for (size_t i = 0; i < elems.size(); ++i) {
    r += binom(elems[i], static_cast<int>(i) + 1);
  }
  return r;
}

// In-place advance to the next size-u combination of [0, n) in colex order;
// returns false after the last one.
inline bool next_combination(std::vector<int>& c, int n) {
  int u = static_cast<int>(c.size());
  for (int i = 0; i < u; ++i) {
    int limit = (i + 1 < u) ? c[i + 1] : n;
    if (c[i] + 1 < limit) {
      ++c[i];
      for (int j = 0; j < i; ++j) c[j] = j;
      return true;
    }
  }
  return false;
}

inline std::vector<int> first_combination(int u) {
  std::vector<int> c(static_cast<size_t>(u));
  for (int i = 0; i < u; ++i) c[i] = i;
  return c;
}

}  // namespace mlsieve
