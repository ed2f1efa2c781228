#pragma once

#include <vector>

#include "ringvalue.hpp"

namespace mlsieve {

// k x n matrix (k <= n) over a ring whose elements may themselves be square
// matrices of one uniform dimension. Row-order products throughout.
struct RectMatrix {
  int k = 0, n = 0;
  int entry_dim = 0;  // 0: scalar entries
  std::vector<RingValue> entries;  // row-major

  const RingValue& at(int i, int j) const { return entries[static_cast<size_t>(i) * n + j]; }
  RingValue& at(int i, int j) { return entries[static_cast<size_t>(i) * n + j]; }

  static RectMatrix make(const Ring& ring, int k, int n, int entry_dim);
};

enum class RperAlgo { oracle, ryser, halves };

struct RperOptions {
  uint64_t brute_budget = 50000000;        // injection-tree nodes
  uint64_t ryser_budget = 20000000;        // column subsets
  uint64_t halves_memory_budget = 2000000; // stored ring values across both tables
};

struct HalvesDiag {
  bool filled = false;
  RingValue g1_empty, g2_empty;  // G_r(empty set) intermediate-table values
};

// Defining sum over all injections [k] -> [n]; the brute-force oracle.
RingValue rper_brute(const Ring& ring, const RectMatrix& a, const RperOptions& opts = {});

// Rectangular inclusion-exclusion over column subsets U with |U| <= k:
//   rper(A) = sum_U (-1)^{k-|U|} C(n-|U|, k-|U|) prod_i (sum_{j in U} a_ij).
RingValue rper_rect_ryser(const Ring& ring, const RectMatrix& a, const RperOptions& opts = {});

// Meet-in-the-middle over the two row halves with exact-cover tables per half
// and a disjointness inclusion-exclusion over common subsets.
RingValue rper_halves(const Ring& ring, const RectMatrix& a, const RperOptions& opts = {},
                      HalvesDiag* diag = nullptr);

RingValue rper(const Ring& ring, const RectMatrix& a, RperAlgo algo,
               const RperOptions& opts = {});

// S*_{n,k}(M_1..M_n): the k x n matrix with identical rows (M_1..M_n) fed to
// the selected rectangular-permanent algorithm.
RingValue s_star_eval(const Ring& ring, const std::vector<RingValue>& mats, uint32_t k,
                      RperAlgo algo, const RperOptions& opts = {});

// ---- file format ----
//   rper <k> <n> <d>
// followed by k*n entries in row-major order, each entry d*d integers
// (whitespace separated; d = 1 means scalar entries).
RectMatrix parse_rect_matrix(const Ring& ring, const std::string& text);
RectMatrix load_rect_matrix(const Ring& ring, const std::string& path);

}  // namespace mlsieve
