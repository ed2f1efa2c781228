#include "rper.hpp"

#include <fstream>
#include <sstream>

#include "comb.hpp"

namespace mlsieve {

RectMatrix RectMatrix::make(const Ring& ring, int k, int n, int entry_dim) {
  if (k < 1 || n < k) fail(Errc::invalid_argument, "need 1 <= k <= n");
  if (n > 62) fail(Errc::invalid_argument, "column count capped at 62");
  RectMatrix m;
  m.k = k;
  m.n = n;
  m.entry_dim = entry_dim;
  m.entries.assign(static_cast<size_t>(k) * n, RingValue::zero(ring, entry_dim));
  return m;
}

namespace {

void check_shape(const RectMatrix& a) {
  if (a.k < 1 || a.n < a.k) fail(Errc::invalid_argument, "need 1 <= k <= n");
  for (const RingValue& v : a.entries) {
    if (v.dim() != a.entry_dim) {
      fail(Errc::dimension_mismatch, "rectangular matrix entries have mixed dimensions");
    }
  }
}

}  // namespace

RingValue rper_brute(const Ring& ring, const RectMatrix& a, const RperOptions& opts) {
  check_shape(a);
  RingValue total = RingValue::zero(ring, a.entry_dim);
  uint64_t nodes = 0;

  // DFS over injections with shared prefix products
  std::vector<RingValue> prefix(static_cast<size_t>(a.k));
  auto dfs = [&](auto&& self, int row, uint64_t used) -> void {
    if (row == a.k) {
      total = rv_add(ring, total, prefix[static_cast<size_t>(a.k) - 1]);
      return;
    }
    for (int j = 0; j < a.n; ++j) {
      if (used & (1ULL << j)) continue;
      if (++nodes > opts.brute_budget) {
        fail(Errc::budget_exceeded, "rper_brute budget exceeded (n^k too large)");
      }
      prefix[static_cast<size_t>(row)] =
          row == 0 ? a.at(0, j) : rv_mul(ring, prefix[static_cast<size_t>(row) - 1], a.at(row, j));
      self(self, row + 1, used | (1ULL << j));
    }
  };
  dfs(dfs, 0, 0);
  return total;
}

RingValue rper_rect_ryser(const Ring& ring, const RectMatrix& a, const RperOptions& opts) {
  check_shape(a);
  BigInt subsets = binom_down_big(static_cast<uint64_t>(a.n), a.k);
  if (subsets > opts.ryser_budget) {
    fail(Errc::budget_exceeded, "rper_rect_ryser subset budget exceeded");
  }

  RingValue total = RingValue::zero(ring, a.entry_dim);
  std::vector<RingValue> rowsum(static_cast<size_t>(a.k));

  for (int u = 1; u <= a.k; ++u) {
    // (-1)^{k-u} C(n-u, k-u), mapped into the ring (valid in any characteristic)
    BigInt coeff = binom_big(static_cast<uint64_t>(a.n - u), a.k - u);
    if ((a.k - u) % 2 == 1) coeff = -coeff;
    Scalar coeff_s = ring.from_bigint(coeff);
    if (ring.is_zero(coeff_s)) continue;

    std::vector<int> U = first_combination(u);
    do {
      for (int i = 0; i < a.k; ++i) {
        RingValue s = a.at(i, U[0]);
        for (int t = 1; t < u; ++t) s = rv_add(ring, s, a.at(i, U[static_cast<size_t>(t)]));
        rowsum[static_cast<size_t>(i)] = std::move(s);
      }
      RingValue prod = rowsum[0];
      for (int i = 1; i < a.k; ++i) prod = rv_mul(ring, prod, rowsum[static_cast<size_t>(i)]);
      total = rv_add(ring, total, rv_scale(ring, coeff_s, prod));
    } while (next_combination(U, a.n));
  }
  // the u = 0 stratum contributes an empty sum only (zero row sums), so it is skipped
  return total;
}

namespace {

// Gray-code iteration over nonempty subsets V of a size-h ground set;
// calls step(elem, added) on each transition and visit(V_mask, popcount).
template <typename Step, typename Visit>
void gray_subsets(int h, Step&& step, Visit&& visit) {
  uint64_t mask = 0;
  uint64_t count = 1ULL << h;
  for (uint64_t g = 1; g < count; ++g) {
    uint64_t gray = g ^ (g >> 1);
    uint64_t prev = (g - 1) ^ ((g - 1) >> 1);
    uint64_t diff = gray ^ prev;
    int elem = __builtin_ctzll(diff);
    bool added = gray & diff;
    step(elem, added);
    mask = gray;
    visit(mask, __builtin_popcountll(mask));
  }
}

}  // namespace

RingValue rper_halves(const Ring& ring, const RectMatrix& a, const RperOptions& opts,
                      HalvesDiag* diag) {
  check_shape(a);
  int k = a.k, n = a.n;
  int h1 = (k + 1) / 2, h2 = k / 2;
  Binomial binom(n);

  // G tables hold one value per subset W with |W| <= h2, per half.
  std::vector<uint64_t> offset(static_cast<size_t>(h2) + 2, 0);
  for (int w = 0; w <= h2; ++w) offset[static_cast<size_t>(w) + 1] = offset[w] + binom(n, w);
  uint64_t table_size = offset[static_cast<size_t>(h2) + 1];
  if (2 * table_size > opts.halves_memory_budget) {
    fail(Errc::budget_exceeded,
         "rper_halves table budget exceeded (" + std::to_string(2 * table_size) +
             " ring values); consider the rect_ryser algorithm instead");
  }

  std::vector<RingValue> G1(table_size, RingValue::zero(ring, a.entry_dim));
  std::vector<RingValue> G2(table_size, RingValue::zero(ring, a.entry_dim));

  auto windex = [&](const std::vector<int>& elems) {
    return offset[elems.size()] + colex_rank(binom, elems);
  };

  // Fills G_r from the exact-cover values F_r(U) over all |U| = h columns.
  auto fill_half = [&](std::vector<RingValue>& G, int row_begin, int h) {
    if (h == 0) {
      // empty row set: F(empty) is the multiplicative identity
      G[0] = rv_add(ring, G[0], RingValue::one(ring, a.entry_dim));
      return;
    }
    std::vector<int> U = first_combination(h);
    std::vector<RingValue> rowsum(static_cast<size_t>(h));
    std::vector<int> scatter;
    do {
      for (int i = 0; i < h; ++i) rowsum[static_cast<size_t>(i)] = RingValue::zero(ring, a.entry_dim);
      RingValue F = RingValue::zero(ring, a.entry_dim);
      gray_subsets(
          h,
          [&](int elem, bool added) {
            int col = U[static_cast<size_t>(elem)];
            for (int i = 0; i < h; ++i) {
              RingValue& s = rowsum[static_cast<size_t>(i)];
              s = added ? rv_add(ring, s, a.at(row_begin + i, col))
                        : rv_sub(ring, s, a.at(row_begin + i, col));
            }
          },
          [&](uint64_t, int popcnt) {
            RingValue prod = rowsum[0];
            for (int i = 1; i < h; ++i) prod = rv_mul(ring, prod, rowsum[static_cast<size_t>(i)]);
            // sign (-1)^{h - |V|}
            F = (h - popcnt) % 2 == 0 ? rv_add(ring, F, prod) : rv_sub(ring, F, prod);
          });
      // scatter F(U) into G(W) for every W subset of U with |W| <= h2
      for (uint64_t wmask = 0; wmask < (1ULL << h); ++wmask) {
        if (__builtin_popcountll(wmask) > h2) continue;
        scatter.clear();
        for (int e = 0; e < h; ++e) {
          if (wmask & (1ULL << e)) scatter.push_back(U[static_cast<size_t>(e)]);
        }
        uint64_t idx = offset[scatter.size()] + colex_rank(binom, scatter);
        G[idx] = rv_add(ring, G[idx], F);
      }
    } while (next_combination(U, n));
  };

  fill_half(G1, 0, h1);
  fill_half(G2, h1, h2);

  if (diag) {
    diag->filled = true;
    diag->g1_empty = G1[0];
    diag->g2_empty = G2[0];
  }

  RingValue total = RingValue::zero(ring, a.entry_dim);
  for (int w = 0; w <= h2; ++w) {
    std::vector<int> W = first_combination(w);
    do {
      uint64_t idx = windex(W);
      RingValue term = rv_mul(ring, G1[idx], G2[idx]);  // R1-then-R2 order
      total = w % 2 == 0 ? rv_add(ring, total, term) : rv_sub(ring, total, term);
      if (w == 0) break;
    } while (next_combination(W, n));
  }
  return total;
}

RingValue rper(const Ring& ring, const RectMatrix& a, RperAlgo algo, const RperOptions& opts) {
  switch (algo) {
    case RperAlgo::oracle:
      return rper_brute(ring, a, opts);
    case RperAlgo::ryser:
      return rper_rect_ryser(ring, a, opts);
    case RperAlgo::halves:
      return rper_halves(ring, a, opts);
  }
  fail(Errc::invalid_argument, "unknown rper algorithm");
}

RingValue s_star_eval(const Ring& ring, const std::vector<RingValue>& mats, uint32_t k,
                      RperAlgo algo, const RperOptions& opts) {
  if (mats.empty()) fail(Errc::invalid_argument, "s_star_eval needs at least one matrix");
  int dim = mats[0].dim();
  RectMatrix a = RectMatrix::make(ring, static_cast<int>(k), static_cast<int>(mats.size()), dim);
  for (int i = 0; i < a.k; ++i) {
    for (int j = 0; j < a.n; ++j) a.at(i, j) = mats[static_cast<size_t>(j)];
  }
  return rper(ring, a, algo, opts);
}

RectMatrix parse_rect_matrix(const Ring& ring, const std::string& text) {
  std::istringstream in(text);
  std::string kw;
  int k = 0, n = 0, d = 0;
  in >> kw >> k >> n >> d;
  if (kw != "rper" || k < 1 || n < k || d < 1) {
    fail(Errc::parse_error, "expected header: rper <k> <n> <d>");
  }
  RectMatrix m = RectMatrix::make(ring, k, n, d == 1 ? 0 : d);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < n; ++j) {
      if (d == 1) {
        std::string tok;
        if (!(in >> tok)) fail(Errc::parse_error, "missing matrix entries");
        m.at(i, j) = RingValue::scalar(ring.from_bigint(BigInt(tok)));
      } else {
        RingValue v = RingValue::zero_matrix(ring, d);
        for (int r = 0; r < d; ++r) {
          for (int c = 0; c < d; ++c) {
            std::string tok;
            if (!(in >> tok)) fail(Errc::parse_error, "missing matrix entries");
            v.at(r, c) = ring.from_bigint(BigInt(tok));
          }
        }
        m.at(i, j) = std::move(v);
      }
    }
  }
  return m;
}

RectMatrix load_rect_matrix(const Ring& ring, const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(Errc::io_error, "cannot open matrix file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_rect_matrix(ring, ss.str());
}

}  // namespace mlsieve
