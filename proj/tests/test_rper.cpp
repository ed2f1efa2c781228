#include "doctest.h"

#include "comb.hpp"
#include "rper.hpp"
#include "support/gen.hpp"

using namespace mlsieve;

namespace {

RingValue random_entry(const Ring& ring, int dim, SeededRng& rng) {
  if (dim == 0) {
    return RingValue::scalar(ring.is_field()
                                 ? ring.uniform(rng)
                                 : ring.from_int64(static_cast<int64_t>(rng.below(11)) - 5));
  }
  RingValue m = RingValue::zero_matrix(ring, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      m.at(r, c) = ring.is_field() ? ring.uniform(rng)
                                   : ring.from_int64(static_cast<int64_t>(rng.below(11)) - 5);
    }
  }
  return m;
}

RectMatrix random_rect(const Ring& ring, SeededRng& rng, int k, int n, int dim) {
  RectMatrix a = RectMatrix::make(ring, k, n, dim);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < n; ++j) a.at(i, j) = random_entry(ring, dim, rng);
  }
  return a;
}

}  // namespace

TEST_CASE("coefficient identity behind the rectangular Ryser formula") {
  // sum over U containing V of (-1)^{k-|U|} C(n-|U|, k-|U|) equals [|V| = k],
  // verified by literal subset enumeration for all n <= 8
  for (int n = 1; n <= 8; ++n) {
    for (int k = 1; k <= n; ++k) {
      for (uint64_t vmask = 0; vmask < (1ULL << n); ++vmask) {
        int v = __builtin_popcountll(vmask);
        if (v > k) continue;
        BigInt sum = 0;
        for (uint64_t umask = 0; umask < (1ULL << n); ++umask) {
          if ((umask & vmask) != vmask) continue;
          int u = __builtin_popcountll(umask);
          if (u > k) continue;
          BigInt c = binom_big(static_cast<uint64_t>(n - u), k - u);
          sum += (k - u) % 2 == 0 ? c : -c;
        }
        CHECK(sum == (v == k ? 1 : 0));
      }
    }
  }
}

TEST_CASE("k=1 reduces to the row sum for all algorithms") {
  Ring zz = Ring::integers();
  RectMatrix a = RectMatrix::make(zz, 1, 3, 0);
  a.at(0, 0) = RingValue::scalar(zz.from_int64(4));
  a.at(0, 1) = RingValue::scalar(zz.from_int64(-1));
  a.at(0, 2) = RingValue::scalar(zz.from_int64(9));
  for (RperAlgo algo : {RperAlgo::oracle, RperAlgo::ryser, RperAlgo::halves}) {
    CHECK(zz.to_string(rper(zz, a, algo).as_scalar()) == "12");
  }
}

TEST_CASE("square 2x2 case: per = ad + bc") {
  Ring zz = Ring::integers();
  RectMatrix m = RectMatrix::make(zz, 2, 2, 0);
  int64_t av = 3, bv = 5, cv = 7, dv = 11;
  m.at(0, 0) = RingValue::scalar(zz.from_int64(av));
  m.at(0, 1) = RingValue::scalar(zz.from_int64(bv));
  m.at(1, 0) = RingValue::scalar(zz.from_int64(cv));
  m.at(1, 1) = RingValue::scalar(zz.from_int64(dv));
  for (RperAlgo algo : {RperAlgo::oracle, RperAlgo::ryser, RperAlgo::halves}) {
    CHECK(zz.to_bigint(rper(zz, m, algo).as_scalar()) == av * dv + bv * cv);
  }
}

TEST_CASE("three algorithms agree on random instances") {
  SeededRng rng(71);
  for (const Ring& ring : {Ring::prime_field(2), Ring::prime_field(7), Ring::integers()}) {
    for (int dim : {0, 2}) {
      for (int trial = 0; trial < 12; ++trial) {
        int k = 1 + static_cast<int>(rng.below(4));
        int n = k + static_cast<int>(rng.below(static_cast<uint64_t>(8 - k)));
        RectMatrix a = random_rect(ring, rng, k, n, dim);
        RingValue brute = rper_brute(ring, a);
        CHECK(rv_eq(ring, brute, rper_rect_ryser(ring, a)));
        CHECK(rv_eq(ring, brute, rper_halves(ring, a)));
      }
    }
  }
}

TEST_CASE("row order matters over a matrix ring") {
  SeededRng rng(73);
  Ring f7 = Ring::prime_field(7);
  bool witness = false;
  for (int trial = 0; trial < 50 && !witness; ++trial) {
    RectMatrix a = random_rect(f7, rng, 2, 3, 2);
    RectMatrix swapped = a;
    for (int j = 0; j < 3; ++j) {
      swapped.at(0, j) = a.at(1, j);
      swapped.at(1, j) = a.at(0, j);
    }
    witness = !rv_eq(f7, rper_brute(f7, a), rper_brute(f7, swapped));
  }
  CHECK(witness);
}

TEST_CASE("halves intermediate tables: G_r(empty) sums F_r over full-size subsets") {
  SeededRng rng(79);
  Ring f7 = Ring::prime_field(7);
  int k = 3, n = 5;
  RectMatrix a = random_rect(f7, rng, k, n, 0);
  HalvesDiag diag;
  RingValue result = rper_halves(f7, a, {}, &diag);
  REQUIRE(diag.filled);
  CHECK(rv_eq(f7, result, rper_brute(f7, a)));

  // direct summation of F_r(U) = sum over injective row words covering U
  auto f_direct = [&](int row_begin, int h) {
    RingValue acc = RingValue::zero(f7, 0);
    if (h == 0) return RingValue::one(f7, 0);
    std::vector<int> U = first_combination(h);
    do {
      // enumerate bijections rows -> U
      std::vector<int> perm(U.begin(), U.end());
      std::sort(perm.begin(), perm.end());
      do {
        RingValue prod = a.at(row_begin, perm[0]);
        for (int i = 1; i < h; ++i) prod = rv_mul(f7, prod, a.at(row_begin + i, perm[i]));
        acc = rv_add(f7, acc, prod);
      } while (std::next_permutation(perm.begin(), perm.end()));
    } while (next_combination(U, n));
    return acc;
  };
  CHECK(rv_eq(f7, diag.g1_empty, f_direct(0, 2)));
  CHECK(rv_eq(f7, diag.g2_empty, f_direct(2, 1)));
}

TEST_CASE("s_star_eval small cases") {
  Ring f7 = Ring::prime_field(7);
  SeededRng rng(83);

  // k = 1: plain sum
  std::vector<RingValue> ms;
  for (int i = 0; i < 3; ++i) ms.push_back(random_entry(f7, 2, rng));
  RingValue sum = rv_add(f7, rv_add(f7, ms[0], ms[1]), ms[2]);
  CHECK(rv_eq(f7, s_star_eval(f7, ms, 1, RperAlgo::halves), sum));

  // n = 2, k = 2: M1 M2 + M2 M1
  std::vector<RingValue> two = {random_entry(f7, 2, rng), random_entry(f7, 2, rng)};
  RingValue expect = rv_add(f7, rv_mul(f7, two[0], two[1]), rv_mul(f7, two[1], two[0]));
  for (RperAlgo algo : {RperAlgo::oracle, RperAlgo::ryser, RperAlgo::halves}) {
    CHECK(rv_eq(f7, s_star_eval(f7, two, 2, algo), expect));
  }
}

TEST_CASE("s_star_eval n=4 k=2 equals the direct double sum") {
  Ring f101 = Ring::prime_field(101);
  SeededRng rng(89);
  std::vector<RingValue> ms;
  for (int i = 0; i < 4; ++i) ms.push_back(random_entry(f101, 3, rng));
  RingValue direct = RingValue::zero(f101, 3);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i == j) continue;
      direct = rv_add(f101, direct, rv_mul(f101, ms[static_cast<size_t>(i)], ms[static_cast<size_t>(j)]));
    }
  }
  for (RperAlgo algo : {RperAlgo::oracle, RperAlgo::ryser, RperAlgo::halves}) {
    CHECK(rv_eq(f101, s_star_eval(f101, ms, 2, algo), direct));
  }
}

TEST_CASE("s_star_eval with all matrices equal gives k! C(n,k) M^k") {
  Ring zz = Ring::integers();
  SeededRng rng(97);
  RingValue m = random_entry(zz, 2, rng);
  uint32_t n = 5, k = 3;
  std::vector<RingValue> ms(n, m);
  RingValue mk = rv_mul(zz, rv_mul(zz, m, m), m);
  BigInt scale = 6 * 10;  // 3! * C(5,3)
  RingValue expect = rv_int_multiple(zz, scale, mk);
  CHECK(rv_eq(zz, s_star_eval(zz, ms, k, RperAlgo::halves), expect));
}

TEST_CASE("budget errors are explicit") {
  Ring zz = Ring::integers();
  SeededRng rng(101);
  RectMatrix a = random_rect(zz, rng, 3, 6, 0);
  RperOptions tiny;
  tiny.brute_budget = 5;
  CHECK_THROWS_AS(rper_brute(zz, a, tiny), Error);
  RperOptions small_mem;
  small_mem.halves_memory_budget = 1;
  CHECK_THROWS_WITH_AS(rper_halves(zz, a, small_mem), doctest::Contains("rect_ryser"), Error);
}

TEST_CASE("ring operation counts stay within the published bounds") {
  SeededRng rng(103);
  Ring f7 = Ring::prime_field(7);
  for (auto [k, n] : std::vector<std::pair<int, int>>{{2, 5}, {3, 6}, {4, 7}}) {
    RectMatrix a = random_rect(f7, rng, k, n, 0);
    Binomial binom(n);

    auto before = opcount::snapshot();
    rper_rect_ryser(f7, a);
    uint64_t ryser_ops = opcount::delta(before).total();
    uint64_t ryser_bound = 0;
    for (int u = 0; u <= k; ++u) ryser_bound += binom(n, u);
    ryser_bound *= static_cast<uint64_t>(4) * k * n;
    CHECK(ryser_ops <= ryser_bound);

    before = opcount::snapshot();
    rper_halves(f7, a);
    uint64_t halves_ops = opcount::delta(before).total();
    int h1 = (k + 1) / 2;
    uint64_t halves_bound =
        static_cast<uint64_t>(4) * binom(n, h1) * (1ULL << h1) * static_cast<uint64_t>(k) * n;
    CHECK(halves_ops <= halves_bound);
  }
}

TEST_CASE("rect matrix file parsing") {
  Ring zz = Ring::integers();
  RectMatrix m = parse_rect_matrix(zz, "rper 2 2 1\n3 5\n7 11\n");
  CHECK(zz.to_bigint(rper_brute(zz, m).as_scalar()) == 3 * 11 + 5 * 7);
  RectMatrix mm = parse_rect_matrix(zz, "rper 1 2 2\n1 0 0 1\n2 0 0 2\n");
  CHECK(mm.entry_dim == 2);
  CHECK_THROWS_AS(parse_rect_matrix(zz, "rper 2 1 1\n1\n1\n"), Error);
  CHECK_THROWS_AS(parse_rect_matrix(zz, "rper 2 2 1\n1 2 3\n"), Error);
}
