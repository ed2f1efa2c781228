#include "doctest.h"

#include "hadamard.hpp"
#include "support/gen.hpp"
#include "support/nc_oracle.hpp"

using namespace mlsieve;
using namespace mlsieve::testgen;

namespace {

PiSigma forms_of_vars(const Ring& ring, std::initializer_list<uint32_t> vars) {
  PiSigma ps;
  for (uint32_t v : vars) {
    LinearForm f;
    f.constant = ring.zero();
    f.coeffs.emplace(v, ring.one());
    ps.forms.push_back(std::move(f));
  }
  return ps;
}

// Signed Ryser-term expansion as a noncommutative polynomial (independent of
// the transfer-matrix path).
NcPoly ryser_sum_nc(const Ring& ring, const PiSigma& f) {
  uint32_t k = f.degree();
  NcPoly acc;
  RyserTermStream stream(ring, f);
  RyserTerm term;
  while (stream.next(term)) {
    NcPoly factor = nc_from_form(ring, term.form);
    NcPoly prod;
    prod.add(ring, {}, ring.one());
    for (uint32_t j = 0; j < k; ++j) prod = nc_mul(ring, prod, factor, k);
    Scalar sgn = term.sign > 0 ? ring.one() : ring.neg(ring.one());
    for (const auto& [w, c] : prod.words) acc.add(ring, w, ring.mul(sgn, c));
  }
  return acc;
}

// sum_m m! [m]f [m]g m(a), straight from the commutative expansions.
Scalar hadamard_oracle(const Ring& ring, const Circuit& g, const PiSigma& f,
                       const std::vector<Scalar>& point) {
  uint32_t k = f.degree();
  SparsePoly fg = brute_expand(ring, pisigma_to_circuit(ring, f, g.nvars()), k);
  SparsePoly gg = brute_expand(ring, g, k);
  Scalar acc = ring.zero();
  for (const auto& [m, cf] : fg.terms()) {
    Scalar cg = gg.coefficient(m);
    if (ring.is_zero(cg)) continue;
    Scalar term = ring.mul(ring.from_bigint(m.factorial()), ring.mul(cf, cg));
    for (const auto& [var, e] : m.exponents()) {
      for (uint32_t i = 0; i < e; ++i) term = ring.mul(term, point[var - 1]);
    }
    acc = ring.add(acc, term);
  }
  return acc;
}

}  // namespace

TEST_CASE("ryser stream, k = 1") {
  Ring f7 = Ring::prime_field(7);
  PiSigma f = forms_of_vars(f7, {1});
  RyserTermStream stream(f7, f);
  RyserTerm t;
  REQUIRE(stream.next(t));
  CHECK(t.sign == -1);  // S = empty
  CHECK(t.form.is_zero(f7));
  REQUIRE(stream.next(t));
  CHECK(t.sign == 1);  // S = {1}
  CHECK(f7.eq(t.form.coefficient(f7, 1), f7.one()));
  CHECK_FALSE(stream.next(t));
}

TEST_CASE("signed ryser sum reproduces f* word by word, k = 2 fixtures") {
  Ring f7 = Ring::prime_field(7);
  {
    // f = x1 * x2: [y1 y2] = [y2 y1] = 1, [y1 y1] = 0
    NcPoly sum = ryser_sum_nc(f7, forms_of_vars(f7, {1, 2}));
    CHECK(f7.to_string(sum.coefficient(f7, {1, 2})) == "1");
    CHECK(f7.to_string(sum.coefficient(f7, {2, 1})) == "1");
    CHECK(f7.is_zero(sum.coefficient(f7, {1, 1})));
  }
  {
    // f = x1 * x1: [y1 y1] f* = 2 = 2! [x1^2] f
    NcPoly sum = ryser_sum_nc(f7, forms_of_vars(f7, {1, 1}));
    CHECK(f7.to_string(sum.coefficient(f7, {1, 1})) == "2");
  }
}

TEST_CASE("permanent sanity at the scalar level, k = 2") {
  Ring zz = Ring::integers();
  int64_t av = 2, bv = 3, cv = 5, dv = 7;
  PiSigma f;
  LinearForm l1, l2;
  l1.constant = zz.zero();
  l2.constant = zz.zero();
  l1.coeffs.emplace(1, zz.from_int64(av));
  l1.coeffs.emplace(2, zz.from_int64(bv));
  l2.coeffs.emplace(1, zz.from_int64(cv));
  l2.coeffs.emplace(2, zz.from_int64(dv));
  f.forms = {l1, l2};
  NcPoly sum = ryser_sum_nc(zz, f);
  CHECK(zz.to_bigint(sum.coefficient(zz, {1, 2})) == av * dv + bv * cv);
}

TEST_CASE("symmetrization identity: every word coefficient equals m! [m]f") {
  Ring f7 = Ring::prime_field(7);
  SeededRng rng(111);
  for (uint32_t k = 1; k <= 3; ++k) {
    for (uint32_t n = 1; n <= 3; ++n) {
      for (int trial = 0; trial < 25; ++trial) {
        PiSigma f = random_pisigma(f7, rng, n, k);
        NcPoly sum = ryser_sum_nc(f7, f);
        NcPoly fhat = nc_from_pisigma(f7, f);
        NcPoly fstar = nc_symmetrize(f7, fhat, k);
        SparsePoly fcomm = nc_to_commutative(f7, fhat);
        for (const auto& word : all_words(n, k)) {
          MonomialKey m;
          for (uint32_t v : word) m.bump(v, 1);
          Scalar expect = f7.mul(f7.from_bigint(m.factorial()), fcomm.coefficient(m));
          CHECK(f7.eq(sum.coefficient(f7, word), expect));
          CHECK(f7.eq(fstar.coefficient(f7, word), expect));
        }
      }
    }
  }
}

TEST_CASE("hadamard_pisigma_eval fixtures") {
  Ring f101 = Ring::prime_field(101);
  {
    // g = x1 x2 + x2 x3, f = x1 * x2, all-ones point: single shared monomial
    Circuit g = parse_circuit(
        "ninputs 3\n"
        "x1 = input 1\nx2 = input 2\nx3 = input 3\n"
        "a = mul x1 x2\nb = mul x2 x3\ns = add a b\noutput s\n");
    PiSigma f = forms_of_vars(f101, {1, 2});
    std::vector<Scalar> ones(3, f101.one());
    CHECK(f101.to_string(hadamard_pisigma_eval(f101, g, f, ones)) == "1");
  }
  {
    // g = x1^2, f = x1 * x1, point (1): m! = 2
    Circuit g = parse_circuit("ninputs 1\nx = input 1\np = mul x x\noutput p\n");
    PiSigma f = forms_of_vars(f101, {1, 1});
    CHECK(f101.to_string(hadamard_pisigma_eval(f101, g, f, {f101.one()})) == "2");
  }
}

TEST_CASE("hadamard_pisigma_eval equals the oracle on random instances") {
  SeededRng rng(121);
  for (const Ring& ring : {Ring::prime_field(101), Ring::integers()}) {
    for (int trial = 0; trial < 30; ++trial) {
      uint32_t n = 2 + rng.below(4);
      uint32_t k = 1 + rng.below(3);
      Circuit g = random_circuit(rng, n, 20);
      PiSigma f = random_pisigma(ring, rng, n, k);
      std::vector<Scalar> point = random_point(ring, rng, n);
      CHECK(ring.eq(hadamard_pisigma_eval(ring, g, f, point), hadamard_oracle(ring, g, f, point)));
    }
  }
}

TEST_CASE("evaluation is symmetric in which factor is decomposed") {
  SeededRng rng(131);
  Ring f101 = Ring::prime_field(101);
  for (int trial = 0; trial < 20; ++trial) {
    uint32_t n = 2 + rng.below(3);
    uint32_t k = 1 + rng.below(3);
    PiSigma f = random_pisigma(f101, rng, n, k);
    PiSigma g = random_pisigma(f101, rng, n, k);
    std::vector<Scalar> point = random_point(f101, rng, n);
    Circuit gc = pisigma_to_circuit(f101, g, n);
    Circuit fc = pisigma_to_circuit(f101, f, n);
    Scalar a = hadamard_pisigma_eval(f101, gc, f, point);
    Scalar b = hadamard_pisigma_eval(f101, fc, g, point);
    CHECK(f101.eq(a, b));
    CHECK(f101.eq(a, hadamard_oracle(f101, gc, f, point)));
  }
}

TEST_CASE("block grading makes explicit homogenization unnecessary") {
  SeededRng rng(141);
  Ring f101 = Ring::prime_field(101);
  for (int trial = 0; trial < 20; ++trial) {
    uint32_t n = 2 + rng.below(3);
    uint32_t k = 1 + rng.below(3);
    Circuit g = random_circuit(rng, n, 18);
    PiSigma f = random_pisigma(f101, rng, n, k);
    std::vector<Scalar> point = random_point(f101, rng, n);
    Scalar raw = hadamard_pisigma_eval(f101, g, f, point);
    Scalar viah = hadamard_pisigma_eval(f101, homogenize(g, k), f, point);
    CHECK(f101.eq(raw, viah));
  }
}

TEST_CASE("streamed terms keep the live-matrix peak independent of 2^k") {
  Ring f101 = Ring::prime_field(101);
  SeededRng rng(151);
  Circuit g = random_circuit(rng, 4, 20);
  std::vector<Scalar> point = random_point(f101, rng, 4);

  auto peak_for = [&](uint32_t k) {
    PiSigma f = random_pisigma(f101, rng, 4, k);
    opcount::reset_peak_live_matrices();
    int64_t base = opcount::peak_live_matrices();
    hadamard_pisigma_eval(f101, g, f, point);
    return opcount::peak_live_matrices() - base;
  };
  int64_t p4 = peak_for(4);
  int64_t p8 = peak_for(8);
  // 2^8/2^4 = 16x the terms; the live-matrix watermark must not scale with it
  CHECK(p8 <= 2 * p4 + 8);
}

TEST_CASE("multilinear_part_sum basics and oracle agreement") {
  Ring f101 = Ring::prime_field(101);
  {
    Circuit s52 = elementary_symmetric_circuit(5, 2);
    CHECK(f101.to_string(multilinear_part_sum(f101, s52, 2, RperAlgo::halves)) == "10");
  }
  {
    Circuit g = parse_circuit("ninputs 2\nx = input 1\np = mul x x\noutput p\n");
    CHECK(f101.is_zero(multilinear_part_sum(f101, g, 2, RperAlgo::ryser)));
  }
  SeededRng rng(161);
  for (const Ring& ring : {Ring::prime_field(7), Ring::integers()}) {
    for (int trial = 0; trial < 20; ++trial) {
      uint32_t n = 2 + rng.below(6);
      uint32_t k = 1 + rng.below(3);
      Circuit g = random_circuit(rng, n, 20);
      Scalar expect = brute_expand(ring, g, k).multilinear_coeff_sum(k);
      for (RperAlgo algo : {RperAlgo::oracle, RperAlgo::ryser, RperAlgo::halves}) {
        CHECK(ring.eq(multilinear_part_sum(ring, g, k, algo), expect));
      }
    }
  }
}
