#pragma once

#include <cstdint>
#include <string>

#include "common.hpp"

namespace mlsieve {

// Deterministic Miller-Rabin, exact for all n < 2^64.
bool is_prime_u64(uint64_t n);

// Uniformly sampled prime with exactly `bits` bits (16 <= bits <= 62),
// deterministic given the seed. Fails closed after 10^4 rejections.
uint64_t random_prime(unsigned bits, uint64_t seed);

enum class RingKind { prime_field, integers };

// A scalar of whichever ring is in use. Field-mode values live in `fp`
// (canonical in [0, p)), integer-mode values in `z`. The Ring context decides
// which member is meaningful; keeping both avoids a tagged union in the hot path.
struct Scalar {
  uint64_t fp = 0;
  BigInt z;
};

class Ring {
 public:
  static Ring prime_field(uint64_t p);
  static Ring integers();

  RingKind kind() const { return kind_; }
  bool is_field() const { return kind_ == RingKind::prime_field; }
  uint64_t modulus() const { return p_; }
  bool same(const Ring& other) const { return kind_ == other.kind_ && p_ == other.p_; }

  Scalar zero() const { return Scalar{}; }
  Scalar one() const;
  Scalar from_int64(int64_t v) const;
  Scalar from_bigint(const BigInt& v) const;

  Scalar add(const Scalar& a, const Scalar& b) const;
  Scalar sub(const Scalar& a, const Scalar& b) const;
  Scalar mul(const Scalar& a, const Scalar& b) const;
  Scalar neg(const Scalar& a) const;

  bool is_zero(const Scalar& a) const;
  bool eq(const Scalar& a, const Scalar& b) const;

  BigInt to_bigint(const Scalar& a) const;
  std::string to_string(const Scalar& a) const;

  // Uniform scalar in [0, p); field mode only.
  Scalar uniform(SeededRng& rng) const;

  // a * b mod p for the current modulus (field mode).
  uint64_t mulmod(uint64_t a, uint64_t b) const;

  std::string describe() const;

 private:
  Ring(RingKind kind, uint64_t p) : kind_(kind), p_(p) {}

  RingKind kind_;
  uint64_t p_;  // 0 in integer mode
};

}  // namespace mlsieve
