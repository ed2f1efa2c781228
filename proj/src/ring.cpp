#include "ring.hpp"

namespace mlsieve {

namespace {

uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t m) {
  uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, a, m);
    a = mulmod_u64(a, a, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // This base set is exact for every n < 2^64.
  for (uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

uint64_t random_prime(unsigned bits, uint64_t seed) {
  if (bits < 16 || bits > 62) {
    fail(Errc::invalid_argument, "random_prime: bits must be in [16, 62]");
  }
  SeededRng rng(seed);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    uint64_t cand = (1ULL << (bits - 1)) | rng.bits(bits - 1) | 1ULL;
    if (is_prime_u64(cand)) return cand;
  }
  fail(Errc::budget_exceeded, "random_prime: rejection budget exhausted");
}

Ring Ring::prime_field(uint64_t p) {
  if (p >= (1ULL << 62)) fail(Errc::invalid_argument, "prime modulus must be below 2^62");
  if (!is_prime_u64(p)) fail(Errc::invalid_argument, "modulus " + std::to_string(p) + " is not prime");
  return Ring(RingKind::prime_field, p);
}

Ring Ring::integers() { return Ring(RingKind::integers, 0); }

Scalar Ring::one() const {
  Scalar s;
  if (is_field()) {
    s.fp = 1 % p_;
  } else {
    s.z = 1;
  }
  return s;
}

Scalar Ring::from_int64(int64_t v) const {
  Scalar s;
  if (is_field()) {
    int64_t r = v % static_cast<int64_t>(p_);
    if (r < 0) r += static_cast<int64_t>(p_);
    s.fp = static_cast<uint64_t>(r);
  } else {
    s.z = v;
  }
  return s;
}

Scalar Ring::from_bigint(const BigInt& v) const {
  Scalar s;
  if (is_field()) {
    BigInt r = v % p_;
    if (r < 0) r += p_;
    s.fp = r.convert_to<uint64_t>();
  } else {
    s.z = v;
  }
  return s;
}

Scalar Ring::add(const Scalar& a, const Scalar& b) const {
  Scalar s;
  if (is_field()) {
    uint64_t v = a.fp + b.fp;  // p < 2^62, no overflow
    s.fp = v >= p_ ? v - p_ : v;
  } else {
    s.z = a.z + b.z;
  }
  return s;
}

Scalar Ring::sub(const Scalar& a, const Scalar& b) const {
  Scalar s;
  if (is_field()) {
    s.fp = a.fp >= b.fp ? a.fp - b.fp : a.fp + p_ - b.fp;
  } else {
    s.z = a.z - b.z;
  }
  return s;
}

Scalar Ring::mul(const Scalar& a, const Scalar& b) const {
  Scalar s;
  if (is_field()) {
    s.fp = mulmod_u64(a.fp, b.fp, p_);
  } else {
    s.z = a.z * b.z;
  }
  return s;
}

Scalar Ring::neg(const Scalar& a) const {
  Scalar s;
  if (is_field()) {
    s.fp = a.fp == 0 ? 0 : p_ - a.fp;
  } else {
    s.z = -a.z;
  }
  return s;
}

bool Ring::is_zero(const Scalar& a) const { return is_field() ? a.fp == 0 : a.z.is_zero(); }

bool Ring::eq(const Scalar& a, const Scalar& b) const {
  return is_field() ? a.fp == b.fp : a.z == b.z;
}

BigInt Ring::to_bigint(const Scalar& a) const {
  if (is_field()) return BigInt(a.fp);
  return a.z;
}

std::string Ring::to_string(const Scalar& a) const {
  if (is_field()) return std::to_string(a.fp);
  return a.z.str();
}

Scalar Ring::uniform(SeededRng& rng) const {
  if (!is_field()) fail(Errc::unsupported, "uniform sampling needs a prime field");
  Scalar s;
  s.fp = rng.below(p_);
  return s;
}

uint64_t Ring::mulmod(uint64_t a, uint64_t b) const { return mulmod_u64(a, b, p_); }

std::string Ring::describe() const {
  return is_field() ? "GF(" + std::to_string(p_) + ")" : "Z";
}

}  // namespace mlsieve
