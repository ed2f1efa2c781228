#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ring.hpp"

namespace mlsieve {

// Sparse exponent vector: sorted (variable, exponent) pairs, no zero exponents.
// Variable indices are 1-based throughout.
class MonomialKey {
 public:
  MonomialKey() = default;

  void bump(uint32_t var, uint32_t exponent);
  uint32_t total_degree() const { return degree_; }
  bool is_multilinear() const;
  bool is_constant() const { return exps_.empty(); }
  uint32_t exponent(uint32_t var) const;

  // m! = product of exponent factorials.
  BigInt factorial() const;

  const std::vector<std::pair<uint32_t, uint32_t>>& exponents() const { return exps_; }

  static MonomialKey product(const MonomialKey& a, const MonomialKey& b);

  bool operator<(const MonomialKey& o) const {
    return exps_ < o.exps_;
  }
  bool operator==(const MonomialKey& o) const { return exps_ == o.exps_; }

  std::string to_string() const;

 private:
  std::vector<std::pair<uint32_t, uint32_t>> exps_;
  uint32_t degree_ = 0;
};

// Explicit monomial -> coefficient map; the brute-force oracle representation.
class SparsePoly {
 public:
  explicit SparsePoly(Ring ring) : ring_(ring) {}

  static constexpr size_t kDefaultTermCap = 1000000;

  const Ring& ring() const { return ring_; }
  const std::map<MonomialKey, Scalar>& terms() const { return terms_; }
  size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const MonomialKey& m, const Scalar& c);
  Scalar coefficient(const MonomialKey& m) const;

  SparsePoly plus(const SparsePoly& o) const;
  // Truncating product: terms above degree_cap are dropped (sound because
  // degrees only grow under multiplication).
  SparsePoly times(const SparsePoly& o, uint32_t degree_cap, size_t term_cap) const;

  Scalar eval(const std::vector<Scalar>& point) const;

  // Sum of coefficients of degree-k multilinear monomials.
  Scalar multilinear_coeff_sum(uint32_t k) const;
  SparsePoly degree_part(uint32_t k) const;
  uint32_t max_degree() const;

 private:
  Ring ring_;
  std::map<MonomialKey, Scalar> terms_;
};

// Linear form c0 + sum_i c_i x_i over a fixed ring; homogeneous iff c0 == 0.
struct LinearForm {
  std::map<uint32_t, Scalar> coeffs;
  Scalar constant;

  bool is_homogeneous(const Ring& ring) const { return ring.is_zero(constant); }

  Scalar coefficient(const Ring& ring, uint32_t var) const {
    auto it = coeffs.find(var);
    return it == coeffs.end() ? ring.zero() : it->second;
  }

  void add_coeff(const Ring& ring, uint32_t var, const Scalar& c) {
    auto [it, inserted] = coeffs.emplace(var, c);
    if (!inserted) {
      it->second = ring.add(it->second, c);
      if (ring.is_zero(it->second)) coeffs.erase(it);
    } else if (ring.is_zero(c)) {
      coeffs.erase(it);
    }
  }

  bool is_zero(const Ring& ring) const { return coeffs.empty() && ring.is_zero(constant); }

  Scalar eval(const Ring& ring, const std::vector<Scalar>& point) const {
    Scalar acc = constant;
    for (const auto& [var, c] : coeffs) {
      acc = ring.add(acc, ring.mul(c, point.at(var - 1)));
    }
    return acc;
  }

  static LinearForm sum(const Ring& ring, const LinearForm& a, const LinearForm& b) {
    LinearForm r = a;
    r.constant = ring.add(r.constant, b.constant);
    for (const auto& [var, c] : b.coeffs) r.add_coeff(ring, var, c);
    return r;
  }

  static LinearForm scaled(const Ring& ring, const Scalar& s, const LinearForm& a) {
    LinearForm r;
    r.constant = ring.mul(s, a.constant);
    for (const auto& [var, c] : a.coeffs) {
      Scalar v = ring.mul(s, c);
      if (!ring.is_zero(v)) r.coeffs.emplace(var, v);
    }
    return r;
  }
};

// Product of k ordered homogeneous linear forms; the listed order defines the
// noncommutative product.
struct PiSigma {
  std::vector<LinearForm> forms;

  uint32_t degree() const { return static_cast<uint32_t>(forms.size()); }

  bool all_homogeneous(const Ring& ring) const {
    for (const auto& f : forms) {
      if (!f.is_homogeneous(ring)) return false;
    }
    return true;
  }
};

}  // namespace mlsieve
