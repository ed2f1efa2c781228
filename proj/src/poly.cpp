#include "poly.hpp"

#include <sstream>

namespace mlsieve {

void MonomialKey::bump(uint32_t var, uint32_t exponent) {
  if (exponent == 0) return;
  auto it = std::lower_bound(exps_.begin(), exps_.end(), std::make_pair(var, 0u),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
  if (it != exps_.end() && it->first == var) {
    it->second += exponent;
  } else {
    exps_.insert(it, {var, exponent});
  }
  degree_ += exponent;
}

bool MonomialKey::is_multilinear() const {
  for (const auto& [var, e] : exps_) {
    if (e != 1) return false;
  }
  return true;
}

uint32_t MonomialKey::exponent(uint32_t var) const {
  for (const auto& [v, e] : exps_) {
    if (v == var) return e;
  }
  return 0;
}

BigInt MonomialKey::factorial() const {
  BigInt r = 1;
  for (const auto& [var, e] : exps_) {
    for (uint32_t i = 2; i <= e; ++i) r *= i;
  }
  return r;
}

MonomialKey MonomialKey::product(const MonomialKey& a, const MonomialKey& b) {
  MonomialKey r = a;
  for (const auto& [var, e] : b.exps_) r.bump(var, e);
  return r;
}

std::string MonomialKey::to_string() const {
  if (exps_.empty()) return "1";
  std::ostringstream os;
  bool first = true;
  for (const auto& [var, e] : exps_) {
    if (!first) os << "*";
    first = false;
    os << "x" << var;
    if (e > 1) os << "^" << e;
  }
  return os.str();
}

void SparsePoly::add_term(const MonomialKey& m, const Scalar& c) {
  if (ring_.is_zero(c)) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second = ring_.add(it->second, c);
    if (ring_.is_zero(it->second)) terms_.erase(it);
  }
}

Scalar SparsePoly::coefficient(const MonomialKey& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? ring_.zero() : it->second;
}

SparsePoly SparsePoly::plus(const SparsePoly& o) const {
  SparsePoly r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

SparsePoly SparsePoly::times(const SparsePoly& o, uint32_t degree_cap, size_t term_cap) const {
  SparsePoly r(ring_);
  for (const auto& [ma, ca] : terms_) {
    if (ma.total_degree() > degree_cap) continue;
    for (const auto& [mb, cb] : o.terms_) {
      if (ma.total_degree() + mb.total_degree() > degree_cap) continue;
      r.add_term(MonomialKey::product(ma, mb), ring_.mul(ca, cb));
      if (r.terms_.size() > term_cap) {
        fail(Errc::budget_exceeded,
             "sparse expansion exceeded " + std::to_string(term_cap) + " terms");
      }
    }
  }
  return r;
}

Scalar SparsePoly::eval(const std::vector<Scalar>& point) const {
  Scalar acc = ring_.zero();
  for (const auto& [m, c] : terms_) {
    Scalar v = c;
    for (const auto& [var, e] : m.exponents()) {
      for (uint32_t i = 0; i < e; ++i) v = ring_.mul(v, point.at(var - 1));
    }
    acc = ring_.add(acc, v);
  }
  return acc;
}

Scalar SparsePoly::multilinear_coeff_sum(uint32_t k) const {
  Scalar acc = ring_.zero();
  for (const auto& [m, c] : terms_) {
    if (m.total_degree() == k && m.is_multilinear()) acc = ring_.add(acc, c);
  }
  return acc;
}

SparsePoly SparsePoly::degree_part(uint32_t k) const {
  SparsePoly r(ring_);
  for (const auto& [m, c] : terms_) {
    if (m.total_degree() == k) r.add_term(m, c);
  }
  return r;
}

uint32_t SparsePoly::max_degree() const {
  uint32_t d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.total_degree());
  return d;
}

}  // namespace mlsieve
