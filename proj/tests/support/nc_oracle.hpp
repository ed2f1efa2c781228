#pragma once

// Noncommutative word-expansion oracle, independent of the transfer-matrix and
// Ryser machinery it is used to check. Words are vectors of 1-based variable
// indices in product order.

#include <map>
#include <vector>

#include "abp.hpp"
#include "circuit.hpp"

namespace mlsieve::testgen {

struct NcPoly {
  std::map<std::vector<uint32_t>, Scalar> words;

  void add(const Ring& ring, const std::vector<uint32_t>& w, const Scalar& c) {
    if (ring.is_zero(c)) return;
    auto [it, inserted] = words.emplace(w, c);
    if (!inserted) {
      it->second = ring.add(it->second, c);
      if (ring.is_zero(it->second)) words.erase(it);
    }
  }

  Scalar coefficient(const Ring& ring, const std::vector<uint32_t>& w) const {
    auto it = words.find(w);
    return it == words.end() ? ring.zero() : it->second;
  }
};

inline NcPoly nc_mul(const Ring& ring, const NcPoly& a, const NcPoly& b, size_t degree_cap) {
  NcPoly r;
  for (const auto& [wa, ca] : a.words) {
    for (const auto& [wb, cb] : b.words) {
      if (wa.size() + wb.size() > degree_cap) continue;
      std::vector<uint32_t> w = wa;
      w.insert(w.end(), wb.begin(), wb.end());
      r.add(ring, w, ring.mul(ca, cb));
    }
  }
  return r;
}

inline NcPoly nc_add(const Ring& ring, const NcPoly& a, const NcPoly& b) {
  NcPoly r = a;
  for (const auto& [w, c] : b.words) r.add(ring, w, c);
  return r;
}

inline NcPoly nc_from_form(const Ring& ring, const LinearForm& f) {
  NcPoly r;
  r.add(ring, {}, f.constant);
  for (const auto& [var, c] : f.coeffs) r.add(ring, {var}, c);
  return r;
}

// Expansion of the circuit's noncommutative version (product-gate child order
// read left to right).
inline NcPoly nc_from_circuit(const Ring& ring, const Circuit& c, size_t degree_cap) {
  std::vector<NcPoly> val(c.size());
  for (size_t i = 0; i < c.size(); ++i) {
    const Circuit::Gate& g = c.gate(static_cast<int>(i));
    switch (g.kind) {
      case Circuit::GateKind::input:
        val[i].add(ring, {g.var}, ring.one());
        break;
      case Circuit::GateKind::constant:
        val[i].add(ring, {}, ring.from_bigint(g.cval));
        break;
      case Circuit::GateKind::add:
        val[i] = nc_add(ring, val[g.a], val[g.b]);
        break;
      case Circuit::GateKind::mul:
        val[i] = nc_mul(ring, val[g.a], val[g.b], degree_cap);
        break;
    }
  }
  return val[static_cast<size_t>(c.output())];
}

inline NcPoly nc_from_pisigma(const Ring& ring, const PiSigma& f) {
  NcPoly acc;
  acc.add(ring, {}, ring.one());
  for (const LinearForm& form : f.forms) {
    acc = nc_mul(ring, acc, nc_from_form(ring, form), f.forms.size());
  }
  return acc;
}

inline NcPoly nc_from_abp(const Ring& ring, const Abp& a, size_t degree_cap) {
  std::vector<NcPoly> cur(1);
  cur[0].add(ring, {}, ring.one());
  for (const AbpLayer& l : a.layers()) {
    std::vector<NcPoly> next(static_cast<size_t>(l.cols));
    for (int r = 0; r < l.rows; ++r) {
      for (int col = 0; col < l.cols; ++col) {
        const LinearForm& f = l.at(r, col);
        if (f.is_zero(ring)) continue;
        next[static_cast<size_t>(col)] =
            nc_add(ring, next[static_cast<size_t>(col)],
                   nc_mul(ring, cur[static_cast<size_t>(r)], nc_from_form(ring, f), degree_cap));
      }
    }
    cur = std::move(next);
  }
  return cur[0];
}

// f^* = sum over all permutations of positions, applied to every degree-k word.
inline NcPoly nc_symmetrize(const Ring& ring, const NcPoly& f, uint32_t k) {
  std::vector<uint32_t> perm(k);
  for (uint32_t i = 0; i < k; ++i) perm[i] = i;
  NcPoly r;
  do {
    for (const auto& [w, c] : f.words) {
      if (w.size() != k) continue;
      std::vector<uint32_t> pw(k);
      for (uint32_t j = 0; j < k; ++j) pw[j] = w[perm[j]];
      r.add(ring, pw, c);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return r;
}

inline SparsePoly nc_to_commutative(const Ring& ring, const NcPoly& f) {
  SparsePoly r(ring);
  for (const auto& [w, c] : f.words) {
    MonomialKey m;
    for (uint32_t v : w) m.bump(v, 1);
    r.add_term(m, c);
  }
  return r;
}

// All words of length k over variables 1..n.
inline std::vector<std::vector<uint32_t>> all_words(uint32_t n, uint32_t k) {
  std::vector<std::vector<uint32_t>> out;
  std::vector<uint32_t> w(k, 1);
  for (;;) {
    out.push_back(w);
    uint32_t pos = k;
    while (pos > 0 && w[pos - 1] == n) {
      w[pos - 1] = 1;
      --pos;
    }
    if (pos == 0) break;
    ++w[pos - 1];
  }
  if (k == 0) out.assign(1, {});
  return out;
}

}  // namespace mlsieve::testgen
