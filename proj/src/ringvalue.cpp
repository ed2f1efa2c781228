#include "ringvalue.hpp"

#include <sstream>

namespace mlsieve {

namespace {

void require_same_shape(const RingValue& a, const RingValue& b) {
  if (a.dim() != b.dim()) {
    fail(Errc::dimension_mismatch,
         "ring value dimension mismatch: " + std::to_string(a.dim()) + " vs " +
             std::to_string(b.dim()));
  }
}

}  // namespace

RingValue RingValue::zero_matrix(const Ring& ring, int dim) {
  if (dim < 1) fail(Errc::invalid_argument, "matrix dimension must be >= 1");
  RingValue v = make_matrix(dim);
  if (!ring.is_field()) {
    // integer-mode zeros are default-constructed BigInts already
  }
  return v;
}

RingValue RingValue::identity(const Ring& ring, int dim) {
  RingValue v = zero_matrix(ring, dim);
  for (int i = 0; i < dim; ++i) v.at(i, i) = ring.one();
  return v;
}

RingValue RingValue::scaled_identity(const Ring& ring, int dim, const Scalar& s) {
  RingValue v = zero_matrix(ring, dim);
  for (int i = 0; i < dim; ++i) v.at(i, i) = s;
  return v;
}

std::string RingValue::to_string(const Ring& ring) const {
  if (is_scalar()) return ring.to_string(as_scalar());
  std::ostringstream os;
  os << "[";
  for (int r = 0; r < dim_; ++r) {
    os << (r ? "; " : "");
    for (int c = 0; c < dim_; ++c) os << (c ? " " : "") << ring.to_string(at(r, c));
  }
  os << "]";
  return os.str();
}

RingValue rv_add(const Ring& ring, const RingValue& a, const RingValue& b) {
  require_same_shape(a, b);
  opcount::bump_add();
  if (a.is_scalar()) return RingValue::scalar(ring.add(a.as_scalar(), b.as_scalar()));
  RingValue c = RingValue::make_matrix(a.dim());
  size_t n = a.data_.size();
  for (size_t i = 0; i < n; ++i) c.data_[i] = ring.add(a.data_[i], b.data_[i]);
  return c;
}

RingValue rv_sub(const Ring& ring, const RingValue& a, const RingValue& b) {
  require_same_shape(a, b);
  opcount::bump_add();
  if (a.is_scalar()) return RingValue::scalar(ring.sub(a.as_scalar(), b.as_scalar()));
  RingValue c = RingValue::make_matrix(a.dim());
  size_t n = a.data_.size();
  for (size_t i = 0; i < n; ++i) c.data_[i] = ring.sub(a.data_[i], b.data_[i]);
  return c;
}

RingValue rv_neg(const Ring& ring, const RingValue& a) {
  opcount::bump_add();
  if (a.is_scalar()) return RingValue::scalar(ring.neg(a.as_scalar()));
  RingValue c = RingValue::make_matrix(a.dim());
  size_t n = a.data_.size();
  for (size_t i = 0; i < n; ++i) c.data_[i] = ring.neg(a.data_[i]);
  return c;
}

RingValue rv_scale(const Ring& ring, const Scalar& s, const RingValue& a) {
  opcount::bump_mul();
  if (a.is_scalar()) return RingValue::scalar(ring.mul(s, a.as_scalar()));
  RingValue c = RingValue::make_matrix(a.dim());
  size_t n = a.data_.size();
  for (size_t i = 0; i < n; ++i) c.data_[i] = ring.mul(s, a.data_[i]);
  return c;
}

namespace {

// Per-row span of nonzero columns; matrices arising from block-superdiagonal
// transfers are mostly zero, and skipping the zero region is where the
// structural k^2 savings in the matrix products come from.
struct RowSpans {
  std::vector<int> lo, hi;  // [lo, hi) per row; lo==hi means empty
};

RowSpans nonzero_spans(const Ring& ring, const RingValue& m) {
  int d = m.dim();
  RowSpans s;
  s.lo.assign(d, 0);
  s.hi.assign(d, 0);
  for (int r = 0; r < d; ++r) {
    int lo = d, hi = 0;
    for (int c = 0; c < d; ++c) {
      if (!ring.is_zero(m.at(r, c))) {
        if (c < lo) lo = c;
        hi = c + 1;
      }
    }
    s.lo[r] = lo == d ? 0 : lo;
    s.hi[r] = hi;
  }
  return s;
}

void matmul_field_fast(const Ring& ring, const RingValue& a, const RingValue& b, RingValue& c) {
  // p < 2^31: raw products fit in 62 bits, accumulate in 128 bits and reduce once.
  int d = a.dim();
  uint64_t p = ring.modulus();
  RowSpans bs = nonzero_spans(ring, b);
  std::vector<unsigned __int128> acc(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) {
    for (auto& x : acc) x = 0;
    for (int k = 0; k < d; ++k) {
      uint64_t av = a.at(i, k).fp;
      if (av == 0) continue;
      for (int j = bs.lo[k]; j < bs.hi[k]; ++j) {
        acc[j] += static_cast<unsigned __int128>(av) * b.at(k, j).fp;
      }
    }
    for (int j = 0; j < d; ++j) c.at(i, j).fp = static_cast<uint64_t>(acc[j] % p);
  }
}

void matmul_field_wide(const Ring& ring, const RingValue& a, const RingValue& b, RingValue& c) {
  int d = a.dim();
  uint64_t p = ring.modulus();
  RowSpans bs = nonzero_spans(ring, b);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      uint64_t av = a.at(i, k).fp;
      if (av == 0) continue;
      for (int j = bs.lo[k]; j < bs.hi[k]; ++j) {
        uint64_t t = ring.mulmod(av, b.at(k, j).fp);
        uint64_t v = c.at(i, j).fp + t;
        c.at(i, j).fp = v >= p ? v - p : v;
      }
    }
  }
}

void matmul_integer(const Ring& ring, const RingValue& a, const RingValue& b, RingValue& c) {
  int d = a.dim();
  RowSpans bs = nonzero_spans(ring, b);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      const BigInt& av = a.at(i, k).z;
      if (av.is_zero()) continue;
      for (int j = bs.lo[k]; j < bs.hi[k]; ++j) {
        c.at(i, j).z += av * b.at(k, j).z;
      }
    }
  }
}

}  // namespace

RingValue rv_mul(const Ring& ring, const RingValue& a, const RingValue& b) {
  require_same_shape(a, b);
  opcount::bump_mul();
  if (a.is_scalar()) return RingValue::scalar(ring.mul(a.as_scalar(), b.as_scalar()));
  RingValue c = RingValue::make_matrix(a.dim());
  if (ring.is_field()) {
    if (ring.modulus() < (1ULL << 31)) {
      matmul_field_fast(ring, a, b, c);
    } else {
      matmul_field_wide(ring, a, b, c);
    }
  } else {
    matmul_integer(ring, a, b, c);
  }
  return c;
}

bool rv_is_zero(const Ring& ring, const RingValue& a) {
  for (const Scalar& s : a.data_) {
    if (!ring.is_zero(s)) return false;
  }
  return true;
}

bool rv_eq(const Ring& ring, const RingValue& a, const RingValue& b) {
  if (a.dim() != b.dim()) return false;
  for (size_t i = 0; i < a.data_.size(); ++i) {
    if (!ring.eq(a.data_[i], b.data_[i])) return false;
  }
  return true;
}

RingValue rv_int_multiple(const Ring& ring, const BigInt& n, const RingValue& a) {
  return rv_scale(ring, ring.from_bigint(n), a);
}

}  // namespace mlsieve
