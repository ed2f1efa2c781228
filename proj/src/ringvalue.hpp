#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ring.hpp"

namespace mlsieve {

// A ring element: either a scalar (dim() == 0) or a dense square matrix of
// scalars (dim() >= 1, row-major). Mixed-dimension arithmetic is rejected.
// Values are immutable in spirit: every operation returns a fresh value.
class RingValue {
 public:
  RingValue() = default;

  static RingValue scalar(Scalar s) {
    RingValue v;
    v.data_.push_back(std::move(s));
    return v;
  }

  static RingValue zero_matrix(const Ring& ring, int dim);
  static RingValue identity(const Ring& ring, int dim);
  static RingValue scaled_identity(const Ring& ring, int dim, const Scalar& s);

  // dim == 0 gives a scalar zero / one.
  static RingValue zero(const Ring& ring, int dim) {
    return dim == 0 ? scalar(ring.zero()) : zero_matrix(ring, dim);
  }
  static RingValue one(const Ring& ring, int dim) {
    return dim == 0 ? scalar(ring.one()) : identity(ring, dim);
  }

  ~RingValue() { release(); }
  RingValue(const RingValue& o) : dim_(o.dim_), data_(o.data_) { track(); }
  RingValue(RingValue&& o) noexcept : dim_(o.dim_), data_(std::move(o.data_)) {
    o.dim_ = 0;
    o.data_.clear();
  }
  RingValue& operator=(const RingValue& o) {
    if (this != &o) {
      release();
      dim_ = o.dim_;
      data_ = o.data_;
      track();
    }
    return *this;
  }
  RingValue& operator=(RingValue&& o) noexcept {
    if (this != &o) {
      release();
      dim_ = o.dim_;
      data_ = std::move(o.data_);
      o.dim_ = 0;
      o.data_.clear();
    }
    return *this;
  }

  bool is_scalar() const { return dim_ == 0; }
  int dim() const { return dim_; }

  const Scalar& as_scalar() const { return data_[0]; }
  const Scalar& at(int r, int c) const { return data_[static_cast<size_t>(r) * dim_ + c]; }
  Scalar& at(int r, int c) { return data_[static_cast<size_t>(r) * dim_ + c]; }

  std::string to_string(const Ring& ring) const;

 private:
  friend RingValue rv_add(const Ring&, const RingValue&, const RingValue&);
  friend RingValue rv_sub(const Ring&, const RingValue&, const RingValue&);
  friend RingValue rv_mul(const Ring&, const RingValue&, const RingValue&);
  friend RingValue rv_neg(const Ring&, const RingValue&);
  friend RingValue rv_scale(const Ring&, const Scalar&, const RingValue&);
  friend bool rv_is_zero(const Ring&, const RingValue&);
  friend bool rv_eq(const Ring&, const RingValue&, const RingValue&);

  static RingValue make_matrix(int dim) {
    RingValue v;
    v.dim_ = dim;
    v.data_.assign(static_cast<size_t>(dim) * dim, Scalar{});
    v.track();
    return v;
  }

  void track() const {
    if (dim_ > 0) opcount::matrix_created();
  }
  void release() const {
    if (dim_ > 0) opcount::matrix_destroyed();
  }

  int dim_ = 0;
  std::vector<Scalar> data_;  // size 1 for scalars, dim_*dim_ for matrices
};

RingValue rv_add(const Ring& ring, const RingValue& a, const RingValue& b);
RingValue rv_sub(const Ring& ring, const RingValue& a, const RingValue& b);
RingValue rv_mul(const Ring& ring, const RingValue& a, const RingValue& b);
RingValue rv_neg(const Ring& ring, const RingValue& a);
// Scalar multiple; counted as one ring operation.
RingValue rv_scale(const Ring& ring, const Scalar& s, const RingValue& a);
bool rv_is_zero(const Ring& ring, const RingValue& a);
bool rv_eq(const Ring& ring, const RingValue& a, const RingValue& b);

// Integer multiple n*a realized through the ring (repeated-addition semantics,
// so it is valid in any characteristic).
RingValue rv_int_multiple(const Ring& ring, const BigInt& n, const RingValue& a);

}  // namespace mlsieve
