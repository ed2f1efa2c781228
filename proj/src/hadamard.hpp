#pragma once

#include "abp.hpp"
#include "circuit.hpp"
#include "rper.hpp"

namespace mlsieve {

// One term of the Ryser decomposition of f^*: sign * (form)^k where form is
// the sum of the linear forms indexed by a subset S of [k] and
// sign = (-1)^{k-|S|}. Summed over all S this reproduces the symmetrized
// polynomial of a Pi-Sigma product.
struct RyserTerm {
  int sign = 1;          // +1 or -1
  LinearForm form;       // L_S
  size_t subset = 0;     // S as a bitmask, for diagnostics
};

// Streams the 2^k terms lazily in Gray-code order, updating L_S by one form
// per step.
class RyserTermStream {
 public:
  RyserTermStream(const Ring& ring, const PiSigma& f);

  // False when exhausted. The first yielded term is S = empty set.
  bool next(RyserTerm& out);
  uint32_t degree() const { return k_; }

 private:
  const Ring& ring_;
  const PiSigma& f_;
  uint32_t k_;
  uint64_t index_ = 0;
  LinearForm current_;
};

// Width-1 k-layer ABP of a Ryser term (every layer is [form]).
Abp ryser_term_abp(const Ring& ring, const RyserTerm& term, uint32_t nvars, uint32_t k);

// (f o^s g)(point) = sum_m m! [m]f [m]g m(point) for a homogeneous Pi-Sigma f
// of degree k and an arbitrary circuit g over the same variables. Evaluates g
// over (k+1)x(k+1) scaled transfer matrices once per Ryser term; memory stays
// polynomial because terms are streamed.
Scalar hadamard_pisigma_eval(const Ring& ring, const Circuit& g, const PiSigma& f,
                             const std::vector<Scalar>& point);

// (g o^s S_{n,k})(1) = sum of degree-k multilinear coefficients of g, for a
// homogeneous degree-k ABP.
Scalar multilinear_part_sum_abp(const Ring& ring, const Abp& g, RperAlgo algo,
                                const RperOptions& opts = {});

// Circuit route: homogenize, convert to an ABP, then the rper pipeline.
Scalar multilinear_part_sum(const Ring& ring, const Circuit& g, uint32_t k, RperAlgo algo,
                            const RperOptions& rper_opts = {},
                            const AbpBuildOptions& abp_opts = {});

}  // namespace mlsieve
