#pragma once

#include "hadamard.hpp"

namespace mlsieve {

struct MlcOptions {
  RperAlgo algo = RperAlgo::halves;
  RperOptions rper;
  AbpBuildOptions abp;
};

// Sum of the coefficients of degree-k multilinear monomials. The circuit is
// homogenized and converted to an ABP, whose transfer matrices feed the
// rectangular-permanent evaluation of S*_{n,k}.
Scalar mlc_count(const Ring& ring, const Circuit& g, uint32_t k, const MlcOptions& opts = {});

// ABP front end: homogeneous degree-k ABPs go straight to the rper pipeline;
// anything else is routed through a circuit and re-homogenized.
Scalar mlc_count_abp(const Ring& ring, const Abp& g, uint32_t k, const MlcOptions& opts = {});

enum class MmdScheme { basic, fast };

struct MmdConfig {
  MmdScheme scheme = MmdScheme::fast;
  double error_budget = 0.1;  // overall failure probability, split three ways
  uint64_t seed = 0;
  uint32_t pit_points = 1;    // evaluation points per coloring
  unsigned prime_bits = 62;   // integer-mode working modulus size
  uint64_t trials_override = 0;  // 0 = derive from the coverage rate and budget
  int threads = 1;            // 0 = hardware concurrency
};

struct Coloring {
  std::vector<uint32_t> assign;  // 1-based colors per variable
  uint64_t seed = 0;
  uint64_t trial = 0;
};

Coloring draw_coloring(uint32_t n, uint32_t colors, uint64_t seed, uint64_t trial);

struct MmdResult {
  bool found = false;
  int64_t witness_trial = -1;
  uint64_t trials_planned = 0;
  uint64_t trials_evaluated = 0;
  uint32_t colors = 0;
};

// One-sided randomized detector for a nonzero degree-k multilinear monomial.
// Never reports found on a negative instance; misses with probability at most
// the configured budget.
MmdResult mmd_run(const Ring& ring, const Circuit& g, uint32_t k, const MmdConfig& cfg);

// Number of colorings the detector draws for the given scheme/degree/budget.
uint64_t mmd_trial_count(MmdScheme scheme, uint32_t k, double error_budget);

// Deterministic depth-three MLC: sum_i c_i (T_i o^s S_{n,k})(1), one Ryser
// sweep per product term.
Scalar depth3_mlc(const Ring& ring, const SigmaPiSigma& f, uint32_t nvars);

struct Depth3MmdResult {
  bool found = false;
  BigInt value;  // sum over multilinear m of ([m]f)^2
};

// Deterministic integer k-MMD for depth-three circuits: decides via
// positivity of the sum-of-squares value. Integer coefficients only.
Depth3MmdResult depth3_mmd_int(const SigmaPiSigma& f, uint32_t nvars);

}  // namespace mlsieve
