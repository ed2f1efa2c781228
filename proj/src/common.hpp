#pragma once

#include <atomic>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace mlsieve {

using BigInt = boost::multiprecision::cpp_int;

enum class Errc {
  invalid_argument,
  parse_error,
  dimension_mismatch,
  ring_mismatch,
  budget_exceeded,
  width_cap_exceeded,
  unsupported,
  not_a_tree,
  io_error,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic RNG wrapper. All randomized code paths draw through this so
// that a run is reproducible from its seed on any platform (the std
// distributions are implementation-defined, so we do bounded sampling by hand).
class SeededRng {
 public:
  explicit SeededRng(uint64_t seed) : base_(seed), eng_(splitmix64(seed)) {}

  uint64_t next_u64() { return eng_(); }

  // Uniform value in [0, bound), bound >= 1. Rejection sampling, no modulo bias.
  uint64_t below(uint64_t bound) {
    if (bound == 0) fail(Errc::invalid_argument, "SeededRng::below: bound must be positive");
    uint64_t mask = bound - 1;
    mask |= mask >> 1; mask |= mask >> 2; mask |= mask >> 4;
    mask |= mask >> 8; mask |= mask >> 16; mask |= mask >> 32;
    for (;;) {
      uint64_t v = next_u64() & mask;
      if (v < bound) return v;
    }
  }

  uint64_t bits(unsigned nbits) {
    return nbits >= 64 ? next_u64() : (next_u64() >> (64 - nbits));
  }

  // Independent child stream with a stable per-index seed; chainable.
  SeededRng derive(uint64_t index) const {
    return SeededRng(splitmix64(base_ ^ (0x517cc1b727220a95ULL * (index + 1))));
  }

 private:
  uint64_t base_;
  std::mt19937_64 eng_;
};

// Global ring-operation counters. One RingValue-level add/sub/mul counts as one
// operation regardless of payload dimension; this is the unit the complexity
// reports are phrased in.
namespace opcount {

struct Counts {
  uint64_t adds = 0;
  uint64_t muls = 0;
  uint64_t total() const { return adds + muls; }
};

namespace detail {
inline std::atomic<uint64_t> g_adds{0};
inline std::atomic<uint64_t> g_muls{0};
inline std::atomic<int64_t> g_live_matrices{0};
inline std::atomic<int64_t> g_peak_live_matrices{0};
}  // namespace detail

inline void bump_add() { detail::g_adds.fetch_add(1, std::memory_order_relaxed); }
inline void bump_mul() { detail::g_muls.fetch_add(1, std::memory_order_relaxed); }

inline Counts snapshot() {
  return Counts{detail::g_adds.load(std::memory_order_relaxed),
                detail::g_muls.load(std::memory_order_relaxed)};
}

inline Counts delta(const Counts& since) {
  Counts now = snapshot();
  return Counts{now.adds - since.adds, now.muls - since.muls};
}

inline void matrix_created() {
  int64_t live = detail::g_live_matrices.fetch_add(1, std::memory_order_relaxed) + 1;
  int64_t peak = detail::g_peak_live_matrices.load(std::memory_order_relaxed);
  while (live > peak &&
         !detail::g_peak_live_matrices.compare_exchange_weak(peak, live, std::memory_order_relaxed)) {
  }
}

inline void matrix_destroyed() { detail::g_live_matrices.fetch_sub(1, std::memory_order_relaxed); }

inline void reset_peak_live_matrices() {
  detail::g_peak_live_matrices.store(detail::g_live_matrices.load(std::memory_order_relaxed),
                                     std::memory_order_relaxed);
}

inline int64_t peak_live_matrices() {
  return detail::g_peak_live_matrices.load(std::memory_order_relaxed);
}

}  // namespace opcount

}  // namespace mlsieve
