#pragma once

#include "solvers.hpp"

namespace mlsieve {

struct Graph {
  uint32_t n = 0;
  bool directed = false;
  std::vector<std::pair<uint32_t, uint32_t>> edges;  // 1-based, as given
  std::vector<std::vector<uint32_t>> adj;            // out-arcs (both ways if undirected)

  bool has_arc(uint32_t u, uint32_t v) const;
  bool has_self_loop() const;
};

// ---- graph file format ----
//   graph <n> <m> <directed|undirected>
//   <m lines: u v>
Graph parse_graph(const std::string& text);
Graph load_graph(const std::string& path);

// Trees use the graph format; this checks connected + acyclic + undirected.
void validate_tree(const Graph& t);

struct MatchInstance {
  uint32_t m = 0;                          // tuple arity, >= 2
  std::vector<uint32_t> universe_sizes;    // indexed 1..m
  std::vector<std::vector<uint32_t>> tuples;  // each of length m, 1-based per universe
};

// ---- matching file format ----
//   mdm <m>
//   universe <i> <size>     (one line per universe, i = 1..m)
//   tuple <e1> ... <em>
MatchInstance parse_matching(const std::string& text);
MatchInstance load_matching(const std::string& path);

// [z^t] of an ABP in which z is the LAST variable, by z-degree state tracking.
// Exact in every characteristic; output is over the remaining nvars-1
// variables. Errors when t exceeds the layer count.
Abp zcoeff_abp(const Ring& ring, const Abp& a, uint32_t t);

struct AppOptions {
  RperAlgo algo = RperAlgo::halves;
  RperOptions rper;
  AbpBuildOptions abp;
};

struct KPathCount {
  BigInt ordered;             // directed k-vertex paths (ordered sequences)
  bool undirected_valid = false;
  BigInt undirected;          // ordered/2, reported for undirected inputs with k >= 2
  int abp_width = 0;
};

// Number of k-vertex simple paths via the walk-polynomial sieve.
KPathCount count_kpaths(const Graph& g, uint32_t k, const AppOptions& opts = {});

struct CalibratedCount {
  BigInt raw;            // multilinear coefficient sum of the construction
  BigInt constant;       // per-shape calibration constant
  BigInt normalized_num; // raw / constant, reduced
  BigInt normalized_den;
  int abp_width = 0;
};

// Copies of the k-node tree in g. The raw sieve value overcounts by a factor
// depending only on the tree shape (root choices times automorphisms); the
// constant is measured once per tree on a complete-graph reference instance
// rather than hardcoded.
CalibratedCount count_ktrees(const Graph& g, const Graph& tree, const AppOptions& opts = {});

// Weighted domination count: (ordered k-center tuple, t-subset, assignment of
// each subset node to a covering center) triples. The per-(k,t) constant is
// calibrated the same way; raw is nonzero exactly when some k centers
// dominate t nodes.
CalibratedCount count_tdomsets(const Graph& g, uint32_t k, uint32_t t,
                               const AppOptions& opts = {});

// Number of sub-collections of k mutually disjoint m-tuples; exact, no
// normalization needed.
struct MatchCount {
  BigInt count;
  int abp_width = 0;
};
MatchCount count_mdmatchings(const MatchInstance& inst, uint32_t k,
                             const AppOptions& opts = {});

// Reference enumerators used for calibration (complete-graph instances only
// at calibration time; exposed for reuse by diagnostics).
BigInt injective_homomorphism_count(const Graph& pattern, const Graph& host);
BigInt domset_cover_assignment_count(const Graph& g, uint32_t k, uint32_t t);

}  // namespace mlsieve
