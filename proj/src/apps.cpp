#include "apps.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "comb.hpp"

namespace mlsieve {

namespace {

// Counts below 2^31 can be sieved in a fast single-word prime field and read
// back exactly; bigger bounds fall back to big-integer arithmetic.
constexpr uint64_t kCountingPrime = 2147483629ULL;

Ring counting_ring_for(const BigInt& bound) {
  if (bound < BigInt(kCountingPrime)) return Ring::prime_field(kCountingPrime);
  return Ring::integers();
}

BigInt read_count(const Ring& ring, const Scalar& s) { return ring.to_bigint(s); }

LinearForm var_form(const Ring& ring, uint32_t v) {
  LinearForm f;
  f.constant = ring.zero();
  f.coeffs.emplace(v, ring.one());
  return f;
}

LinearForm one_form(const Ring& ring) {
  LinearForm f;
  f.constant = ring.one();
  return f;
}

}  // namespace

bool Graph::has_arc(uint32_t u, uint32_t v) const {
  const auto& row = adj[u - 1];
  return std::find(row.begin(), row.end(), v) != row.end();
}

bool Graph::has_self_loop() const {
  for (const auto& [u, v] : edges) {
    if (u == v) return true;
  }
  return false;
}

Graph parse_graph(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Graph g;
  long long m = -1;
  int lineno = 0;
  bool have_header = false;
  size_t read_edges = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (!have_header) {
      long long n = -1;
      std::string mode;
      std::istringstream hs(line);
      std::string kw;
      hs >> kw >> n >> m >> mode;
      if (kw != "graph" || n < 0 || m < 0 || (mode != "directed" && mode != "undirected")) {
        fail(Errc::parse_error,
             "line " + std::to_string(lineno) + ": expected 'graph <n> <m> <directed|undirected>'");
      }
      g.n = static_cast<uint32_t>(n);
      g.directed = mode == "directed";
      g.adj.assign(g.n, {});
      have_header = true;
      continue;
    }
    long long u = -1, v = -1;
    std::istringstream es(line);
    es >> u >> v;
    if (u < 1 || v < 1 || u > g.n || v > g.n) {
      fail(Errc::parse_error, "line " + std::to_string(lineno) + ": bad edge endpoints");
    }
    g.edges.emplace_back(static_cast<uint32_t>(u), static_cast<uint32_t>(v));
    g.adj[static_cast<size_t>(u) - 1].push_back(static_cast<uint32_t>(v));
    if (!g.directed && u != v) g.adj[static_cast<size_t>(v) - 1].push_back(static_cast<uint32_t>(u));
    ++read_edges;
  }
  if (!have_header) fail(Errc::parse_error, "missing graph header");
  if (static_cast<long long>(read_edges) != m) {
    fail(Errc::parse_error, "edge count does not match the header");
  }
  return g;
}

Graph load_graph(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(Errc::io_error, "cannot open graph file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_graph(ss.str());
}

void validate_tree(const Graph& t) {
  if (t.directed) fail(Errc::not_a_tree, "tree must be given as an undirected graph");
  if (t.n == 0) fail(Errc::not_a_tree, "tree must have at least one node");
  if (t.edges.size() != t.n - 1) fail(Errc::not_a_tree, "a tree on n nodes has n-1 edges");
  if (t.has_self_loop()) fail(Errc::not_a_tree, "tree has a self-loop");
  std::vector<char> seen(t.n, 0);
  std::vector<uint32_t> stack = {1};
  seen[0] = 1;
  uint32_t visited = 0;
  while (!stack.empty()) {
    uint32_t u = stack.back();
    stack.pop_back();
    ++visited;
    for (uint32_t v : t.adj[u - 1]) {
      if (!seen[v - 1]) {
        seen[v - 1] = 1;
        stack.push_back(v);
      }
    }
  }
  if (visited != t.n) fail(Errc::not_a_tree, "tree is not connected");
}

MatchInstance parse_matching(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  MatchInstance inst;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (!have_header) {
      if (kw != "mdm") fail(Errc::parse_error, "line " + std::to_string(lineno) + ": expected 'mdm <m>'");
      long long m = -1;
      ls >> m;
      if (m < 2) fail(Errc::parse_error, "tuple arity m must be >= 2");
      inst.m = static_cast<uint32_t>(m);
      inst.universe_sizes.assign(inst.m + 1, 0);
      have_header = true;
      continue;
    }
    if (kw == "universe") {
      long long i = -1, size = -1;
      ls >> i >> size;
      if (i < 1 || i > inst.m || size < 0) {
        fail(Errc::parse_error, "line " + std::to_string(lineno) + ": bad universe line");
      }
      inst.universe_sizes[static_cast<size_t>(i)] = static_cast<uint32_t>(size);
    } else if (kw == "tuple") {
      std::vector<uint32_t> t;
      long long e;
      while (ls >> e) {
        if (e < 1) fail(Errc::parse_error, "line " + std::to_string(lineno) + ": bad tuple element");
        t.push_back(static_cast<uint32_t>(e));
      }
      if (t.size() != inst.m) {
        fail(Errc::parse_error, "line " + std::to_string(lineno) + ": tuple arity mismatch");
      }
      inst.tuples.push_back(std::move(t));
    } else {
      fail(Errc::parse_error, "line " + std::to_string(lineno) + ": unknown keyword '" + kw + "'");
    }
  }
  if (!have_header) fail(Errc::parse_error, "missing mdm header");
  for (const auto& t : inst.tuples) {
    for (uint32_t i = 1; i <= inst.m; ++i) {
      if (t[i - 1] > inst.universe_sizes[i]) {
        fail(Errc::parse_error, "tuple element exceeds its universe size");
      }
    }
  }
  return inst;
}

MatchInstance load_matching(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(Errc::io_error, "cannot open matching file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_matching(ss.str());
}

Abp zcoeff_abp(const Ring& ring, const Abp& a, uint32_t t) {
  validate_abp(ring, a);
  if (a.nvars() < 1) fail(Errc::invalid_argument, "zcoeff_abp needs at least the z variable");
  uint32_t zvar = a.nvars();
  uint32_t L = a.degree();
  if (t > L) {
    fail(Errc::invalid_argument, "z-degree target " + std::to_string(t) +
                                     " exceeds the path bound " + std::to_string(L));
  }
  uint32_t nx = a.nvars() - 1;
  uint32_t slots = t + 1;  // tracked z-degrees 0..t; higher degrees are dead

  std::vector<AbpLayer> layers;
  for (uint32_t j = 0; j < L; ++j) {
    const AbpLayer& src = a.layers()[j];
    int in_w = j == 0 ? 1 : src.rows * static_cast<int>(slots);
    int out_w = j + 1 == L ? 1 : src.cols * static_cast<int>(slots);
    AbpLayer dst = AbpLayer::zeros(ring, in_w, out_w);
    for (int r = 0; r < src.rows; ++r) {
      for (int c = 0; c < src.cols; ++c) {
        const LinearForm& phi = src.at(r, c);
        if (phi.is_zero(ring)) continue;
        Scalar alpha = phi.coefficient(ring, zvar);
        LinearForm psi = phi;
        psi.coeffs.erase(zvar);
        for (uint32_t d = 0; d < slots; ++d) {
          if (j == 0 && d != 0) break;  // source carries z-degree 0
          int row = j == 0 ? 0 : d * static_cast<uint32_t>(src.rows) + static_cast<uint32_t>(r);
          // keep edge: z-degree unchanged
          if (!psi.is_zero(ring)) {
            if (j + 1 == L) {
              if (d == t) dst.at(row, 0) = LinearForm::sum(ring, dst.at(row, 0), psi);
            } else {
              int col = d * static_cast<uint32_t>(src.cols) + static_cast<uint32_t>(c);
              dst.at(row, col) = LinearForm::sum(ring, dst.at(row, col), psi);
            }
          }
          // z edge: z-degree advances, label becomes the constant alpha
          if (!ring.is_zero(alpha) && d + 1 <= t) {
            LinearForm af;
            af.constant = alpha;
            if (j + 1 == L) {
              if (d + 1 == t) dst.at(row, 0) = LinearForm::sum(ring, dst.at(row, 0), af);
            } else {
              int col = (d + 1) * static_cast<uint32_t>(src.cols) + static_cast<uint32_t>(c);
              dst.at(row, col) = LinearForm::sum(ring, dst.at(row, col), af);
            }
          }
        }
      }
    }
    layers.push_back(std::move(dst));
  }
  Abp out(nx, std::move(layers));
  return compact_abp(ring, out);
}

// ---- k-paths ----

namespace {

Abp walk_polynomial_abp(const Ring& ring, const Graph& g, uint32_t k) {
  uint32_t n = g.n;
  std::vector<AbpLayer> layers;
  for (uint32_t j = 1; j <= k; ++j) {
    int rows = j == 1 ? 1 : static_cast<int>(n);
    int cols = j == k ? 1 : static_cast<int>(n);
    AbpLayer l = AbpLayer::zeros(ring, rows, cols);
    if (k == 1) {
      LinearForm all;
      all.constant = ring.zero();
      for (uint32_t v = 1; v <= n; ++v) all.add_coeff(ring, v, ring.one());
      l.at(0, 0) = all;
    } else if (j == 1) {
      for (uint32_t v = 1; v <= n; ++v) l.at(0, static_cast<int>(v) - 1) = var_form(ring, v);
    } else if (j == k) {
      for (uint32_t u = 1; u <= n; ++u) {
        LinearForm f;
        f.constant = ring.zero();
        for (uint32_t v : g.adj[u - 1]) f.add_coeff(ring, v, ring.one());
        l.at(static_cast<int>(u) - 1, 0) = f;
      }
    } else {
      for (uint32_t u = 1; u <= n; ++u) {
        for (uint32_t v : g.adj[u - 1]) {
          l.at(static_cast<int>(u) - 1, static_cast<int>(v) - 1) = var_form(ring, v);
        }
      }
    }
    layers.push_back(std::move(l));
  }
  return Abp(n, std::move(layers));
}

}  // namespace

KPathCount count_kpaths(const Graph& g, uint32_t k, const AppOptions& opts) {
  if (k < 1 || k > g.n) fail(Errc::invalid_argument, "need 1 <= k <= n for k-path counting");
  if (g.has_self_loop()) fail(Errc::invalid_argument, "self-loops are not allowed in path counting");

  BigInt bound = 1;
  for (uint32_t i = 0; i < k; ++i) bound *= g.n;  // walks dominate paths
  Ring ring = counting_ring_for(bound);

  Abp walks = compact_abp(ring, walk_polynomial_abp(ring, g, k));
  MlcOptions mopts;
  mopts.algo = opts.algo;
  mopts.rper = opts.rper;
  mopts.abp = opts.abp;
  Scalar raw = mlc_count_abp(ring, walks, k, mopts);

  KPathCount out;
  out.ordered = read_count(ring, raw);
  out.abp_width = walks.max_width();
  if (!g.directed && k >= 2) {
    out.undirected_valid = true;
    out.undirected = out.ordered / 2;
  }
  return out;
}

// ---- k-trees ----

BigInt injective_homomorphism_count(const Graph& pattern, const Graph& host) {
  // backtracking over pattern vertices in a connected order
  std::vector<uint32_t> order;
  std::vector<char> placed(pattern.n, 0);
  order.push_back(1);
  placed[0] = 1;
  for (size_t head = 0; head < order.size(); ++head) {
    for (uint32_t v : pattern.adj[order[head] - 1]) {
      if (!placed[v - 1]) {
        placed[v - 1] = 1;
        order.push_back(v);
      }
    }
  }
  if (order.size() != pattern.n) {
    fail(Errc::invalid_argument, "pattern graph must be connected");
  }

  BigInt count = 0;
  std::vector<uint32_t> image(pattern.n, 0);
  std::vector<char> used(host.n, 0);
  auto rec = [&](auto&& self, size_t idx) -> void {
    if (idx == order.size()) {
      ++count;
      return;
    }
    uint32_t pv = order[idx];
    for (uint32_t hv = 1; hv <= host.n; ++hv) {
      if (used[hv - 1]) continue;
      bool ok = true;
      for (uint32_t pu : pattern.adj[pv - 1]) {
        if (image[pu - 1] == 0) continue;
        if (!host.has_arc(image[pu - 1], hv) || !host.has_arc(hv, image[pu - 1])) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      image[pv - 1] = hv;
      used[hv - 1] = 1;
      self(self, idx + 1);
      image[pv - 1] = 0;
      used[hv - 1] = 0;
    }
  };
  rec(rec, 0);
  return count;
}

namespace {

Graph complete_graph(uint32_t n) {
  Graph g;
  g.n = n;
  g.directed = false;
  g.adj.assign(n, {});
  for (uint32_t u = 1; u <= n; ++u) {
    for (uint32_t v = u + 1; v <= n; ++v) {
      g.edges.emplace_back(u, v);
      g.adj[u - 1].push_back(v);
      g.adj[v - 1].push_back(u);
    }
  }
  return g;
}

// rooted-subtree polynomial D(u with parent p, placed at graph node j):
//   x_j * prod over children c of ( sum_{j' adjacent to j} D(c, u, j') )
class TreeSieve {
 public:
  TreeSieve(const Ring& ring, const Graph& g, const Graph& tree, int width_cap)
      : ring_(ring), g_(g), tree_(tree), cap_(width_cap) {}

  Abp build_q() {
    std::vector<std::pair<Scalar, Abp>> parts;
    for (uint32_t root = 1; root <= tree_.n; ++root) {
      for (uint32_t j = 1; j <= g_.n; ++j) {
        parts.emplace_back(ring_.one(), rooted(root, 0, j));
      }
    }
    return compact_abp(ring_, abp_parallel(ring_, parts, cap_));
  }

 private:
  Abp rooted(uint32_t u, uint32_t parent, uint32_t j) {
    auto key = std::make_tuple(u, parent, j);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Abp acc = abp_from_form(ring_, g_.n, var_form(ring_, j));
    for (uint32_t c : tree_.adj[u - 1]) {
      if (c == parent) continue;
      std::vector<std::pair<Scalar, Abp>> choices;
      for (uint32_t j2 : g_.adj[j - 1]) {
        choices.emplace_back(ring_.one(), rooted(c, u, j2));
      }
      if (choices.empty()) {
        // j has no neighbors: the factor is the zero polynomial
        Abp zero = abp_from_form(ring_, g_.n, LinearForm{});
        for (uint32_t pad = 1; pad < subtree_size(c, u); ++pad) {
          zero = abp_series(ring_, zero, abp_from_form(ring_, g_.n, LinearForm{}));
        }
        acc = abp_series(ring_, acc, zero);
      } else {
        acc = abp_series(ring_, acc, compact_abp(ring_, abp_parallel(ring_, choices, cap_)));
      }
    }
    memo_.emplace(key, acc);
    return acc;
  }

  uint32_t subtree_size(uint32_t u, uint32_t parent) {
    uint32_t s = 1;
    for (uint32_t c : tree_.adj[u - 1]) {
      if (c != parent) s += subtree_size(c, u);
    }
    return s;
  }

  const Ring& ring_;
  const Graph& g_;
  const Graph& tree_;
  int cap_;
  std::map<std::tuple<uint32_t, uint32_t, uint32_t>, Abp> memo_;
};

BigInt tree_raw_sieve(const Ring& ring, const Graph& g, const Graph& tree,
                      const AppOptions& opts, int* width_out) {
  if (tree.n > g.n) return 0;
  TreeSieve sieve(ring, g, tree, opts.abp.width_cap);
  Abp q = sieve.build_q();
  if (width_out) *width_out = q.max_width();
  MlcOptions mopts;
  mopts.algo = opts.algo;
  mopts.rper = opts.rper;
  mopts.abp = opts.abp;
  return ring.to_bigint(mlc_count_abp(ring, q, tree.n, mopts));
}

void reduce_fraction(BigInt& num, BigInt& den) {
  BigInt g = boost::multiprecision::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

}  // namespace

CalibratedCount count_ktrees(const Graph& g, const Graph& tree, const AppOptions& opts) {
  validate_tree(tree);
  uint32_t k = tree.n;
  if (g.has_self_loop()) fail(Errc::invalid_argument, "self-loops are not allowed");

  BigInt bound = BigInt(k);
  for (uint32_t i = 0; i < k; ++i) bound *= std::max<uint32_t>(g.n, k);
  Ring ring = counting_ring_for(bound);

  CalibratedCount out;
  out.raw = tree_raw_sieve(ring, g, tree, opts, &out.abp_width);

  // one-time per-shape calibration on the complete reference graph K_k:
  // every injection is a copy there, so the reference copy count is
  // k! / |Aut(tree)| and the measured ratio captures the shape constant
  Graph kk = complete_graph(k);
  BigInt raw_cal = tree_raw_sieve(ring, kk, tree, opts, nullptr);
  BigInt injhom_kk = injective_homomorphism_count(tree, kk);  // = k!
  BigInt aut = injective_homomorphism_count(tree, tree);
  BigInt copies_cal = injhom_kk / aut;
  if (copies_cal == 0 || raw_cal == 0) {
    fail(Errc::invalid_argument, "calibration failed: reference instance has no copies");
  }
  BigInt cnum = raw_cal, cden = copies_cal;
  reduce_fraction(cnum, cden);
  if (cden != 1) {
    fail(Errc::invalid_argument, "calibration constant is not integral");
  }
  out.constant = cnum;
  out.normalized_num = out.raw;
  out.normalized_den = out.constant;
  reduce_fraction(out.normalized_num, out.normalized_den);
  return out;
}

// ---- t-dominating sets ----

BigInt domset_cover_assignment_count(const Graph& g, uint32_t k, uint32_t t) {
  // sum over ordered center tuples of [z^t] prod_v (1 + c_v z), where c_v
  // counts the centers whose closed neighborhood covers v
  BigInt total = 0;
  std::vector<uint32_t> tuple(k, 1);
  auto covered_by = [&](uint32_t center, uint32_t v) {
    return center == v || g.has_arc(center, v);
  };
  for (;;) {
    std::vector<BigInt> dp(t + 1, 0);
    dp[0] = 1;
    for (uint32_t v = 1; v <= g.n; ++v) {
      BigInt cv = 0;
      for (uint32_t c : tuple) {
        if (covered_by(c, v)) ++cv;
      }
      if (cv != 0) {
        for (uint32_t d = t; d >= 1; --d) dp[d] += dp[d - 1] * cv;
      }
    }
    total += dp[t];
    uint32_t pos = k;
    while (pos > 0 && tuple[pos - 1] == g.n) {
      tuple[pos - 1] = 1;
      --pos;
    }
    if (pos == 0) break;
    ++tuple[pos - 1];
  }
  return total;
}

namespace {

// (1 + z x_v) as a two-layer width-2 block
Abp domination_factor(const Ring& ring, uint32_t nvars, uint32_t zvar, uint32_t v) {
  AbpLayer l1 = AbpLayer::zeros(ring, 1, 2);
  l1.at(0, 0) = one_form(ring);
  l1.at(0, 1) = var_form(ring, zvar);
  AbpLayer l2 = AbpLayer::zeros(ring, 2, 1);
  l2.at(0, 0) = one_form(ring);
  l2.at(1, 0) = var_form(ring, v);
  return Abp(nvars, {l1, l2});
}

Abp pad_with_ones(const Ring& ring, const Abp& a, uint32_t layers) {
  Abp out = a;
  while (out.degree() < layers) {
    out = abp_series(ring, out, abp_from_form(ring, a.nvars(), one_form(ring)));
  }
  return out;
}

BigInt domset_raw_sieve(const Ring& ring, const Graph& g, uint32_t k, uint32_t t,
                        const AppOptions& opts, int* width_out) {
  uint32_t nvars = g.n + 1;  // z is the last variable
  uint32_t zvar = nvars;

  uint32_t max_factors = 0;
  for (uint32_t i = 1; i <= g.n; ++i) {
    max_factors = std::max<uint32_t>(max_factors, 1 + static_cast<uint32_t>(g.adj[i - 1].size()));
  }
  std::vector<std::pair<Scalar, Abp>> neighborhoods;
  for (uint32_t i = 1; i <= g.n; ++i) {
    Abp chain = domination_factor(ring, nvars, zvar, i);
    for (uint32_t v : g.adj[i - 1]) {
      chain = abp_series(ring, chain, domination_factor(ring, nvars, zvar, v));
    }
    neighborhoods.emplace_back(ring.one(), pad_with_ones(ring, chain, 2 * max_factors));
  }
  Abp inner = compact_abp(ring, abp_parallel(ring, neighborhoods, opts.abp.width_cap));
  Abp power = inner;
  for (uint32_t copy = 2; copy <= k; ++copy) power = abp_series(ring, power, inner);

  Abp q = zcoeff_abp(ring, power, t);
  if (width_out) *width_out = q.max_width();
  MlcOptions mopts;
  mopts.algo = opts.algo;
  mopts.rper = opts.rper;
  mopts.abp = opts.abp;
  return ring.to_bigint(mlc_count_abp(ring, q, t, mopts));
}

}  // namespace

CalibratedCount count_tdomsets(const Graph& g, uint32_t k, uint32_t t, const AppOptions& opts) {
  if (g.n < 1) fail(Errc::invalid_argument, "graph must have at least one node");
  if (t > g.n) fail(Errc::invalid_argument, "t must be at most n");
  if (k < 1) fail(Errc::invalid_argument, "k must be at least 1");

  // bound: n^k tuples * C(n,t) subsets * k^t assignments
  BigInt bound = 1;
  for (uint32_t i = 0; i < k; ++i) bound *= std::max<uint32_t>(g.n, 2);
  bound *= binom_big(g.n, t);
  for (uint32_t i = 0; i < t; ++i) bound *= std::max<uint32_t>(k, 2);
  Ring ring = counting_ring_for(bound);

  CalibratedCount out;
  out.raw = domset_raw_sieve(ring, g, k, t, opts, &out.abp_width);

  // per-(k,t) calibration on a complete reference graph with max(t, 2) nodes
  uint32_t m = std::max<uint32_t>(t, 2);
  Graph km = complete_graph(m);
  Ring cal_ring = counting_ring_for(bound);
  BigInt raw_cal = domset_raw_sieve(cal_ring, km, k, t, opts, nullptr);
  BigInt oracle_cal = domset_cover_assignment_count(km, k, t);
  if (oracle_cal == 0) fail(Errc::invalid_argument, "calibration failed: empty reference count");
  BigInt cnum = raw_cal, cden = oracle_cal;
  reduce_fraction(cnum, cden);
  if (cden != 1) fail(Errc::invalid_argument, "calibration constant is not integral");
  out.constant = cnum;
  out.normalized_num = out.raw;
  out.normalized_den = out.constant;
  reduce_fraction(out.normalized_num, out.normalized_den);
  return out;
}

// ---- m-dimensional k-matchings ----

MatchCount count_mdmatchings(const MatchInstance& inst, uint32_t k, const AppOptions& opts) {
  if (inst.m < 2) fail(Errc::invalid_argument, "tuple arity m must be >= 2");
  uint32_t n1 = inst.universe_sizes[1];
  if (k > n1) fail(Errc::invalid_argument, "k exceeds the size of the first universe");
  MatchCount out;
  if (k == 0) {
    out.count = 1;
    return out;
  }

  // variables: one per element of U_2..U_m, then z last
  std::vector<uint32_t> offset(inst.m + 1, 0);
  uint32_t nx = 0;
  for (uint32_t i = 2; i <= inst.m; ++i) {
    offset[i] = nx;
    nx += inst.universe_sizes[i];
  }
  uint32_t nvars = nx + 1;
  uint32_t zvar = nvars;

  BigInt bound = binom_big(inst.tuples.size(), k);
  Ring ring = counting_ring_for(bound < 2 ? BigInt(2) : bound);

  // group tuples by first coordinate
  std::vector<std::vector<const std::vector<uint32_t>*>> by_first(n1 + 1);
  for (const auto& t : inst.tuples) by_first[t[0]].push_back(&t);

  // factor j: 1 + sum_{t in T_j} z M_t, as an m-layer block
  Abp product = abp_from_form(ring, nvars, one_form(ring));
  bool first_factor = true;
  for (uint32_t j = 1; j <= n1; ++j) {
    std::vector<std::pair<Scalar, Abp>> paths;
    // skip path: m constant-1 layers
    Abp skip = abp_from_form(ring, nvars, one_form(ring));
    for (uint32_t l = 2; l <= inst.m; ++l) {
      skip = abp_series(ring, skip, abp_from_form(ring, nvars, one_form(ring)));
    }
    paths.emplace_back(ring.one(), skip);
    for (const auto* t : by_first[j]) {
      Abp chain = abp_from_form(ring, nvars, var_form(ring, zvar));
      for (uint32_t i = 2; i <= inst.m; ++i) {
        uint32_t var = offset[i] + (*t)[i - 1];
        chain = abp_series(ring, chain, abp_from_form(ring, nvars, var_form(ring, var)));
      }
      paths.emplace_back(ring.one(), chain);
    }
    Abp factor = compact_abp(ring, abp_parallel(ring, paths, opts.abp.width_cap));
    product = first_factor ? factor : abp_series(ring, product, factor);
    first_factor = false;
  }

  Abp q = zcoeff_abp(ring, product, k);
  out.abp_width = q.max_width();
  MlcOptions mopts;
  mopts.algo = opts.algo;
  mopts.rper = opts.rper;
  mopts.abp = opts.abp;
  uint32_t target_degree = (inst.m - 1) * k;
  out.count = ring.to_bigint(mlc_count_abp(ring, q, target_degree, mopts));
  return out;
}

}  // namespace mlsieve
