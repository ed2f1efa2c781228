#include "abp.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <unordered_map>

namespace mlsieve {

int Abp::max_width() const {
  int w = 1;
  for (const AbpLayer& l : layers_) {
    w = std::max(w, std::max(l.rows, l.cols));
  }
  return w;
}

bool Abp::is_homogeneous(const Ring& ring) const {
  for (const AbpLayer& l : layers_) {
    for (const LinearForm& f : l.entries) {
      if (!f.is_homogeneous(ring)) return false;
    }
  }
  return true;
}

void validate_abp(const Ring& ring, const Abp& a, bool require_homogeneous) {
  if (a.degree() == 0) fail(Errc::invalid_argument, "ABP must have at least one layer");
  const auto& ls = a.layers();
  if (ls.front().rows != 1) fail(Errc::dimension_mismatch, "first layer must have one row");
  if (ls.back().cols != 1) fail(Errc::dimension_mismatch, "last layer must have one column");
  for (size_t i = 0; i + 1 < ls.size(); ++i) {
    if (ls[i].cols != ls[i + 1].rows) {
      fail(Errc::dimension_mismatch,
           "layer " + std::to_string(i + 1) + " has " + std::to_string(ls[i].cols) +
               " columns but layer " + std::to_string(i + 2) + " has " +
               std::to_string(ls[i + 1].rows) + " rows");
    }
  }
  for (const AbpLayer& l : ls) {
    if (static_cast<size_t>(l.rows) * l.cols != l.entries.size()) {
      fail(Errc::dimension_mismatch, "layer entry count does not match its shape");
    }
    for (const LinearForm& f : l.entries) {
      for (const auto& [var, coeff] : f.coeffs) {
        if (var < 1 || var > a.nvars()) {
          fail(Errc::invalid_argument, "edge label uses variable out of range");
        }
      }
      if (require_homogeneous && !f.is_homogeneous(ring)) {
        fail(Errc::invalid_argument, "nonhomogeneous edge label in a homogeneous ABP");
      }
    }
  }
}

namespace {

RingValue eval_form_rv(const Ring& ring, const LinearForm& f, const std::vector<RingValue>& point,
                       int dim) {
  RingValue acc = ring.is_zero(f.constant)
                      ? RingValue::zero(ring, dim)
                      : (dim == 0 ? RingValue::scalar(f.constant)
                                  : RingValue::scaled_identity(ring, dim, f.constant));
  for (const auto& [var, coeff] : f.coeffs) {
    acc = rv_add(ring, acc, rv_scale(ring, coeff, point[var - 1]));
  }
  return acc;
}

}  // namespace

RingValue abp_eval(const Ring& ring, const Abp& a, const std::vector<RingValue>& point) {
  validate_abp(ring, a);
  if (point.size() != a.nvars()) fail(Errc::invalid_argument, "point length mismatch");
  int dim = point.empty() ? 0 : point[0].dim();
  for (const RingValue& v : point) {
    if (v.dim() != dim) fail(Errc::dimension_mismatch, "point values have mixed dimensions");
  }
  std::vector<RingValue> cur(1, RingValue::one(ring, dim));
  for (const AbpLayer& l : a.layers()) {
    std::vector<RingValue> next(static_cast<size_t>(l.cols), RingValue::zero(ring, dim));
    for (int r = 0; r < l.rows; ++r) {
      for (int c = 0; c < l.cols; ++c) {
        const LinearForm& f = l.at(r, c);
        if (f.is_zero(ring)) continue;
        next[c] = rv_add(ring, next[c], rv_mul(ring, cur[r], eval_form_rv(ring, f, point, dim)));
      }
    }
    cur = std::move(next);
  }
  return cur[0];
}

Scalar abp_eval_scalar(const Ring& ring, const Abp& a, const std::vector<Scalar>& point) {
  std::vector<RingValue> pt;
  pt.reserve(point.size());
  for (const Scalar& s : point) pt.push_back(RingValue::scalar(s));
  return abp_eval(ring, a, pt).as_scalar();
}

// ---- file io ----

namespace {

LinearForm parse_form_line(const Ring& ring, const std::string& line, uint32_t nvars, int lineno) {
  LinearForm f;
  f.constant = ring.zero();
  std::istringstream ls(line);
  std::string tok;
  while (ls >> tok) {
    auto pos = tok.find(':');
    if (pos == std::string::npos) {
      fail(Errc::parse_error, "line " + std::to_string(lineno) + ": expected var:coeff, got '" + tok + "'");
    }
    unsigned long var = 0;
    BigInt coeff;
    try {
      var = std::stoul(tok.substr(0, pos));
      coeff = BigInt(tok.substr(pos + 1));
    } catch (...) {
      fail(Errc::parse_error, "line " + std::to_string(lineno) + ": bad entry '" + tok + "'");
    }
    if (var > nvars) {
      fail(Errc::parse_error, "line " + std::to_string(lineno) + ": variable index out of range");
    }
    if (var == 0) {
      f.constant = ring.add(f.constant, ring.from_bigint(coeff));
    } else {
      f.add_coeff(ring, static_cast<uint32_t>(var), ring.from_bigint(coeff));
    }
  }
  return f;
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

Abp parse_abp(const Ring& ring, const std::string& text) {
  std::vector<std::string> lines;
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }
  size_t pos = 0;
  auto next_header = [&]() -> std::pair<std::string, int> {
    while (pos < lines.size() && (blank(lines[pos]) || lines[pos][0] == '#')) ++pos;
    if (pos >= lines.size()) return {"", static_cast<int>(pos)};
    int at = static_cast<int>(pos);
    return {lines[pos++], at + 1};
  };

  auto [header, hline] = next_header();
  std::istringstream hs(header);
  std::string kw;
  long long n = -1, k = -1;
  hs >> kw >> n >> k;
  if (kw != "abp" || n < 0 || k < 1) {
    fail(Errc::parse_error, "expected header: abp <nvars> <layers>");
  }
  std::vector<AbpLayer> layers;
  for (long long j = 0; j < k; ++j) {
    auto [lh, lline] = next_header();
    std::istringstream lhs(lh);
    std::string lk;
    int rows = 0, cols = 0;
    lhs >> lk >> rows >> cols;
    if (lk != "layer" || rows < 1 || cols < 1) {
      fail(Errc::parse_error, "line " + std::to_string(lline) + ": expected 'layer <rows> <cols>'");
    }
    AbpLayer layer = AbpLayer::zeros(ring, rows, cols);
    for (int e = 0; e < rows * cols; ++e) {
      if (pos >= lines.size()) fail(Errc::parse_error, "unexpected end of file inside layer block");
      const std::string& line = lines[pos++];
      if (!blank(line)) {
        layer.entries[static_cast<size_t>(e)] =
            parse_form_line(ring, line, static_cast<uint32_t>(n), static_cast<int>(pos));
      }
    }
    layers.push_back(std::move(layer));
  }
  Abp a(static_cast<uint32_t>(n), std::move(layers));
  validate_abp(ring, a);
  return a;
}

Abp load_abp(const Ring& ring, const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(Errc::io_error, "cannot open ABP file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_abp(ring, ss.str());
}

std::string print_abp(const Ring& ring, const Abp& a) {
  std::ostringstream os;
  os << "abp " << a.nvars() << " " << a.degree() << "\n";
  for (const AbpLayer& l : a.layers()) {
    os << "layer " << l.rows << " " << l.cols << "\n";
    for (const LinearForm& f : l.entries) {
      bool first = true;
      if (!ring.is_zero(f.constant)) {
        os << "0:" << ring.to_string(f.constant);
        first = false;
      }
      for (const auto& [var, coeff] : f.coeffs) {
        os << (first ? "" : " ") << var << ":" << ring.to_string(coeff);
        first = false;
      }
      os << "\n";
    }
  }
  return os.str();
}

// ---- compaction ----

namespace {

std::string form_key(const Ring& ring, const LinearForm& f) {
  std::string s;
  if (!ring.is_zero(f.constant)) s += "c" + ring.to_string(f.constant);
  for (const auto& [var, coeff] : f.coeffs) {
    s += "|" + std::to_string(var) + ":" + ring.to_string(coeff);
  }
  return s;
}

Abp zero_abp(const Ring& ring, uint32_t nvars, uint32_t k) {
  std::vector<AbpLayer> layers(k, AbpLayer::zeros(ring, 1, 1));
  return Abp(nvars, std::move(layers));
}

}  // namespace

Abp compact_abp(const Ring& ring, const Abp& input) {
  validate_abp(ring, input);
  std::vector<AbpLayer> ls = input.layers();
  uint32_t L = static_cast<uint32_t>(ls.size());
  if (L == 1) return input;

  auto rebuild = [&](uint32_t i, const std::vector<std::vector<int>>& groups, bool sum_rows) {
    // boundary i sits between layers i-1 (in) and i (out)
    AbpLayer& in = ls[i - 1];
    AbpLayer& out = ls[i];
    int neww = static_cast<int>(groups.size());
    AbpLayer nin = AbpLayer::zeros(ring, in.rows, neww);
    AbpLayer nout = AbpLayer::zeros(ring, neww, out.cols);
    for (int g = 0; g < neww; ++g) {
      const auto& members = groups[static_cast<size_t>(g)];
      for (int old : members) {
        for (int r = 0; r < in.rows; ++r) {
          nin.at(r, g) = LinearForm::sum(ring, nin.at(r, g), in.at(r, old));
        }
      }
      if (sum_rows) {
        for (int old : members) {
          for (int c = 0; c < out.cols; ++c) {
            nout.at(g, c) = LinearForm::sum(ring, nout.at(g, c), out.at(old, c));
          }
        }
      } else {
        int rep = members.front();
        for (int c = 0; c < out.cols; ++c) nout.at(g, c) = out.at(rep, c);
      }
    }
    in = std::move(nin);
    out = std::move(nout);
  };

  bool changed = true;
  int guard = 0;
  while (changed && guard++ < 64) {
    changed = false;
    for (uint32_t i = 1; i < L; ++i) {
      AbpLayer& in = ls[i - 1];
      AbpLayer& out = ls[i];
      int w = in.cols;

      // prune states with a zero in-column or zero out-row
      std::vector<std::vector<int>> keep;
      for (int s = 0; s < w; ++s) {
        bool in_zero = true, out_zero = true;
        for (int r = 0; r < in.rows && in_zero; ++r) in_zero = in.at(r, s).is_zero(ring);
        for (int c = 0; c < out.cols && out_zero; ++c) out_zero = out.at(s, c).is_zero(ring);
        if (!in_zero && !out_zero) keep.push_back({s});
      }
      if (keep.empty()) return zero_abp(ring, input.nvars(), L);
      if (static_cast<int>(keep.size()) != w) {
        rebuild(i, keep, false);
        changed = true;
        w = in.cols;
      }

      // backward merge: identical out-rows; in-columns are summed
      {
        std::unordered_map<std::string, int> bucket;
        std::vector<std::vector<int>> groups;
        for (int s = 0; s < w; ++s) {
          std::string key;
          for (int c = 0; c < out.cols; ++c) key += form_key(ring, out.at(s, c)) + ";";
          auto [it, inserted] = bucket.emplace(key, static_cast<int>(groups.size()));
          if (inserted) {
            groups.push_back({s});
          } else {
            groups[static_cast<size_t>(it->second)].push_back(s);
          }
        }
        if (static_cast<int>(groups.size()) != w) {
          rebuild(i, groups, false);
          changed = true;
          w = in.cols;
        }
      }

      // forward merge: identical in-columns; out-rows are summed
      {
        std::unordered_map<std::string, int> bucket;
        std::vector<std::vector<int>> groups;
        for (int s = 0; s < w; ++s) {
          std::string key;
          for (int r = 0; r < in.rows; ++r) key += form_key(ring, in.at(r, s)) + ";";
          auto [it, inserted] = bucket.emplace(key, static_cast<int>(groups.size()));
          if (inserted) {
            groups.push_back({s});
          } else {
            groups[static_cast<size_t>(it->second)].push_back(s);
          }
        }
        if (static_cast<int>(groups.size()) != w) {
          rebuild(i, groups, true);
          changed = true;
        }
      }
    }
  }
  return Abp(input.nvars(), std::move(ls));
}

// ---- composition ----

Abp abp_from_form(const Ring& ring, uint32_t nvars, const LinearForm& f) {
  AbpLayer l = AbpLayer::zeros(ring, 1, 1);
  l.at(0, 0) = f;
  return Abp(nvars, {l});
}

Abp abp_series(const Ring& ring, const Abp& a, const Abp& b) {
  (void)ring;
  if (a.nvars() != b.nvars()) fail(Errc::invalid_argument, "series: variable counts differ");
  std::vector<AbpLayer> layers = a.layers();
  layers.insert(layers.end(), b.layers().begin(), b.layers().end());
  return Abp(a.nvars(), std::move(layers));
}

Abp abp_scale(const Ring& ring, const Scalar& s, const Abp& a) {
  std::vector<AbpLayer> layers = a.layers();
  for (LinearForm& f : layers.front().entries) f = LinearForm::scaled(ring, s, f);
  return Abp(a.nvars(), std::move(layers));
}

Abp abp_parallel(const Ring& ring, const std::vector<std::pair<Scalar, Abp>>& parts,
                 int width_cap) {
  if (parts.empty()) fail(Errc::invalid_argument, "parallel: empty part list");
  uint32_t nvars = parts[0].second.nvars();
  int deg = static_cast<int>(parts[0].second.degree());
  for (const auto& [w, p] : parts) {
    if (static_cast<int>(p.degree()) != deg || p.nvars() != nvars) {
      fail(Errc::invalid_argument, "parallel: mixed degrees or variable counts");
    }
  }
  if (parts.size() == 1) {
    return ring.eq(parts[0].first, ring.one()) ? parts[0].second
                                               : abp_scale(ring, parts[0].first, parts[0].second);
  }
  if (deg == 1) {
    LinearForm sum;
    sum.constant = ring.zero();
    for (const auto& [w, p] : parts) {
      sum = LinearForm::sum(ring, sum, LinearForm::scaled(ring, w, p.layers()[0].at(0, 0)));
    }
    return abp_from_form(ring, nvars, sum);
  }

  std::vector<int> width(static_cast<size_t>(deg) - 1, 0);
  for (const auto& [w, p] : parts) {
    for (int b = 1; b < deg; ++b) {
      width[static_cast<size_t>(b) - 1] += p.layers()[static_cast<size_t>(b)].rows;
    }
  }
  for (int b = 1; b < deg; ++b) {
    if (width[static_cast<size_t>(b) - 1] > width_cap) {
      fail(Errc::width_cap_exceeded,
           "ABP width " + std::to_string(width[static_cast<size_t>(b) - 1]) +
               " exceeds the configured cap " + std::to_string(width_cap));
    }
  }
  std::vector<AbpLayer> layers;
  for (int j = 0; j < deg; ++j) {
    int rows = j == 0 ? 1 : width[static_cast<size_t>(j) - 1];
    int cols = j == deg - 1 ? 1 : width[static_cast<size_t>(j)];
    layers.push_back(AbpLayer::zeros(ring, rows, cols));
  }
  // block-diagonal placement; offset[b] = interior rows consumed at boundary b
  std::vector<int> offset(static_cast<size_t>(deg) + 1, 0);
  for (const auto& [w, p] : parts) {
    for (int j = 0; j < deg; ++j) {
      const AbpLayer& src = p.layers()[static_cast<size_t>(j)];
      AbpLayer& dst = layers[static_cast<size_t>(j)];
      int r0 = j == 0 ? 0 : offset[static_cast<size_t>(j)];
      int c0 = j == deg - 1 ? 0 : offset[static_cast<size_t>(j) + 1];
      for (int r = 0; r < src.rows; ++r) {
        for (int c = 0; c < src.cols; ++c) {
          LinearForm f = src.at(r, c);
          if (j == 0) f = LinearForm::scaled(ring, w, f);
          dst.at(r0 + r, c0 + c) = LinearForm::sum(ring, dst.at(r0 + r, c0 + c), f);
        }
      }
    }
    for (int b = 1; b < deg; ++b) {
      offset[static_cast<size_t>(b)] += p.layers()[static_cast<size_t>(b)].rows;
    }
  }
  return Abp(nvars, std::move(layers));
}

// ---- ABP -> circuit ----

namespace {

int form_to_gates(const Ring& ring, Circuit& c, const LinearForm& f) {
  std::vector<int> parts;
  if (!ring.is_zero(f.constant)) parts.push_back(c.add_const(ring.to_bigint(f.constant)));
  for (const auto& [var, coeff] : f.coeffs) {
    int x = c.add_input(var);
    if (ring.eq(coeff, ring.one())) {
      parts.push_back(x);
    } else {
      parts.push_back(c.add_mul(c.add_const(ring.to_bigint(coeff)), x));
    }
  }
  if (parts.empty()) return -1;
  return c.add_sum(parts);
}

}  // namespace

Circuit abp_to_circuit(const Ring& ring, const Abp& a) {
  validate_abp(ring, a);
  Circuit c;
  c.set_nvars(a.nvars());
  std::vector<int> cur;  // gate per boundary state, -1 = structurally zero
  const auto& ls = a.layers();
  for (size_t j = 0; j < ls.size(); ++j) {
    const AbpLayer& l = ls[j];
    std::vector<int> next(static_cast<size_t>(l.cols), -1);
    for (int col = 0; col < l.cols; ++col) {
      std::vector<int> terms;
      for (int r = 0; r < l.rows; ++r) {
        const LinearForm& f = l.at(r, col);
        if (f.is_zero(ring)) continue;
        if (j == 0) {
          int fg = form_to_gates(ring, c, f);
          if (fg >= 0) terms.push_back(fg);
        } else {
          if (cur[static_cast<size_t>(r)] < 0) continue;
          int fg = form_to_gates(ring, c, f);
          if (fg >= 0) terms.push_back(c.add_mul(cur[static_cast<size_t>(r)], fg));
        }
      }
      if (!terms.empty()) next[static_cast<size_t>(col)] = c.add_sum(terms);
    }
    cur = std::move(next);
  }
  c.set_output(cur[0] < 0 ? c.add_const(0) : cur[0]);
  return c;
}

// ---- circuit -> ABP ----

namespace {

// Normalized homogeneous circuit: degree-0 subvalues folded into scalar
// weights, weighted sums, and products whose factors both have degree >= 1.
struct NormCircuit {
  struct Gate {
    enum class Kind { input, wsum, prod } kind;
    uint32_t var = 0;
    std::vector<std::pair<Scalar, int>> terms;
    int left = -1, right = -1;
    uint32_t deg = 0;
  };
  std::vector<Gate> gates;
  int out = -1;  // -1: the degree-k part is identically zero
};

NormCircuit normalize(const Ring& ring, const Circuit& c, uint32_t k) {
  NormCircuit nc;
  size_t ng = c.size();
  // rep0[g] = degree-0 value (a scalar); rep[g][d-1] = gate id for degree d part, -1 if zero
  std::vector<Scalar> rep0(ng, ring.zero());
  std::vector<std::vector<int>> rep(ng, std::vector<int>(k, -1));

  auto new_gate = [&](NormCircuit::Gate g) {
    nc.gates.push_back(std::move(g));
    return static_cast<int>(nc.gates.size()) - 1;
  };

  for (size_t i = 0; i < ng; ++i) {
    const Circuit::Gate& g = c.gate(static_cast<int>(i));
    switch (g.kind) {
      case Circuit::GateKind::input:
        if (k >= 1) {
          NormCircuit::Gate n;
          n.kind = NormCircuit::Gate::Kind::input;
          n.var = g.var;
          n.deg = 1;
          rep[i][0] = new_gate(std::move(n));
        }
        break;
      case Circuit::GateKind::constant:
        rep0[i] = ring.from_bigint(g.cval);
        break;
      case Circuit::GateKind::add: {
        rep0[i] = ring.add(rep0[g.a], rep0[g.b]);
        for (uint32_t d = 1; d <= k; ++d) {
          int a = rep[g.a][d - 1], b = rep[g.b][d - 1];
          if (a < 0 && b < 0) continue;
          if (a < 0 || b < 0) {
            rep[i][d - 1] = a < 0 ? b : a;
            continue;
          }
          NormCircuit::Gate n;
          n.kind = NormCircuit::Gate::Kind::wsum;
          n.deg = d;
          n.terms = {{ring.one(), a}, {ring.one(), b}};
          rep[i][d - 1] = new_gate(std::move(n));
        }
        break;
      }
      case Circuit::GateKind::mul: {
        rep0[i] = ring.mul(rep0[g.a], rep0[g.b]);
        for (uint32_t d = 1; d <= k; ++d) {
          std::vector<std::pair<Scalar, int>> terms;
          if (!ring.is_zero(rep0[g.a]) && rep[g.b][d - 1] >= 0) {
            terms.emplace_back(rep0[g.a], rep[g.b][d - 1]);
          }
          if (!ring.is_zero(rep0[g.b]) && rep[g.a][d - 1] >= 0) {
            terms.emplace_back(rep0[g.b], rep[g.a][d - 1]);
          }
          for (uint32_t da = 1; da < d; ++da) {
            int a = rep[g.a][da - 1], b = rep[g.b][d - da - 1];
            if (a < 0 || b < 0) continue;
            NormCircuit::Gate p;
            p.kind = NormCircuit::Gate::Kind::prod;
            p.deg = d;
            p.left = a;
            p.right = b;
            terms.emplace_back(ring.one(), new_gate(std::move(p)));
          }
          if (terms.empty()) continue;
          if (terms.size() == 1 && ring.eq(terms[0].first, ring.one())) {
            rep[i][d - 1] = terms[0].second;
            continue;
          }
          NormCircuit::Gate n;
          n.kind = NormCircuit::Gate::Kind::wsum;
          n.deg = d;
          n.terms = std::move(terms);
          rep[i][d - 1] = new_gate(std::move(n));
        }
        break;
      }
    }
  }
  nc.out = rep[static_cast<size_t>(c.output())][k - 1];
  return nc;
}

using AbpPtr = std::shared_ptr<const Abp>;

class HalvingBuilder {
 public:
  HalvingBuilder(const Ring& ring, const NormCircuit& nc, uint32_t nvars, int width_cap)
      : ring_(ring), nc_(nc), nvars_(nvars), cap_(width_cap) {
    size_t n = nc_.gates.size();
    g_done_.assign(n, false);
    g_val_.assign(n, nullptr);
  }

  AbpPtr build(int out) { return gate_abp(out); }

 private:
  using Gate = NormCircuit::Gate;

  AbpPtr leaf(const LinearForm& f) const {
    return std::make_shared<Abp>(abp_from_form(ring_, nvars_, f));
  }

  static AbpPtr series_ptr(const Ring& ring, const AbpPtr& a, const AbpPtr& b) {
    if (!a || !b) return nullptr;
    return std::make_shared<Abp>(abp_series(ring, *a, *b));
  }
  AbpPtr series(const AbpPtr& a, const AbpPtr& b) const { return series_ptr(ring_, a, b); }

  AbpPtr scale(const Scalar& s, const AbpPtr& a) const {
    if (!a || ring_.is_zero(s)) return nullptr;
    if (ring_.eq(s, ring_.one())) return a;
    return std::make_shared<Abp>(abp_scale(ring_, s, *a));
  }

  AbpPtr parallel(const std::vector<std::pair<Scalar, AbpPtr>>& parts) const {
    std::vector<std::pair<Scalar, Abp>> live;
    for (const auto& [w, p] : parts) {
      if (p && !ring_.is_zero(w)) live.emplace_back(w, *p);
    }
    if (live.empty()) return nullptr;
    return std::make_shared<Abp>(abp_parallel(ring_, live, cap_));
  }

  // degree-1 gates fold to a single linear form
  std::optional<LinearForm> fold_linear(int u) {
    const Gate& g = nc_.gates[static_cast<size_t>(u)];
    if (g.kind == Gate::Kind::input) {
      LinearForm f;
      f.constant = ring_.zero();
      f.coeffs.emplace(g.var, ring_.one());
      return f;
    }
    LinearForm acc;
    acc.constant = ring_.zero();
    for (const auto& [w, child] : g.terms) {
      auto sub = fold_linear(child);
      if (!sub) continue;
      acc = LinearForm::sum(ring_, acc, LinearForm::scaled(ring_, w, *sub));
    }
    if (acc.is_zero(ring_)) return std::nullopt;
    return acc;
  }

  void cone_of(int u, std::set<int>& out) const {
    if (out.count(u)) return;
    out.insert(u);
    const Gate& g = nc_.gates[static_cast<size_t>(u)];
    if (g.kind == Gate::Kind::wsum) {
      for (const auto& [w, v] : g.terms) cone_of(v, out);
    } else if (g.kind == Gate::Kind::prod) {
      cone_of(g.left, out);
      cone_of(g.right, out);
    }
  }

  AbpPtr gate_abp(int u) {
    if (g_done_[static_cast<size_t>(u)]) return g_val_[static_cast<size_t>(u)];
    const Gate& g = nc_.gates[static_cast<size_t>(u)];
    AbpPtr result;
    if (g.deg == 1) {
      auto f = fold_linear(u);
      result = f ? leaf(*f) : nullptr;
    } else {
      uint32_t m = (g.deg + 1) / 2;
      std::set<int> cone;
      cone_of(u, cone);
      std::vector<std::pair<Scalar, AbpPtr>> parts;
      for (int w : cone) {
        const Gate& gw = nc_.gates[static_cast<size_t>(w)];
        if (gw.kind != Gate::Kind::prod) continue;
        if (gw.deg <= m) continue;
        if (nc_.gates[static_cast<size_t>(gw.left)].deg > m) continue;
        AbpPtr body = series(gate_abp(gw.left), gate_abp(gw.right));
        if (!body) continue;
        uint32_t e = g.deg - gw.deg;
        if (e == 0) {
          parts.emplace_back(coeff_scalar(u, w), body);
        } else {
          AbpPtr h = coeff_abp(u, w);
          if (!h) continue;
          parts.emplace_back(ring_.one(), series(h, body));
        }
      }
      result = parallel(parts);
    }
    g_done_[static_cast<size_t>(u)] = true;
    g_val_[static_cast<size_t>(u)] = result;
    return result;
  }

  // [u:w] with deg(u) == deg(w): a scalar
  Scalar coeff_scalar(int u, int w) {
    if (u == w) return ring_.one();
    auto key = std::make_pair(u, w);
    if (auto it = h0_.find(key); it != h0_.end()) return it->second;
    const Gate& g = nc_.gates[static_cast<size_t>(u)];
    Scalar acc = ring_.zero();
    if (g.kind == Gate::Kind::wsum) {
      for (const auto& [wt, v] : g.terms) {
        if (nc_.gates[static_cast<size_t>(v)].deg != nc_.gates[static_cast<size_t>(w)].deg) continue;
        acc = ring_.add(acc, ring_.mul(wt, coeff_scalar(v, w)));
      }
    }
    h0_.emplace(key, acc);
    return acc;
  }

  // ABP for [u:w] with deg(u) > deg(w): the left-context coefficient polynomial
  AbpPtr coeff_abp(int u, int w) {
    auto key = std::make_pair(u, w);
    if (auto it = h_.find(key); it != h_.end()) return it->second;
    const Gate& g = nc_.gates[static_cast<size_t>(u)];
    uint32_t dw = nc_.gates[static_cast<size_t>(w)].deg;
    AbpPtr result;
    if (g.kind == Gate::Kind::wsum) {
      std::map<int, Scalar> agg;
      for (const auto& [wt, v] : g.terms) {
        auto [it, inserted] = agg.emplace(v, wt);
        if (!inserted) it->second = ring_.add(it->second, wt);
      }
      std::vector<std::pair<Scalar, AbpPtr>> parts;
      for (const auto& [v, wt] : agg) {
        if (nc_.gates[static_cast<size_t>(v)].deg <= dw) continue;
        parts.emplace_back(wt, coeff_abp(v, w));
      }
      result = parallel(parts);
    } else if (g.kind == Gate::Kind::prod) {
      uint32_t da = nc_.gates[static_cast<size_t>(g.left)].deg;
      if (da < dw) {
        result = nullptr;
      } else if (da == dw) {
        result = scale(coeff_scalar(g.left, w), gate_abp(g.right));
      } else {
        result = series(coeff_abp(g.left, w), gate_abp(g.right));
      }
    } else {
      result = nullptr;  // input gates cannot strictly contain w
    }
    h_.emplace(key, result);
    return result;
  }

  const Ring& ring_;
  const NormCircuit& nc_;
  uint32_t nvars_;
  int cap_;
  std::vector<char> g_done_;
  std::vector<AbpPtr> g_val_;
  std::map<std::pair<int, int>, AbpPtr> h_;
  std::map<std::pair<int, int>, Scalar> h0_;
};

Abp sparse_trie_abp(const Ring& ring, const SparsePoly& part, uint32_t nvars, uint32_t k,
                    int width_cap) {
  if (part.is_zero()) return zero_abp(ring, nvars, k);
  // monomials as ascending variable sequences of length k
  std::vector<std::pair<std::vector<uint32_t>, Scalar>> monos;
  for (const auto& [m, coeff] : part.terms()) {
    std::vector<uint32_t> seq;
    for (const auto& [var, e] : m.exponents()) {
      for (uint32_t i = 0; i < e; ++i) seq.push_back(var);
    }
    monos.emplace_back(std::move(seq), coeff);
  }
  std::sort(monos.begin(), monos.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  // prefix index per level; level k collapses into one sink
  std::vector<std::map<std::vector<uint32_t>, int>> level(k);
  level[0].emplace(std::vector<uint32_t>{}, 0);
  for (const auto& [seq, coeff] : monos) {
    std::vector<uint32_t> prefix;
    for (uint32_t d = 0; d + 1 < k; ++d) {
      prefix.push_back(seq[d]);
      auto& lvl = level[d + 1];
      lvl.emplace(prefix, static_cast<int>(lvl.size()));
      if (static_cast<int>(lvl.size()) > width_cap) {
        fail(Errc::width_cap_exceeded, "sparse ABP width exceeds the configured cap " +
                                           std::to_string(width_cap));
      }
    }
  }
  std::vector<AbpLayer> layers;
  for (uint32_t d = 0; d < k; ++d) {
    int rows = static_cast<int>(level[d].size());
    int cols = d + 1 < k ? static_cast<int>(level[d + 1].size()) : 1;
    layers.push_back(AbpLayer::zeros(ring, rows, cols));
  }
  for (const auto& [seq, coeff] : monos) {
    std::vector<uint32_t> prefix;
    for (uint32_t d = 0; d < k; ++d) {
      int from = level[d].at(prefix);
      if (d + 1 < k) {
        prefix.push_back(seq[d]);
        int to = level[d + 1].at(prefix);
        // interior trie edges are shared between monomials; setting the
        // coefficient is idempotent
        layers[d].at(from, to).coeffs[seq[d]] = ring.one();
      } else {
        layers[d].at(from, 0).add_coeff(ring, seq[d], coeff);
      }
    }
  }
  return Abp(nvars, std::move(layers));
}

}  // namespace

Abp circuit_to_abp(const Ring& ring, const Circuit& c, uint32_t k, const AbpBuildOptions& opts) {
  if (k == 0) {
    fail(Errc::invalid_argument,
         "degree 0 has no branching-program form; evaluate the constant term instead");
  }
  AbpStrategy strat = opts.strategy;
  if (strat == AbpStrategy::auto_select || strat == AbpStrategy::sparse) {
    try {
      SparsePoly part = brute_expand(ring, c, k, opts.sparse_term_cap).degree_part(k);
      Abp a = sparse_trie_abp(ring, part, c.nvars(), k, opts.width_cap);
      if (opts.compact) a = compact_abp(ring, a);
      validate_abp(ring, a, true);
      return a;
    } catch (const Error& e) {
      if (strat == AbpStrategy::sparse || e.code() != Errc::budget_exceeded) throw;
      // term explosion: fall through to the halving construction
    }
  }
  NormCircuit nc = normalize(ring, c, k);
  if (nc.out < 0) return zero_abp(ring, c.nvars(), k);
  HalvingBuilder builder(ring, nc, c.nvars(), opts.width_cap);
  AbpPtr top = builder.build(nc.out);
  if (!top) return zero_abp(ring, c.nvars(), k);
  Abp a = *top;
  if (opts.compact) a = compact_abp(ring, a);
  validate_abp(ring, a, true);
  if (a.max_width() > opts.width_cap) {
    fail(Errc::width_cap_exceeded, "ABP width " + std::to_string(a.max_width()) +
                                       " exceeds the configured cap " +
                                       std::to_string(opts.width_cap));
  }
  return a;
}

Abp elementary_symmetric_abp(const Ring& ring, uint32_t n, uint32_t k) {
  if (k > n) fail(Errc::invalid_argument, "elementary symmetric: k must be <= n");
  if (n == 0) fail(Errc::invalid_argument, "elementary symmetric ABP needs n >= 1");
  LinearForm one;
  one.constant = ring.one();
  auto xvar = [&](uint32_t v) {
    LinearForm f;
    f.constant = ring.zero();
    f.coeffs.emplace(v, ring.one());
    return f;
  };
  std::vector<AbpLayer> layers;
  int w = static_cast<int>(k) + 1;
  for (uint32_t i = 1; i <= n; ++i) {
    int rows = i == 1 ? 1 : w;
    int cols = i == n ? 1 : w;
    AbpLayer l = AbpLayer::zeros(ring, rows, cols);
    for (int j = 0; j < rows; ++j) {
      if (i == n) {
        // sink is the count-k state
        if (j == static_cast<int>(k)) l.at(j, 0) = one;
        if (j == static_cast<int>(k) - 1) l.at(j, 0) = xvar(i);
      } else {
        l.at(j, j) = one;  // skip variable i
        if (j + 1 <= static_cast<int>(k)) l.at(j, j + 1) = xvar(i);
      }
    }
    layers.push_back(std::move(l));
  }
  Abp a(n, std::move(layers));
  validate_abp(ring, a);
  return a;
}

// ---- transfer matrices ----

TransferMatrices transfer_matrices(const Ring& ring, const Abp& a,
                                   const std::vector<Scalar>* scale) {
  validate_abp(ring, a, true);
  if (scale && scale->size() != a.nvars()) {
    fail(Errc::invalid_argument, "scale point length mismatch");
  }
  uint32_t k = a.degree();
  int w = a.max_width();
  int dim = static_cast<int>(k + 1) * w;

  TransferMatrices tm;
  tm.dim = dim;
  tm.read_row = 0;
  tm.read_col = dim - 1;
  tm.mats.reserve(a.nvars());

  // boundary-local state padding: the sink boundary sits at local index w-1
  auto pad = [&](uint32_t boundary, int state) {
    return boundary == k ? w - 1 : state;
  };

  for (uint32_t var = 1; var <= a.nvars(); ++var) {
    RingValue m = RingValue::zero_matrix(ring, dim);
    for (uint32_t j = 0; j < k; ++j) {
      const AbpLayer& l = a.layers()[j];
      for (int r = 0; r < l.rows; ++r) {
        for (int c = 0; c < l.cols; ++c) {
          Scalar coeff = l.at(r, c).coefficient(ring, var);
          if (ring.is_zero(coeff)) continue;
          if (scale) coeff = ring.mul(coeff, (*scale)[var - 1]);
          int row = static_cast<int>(j) * w + pad(j, r);
          int col = static_cast<int>(j + 1) * w + pad(j + 1, c);
          m.at(row, col) = coeff;
        }
      }
    }
    tm.mats.push_back(std::move(m));
  }
  return tm;
}

}  // namespace mlsieve
