#include "circuit.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace mlsieve {

int Circuit::push(Gate g) {
  if (g.name.empty()) g.name = "t" + std::to_string(gates_.size());
  gates_.push_back(std::move(g));
  return static_cast<int>(gates_.size()) - 1;
}

int Circuit::add_input(uint32_t var, std::string name) {
  if (var < 1 || var > nvars_) fail(Errc::invalid_argument, "input variable index out of range");
  Gate g;
  g.kind = GateKind::input;
  g.var = var;
  g.name = std::move(name);
  return push(std::move(g));
}

int Circuit::add_const(BigInt v, std::string name) {
  Gate g;
  g.kind = GateKind::constant;
  g.cval = std::move(v);
  g.name = std::move(name);
  return push(std::move(g));
}

int Circuit::add_add(int a, int b, std::string name) {
  Gate g;
  g.kind = GateKind::add;
  g.a = a;
  g.b = b;
  g.name = std::move(name);
  return push(std::move(g));
}

int Circuit::add_mul(int a, int b, std::string name) {
  Gate g;
  g.kind = GateKind::mul;
  g.a = a;
  g.b = b;
  g.name = std::move(name);
  return push(std::move(g));
}

int Circuit::add_sum(const std::vector<int>& xs) {
  if (xs.empty()) return add_const(0);
  int acc = xs[0];
  for (size_t i = 1; i < xs.size(); ++i) acc = add_add(acc, xs[i]);
  return acc;
}

int Circuit::add_product(const std::vector<int>& xs) {
  if (xs.empty()) return add_const(1);
  int acc = xs[0];
  for (size_t i = 1; i < xs.size(); ++i) acc = add_mul(acc, xs[i]);
  return acc;
}

namespace {

struct RawGate {
  std::string name;
  std::string op;
  std::vector<std::string> args;
  int line;
};

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  fail(Errc::parse_error, "line " + std::to_string(line) + ": " + msg);
}

bool valid_name(const std::string& s) {
  if (s.empty() || (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_')) return false;
  for (char ch : s) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') return false;
  }
  return true;
}

}  // namespace

Circuit parse_circuit(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  long long ninputs = -1;
  std::vector<RawGate> raw;
  std::string output_name;
  int output_line = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (tok[0] == "ninputs") {
      if (ninputs >= 0) parse_fail(lineno, "duplicate ninputs");
      if (tok.size() != 2) parse_fail(lineno, "expected: ninputs <n>");
      try {
        ninputs = std::stoll(tok[1]);
      } catch (...) {
        parse_fail(lineno, "bad ninputs value '" + tok[1] + "'");
      }
      if (ninputs < 0) parse_fail(lineno, "ninputs must be nonnegative");
      continue;
    }
    if (tok[0] == "output") {
      if (tok.size() != 2) parse_fail(lineno, "expected: output <name>");
      if (!output_name.empty()) parse_fail(lineno, "duplicate output line");
      output_name = tok[1];
      output_line = lineno;
      continue;
    }
    if (tok.size() < 3 || tok[1] != "=") {
      parse_fail(lineno, "expected: <name> = <op> <args...>");
    }
    if (!valid_name(tok[0])) parse_fail(lineno, "bad gate name '" + tok[0] + "'");
    RawGate g;
    g.name = tok[0];
    g.op = tok[2];
    g.args.assign(tok.begin() + 3, tok.end());
    g.line = lineno;
    raw.push_back(std::move(g));
  }

  if (ninputs < 0) fail(Errc::parse_error, "missing ninputs header");
  if (output_name.empty()) fail(Errc::parse_error, "missing output line");

  std::map<std::string, int> index;  // raw-gate index by name
  for (size_t i = 0; i < raw.size(); ++i) {
    auto [it, inserted] = index.emplace(raw[i].name, static_cast<int>(i));
    if (!inserted) parse_fail(raw[i].line, "gate '" + raw[i].name + "' redefined");
  }

  // Resolve references and basic arities up front.
  for (RawGate& g : raw) {
    if (g.op == "input") {
      if (g.args.size() != 1) parse_fail(g.line, "expected: input <i>");
    } else if (g.op == "const") {
      if (g.args.size() != 1) parse_fail(g.line, "expected: const <int>");
    } else if (g.op == "add" || g.op == "mul") {
      if (g.args.size() < 2) parse_fail(g.line, g.op + " needs at least two arguments");
      for (const std::string& a : g.args) {
        if (!index.count(a)) parse_fail(g.line, "undefined gate reference '" + a + "'");
      }
    } else {
      parse_fail(g.line, "unknown operation '" + g.op + "'");
    }
  }
  auto out_it = index.find(output_name);
  if (out_it == index.end()) {
    parse_fail(output_line, "undefined gate reference '" + output_name + "'");
  }

  // Topological order over the name graph; detects cycles.
  std::vector<int> state(raw.size(), 0);  // 0 fresh / 1 on stack / 2 done
  std::vector<int> topo;
  std::vector<int> stack;
  for (size_t s = 0; s < raw.size(); ++s) {
    if (state[s]) continue;
    stack.push_back(static_cast<int>(s));
    while (!stack.empty()) {
      int u = stack.back();
      if (state[u] == 0) {
        state[u] = 1;
        if (raw[u].op == "add" || raw[u].op == "mul") {
          for (const std::string& a : raw[u].args) {
            int v = index[a];
            if (state[v] == 1) parse_fail(raw[u].line, "cycle through gate '" + raw[v].name + "'");
            if (state[v] == 0) stack.push_back(v);
          }
        }
      } else {
        stack.pop_back();
        if (state[u] == 1) {
          state[u] = 2;
          topo.push_back(u);
        }
      }
    }
  }

  Circuit c;
  c.set_nvars(static_cast<uint32_t>(ninputs));
  std::vector<int> built(raw.size(), -1);
  for (int u : topo) {
    const RawGate& g = raw[u];
    if (g.op == "input") {
      long long v = 0;
      try {
        v = std::stoll(g.args[0]);
      } catch (...) {
        parse_fail(g.line, "bad variable index '" + g.args[0] + "'");
      }
      if (v < 1 || v > ninputs) parse_fail(g.line, "variable index " + g.args[0] + " out of range");
      built[u] = c.add_input(static_cast<uint32_t>(v), g.name);
    } else if (g.op == "const") {
      BigInt v;
      try {
        v = BigInt(g.args[0]);
      } catch (...) {
        parse_fail(g.line, "bad constant '" + g.args[0] + "'");
      }
      built[u] = c.add_const(std::move(v), g.name);
    } else {
      std::vector<int> kids;
      kids.reserve(g.args.size());
      for (const std::string& a : g.args) kids.push_back(built[index[a]]);
      // wider gates become left-associated binary chains
      int acc = kids[0];
      for (size_t i = 1; i < kids.size(); ++i) {
        bool last = i + 1 == kids.size();
        if (g.op == "add") {
          acc = c.add_add(acc, kids[i], last ? g.name : std::string{});
        } else {
          acc = c.add_mul(acc, kids[i], last ? g.name : std::string{});
        }
      }
      built[u] = acc;
    }
  }
  c.set_output(built[out_it->second]);
  return c;
}

Circuit load_circuit(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(Errc::io_error, "cannot open circuit file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_circuit(ss.str());
}

std::string print_circuit(const Circuit& c) {
  std::ostringstream os;
  os << "ninputs " << c.nvars() << "\n";
  for (size_t i = 0; i < c.size(); ++i) {
    const Circuit::Gate& g = c.gate(static_cast<int>(i));
    os << g.name << " = ";
    switch (g.kind) {
      case Circuit::GateKind::input:
        os << "input " << g.var;
        break;
      case Circuit::GateKind::constant:
        os << "const " << g.cval.str();
        break;
      case Circuit::GateKind::add:
        os << "add " << c.gate(g.a).name << " " << c.gate(g.b).name;
        break;
      case Circuit::GateKind::mul:
        os << "mul " << c.gate(g.a).name << " " << c.gate(g.b).name;
        break;
    }
    os << "\n";
  }
  os << "output " << c.gate(c.output()).name << "\n";
  return os.str();
}

RingValue eval_circuit(const Ring& ring, const Circuit& c, const std::vector<RingValue>& assignment) {
  if (assignment.size() != c.nvars()) {
    fail(Errc::invalid_argument, "assignment length does not match variable count");
  }
  int dim = assignment.empty() ? 0 : assignment[0].dim();
  for (const RingValue& v : assignment) {
    if (v.dim() != dim) fail(Errc::dimension_mismatch, "assignment values have mixed dimensions");
  }
  if (c.output() < 0) fail(Errc::invalid_argument, "circuit has no output");

  std::vector<RingValue> val(c.size());
  for (size_t i = 0; i < c.size(); ++i) {
    const Circuit::Gate& g = c.gate(static_cast<int>(i));
    switch (g.kind) {
      case Circuit::GateKind::input:
        val[i] = assignment[g.var - 1];
        break;
      case Circuit::GateKind::constant: {
        Scalar s = ring.from_bigint(g.cval);
        val[i] = dim == 0 ? RingValue::scalar(s) : RingValue::scaled_identity(ring, dim, s);
        break;
      }
      case Circuit::GateKind::add:
        val[i] = rv_add(ring, val[g.a], val[g.b]);
        break;
      case Circuit::GateKind::mul:
        val[i] = rv_mul(ring, val[g.a], val[g.b]);
        break;
    }
  }
  return val[static_cast<size_t>(c.output())];
}

Scalar eval_circuit_scalar(const Ring& ring, const Circuit& c, const std::vector<Scalar>& point) {
  std::vector<RingValue> a;
  a.reserve(point.size());
  for (const Scalar& s : point) a.push_back(RingValue::scalar(s));
  return eval_circuit(ring, c, a).as_scalar();
}

Circuit homogenize(const Circuit& c, uint32_t k) {
  Circuit out;
  out.set_nvars(c.nvars());
  // comp[g][d] = gate computing the degree-d slice of gate g, or -1 when zero.
  std::vector<std::vector<int>> comp(c.size(), std::vector<int>(k + 1, -1));
  for (size_t i = 0; i < c.size(); ++i) {
    const Circuit::Gate& g = c.gate(static_cast<int>(i));
    switch (g.kind) {
      case Circuit::GateKind::input:
        if (k >= 1) comp[i][1] = out.add_input(g.var);
        break;
      case Circuit::GateKind::constant:
        if (g.cval != 0) comp[i][0] = out.add_const(g.cval);
        break;
      case Circuit::GateKind::add:
        for (uint32_t d = 0; d <= k; ++d) {
          int a = comp[g.a][d], b = comp[g.b][d];
          if (a < 0) {
            comp[i][d] = b;
          } else if (b < 0) {
            comp[i][d] = a;
          } else {
            comp[i][d] = out.add_add(a, b);
          }
        }
        break;
      case Circuit::GateKind::mul:
        for (uint32_t d = 0; d <= k; ++d) {
          int acc = -1;
          for (uint32_t da = 0; da <= d; ++da) {
            int a = comp[g.a][da], b = comp[g.b][d - da];
            if (a < 0 || b < 0) continue;
            int prod = out.add_mul(a, b);
            acc = acc < 0 ? prod : out.add_add(acc, prod);
          }
          comp[i][d] = acc;
        }
        break;
    }
  }
  int top = comp[static_cast<size_t>(c.output())][k];
  out.set_output(top < 0 ? out.add_const(0) : top);
  return out;
}

SparsePoly brute_expand(const Ring& ring, const Circuit& c, uint32_t degree_cap, size_t term_cap) {
  std::vector<SparsePoly> val(c.size(), SparsePoly(ring));
  for (size_t i = 0; i < c.size(); ++i) {
    const Circuit::Gate& g = c.gate(static_cast<int>(i));
    switch (g.kind) {
      case Circuit::GateKind::input: {
        MonomialKey m;
        m.bump(g.var, 1);
        if (1 <= degree_cap) val[i].add_term(m, ring.one());
        break;
      }
      case Circuit::GateKind::constant:
        val[i].add_term(MonomialKey{}, ring.from_bigint(g.cval));
        break;
      case Circuit::GateKind::add:
        val[i] = val[g.a].plus(val[g.b]);
        break;
      case Circuit::GateKind::mul:
        val[i] = val[g.a].times(val[g.b], degree_cap, term_cap);
        break;
    }
    if (val[i].term_count() > term_cap) {
      fail(Errc::budget_exceeded, "sparse expansion exceeded term cap");
    }
  }
  return val[static_cast<size_t>(c.output())];
}

int append_elementary_symmetric(Circuit& c, const std::vector<uint32_t>& vars, uint32_t k) {
  uint32_t n = static_cast<uint32_t>(vars.size());
  if (k > n) fail(Errc::invalid_argument, "elementary symmetric: k must be <= n");
  // e[j] after processing i variables = S_{i,j}
  std::vector<int> e(k + 1, -1);
  e[0] = c.add_const(1);
  for (uint32_t i = 1; i <= n; ++i) {
    int xi = c.add_input(vars[i - 1]);
    for (uint32_t j = std::min(i, k); j >= 1; --j) {
      int pick = e[j - 1] < 0 ? -1 : c.add_mul(xi, e[j - 1]);
      if (e[j] < 0) {
        e[j] = pick;
      } else if (pick >= 0) {
        e[j] = c.add_add(e[j], pick);
      }
    }
  }
  return e[k] < 0 ? c.add_const(0) : e[k];
}

Circuit elementary_symmetric_circuit(uint32_t n, uint32_t k) {
  Circuit c;
  c.set_nvars(n);
  std::vector<uint32_t> vars;
  for (uint32_t i = 1; i <= n; ++i) vars.push_back(i);
  c.set_output(append_elementary_symmetric(c, vars, k));
  return c;
}

int append_circuit(Circuit& dst, const Circuit& src) {
  std::vector<int> map(src.size(), -1);
  for (size_t i = 0; i < src.size(); ++i) {
    const Circuit::Gate& g = src.gate(static_cast<int>(i));
    switch (g.kind) {
      case Circuit::GateKind::input:
        map[i] = dst.add_input(g.var);
        break;
      case Circuit::GateKind::constant:
        map[i] = dst.add_const(g.cval);
        break;
      case Circuit::GateKind::add:
        map[i] = dst.add_add(map[g.a], map[g.b]);
        break;
      case Circuit::GateKind::mul:
        map[i] = dst.add_mul(map[g.a], map[g.b]);
        break;
    }
  }
  return map[static_cast<size_t>(src.output())];
}

std::optional<LinearForm> extract_linear_form(const Ring& ring, const Circuit& c, int gate) {
  const Circuit::Gate& g = c.gate(gate);
  switch (g.kind) {
    case Circuit::GateKind::input: {
      LinearForm f;
      f.constant = ring.zero();
      f.coeffs.emplace(g.var, ring.one());
      return f;
    }
    case Circuit::GateKind::constant: {
      LinearForm f;
      f.constant = ring.from_bigint(g.cval);
      return f;
    }
    case Circuit::GateKind::add: {
      auto a = extract_linear_form(ring, c, g.a);
      auto b = extract_linear_form(ring, c, g.b);
      if (!a || !b) return std::nullopt;
      return LinearForm::sum(ring, *a, *b);
    }
    case Circuit::GateKind::mul: {
      // linear only when one side is a constant subexpression
      auto a = extract_linear_form(ring, c, g.a);
      auto b = extract_linear_form(ring, c, g.b);
      if (!a || !b) return std::nullopt;
      if (a->coeffs.empty()) return LinearForm::scaled(ring, a->constant, *b);
      if (b->coeffs.empty()) return LinearForm::scaled(ring, b->constant, *a);
      return std::nullopt;
    }
  }
  return std::nullopt;
}

namespace {

void flatten_factors(const Circuit& c, int gate, std::vector<int>& out) {
  const Circuit::Gate& g = c.gate(gate);
  if (g.kind == Circuit::GateKind::mul) {
    flatten_factors(c, g.a, out);
    flatten_factors(c, g.b, out);
  } else {
    out.push_back(gate);
  }
}

void flatten_summands(const Circuit& c, int gate, std::vector<int>& out) {
  const Circuit::Gate& g = c.gate(gate);
  if (g.kind == Circuit::GateKind::add) {
    flatten_summands(c, g.a, out);
    flatten_summands(c, g.b, out);
  } else {
    out.push_back(gate);
  }
}

// Parses one product term: scalar coefficient times an ordered list of
// nonconstant linear forms.
std::optional<std::pair<Scalar, PiSigma>> parse_product_term(const Ring& ring, const Circuit& c,
                                                             int gate) {
  std::vector<int> factors;
  flatten_factors(c, gate, factors);
  Scalar coeff = ring.one();
  PiSigma ps;
  for (int f : factors) {
    auto lf = extract_linear_form(ring, c, f);
    if (!lf) return std::nullopt;
    if (lf->coeffs.empty()) {
      coeff = ring.mul(coeff, lf->constant);
    } else {
      ps.forms.push_back(std::move(*lf));
    }
  }
  return std::make_pair(coeff, std::move(ps));
}

}  // namespace

std::optional<PiSigma> recognize_pisigma(const Ring& ring, const Circuit& c) {
  auto term = parse_product_term(ring, c, c.output());
  if (!term) return std::nullopt;
  auto& [coeff, ps] = *term;
  if (ps.forms.empty()) return std::nullopt;
  if (!ring.eq(coeff, ring.one())) {
    ps.forms[0] = LinearForm::scaled(ring, coeff, ps.forms[0]);
  }
  return ps;
}

SigmaPiSigma recognize_sigma_pi_sigma(const Ring& ring, const Circuit& c) {
  std::vector<int> summands;
  flatten_summands(c, c.output(), summands);
  SigmaPiSigma out;
  bool first = true;
  for (int s : summands) {
    auto term = parse_product_term(ring, c, s);
    if (!term) {
      fail(Errc::unsupported,
           "circuit is not a sum of products of linear forms (gate '" + c.gate(s).name + "')");
    }
    auto& [coeff, ps] = *term;
    if (ps.forms.empty()) {
      fail(Errc::unsupported, "constant summand; expected a product of linear forms");
    }
    if (first) {
      out.degree = ps.degree();
      first = false;
    } else if (ps.degree() != out.degree) {
      fail(Errc::unsupported, "product terms have mixed degrees");
    }
    out.terms.push_back(SigmaPiSigma::Term{coeff, std::move(ps)});
  }
  return out;
}

Circuit pisigma_to_circuit(const Ring& ring, const PiSigma& f, uint32_t nvars) {
  Circuit c;
  c.set_nvars(nvars);
  std::vector<int> factors;
  for (const LinearForm& lf : f.forms) {
    std::vector<int> parts;
    if (!ring.is_zero(lf.constant)) {
      parts.push_back(c.add_const(ring.to_bigint(lf.constant)));
    }
    for (const auto& [var, coeff] : lf.coeffs) {
      int x = c.add_input(var);
      if (ring.eq(coeff, ring.one())) {
        parts.push_back(x);
      } else {
        parts.push_back(c.add_mul(c.add_const(ring.to_bigint(coeff)), x));
      }
    }
    factors.push_back(c.add_sum(parts));
  }
  c.set_output(c.add_product(factors));
  return c;
}

}  // namespace mlsieve
