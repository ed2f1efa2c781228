#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "poly.hpp"
#include "ringvalue.hpp"

namespace mlsieve {

// Arithmetic circuit: a DAG of input/const/add/mul gates with ordered children.
// Gates are stored in topological order (children precede parents); product
// gates are binary, and the stored child order is what fixes the
// noncommutative reading of the circuit.
class Circuit {
 public:
  enum class GateKind { input, constant, add, mul };

  struct Gate {
    GateKind kind;
    uint32_t var = 0;  // input: 1-based variable index
    BigInt cval;       // constant value
    int a = -1, b = -1;
    std::string name;
  };

  Circuit() = default;

  uint32_t nvars() const { return nvars_; }
  void set_nvars(uint32_t n) { nvars_ = n; }
  int output() const { return output_; }
  void set_output(int g) { output_ = g; }
  size_t size() const { return gates_.size(); }
  const Gate& gate(int i) const { return gates_[static_cast<size_t>(i)]; }
  const std::vector<Gate>& gates() const { return gates_; }

  int add_input(uint32_t var, std::string name = {});
  int add_const(BigInt v, std::string name = {});
  int add_add(int a, int b, std::string name = {});
  int add_mul(int a, int b, std::string name = {});

  // Left-associated chains; empty sum is const 0, empty product const 1.
  int add_sum(const std::vector<int>& xs);
  int add_product(const std::vector<int>& xs);

 private:
  int push(Gate g);

  std::vector<Gate> gates_;
  int output_ = -1;
  uint32_t nvars_ = 0;
};

// ---- file format ----
//
//   ninputs <n>
//   <name> = input <i>
//   <name> = const <int>
//   <name> = add <a> <b> [...]
//   <name> = mul <a> <b> [...]
//   output <name>
//
// '#' starts a comment. Wider add/mul gates are rewritten to left-associated
// binary chains. Forward references are allowed; cycles are rejected.
Circuit parse_circuit(const std::string& text);
Circuit load_circuit(const std::string& path);
std::string print_circuit(const Circuit& c);

// Gate-by-gate evaluation; all assigned values must share one dimension and
// constants are lifted to c*I when that dimension is positive.
RingValue eval_circuit(const Ring& ring, const Circuit& c, const std::vector<RingValue>& assignment);
Scalar eval_circuit_scalar(const Ring& ring, const Circuit& c, const std::vector<Scalar>& point);

// The degree-k homogeneous part, by the standard component construction
// (each gate carries k+1 degree slices).
Circuit homogenize(const Circuit& c, uint32_t k);

// Exact monomial expansion. Terms of degree above degree_cap are truncated.
SparsePoly brute_expand(const Ring& ring, const Circuit& c, uint32_t degree_cap,
                        size_t term_cap = SparsePoly::kDefaultTermCap);

// Elementary symmetric polynomial S_{n,k} as a dynamic program over prefixes,
// O(nk) gates.
Circuit elementary_symmetric_circuit(uint32_t n, uint32_t k);

// Appends the S_{|vars|,k} dynamic program over the given variables to an
// existing circuit; returns the output gate id.
int append_elementary_symmetric(Circuit& c, const std::vector<uint32_t>& vars, uint32_t k);

// Appends a copy of src's gates to dst (variable indices unchanged) and
// returns the copied output gate id.
int append_circuit(Circuit& dst, const Circuit& src);

// ---- depth-2 / depth-3 structure recognition ----

// Extracts L from a subcircuit that computes a linear (affine) form; returns
// nullopt when the subcircuit is not linear.
std::optional<LinearForm> extract_linear_form(const Ring& ring, const Circuit& c, int gate);

struct SigmaPiSigma {
  struct Term {
    Scalar coeff;
    PiSigma product;
  };
  std::vector<Term> terms;
  uint32_t degree = 0;
};

// Recognizes a (homogeneous) Pi-Sigma circuit: a product of linear forms with
// optional scalar factors folded into the first form.
std::optional<PiSigma> recognize_pisigma(const Ring& ring, const Circuit& c);

// Recognizes a Sigma-Pi-Sigma circuit: a sum of scaled Pi-Sigma terms of one
// common degree. Throws with a diagnostic when the shape does not match.
SigmaPiSigma recognize_sigma_pi_sigma(const Ring& ring, const Circuit& c);

// Pi-Sigma back to a circuit (used to cross-check Hadamard evaluations with
// the roles of the two factors swapped).
Circuit pisigma_to_circuit(const Ring& ring, const PiSigma& f, uint32_t nvars);

}  // namespace mlsieve
