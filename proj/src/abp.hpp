#pragma once

#include <optional>
#include <string>
#include <vector>

#include "circuit.hpp"
#include "poly.hpp"
#include "ringvalue.hpp"

namespace mlsieve {

struct AbpLayer {
  int rows = 0, cols = 0;
  std::vector<LinearForm> entries;  // row-major, rows*cols

  const LinearForm& at(int r, int c) const { return entries[static_cast<size_t>(r) * cols + c]; }
  LinearForm& at(int r, int c) { return entries[static_cast<size_t>(r) * cols + c]; }

  static AbpLayer zeros(const Ring& ring, int rows, int cols) {
    AbpLayer l;
    l.rows = rows;
    l.cols = cols;
    LinearForm z;
    z.constant = ring.zero();
    l.entries.assign(static_cast<size_t>(rows) * cols, z);
    return l;
  }
};

// Layered branching program with linear-form edge labels. The source row of
// the first layer and the sink column of the last layer both have width 1;
// the computed polynomial is the 1x1 product of the layer matrices.
class Abp {
 public:
  Abp() = default;
  Abp(uint32_t nvars, std::vector<AbpLayer> layers)
      : nvars_(nvars), layers_(std::move(layers)) {}

  uint32_t nvars() const { return nvars_; }
  uint32_t degree() const { return static_cast<uint32_t>(layers_.size()); }
  const std::vector<AbpLayer>& layers() const { return layers_; }
  std::vector<AbpLayer>& layers() { return layers_; }
  int max_width() const;

  bool is_homogeneous(const Ring& ring) const;

 private:
  uint32_t nvars_ = 0;
  std::vector<AbpLayer> layers_;
};

// Shape-chain and (optionally) homogeneity validation; throws on violation.
void validate_abp(const Ring& ring, const Abp& a, bool require_homogeneous = false);

RingValue abp_eval(const Ring& ring, const Abp& a, const std::vector<RingValue>& point);
Scalar abp_eval_scalar(const Ring& ring, const Abp& a, const std::vector<Scalar>& point);

// ---- file format ----
//   abp <n> <k>
//   layer <rows> <cols>
//   <one line per entry, row-major: space-separated var:coeff pairs;
//    var 0 is the constant term; a blank line is the zero form>
Abp parse_abp(const Ring& ring, const std::string& text);
Abp load_abp(const Ring& ring, const std::string& path);
std::string print_abp(const Ring& ring, const Abp& a);

// Width reduction: prunes dead states and merges states with identical
// out-rows (or in-columns, summing the dual side). Preserves the polynomial.
Abp compact_abp(const Ring& ring, const Abp& a);

// ---- composition ----

// Single-layer 1x1 ABP holding one edge label.
Abp abp_from_form(const Ring& ring, uint32_t nvars, const LinearForm& f);

// Product: layers of a followed by layers of b.
Abp abp_series(const Ring& ring, const Abp& a, const Abp& b);

// Weighted sum of equal-degree ABPs (block-diagonal interior, weights folded
// into the first layer). Throws width_cap_exceeded when the stacked interior
// width passes the cap.
Abp abp_parallel(const Ring& ring, const std::vector<std::pair<Scalar, Abp>>& parts,
                 int width_cap = 1 << 20);

Abp abp_scale(const Ring& ring, const Scalar& s, const Abp& a);

// Linear-size circuit with layer-by-layer left-to-right product order.
Circuit abp_to_circuit(const Ring& ring, const Abp& a);

enum class AbpStrategy { auto_select, degree_halving, sparse };

struct AbpBuildOptions {
  AbpStrategy strategy = AbpStrategy::auto_select;
  int width_cap = 4096;
  size_t sparse_term_cap = 100000;  // auto_select falls back to halving above this
  bool compact = true;
};

// Homogeneous k-layer ABP for the degree-k part of c (the circuit is
// homogenized internally). Errors: k == 0, or width cap exceeded.
Abp circuit_to_abp(const Ring& ring, const Circuit& c, uint32_t k,
                   const AbpBuildOptions& opts = {});

// S_{n,k} as an n-layer ABP of width k+1: states count picked variables and
// edges are labeled 1 (skip) or x_i (pick). Inhomogeneous by construction.
Abp elementary_symmetric_abp(const Ring& ring, uint32_t n, uint32_t k);

// Block-superdiagonal transfer matrices of a homogeneous ABP: n scalar
// matrices of dimension (k+1)*w whose length-k products read the word
// coefficients of the ABP's noncommutative polynomial at (read_row, read_col).
// With a scale point (a_1..a_n) the i-th matrix is multiplied by a_i.
struct TransferMatrices {
  int dim = 0;
  int read_row = 0, read_col = 0;
  std::vector<RingValue> mats;  // one per variable, 1-based variable i -> mats[i-1]
};

TransferMatrices transfer_matrices(const Ring& ring, const Abp& a,
                                   const std::vector<Scalar>* scale = nullptr);

}  // namespace mlsieve
