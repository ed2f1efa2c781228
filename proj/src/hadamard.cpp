#include "hadamard.hpp"

namespace mlsieve {

RyserTermStream::RyserTermStream(const Ring& ring, const PiSigma& f)
    : ring_(ring), f_(f), k_(f.degree()) {
  if (k_ == 0) fail(Errc::invalid_argument, "Ryser stream needs degree >= 1");
  if (k_ > 62) fail(Errc::invalid_argument, "Ryser stream degree capped at 62");
  if (!f.all_homogeneous(ring)) {
    fail(Errc::invalid_argument, "Pi-Sigma factor has a nonhomogeneous linear form");
  }
  current_.constant = ring.zero();
}

bool RyserTermStream::next(RyserTerm& out) {
  if (index_ >= (1ULL << k_)) return false;
  if (index_ > 0) {
    uint64_t gray = index_ ^ (index_ >> 1);
    uint64_t prev = (index_ - 1) ^ ((index_ - 1) >> 1);
    uint64_t diff = gray ^ prev;
    int j = __builtin_ctzll(diff);
    const LinearForm& lj = f_.forms[static_cast<size_t>(j)];
    if (gray & diff) {
      current_ = LinearForm::sum(ring_, current_, lj);
    } else {
      current_ = LinearForm::sum(ring_, current_, LinearForm::scaled(ring_, ring_.neg(ring_.one()), lj));
    }
    out.subset = gray;
  } else {
    out.subset = 0;
  }
  int popcount = __builtin_popcountll(out.subset);
  out.sign = (static_cast<int>(k_) - popcount) % 2 == 0 ? 1 : -1;
  out.form = current_;
  ++index_;
  return true;
}

Abp ryser_term_abp(const Ring& ring, const RyserTerm& term, uint32_t nvars, uint32_t k) {
  std::vector<AbpLayer> layers;
  for (uint32_t j = 0; j < k; ++j) {
    AbpLayer l = AbpLayer::zeros(ring, 1, 1);
    l.at(0, 0) = term.form;
    layers.push_back(std::move(l));
  }
  return Abp(nvars, std::move(layers));
}

Scalar hadamard_pisigma_eval(const Ring& ring, const Circuit& g, const PiSigma& f,
                             const std::vector<Scalar>& point) {
  uint32_t n = g.nvars();
  uint32_t k = f.degree();
  if (point.size() != n) fail(Errc::invalid_argument, "evaluation point length mismatch");
  for (const LinearForm& form : f.forms) {
    for (const auto& [var, coeff] : form.coeffs) {
      if (var > n) fail(Errc::invalid_argument, "Pi-Sigma form uses a variable g does not have");
    }
  }

  int dim = static_cast<int>(k) + 1;
  Scalar acc = ring.zero();
  RyserTermStream stream(ring, f);
  RyserTerm term;
  while (stream.next(term)) {
    if (term.form.is_zero(ring)) continue;
    // scaled width-1 transfer matrices of (L_S)^k: one (k+1)x(k+1) matrix per
    // variable, coefficient on every superdiagonal slot
    std::vector<RingValue> assignment;
    assignment.reserve(n);
    for (uint32_t var = 1; var <= n; ++var) {
      Scalar c = term.form.coefficient(ring, var);
      c = ring.mul(c, point[var - 1]);
      RingValue m = RingValue::zero_matrix(ring, dim);
      if (!ring.is_zero(c)) {
        for (int j = 0; j < static_cast<int>(k); ++j) m.at(j, j + 1) = c;
      }
      assignment.push_back(std::move(m));
    }
    RingValue value = eval_circuit(ring, g, assignment);
    const Scalar& corner = value.at(0, dim - 1);
    acc = term.sign > 0 ? ring.add(acc, corner) : ring.sub(acc, corner);
  }
  return acc;
}

Scalar multilinear_part_sum_abp(const Ring& ring, const Abp& g, RperAlgo algo,
                                const RperOptions& opts) {
  validate_abp(ring, g, true);
  TransferMatrices tm = transfer_matrices(ring, g);
  RingValue r = s_star_eval(ring, tm.mats, g.degree(), algo, opts);
  return r.at(tm.read_row, tm.read_col);
}

Scalar multilinear_part_sum(const Ring& ring, const Circuit& g, uint32_t k, RperAlgo algo,
                            const RperOptions& rper_opts, const AbpBuildOptions& abp_opts) {
  if (k == 0) {
    // the degree-0 multilinear part is the constant term
    std::vector<Scalar> zeros(g.nvars(), ring.zero());
    return eval_circuit_scalar(ring, g, zeros);
  }
  if (k > g.nvars()) return ring.zero();
  Circuit h = homogenize(g, k);
  Abp b = circuit_to_abp(ring, h, k, abp_opts);
  return multilinear_part_sum_abp(ring, b, algo, rper_opts);
}

}  // namespace mlsieve
