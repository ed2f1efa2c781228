#include "solvers.hpp"

#include <cmath>
#include <thread>

namespace mlsieve {

Scalar mlc_count(const Ring& ring, const Circuit& g, uint32_t k, const MlcOptions& opts) {
  if (k == 0) {
    std::vector<Scalar> zeros(g.nvars(), ring.zero());
    return eval_circuit_scalar(ring, g, zeros);
  }
  if (k > g.nvars()) return ring.zero();
  return multilinear_part_sum(ring, g, k, opts.algo, opts.rper, opts.abp);
}

Scalar mlc_count_abp(const Ring& ring, const Abp& g, uint32_t k, const MlcOptions& opts) {
  if (k >= 1 && g.is_homogeneous(ring)) {
    if (g.degree() != k) return ring.zero();
    return multilinear_part_sum_abp(ring, g, opts.algo, opts.rper);
  }
  return mlc_count(ring, abp_to_circuit(ring, g), k, opts);
}

Coloring draw_coloring(uint32_t n, uint32_t colors, uint64_t seed, uint64_t trial) {
  SeededRng rng = SeededRng(seed).derive(trial).derive(1);
  Coloring zeta;
  zeta.seed = seed;
  zeta.trial = trial;
  zeta.assign.resize(n);
  for (uint32_t i = 0; i < n; ++i) zeta.assign[i] = 1 + static_cast<uint32_t>(rng.below(colors));
  return zeta;
}

uint64_t mmd_trial_count(MmdScheme scheme, uint32_t k, double error_budget) {
  double rate = scheme == MmdScheme::basic ? std::exp(1.0) : 1.752;
  double n = std::pow(rate, static_cast<double>(k)) * std::log(3.0 / error_budget);
  if (n < 1.0) return 1;
  return static_cast<uint64_t>(std::ceil(n));
}

namespace {

// P_i = prod_j (z_j + sum_{zeta(l)=j} x_l); the basic scheme has no z part.
PiSigma coloring_pisigma(const Ring& ring, const Coloring& zeta, uint32_t n, uint32_t colors,
                         bool with_z) {
  PiSigma p;
  for (uint32_t j = 1; j <= colors; ++j) {
    LinearForm f;
    f.constant = ring.zero();
    for (uint32_t l = 0; l < n; ++l) {
      if (zeta.assign[l] == j) f.coeffs.emplace(l + 1, ring.one());
    }
    if (with_z) f.coeffs.emplace(n + j, ring.one());
    p.forms.push_back(std::move(f));
  }
  return p;
}

}  // namespace

MmdResult mmd_run(const Ring& ring, const Circuit& g, uint32_t k, const MmdConfig& cfg) {
  if (k == 0) fail(Errc::invalid_argument, "k-MMD needs k >= 1");
  if (cfg.error_budget <= 0.0 || cfg.error_budget >= 1.0) {
    fail(Errc::invalid_argument, "error budget must lie in (0, 1)");
  }
  uint32_t n = g.nvars();
  uint32_t colors = cfg.scheme == MmdScheme::basic
                        ? k
                        : static_cast<uint32_t>(std::ceil(1.3 * static_cast<double>(k)));
  uint32_t pad = colors - k;

  MmdResult result;
  result.colors = colors;
  if (k > n) {
    // no degree-k multilinear monomial can exist over n variables
    result.trials_planned = 0;
    return result;
  }
  if (ring.is_field() &&
      static_cast<double>(ring.modulus()) <= 10.0 * static_cast<double>(k) / cfg.error_budget) {
    fail(Errc::invalid_argument,
         "field too small for the identity-test budget: need |F| > 10k/error");
  }

  // padded circuit C' = g(X) * S_{colors,pad}(Z) over n + colors variables
  Circuit padded;
  const Circuit* target = &g;
  if (cfg.scheme == MmdScheme::fast) {
    padded.set_nvars(n + colors);
    int gout = append_circuit(padded, g);
    std::vector<uint32_t> zvars;
    for (uint32_t j = 1; j <= colors; ++j) zvars.push_back(n + j);
    int sout = append_elementary_symmetric(padded, zvars, pad);
    padded.set_output(padded.add_mul(gout, sout));
    target = &padded;
  }

  uint64_t trials = cfg.trials_override ? cfg.trials_override
                                        : mmd_trial_count(cfg.scheme, k, cfg.error_budget);
  result.trials_planned = trials;

  auto run_trial = [&](uint64_t t) -> bool {
    // stream 1 feeds the coloring (see draw_coloring); stream 2 feeds the
    // working prime and the identity-test points
    SeededRng rng = SeededRng(cfg.seed).derive(t).derive(2);
    // integer mode evaluates modulo a fresh random prime to bound bit growth;
    // a nonzero value modulo the prime certifies a nonzero value over Z, so
    // the one-sided guarantee survives the reduction
    Ring eval_ring = ring.is_field() ? ring : Ring::prime_field(random_prime(cfg.prime_bits, rng.next_u64()));
    Coloring zeta = draw_coloring(n, colors, cfg.seed, t);
    PiSigma p = coloring_pisigma(eval_ring, zeta, n, colors, cfg.scheme == MmdScheme::fast);
    for (uint32_t pt = 0; pt < std::max<uint32_t>(1, cfg.pit_points); ++pt) {
      std::vector<Scalar> point;
      point.reserve(target->nvars());
      for (uint32_t i = 0; i < n; ++i) point.push_back(eval_ring.uniform(rng));
      for (uint32_t j = 0; j < colors && cfg.scheme == MmdScheme::fast; ++j) {
        point.push_back(eval_ring.one());
      }
      Scalar value = hadamard_pisigma_eval(eval_ring, *target, p, point);
      if (!eval_ring.is_zero(value)) return true;
    }
    return false;
  };

  unsigned threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
  if (threads <= 1) {
    for (uint64_t t = 0; t < trials; ++t) {
      ++result.trials_evaluated;
      if (run_trial(t)) {
        result.found = true;
        result.witness_trial = static_cast<int64_t>(t);
        break;
      }
    }
    return result;
  }

  // block-ordered parallel execution: deterministic verdict and witness for a
  // fixed (seed, threads) pair, with early exit at block granularity
  for (uint64_t block = 0; block * threads < trials && !result.found; ++block) {
    uint64_t begin = block * threads;
    uint64_t end = std::min<uint64_t>(trials, begin + threads);
    std::vector<char> fired(static_cast<size_t>(end - begin), 0);
    std::vector<std::thread> pool;
    for (uint64_t t = begin; t < end; ++t) {
      pool.emplace_back([&, t]() { fired[static_cast<size_t>(t - begin)] = run_trial(t) ? 1 : 0; });
    }
    for (auto& th : pool) th.join();
    result.trials_evaluated += end - begin;
    for (uint64_t t = begin; t < end; ++t) {
      if (fired[static_cast<size_t>(t - begin)]) {
        result.found = true;
        result.witness_trial = static_cast<int64_t>(t);
        break;
      }
    }
  }
  return result;
}

Scalar depth3_mlc(const Ring& ring, const SigmaPiSigma& f, uint32_t nvars) {
  if (f.terms.empty()) return ring.zero();
  uint32_t k = f.degree;
  if (k == 0 || k > nvars) return ring.zero();
  for (const auto& term : f.terms) {
    if (!term.product.all_homogeneous(ring)) {
      fail(Errc::invalid_argument, "depth-3 MLC needs homogeneous linear forms");
    }
  }
  Circuit snk = elementary_symmetric_circuit(nvars, k);
  std::vector<Scalar> ones(nvars, ring.one());
  Scalar acc = ring.zero();
  for (const auto& term : f.terms) {
    Scalar v = hadamard_pisigma_eval(ring, snk, term.product, ones);
    acc = ring.add(acc, ring.mul(term.coeff, v));
  }
  return acc;
}

namespace {

// coordinate-wise (Hadamard) product of two homogeneous linear forms
LinearForm form_coordinate_product(const Ring& ring, const LinearForm& a, const LinearForm& b) {
  LinearForm r;
  r.constant = ring.zero();
  for (const auto& [var, ca] : a.coeffs) {
    Scalar cb = b.coefficient(ring, var);
    if (ring.is_zero(cb)) continue;
    r.coeffs.emplace(var, ring.mul(ca, cb));
  }
  return r;
}

}  // namespace

Depth3MmdResult depth3_mmd_int(const SigmaPiSigma& f, uint32_t nvars) {
  Ring zz = Ring::integers();
  Depth3MmdResult out;
  out.value = 0;
  if (f.terms.empty()) return out;
  uint32_t k = f.degree;
  if (k == 0 || k > nvars) return out;

  Circuit snk = elementary_symmetric_circuit(nvars, k);
  std::vector<Scalar> ones(nvars, zz.one());

  // V = sum over multilinear m of ([m]f)^2, assembled as
  // sum_{i,i'} c_i c_{i'} sum_{Ryser terms S of T_i*} sign_S *
  //   (prod_j (L'_j . L_S) o^s S_{n,k})(1)
  Scalar V = zz.zero();
  for (const auto& ti : f.terms) {
    RyserTermStream stream(zz, ti.product);
    RyserTerm term;
    while (stream.next(term)) {
      if (term.form.is_zero(zz)) continue;
      for (const auto& tj : f.terms) {
        PiSigma u;
        bool dead = false;
        for (const LinearForm& lj : tj.product.forms) {
          LinearForm prod = form_coordinate_product(zz, lj, term.form);
          if (prod.is_zero(zz)) {
            dead = true;
            break;
          }
          u.forms.push_back(std::move(prod));
        }
        if (dead) continue;
        Scalar val = hadamard_pisigma_eval(zz, snk, u, ones);
        Scalar contrib = zz.mul(zz.mul(ti.coeff, tj.coeff), val);
        V = term.sign > 0 ? zz.add(V, contrib) : zz.sub(V, contrib);
      }
    }
  }
  out.value = zz.to_bigint(V);
  out.found = out.value > 0;
  if (out.value < 0) {
    fail(Errc::invalid_argument, "sum of squared coefficients came out negative; input was not over Z");
  }
  return out;
}

}  // namespace mlsieve
