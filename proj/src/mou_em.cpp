#include "deep_mou/mou_em.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "deep_mou/errors.hpp"
#include "deep_mou/numerics.hpp"
#include "deep_mou/parallel.hpp"
#include "deep_mou/rng.hpp"

namespace deepmou {

namespace {

void m_step(const SparseDocTermMatrix& x, const Matrix& resp, double eps,
            MouParams& p) {
  const std::size_t n = x.n_docs();
  const std::size_t T = x.n_terms();
  std::fill(p.pi.begin(), p.pi.end(), 0.0);
  p.omega = Matrix(p.k, T, eps);
  for (std::size_t d = 0; d < n; ++d) {
    for (std::size_t i = 0; i < p.k; ++i) {
      const double r = resp(d, i);
      p.pi[i] += r;
      if (r == 0.0) continue;
      for (auto tc : x.doc(d)) p.omega(i, tc.term) += r * tc.count;
    }
  }
  for (std::size_t i = 0; i < p.k; ++i) {
    p.pi[i] /= static_cast<double>(n);
    double total = 0.0;
    for (double w : p.omega.row(i)) total += w;
    for (double& w : p.omega.row(i)) w /= total;
  }
}

// Fills resp with normalized responsibilities and returns the log likelihood.
double e_step(const SparseDocTermMatrix& x, const MouParams& p, unsigned threads,
              Matrix& resp) {
  resp = mou_log_joint(x, p, threads);
  double ll = 0.0;
  for (std::size_t d = 0; d < x.n_docs(); ++d) {
    auto row = resp.row(d);
    const double norm = log_sum_exp(row);
    ll += norm;
    for (double& r : row) r = std::exp(r - norm);
  }
  return ll;
}

EmResult run_once(const SparseDocTermMatrix& x, std::size_t k, const EmConfig& cfg,
                  std::size_t restart, unsigned threads) {
  const std::size_t n = x.n_docs();
  RngStream rng(cfg.seed, restart);
  EmResult out;
  out.restart = restart;
  out.responsibilities = Matrix(n, k, 0.0);
  for (std::size_t d = 0; d < n; ++d) {
    out.responsibilities(d, static_cast<std::size_t>(rng() % k)) = 1.0;
  }
  out.params.k = k;
  out.params.pi.assign(k, 0.0);
  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    m_step(x, out.responsibilities, cfg.smoothing, out.params);
    const double ll = e_step(x, out.params, threads, out.responsibilities);
    out.log_lik_trace.push_back(ll);
    if (out.log_lik_trace.size() >= 2) {
      const double prev = out.log_lik_trace[out.log_lik_trace.size() - 2];
      if (std::abs(ll - prev) <= cfg.tol * std::abs(prev)) break;
    }
  }
  return out;
}

}  // namespace

void EmConfig::validate() const {
  if (max_iters == 0) throw std::invalid_argument("max_iters must be positive");
  if (!(tol >= 0.0)) throw std::invalid_argument("tol must be non-negative");
  if (restarts == 0) throw std::invalid_argument("restarts must be positive");
  if (!(smoothing > 0.0)) throw std::invalid_argument("smoothing must be positive");
}

Matrix mou_log_joint(const SparseDocTermMatrix& x, const MouParams& params,
                     unsigned threads) {
  if (params.omega.cols() != x.n_terms() || params.omega.rows() != params.k ||
      params.pi.size() != params.k) {
    throw DimensionError("MoU parameters do not match the corpus");
  }
  Matrix out(x.n_docs(), params.k, 0.0);
  Matrix log_omega(params.k, x.n_terms(), 0.0);
  for (std::size_t i = 0; i < params.k; ++i) {
    for (std::size_t t = 0; t < x.n_terms(); ++t) log_omega(i, t) = std::log(params.omega(i, t));
  }
  parallel_for(x.n_docs(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t d = begin; d < end; ++d) {
      for (std::size_t i = 0; i < params.k; ++i) {
        double s = std::log(params.pi[i]);
        for (auto tc : x.doc(d)) s += tc.count * log_omega(i, tc.term);
        out(d, i) = s;
      }
    }
  });
  return out;
}

EmResult em_fit(const SparseDocTermMatrix& x, std::size_t k, const EmConfig& cfg) {
  if (k == 0) throw std::invalid_argument("k must be positive");
  cfg.validate();
  std::vector<EmResult> runs(cfg.restarts);
  // Restarts share the thread budget; a single restart parallelizes its E-step.
  const unsigned inner = cfg.restarts == 1 ? cfg.threads : 1;
  parallel_for(cfg.restarts, cfg.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) runs[r] = run_once(x, k, cfg, r, inner);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].log_lik_trace.back() > runs[best].log_lik_trace.back()) best = r;
  }
  return std::move(runs[best]);
}

LabelVector mou_assign(const SparseDocTermMatrix& x, const MouParams& params) {
  const Matrix joint = mou_log_joint(x, params);
  std::vector<std::size_t> labels(x.n_docs(), 0);
  for (std::size_t d = 0; d < x.n_docs(); ++d) {
    for (std::size_t i = 1; i < params.k; ++i) {
      if (joint(d, i) > joint(d, labels[d])) labels[d] = i;
    }
  }
  return LabelVector{std::move(labels), params.k};
}

}  // namespace deepmou
