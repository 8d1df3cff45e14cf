#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "deep_mou/corpus.hpp"
#include "deep_mou/matrix.hpp"

namespace deepmou {

// Shallow mixture of unigrams: weights pi and k x T term probabilities.
struct MouParams {
  std::size_t k = 0;
  std::vector<double> pi;
  Matrix omega;
};

struct EmConfig {
  std::size_t max_iters = 500;
  double tol = 1e-8;
  std::size_t restarts = 1;
  std::uint64_t seed = 0;
  double smoothing = 1e-10;
  unsigned threads = 1;

  void validate() const;
};

struct EmResult {
  MouParams params;
  Matrix responsibilities;
  // Observed-data log likelihood after every iteration, multinomial
  // coefficients omitted.
  std::vector<double> log_lik_trace;
  std::size_t restart = 0;
};

// Best (highest final log likelihood) of cfg.restarts EM runs, each started
// from a uniformly random hard assignment drawn from stream `restart` of
// cfg.seed. Throws std::invalid_argument when k is 0.
EmResult em_fit(const SparseDocTermMatrix& x, std::size_t k, const EmConfig& cfg);

// n x k matrix of log pi_i + sum_t x_dt log omega_ti.
Matrix mou_log_joint(const SparseDocTermMatrix& x, const MouParams& params,
                     unsigned threads = 1);

// Per-document argmax of the responsibilities, ties to the smallest index.
LabelVector mou_assign(const SparseDocTermMatrix& x, const MouParams& params);

}  // namespace deepmou
