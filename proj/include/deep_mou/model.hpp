#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "deep_mou/corpus.hpp"
#include "deep_mou/matrix.hpp"
#include "deep_mou/params.hpp"
#include "deep_mou/rng.hpp"

namespace deepmou {

struct LatentAllocations {
  std::vector<std::size_t> z1;
  std::vector<std::size_t> z2;

  friend bool operator==(const LatentAllocations&, const LatentAllocations&) = default;
};

struct SamplerConfig {
  std::size_t iterations = 5000;
  std::size_t burn_in = 2000;
  std::size_t thin = 1;
  double delta = 1.0;
  // Half-width of the uniform random-walk proposal for alpha.
  double alpha_step = 0.05;
  // Half-width of the uniform random walk on ln(beta).
  double beta_step_rel = 0.1;
  // Coordinates per Metropolis block; 0 means the whole row.
  std::size_t alpha_block = 0;
  std::size_t beta_block = 0;
  std::uint64_t seed = 0;
  // Worker threads for the per-document allocation draws. Results do not
  // depend on this value.
  unsigned threads = 1;

  // Throws DomainError on an inconsistent configuration.
  void validate() const;
};

struct MhTally {
  std::uint64_t accepted = 0;
  std::uint64_t proposed = 0;

  double rate() const {
    return proposed ? static_cast<double>(accepted) / static_cast<double>(proposed)
                    : 0.0;
  }
  MhTally& operator+=(const MhTally& o) {
    accepted += o.accepted;
    proposed += o.proposed;
    return *this;
  }
  friend bool operator==(const MhTally&, const MhTally&) = default;
};

struct MhCounts {
  MhTally alpha;
  MhTally beta;

  friend bool operator==(const MhCounts&, const MhCounts&) = default;
};

struct ChainState {
  std::size_t iteration = 0;
  DeepMouParams params;
  LatentAllocations z;
  double log_posterior = 0.0;
  // Acceptance tallies of this iteration's Metropolis steps.
  MhCounts mh;

  friend bool operator==(const ChainState&, const ChainState&) = default;
};

struct ChainTrace {
  std::size_t k1 = 0;
  std::size_t k2 = 0;
  std::vector<ChainState> states;
  // Tallies over the whole run, burn-in included.
  MhCounts mh_total;
};

// Random allocations, uniform weights, alpha = 0 and beta from smoothed
// term frequencies of the initial top-layer clusters.
std::pair<DeepMouParams, LatentAllocations> init_state(
    const SparseDocTermMatrix& x, std::size_t k1, std::size_t k2,
    const SamplerConfig& cfg, RngStream& rng);

std::vector<double> sample_pi2(std::span<const std::size_t> z2, std::size_t k2,
                               double delta, RngStream& rng);

Matrix sample_pi1(std::span<const std::size_t> z1, std::span<const std::size_t> z2,
                  std::size_t k1, std::size_t k2, double delta, RngStream& rng);

// Normalized full conditionals of one document's allocations.
std::vector<double> z2_conditional(const SparseDocTermMatrix& x,
                                   const DeepMouParams& params,
                                   std::size_t z1_d, std::size_t d);
std::vector<double> z1_conditional(const SparseDocTermMatrix& x,
                                   const DeepMouParams& params,
                                   std::size_t z2_d, std::size_t d);

// Stream used for document d's allocation draw in a given sweep; block 0 is
// z2, block 1 is z1.
RngStream document_stream(const RngStream& base, std::uint64_t sweep,
                          unsigned block, std::size_t d);

std::vector<std::size_t> sample_z2(const SparseDocTermMatrix& x,
                                   const DeepMouParams& params,
                                   std::span<const std::size_t> z1,
                                   const RngStream& base, std::uint64_t sweep,
                                   unsigned threads = 1);

std::vector<std::size_t> sample_z1(const SparseDocTermMatrix& x,
                                   const DeepMouParams& params,
                                   std::span<const std::size_t> z2,
                                   const RngStream& base, std::uint64_t sweep,
                                   unsigned threads = 1);

// Log Metropolis ratio for replacing alpha row j by `proposal`: the change
// in coefficient-free log density over documents with z2 = j, or -inf when
// the proposal leaves (-1, 1).
double alpha_log_ratio(const SparseDocTermMatrix& x, const DeepMouParams& params,
                       const LatentAllocations& z, std::size_t j,
                       std::span<const double> proposal);

// Log Metropolis ratio for replacing beta row i by `proposal` under a
// log-scale random walk: density change over documents with z1 = i plus
// the Jacobian sum ln(beta'/beta); -inf outside (0, 1000].
double beta_log_ratio(const SparseDocTermMatrix& x, const DeepMouParams& params,
                      const LatentAllocations& z, std::size_t i,
                      std::span<const double> proposal);

// Reflects x into [-1, 1] by folding at the walls.
double reflect_unit(double x);

MhTally mh_update_alpha(const SparseDocTermMatrix& x, DeepMouParams& params,
                        const LatentAllocations& z, const SamplerConfig& cfg,
                        RngStream& rng);

MhTally mh_update_beta(const SparseDocTermMatrix& x, DeepMouParams& params,
                       const LatentAllocations& z, const SamplerConfig& cfg,
                       RngStream& rng);

// Unnormalized log posterior: complete-data log likelihood with the
// multinomial coefficient, allocation log probabilities, Dirichlet(delta)
// log priors of the weights, and the flat priors of alpha and beta (0 on
// the support, -inf outside).
double log_posterior(const SparseDocTermMatrix& x, const DeepMouParams& params,
                     const LatentAllocations& z, double delta);

// Called after every sweep with the current log posterior and the running
// acceptance tallies.
using ProgressFn = std::function<void(std::size_t iteration, double log_posterior,
                                      const MhCounts& running)>;

// Gibbs sweeps in the order z2, z1, pi2, pi1, alpha, beta. Keeps every
// thin-th state after burn-in. With k2 = 1 alpha stays pinned at zero.
// Throws std::runtime_error if the log posterior becomes non-finite.
ChainTrace run_chain(const SparseDocTermMatrix& x, std::size_t k1,
                     std::size_t k2, const SamplerConfig& cfg,
                     std::optional<DeepMouParams> initial_params = std::nullopt,
                     const ProgressFn& progress = nullptr);

struct Assignment {
  Matrix soft;  // n x k1, rows sum to one
  LabelVector hard;
};

// Posterior top-layer membership from precomputed n x (k1 k2) log
// densities (column i * k2 + j).
Assignment assign_from_log_densities(const Matrix& log_dens,
                                     const DeepMouParams& params);

Assignment posterior_assignment(const SparseDocTermMatrix& x,
                                const DeepMouParams& params,
                                unsigned threads = 1);

// Label permutations mapping each kept state onto the pivot (the state with
// the largest log posterior), for both layers.
struct TraceAlignment {
  std::size_t pivot = 0;
  std::vector<std::vector<std::size_t>> z1_perm;
  std::vector<std::vector<std::size_t>> z2_perm;
};

TraceAlignment align_trace(const ChainTrace& trace);

// Majority vote of pivot-aligned top-layer allocations; ties go to the
// pivot's label. Throws std::invalid_argument on an empty trace.
LabelVector consensus_partition(const ChainTrace& trace);

// Posterior mean of the parameters over pivot-aligned kept states.
DeepMouParams posterior_mean(const ChainTrace& trace);

}  // namespace deepmou
