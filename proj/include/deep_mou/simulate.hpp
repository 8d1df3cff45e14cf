#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "deep_mou/corpus.hpp"
#include "deep_mou/matrix.hpp"
#include "deep_mou/rng.hpp"

namespace deepmou {

enum class Study { DeepGenerative, FlatGenerative, RecoveryGrid };

// "deep", "flat" and "grid"; parse_study throws std::invalid_argument.
std::string_view study_name(Study s);
Study parse_study(const std::string& name);

struct SimConfig {
  Study study = Study::DeepGenerative;
  std::size_t n = 200;
  std::size_t n_terms = 200;
  std::size_t k1 = 3;
  std::size_t k2 = 2;
  // Poisson mean of the document lengths.
  double poisson_n = 20.0;
  // beta ~ U(0, beta_max].
  double beta_max = 20.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SimOutput {
  SimConfig config;
  SparseDocTermMatrix x;
  LabelVector true_z1;
  LabelVector true_z2;  // all zero for flat data
  Matrix true_beta;   // k1 x T
  Matrix true_alpha;  // k2 x T, zero for flat data
};

// Two-layer generative process with balanced (z1, z2) cells assigned
// round-robin by document index.
SimOutput generate_deep(const SimConfig& cfg, RngStream& rng);

// Plain Dirichlet-Multinomial groups: k2 = 1, alpha = 0.
SimOutput generate_flat(const SimConfig& cfg, RngStream& rng);

// Eight DeepGenerative datasets (k1 = 3, k2 = 2) over n in {100, 200},
// N in {10, 20}, T in {100, 200}, ordered n, then N, then T. Each cell's
// seed is drawn from `rng`.
std::vector<SimOutput> recovery_grid(RngStream& rng);

// Dispatches on cfg.study with a stream built from cfg.seed; RecoveryGrid
// is not a single dataset and is rejected.
SimOutput generate(const SimConfig& cfg);

}  // namespace deepmou
