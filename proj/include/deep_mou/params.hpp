#pragma once

#include <cstddef>
#include <vector>

#include "deep_mou/matrix.hpp"

namespace deepmou {

inline constexpr double kBetaUpper = 1000.0;

// One full parameter state of the two-layer model.
//
//   pi2        k2 mixture weights of the hidden layer
//   pi1        k1 x k2, column j holds p(z1 = i | z2 = j)
//   alpha      k2 x T perturbations, strictly inside (-1, 1)
//   beta       k1 x T cluster rates, inside (0, 1000]
//
// The Dirichlet concentration of path (i, j) is beta_i * (1 + alpha_j).
struct DeepMouParams {
  std::size_t k1 = 0;
  std::size_t k2 = 0;
  std::vector<double> pi2;
  Matrix pi1;
  Matrix alpha;
  Matrix beta;

  std::size_t n_terms() const noexcept { return beta.cols(); }

  friend bool operator==(const DeepMouParams&, const DeepMouParams&) = default;
};

// Shape and support checks; throws DimensionError or DomainError.
void validate(const DeepMouParams& p);

}  // namespace deepmou
