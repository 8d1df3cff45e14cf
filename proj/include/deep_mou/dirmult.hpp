#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "deep_mou/corpus.hpp"
#include "deep_mou/matrix.hpp"
#include "deep_mou/params.hpp"

namespace deepmou {

// Dirichlet parameter of one (i, j) path with the per-term logs and the
// total cached, so that scoring a document touches only its nonzero terms.
class ComponentConcentration {
public:
  ComponentConcentration() = default;
  explicit ComponentConcentration(std::vector<double> a);
  // a_t = beta_t * (1 + alpha_t).
  ComponentConcentration(std::span<const double> beta_row,
                         std::span<const double> alpha_row);

  std::size_t size() const noexcept { return a_.size(); }
  std::span<const double> a() const noexcept { return a_; }
  double a(std::size_t t) const { return a_[t]; }
  double log_a(std::size_t t) const { return log_a_[t]; }
  double a_sum() const noexcept { return a_sum_; }

private:
  void finish();

  std::vector<double> a_;
  std::vector<double> log_a_;
  double a_sum_ = 0.0;
};

// ln p(x | a) of the Dirichlet-Multinomial compound. Without the
// coefficient, drops ln N! - sum ln x_t!, which is constant across
// components. Throws DimensionError if a term index is outside `conc`.
double log_dirmult(std::span<const TermCount> doc, std::uint64_t total,
                   const ComponentConcentration& conc,
                   bool include_coefficient = false);

// Dense-count convenience overload.
double log_dirmult(std::span<const std::uint64_t> counts,
                   const ComponentConcentration& conc,
                   bool include_coefficient = false);

// ln N! - sum_t ln x_t!.
double log_multinomial_coefficient(std::span<const TermCount> doc,
                                   std::uint64_t total);

// Concentrations for every path, indexed i * k2 + j.
std::vector<ComponentConcentration> component_concentrations(
    const DeepMouParams& params);

// n x (k1 k2) matrix of coefficient-free log densities, column i * k2 + j.
Matrix log_dirmult_batch(const SparseDocTermMatrix& x,
                         const DeepMouParams& params, unsigned threads = 1);

}  // namespace deepmou
