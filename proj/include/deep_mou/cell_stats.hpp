#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "deep_mou/corpus.hpp"

namespace deepmou {

// Sufficient statistics of the documents allocated to each (i, j) path,
// cell index i * k2 + j. The summed coefficient-free log density of a cell
// under concentration a is
//
//   sum_t term_part(c, t, a_t) - length_part(c, sum_t a_t)
//
// so a Metropolis move that changes a few coordinates only has to revisit
// those coordinates and the length part.
class CellStats {
public:
  CellStats(const SparseDocTermMatrix& x, std::span<const std::size_t> z1,
            std::span<const std::size_t> z2, std::size_t k1, std::size_t k2);

  std::size_t cells() const noexcept { return docs_.size(); }
  std::size_t n_terms() const noexcept { return n_terms_; }
  std::size_t docs(std::size_t c) const { return docs_[c]; }
  // True when no document in the cell has any term.
  bool empty(std::size_t c) const { return lengths_[c].empty(); }
  // True when term t occurs in some document of the cell.
  bool has_term(std::size_t c, std::size_t t) const {
    return ones_[c * n_terms_ + t] > 0 ||
           higher_offsets_[c][t] != higher_offsets_[c][t + 1];
  }

  // sum over documents d in c of ln Gamma(a + N_d) - ln Gamma(a).
  double length_part(std::size_t c, double a_sum) const;

  // sum over documents d in c with x_dt > 0 of ln Gamma(a + x_dt) - ln Gamma(a).
  double term_part(std::size_t c, std::size_t t, double a, double log_a) const;

private:
  std::size_t n_terms_;
  std::vector<std::size_t> docs_;
  // Distinct nonzero document lengths with multiplicities.
  std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> lengths_;
  // survival_[c][m] = number of documents with N_d > m.
  std::vector<std::vector<std::uint32_t>> survival_;
  std::vector<bool> use_survival_;
  // Documents with x_dt == 1, dense cells x T.
  std::vector<std::uint32_t> ones_;
  // Counts >= 2 as (count, multiplicity), grouped by term.
  std::vector<std::vector<std::size_t>> higher_offsets_;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> higher_;
};

}  // namespace deepmou
