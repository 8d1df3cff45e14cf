#include "deep_mou/cell_stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>


#include "deep_mou/numerics.hpp"

namespace deepmou {

CellStats::CellStats(const SparseDocTermMatrix& x, std::span<const std::size_t> z1,
                     std::span<const std::size_t> z2, std::size_t k1,
                     std::size_t k2)
    : n_terms_(x.n_terms()),
      docs_(k1 * k2, 0),
      lengths_(k1 * k2),
      survival_(k1 * k2),
      use_survival_(k1 * k2, false),
      ones_(k1 * k2 * x.n_terms(), 0),
      higher_offsets_(k1 * k2),
      higher_(k1 * k2) {
  const std::size_t n_cells = k1 * k2;
  std::vector<std::map<std::uint64_t, std::uint64_t>> length_counts(n_cells);
  // (term, count) of entries with count >= 2, per cell.
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> raw(n_cells);
  for (std::size_t d = 0; d < x.n_docs(); ++d) {
    const std::size_t c = z1[d] * k2 + z2[d];
    ++docs_[c];
    if (x.doc_total(d) == 0) continue;
    ++length_counts[c][x.doc_total(d)];
    for (const auto& e : x.doc(d)) {
      if (e.count == 1) {
        ++ones_[c * n_terms_ + e.term];
      } else {
        raw[c].push_back({e.term, e.count});
      }
    }
  }
  for (std::size_t c = 0; c < n_cells; ++c) {
    lengths_[c].assign(length_counts[c].begin(), length_counts[c].end());
    if (!lengths_[c].empty()) {
      const std::uint64_t max_len = lengths_[c].back().first;
      // Cost in logarithms of each evaluation route.
      double distinct_cost = 0.0;
      for (const auto& [len, mult] : lengths_[c]) {
        distinct_cost += len <= 16 ? static_cast<double>((len + 3) / 4) : 6.0;
      }
      if (static_cast<double>(max_len) <= distinct_cost) {
        use_survival_[c] = true;
        auto& s = survival_[c];
        s.assign(max_len, 0);
        for (const auto& [len, mult] : lengths_[c]) {
          for (std::uint64_t m = 0; m < len; ++m) s[m] += static_cast<std::uint32_t>(mult);
        }
      }
    }

    auto& entries = raw[c];
    std::sort(entries.begin(), entries.end());
    auto& offsets = higher_offsets_[c];
    offsets.assign(n_terms_ + 1, 0);
    auto& grouped = higher_[c];
    for (std::size_t e = 0; e < entries.size();) {
      std::size_t f = e;
      while (f < entries.size() && entries[f] == entries[e]) ++f;
      grouped.push_back({entries[e].second, static_cast<std::uint32_t>(f - e)});
      ++offsets[entries[e].first + 1];
      e = f;
    }
    for (std::size_t t = 0; t < n_terms_; ++t) offsets[t + 1] += offsets[t];
  }
}

double CellStats::length_part(std::size_t c, double a_sum) const {
  double out = 0.0;
  if (use_survival_[c]) {
    const auto& s = survival_[c];
    for (std::size_t m = 0; m < s.size(); ++m) {
      out += s[m] * std::log(a_sum + static_cast<double>(m));
    }
    return out;
  }
  for (const auto& [len, mult] : lengths_[c]) {
    out += static_cast<double>(mult) * log_rising(a_sum, len);
  }
  return out;
}

double CellStats::term_part(std::size_t c, std::size_t t, double a,
                            double log_a) const {
  double out = ones_[c * n_terms_ + t] * log_a;
  const auto& offsets = higher_offsets_[c];
  for (std::size_t e = offsets[t]; e < offsets[t + 1]; ++e) {
    const auto [count, mult] = higher_[c][e];
    out += mult * log_rising(a, count);
  }
  return out;
}

}  // namespace deepmou
