#include "deep_mou/dirmult.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "deep_mou/errors.hpp"
#include "deep_mou/numerics.hpp"
#include "deep_mou/parallel.hpp"

namespace deepmou {

ComponentConcentration::ComponentConcentration(std::vector<double> a)
    : a_(std::move(a)) {
  finish();
}

ComponentConcentration::ComponentConcentration(std::span<const double> beta_row,
                                               std::span<const double> alpha_row) {
  if (beta_row.size() != alpha_row.size()) {
    throw DimensionError("beta and alpha rows differ in length");
  }
  a_.resize(beta_row.size());
  for (std::size_t t = 0; t < a_.size(); ++t) {
    a_[t] = beta_row[t] * (1.0 + alpha_row[t]);
  }
  finish();
}

void ComponentConcentration::finish() {
  log_a_.resize(a_.size());
  a_sum_ = 0.0;
  for (std::size_t t = 0; t < a_.size(); ++t) {
    if (!(a_[t] > 0.0) || !std::isfinite(a_[t])) {
      throw DomainError("concentration entry " + std::to_string(t) +
                        " is not positive: " + std::to_string(a_[t]));
    }
    log_a_[t] = std::log(a_[t]);
    a_sum_ += a_[t];
  }
}

double log_multinomial_coefficient(std::span<const TermCount> doc,
                                   std::uint64_t total) {
  if (total == 0) return 0.0;
  double out = log_gamma(static_cast<double>(total) + 1.0);
  for (const auto& e : doc) {
    if (e.count > 1) out -= log_gamma(static_cast<double>(e.count) + 1.0);
  }
  return out;
}

double log_dirmult(std::span<const TermCount> doc, std::uint64_t total,
                   const ComponentConcentration& conc,
                   bool include_coefficient) {
  if (!doc.empty() && doc.back().term >= conc.size()) {
    throw DimensionError("document term " + std::to_string(doc.back().term) +
                         " outside concentration of length " +
                         std::to_string(conc.size()));
  }
  if (total == 0) return 0.0;
  double out = -log_rising(conc.a_sum(), total);
  for (const auto& e : doc) {
    out += e.count == 1 ? conc.log_a(e.term) : log_rising(conc.a(e.term), e.count);
  }
  if (include_coefficient) out += log_multinomial_coefficient(doc, total);
  return out;
}

double log_dirmult(std::span<const std::uint64_t> counts,
                   const ComponentConcentration& conc,
                   bool include_coefficient) {
  if (counts.size() != conc.size()) {
    throw DimensionError("count vector and concentration differ in length");
  }
  std::vector<TermCount> doc;
  std::uint64_t total = 0;
  for (std::size_t t = 0; t < counts.size(); ++t) {
    if (counts[t] > 0) {
      doc.push_back({static_cast<std::uint32_t>(t),
                     static_cast<std::uint32_t>(counts[t])});
      total += counts[t];
    }
  }
  return log_dirmult(doc, total, conc, include_coefficient);
}

std::vector<ComponentConcentration> component_concentrations(
    const DeepMouParams& params) {
  std::vector<ComponentConcentration> out;
  out.reserve(params.k1 * params.k2);
  for (std::size_t i = 0; i < params.k1; ++i) {
    for (std::size_t j = 0; j < params.k2; ++j) {
      out.emplace_back(params.beta.row(i), params.alpha.row(j));
    }
  }
  return out;
}

Matrix log_dirmult_batch(const SparseDocTermMatrix& x,
                         const DeepMouParams& params, unsigned threads) {
  if (params.n_terms() != x.n_terms()) {
    throw DimensionError("parameters have " + std::to_string(params.n_terms()) +
                         " terms, data has " + std::to_string(x.n_terms()));
  }
  const auto comps = component_concentrations(params);
  Matrix out(x.n_docs(), comps.size());
  parallel_for(x.n_docs(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t d = begin; d < end; ++d) {
      for (std::size_t c = 0; c < comps.size(); ++c) {
        out(d, c) = log_dirmult(x.doc(d), x.doc_total(d), comps[c]);
      }
    }
  });
  return out;
}

}  // namespace deepmou
