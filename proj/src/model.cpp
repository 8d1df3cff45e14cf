#include "deep_mou/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "deep_mou/assignment.hpp"
#include "deep_mou/cell_stats.hpp"
#include "deep_mou/dirmult.hpp"
#include "deep_mou/errors.hpp"
#include "deep_mou/numerics.hpp"
#include "deep_mou/parallel.hpp"

namespace deepmou {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Stream id reserved for initialization; sweeps use id 0 for parameter
// updates and document_stream ids (always >= 2^33) for allocations.
constexpr std::uint64_t kInitStream = 1;

// Sum over `docs` of the coefficient-free log density under comps[other[d]].
// Per-document terms are computed (possibly in parallel) into a buffer and
// summed in document order, so the result does not depend on `threads`.
double sum_log_density(const SparseDocTermMatrix& x,
                       std::span<const std::size_t> docs,
                       std::span<const std::size_t> other,
                       std::span<const ComponentConcentration> comps,
                       std::vector<double>& per_doc, unsigned threads) {
  per_doc.resize(docs.size());
  parallel_for(docs.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const std::size_t d = docs[k];
      per_doc[k] = log_dirmult(x.doc(d), x.doc_total(d), comps[other[d]]);
    }
  });
  double s = 0.0;
  for (double v : per_doc) s += v;
  return s;
}

bool alpha_in_support(std::span<const double> row) {
  return std::all_of(row.begin(), row.end(),
                     [](double a) { return a > -1.0 && a < 1.0; });
}

bool beta_in_support(std::span<const double> row) {
  return std::all_of(row.begin(), row.end(),
                     [](double b) { return b > 0.0 && b <= kBetaUpper; });
}

double log_dirichlet_density(std::span<const double> p, double delta) {
  const double k = static_cast<double>(p.size());
  double out = log_gamma(k * delta) - k * log_gamma(delta);
  if (delta != 1.0) {
    for (double v : p) out += (delta - 1.0) * std::log(v);
  }
  return out;
}

std::vector<double> column(const Matrix& m, std::size_t c) {
  std::vector<double> out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) out[r] = m(r, c);
  return out;
}

void check_dims(const SparseDocTermMatrix& x, const DeepMouParams& params) {
  if (params.n_terms() != x.n_terms()) {
    throw DimensionError("parameters have " + std::to_string(params.n_terms()) +
                         " terms, data has " + std::to_string(x.n_terms()));
  }
}

std::size_t argmax_first(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace

void validate(const DeepMouParams& p) {
  const std::size_t t = p.beta.cols();
  if (p.k1 == 0 || p.k2 == 0) throw DimensionError("k1 and k2 must be >= 1");
  if (p.pi2.size() != p.k2 || p.pi1.rows() != p.k1 || p.pi1.cols() != p.k2 ||
      p.alpha.rows() != p.k2 || p.alpha.cols() != t || p.beta.rows() != p.k1) {
    throw DimensionError("inconsistent parameter shapes");
  }
  for (std::size_t j = 0; j < p.k2; ++j) {
    if (!alpha_in_support(p.alpha.row(j))) {
      throw DomainError("alpha outside (-1, 1)");
    }
  }
  for (std::size_t i = 0; i < p.k1; ++i) {
    if (!beta_in_support(p.beta.row(i))) {
      throw DomainError("beta outside (0, 1000]");
    }
  }
  auto near_one = [](double s) { return std::abs(s - 1.0) <= 1e-9; };
  double s2 = 0.0;
  for (double v : p.pi2) {
    if (!(v >= 0.0)) throw DomainError("negative weight in pi2");
    s2 += v;
  }
  if (!near_one(s2)) throw DomainError("pi2 does not sum to one");
  for (std::size_t j = 0; j < p.k2; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.k1; ++i) {
      if (!(p.pi1(i, j) >= 0.0)) throw DomainError("negative weight in pi1");
      s += p.pi1(i, j);
    }
    if (!near_one(s)) throw DomainError("pi1 column does not sum to one");
  }
}

void SamplerConfig::validate() const {
  if (burn_in >= iterations) {
    throw DomainError("burn_in must be smaller than iterations");
  }
  if (thin == 0) throw DomainError("thin must be >= 1");
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw DomainError("delta must be positive");
  }
  if (!(alpha_step >= 0.0) || !std::isfinite(alpha_step)) {
    throw DomainError("alpha_step must be non-negative");
  }
  if (!(beta_step_rel >= 0.0) || !std::isfinite(beta_step_rel)) {
    throw DomainError("beta_step_rel must be non-negative");
  }
}

std::pair<DeepMouParams, LatentAllocations> init_state(
    const SparseDocTermMatrix& x, std::size_t k1, std::size_t k2,
    const SamplerConfig& /*cfg*/, RngStream& rng) {
  const std::size_t n = x.n_docs();
  const std::size_t t_count = x.n_terms();
  if (k1 == 0 || k2 == 0) throw DomainError("k1 and k2 must be >= 1");
  if (k1 > n || k2 > n) {
    throw DomainError("k1 = " + std::to_string(k1) + ", k2 = " +
                      std::to_string(k2) + " exceed the " + std::to_string(n) +
                      " documents");
  }
  if (t_count == 0) throw DimensionError("corpus has no terms");

  LatentAllocations z;
  z.z1.resize(n);
  z.z2.resize(n);
  std::uniform_int_distribution<std::size_t> pick1(0, k1 - 1), pick2(0, k2 - 1);
  for (std::size_t d = 0; d < n; ++d) {
    z.z1[d] = k1 == 1 ? 0 : pick1(rng);
    z.z2[d] = k2 == 1 ? 0 : pick2(rng);
  }

  DeepMouParams p;
  p.k1 = k1;
  p.k2 = k2;
  p.pi2.assign(k2, 1.0 / static_cast<double>(k2));
  p.pi1 = Matrix(k1, k2, 1.0 / static_cast<double>(k1));
  p.alpha = Matrix(k2, t_count, 0.0);
  p.beta = Matrix(k1, t_count, 0.0);

  Matrix counts(k1, t_count, 0.0);
  for (std::size_t d = 0; d < n; ++d) {
    for (const auto& e : x.doc(d)) counts(z.z1[d], e.term) += e.count;
  }
  const double tt = static_cast<double>(t_count);
  for (std::size_t i = 0; i < k1; ++i) {
    double row_total = 0.0;
    for (double c : counts.row(i)) row_total += c;
    for (std::size_t t = 0; t < t_count; ++t) {
      const double b = tt * (counts(i, t) + 0.5) / (row_total + 0.5 * tt);
      p.beta(i, t) = std::min(b, kBetaUpper);
    }
  }
  return {std::move(p), std::move(z)};
}

std::vector<double> sample_pi2(std::span<const std::size_t> z2, std::size_t k2,
                               double delta, RngStream& rng) {
  std::vector<double> conc(k2, delta);
  for (auto j : z2) conc[j] += 1.0;
  return sample_dirichlet(conc, rng);
}

Matrix sample_pi1(std::span<const std::size_t> z1, std::span<const std::size_t> z2,
                  std::size_t k1, std::size_t k2, double delta, RngStream& rng) {
  if (z1.size() != z2.size()) throw DimensionError("z1 and z2 differ in length");
  Matrix conc(k1, k2, delta);
  for (std::size_t d = 0; d < z1.size(); ++d) conc(z1[d], z2[d]) += 1.0;
  Matrix out(k1, k2);
  for (std::size_t j = 0; j < k2; ++j) {
    const auto col = sample_dirichlet(column(conc, j), rng);
    for (std::size_t i = 0; i < k1; ++i) out(i, j) = col[i];
  }
  return out;
}

namespace {

void z2_log_weights(const SparseDocTermMatrix& x, const DeepMouParams& p,
                    std::span<const ComponentConcentration> comps,
                    std::size_t z1_d, std::size_t d, std::vector<double>& out) {
  out.resize(p.k2);
  for (std::size_t j = 0; j < p.k2; ++j) {
    out[j] = std::log(p.pi2[j]) + std::log(p.pi1(z1_d, j)) +
             log_dirmult(x.doc(d), x.doc_total(d), comps[z1_d * p.k2 + j]);
  }
}

void z1_log_weights(const SparseDocTermMatrix& x, const DeepMouParams& p,
                    std::span<const ComponentConcentration> comps,
                    std::size_t z2_d, std::size_t d, std::vector<double>& out) {
  out.resize(p.k1);
  for (std::size_t i = 0; i < p.k1; ++i) {
    out[i] = std::log(p.pi1(i, z2_d)) +
             log_dirmult(x.doc(d), x.doc_total(d), comps[i * p.k2 + z2_d]);
  }
}

std::vector<double> normalize_log(std::vector<double> lw) {
  const double norm = log_sum_exp(lw);
  for (double& v : lw) v = std::exp(v - norm);
  return lw;
}

}  // namespace

std::vector<double> z2_conditional(const SparseDocTermMatrix& x,
                                   const DeepMouParams& params,
                                   std::size_t z1_d, std::size_t d) {
  check_dims(x, params);
  const auto comps = component_concentrations(params);
  std::vector<double> lw;
  z2_log_weights(x, params, comps, z1_d, d, lw);
  return normalize_log(std::move(lw));
}

std::vector<double> z1_conditional(const SparseDocTermMatrix& x,
                                   const DeepMouParams& params,
                                   std::size_t z2_d, std::size_t d) {
  check_dims(x, params);
  const auto comps = component_concentrations(params);
  std::vector<double> lw;
  z1_log_weights(x, params, comps, z2_d, d, lw);
  return normalize_log(std::move(lw));
}

RngStream document_stream(const RngStream& base, std::uint64_t sweep,
                          unsigned block, std::size_t d) {
  const std::uint64_t id = ((sweep + 1) << 33) |
                           (static_cast<std::uint64_t>(block & 1u) << 32) |
                           static_cast<std::uint64_t>(d & 0xffffffffu);
  return base.substream(id);
}

std::vector<std::size_t> sample_z2(const SparseDocTermMatrix& x,
                                   const DeepMouParams& params,
                                   std::span<const std::size_t> z1,
                                   const RngStream& base, std::uint64_t sweep,
                                   unsigned threads) {
  check_dims(x, params);
  std::vector<std::size_t> out(x.n_docs(), 0);
  if (params.k2 == 1) return out;
  const auto comps = component_concentrations(params);
  parallel_for(x.n_docs(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> lw;
    for (std::size_t d = begin; d < end; ++d) {
      z2_log_weights(x, params, comps, z1[d], d, lw);
      auto rng = document_stream(base, sweep, 0, d);
      out[d] = sample_categorical(lw, rng);
    }
  });
  return out;
}

std::vector<std::size_t> sample_z1(const SparseDocTermMatrix& x,
                                   const DeepMouParams& params,
                                   std::span<const std::size_t> z2,
                                   const RngStream& base, std::uint64_t sweep,
                                   unsigned threads) {
  check_dims(x, params);
  std::vector<std::size_t> out(x.n_docs(), 0);
  if (params.k1 == 1) return out;
  const auto comps = component_concentrations(params);
  parallel_for(x.n_docs(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> lw;
    for (std::size_t d = begin; d < end; ++d) {
      z1_log_weights(x, params, comps, z2[d], d, lw);
      auto rng = document_stream(base, sweep, 1, d);
      out[d] = sample_categorical(lw, rng);
    }
  });
  return out;
}

double reflect_unit(double x) {
  while (x > 1.0 || x < -1.0) {
    x = x > 1.0 ? 2.0 - x : -2.0 - x;
  }
  return x;
}

double alpha_log_ratio(const SparseDocTermMatrix& x, const DeepMouParams& params,
                       const LatentAllocations& z, std::size_t j,
                       std::span<const double> proposal) {
  check_dims(x, params);
  if (proposal.size() != params.n_terms()) {
    throw DimensionError("alpha proposal has the wrong length");
  }
  if (!alpha_in_support(proposal)) return kNegInf;
  std::vector<std::size_t> docs;
  for (std::size_t d = 0; d < x.n_docs(); ++d) {
    if (z.z2[d] == j) docs.push_back(d);
  }
  std::vector<ComponentConcentration> cur, prop;
  for (std::size_t i = 0; i < params.k1; ++i) {
    cur.emplace_back(params.beta.row(i), params.alpha.row(j));
    prop.emplace_back(params.beta.row(i), proposal);
  }
  std::vector<double> buf;
  return sum_log_density(x, docs, z.z1, prop, buf, 1) -
         sum_log_density(x, docs, z.z1, cur, buf, 1);
}

double beta_log_ratio(const SparseDocTermMatrix& x, const DeepMouParams& params,
                      const LatentAllocations& z, std::size_t i,
                      std::span<const double> proposal) {
  check_dims(x, params);
  if (proposal.size() != params.n_terms()) {
    throw DimensionError("beta proposal has the wrong length");
  }
  if (!beta_in_support(proposal)) return kNegInf;
  std::vector<std::size_t> docs;
  for (std::size_t d = 0; d < x.n_docs(); ++d) {
    if (z.z1[d] == i) docs.push_back(d);
  }
  std::vector<ComponentConcentration> cur, prop;
  for (std::size_t j = 0; j < params.k2; ++j) {
    cur.emplace_back(params.beta.row(i), params.alpha.row(j));
    prop.emplace_back(proposal, params.alpha.row(j));
  }
  std::vector<double> buf;
  double jacobian = 0.0;
  const auto current = params.beta.row(i);
  for (std::size_t t = 0; t < proposal.size(); ++t) {
    jacobian += std::log(proposal[t]) - std::log(current[t]);
  }
  return sum_log_density(x, docs, z.z2, prop, buf, 1) -
         sum_log_density(x, docs, z.z2, cur, buf, 1) + jacobian;
}

MhTally mh_update_alpha(const SparseDocTermMatrix& x, DeepMouParams& params,
                        const LatentAllocations& z, const SamplerConfig& cfg,
                        RngStream& rng) {
  check_dims(x, params);
  MhTally tally;
  if (params.k2 == 1) return tally;
  const std::size_t k1 = params.k1, k2 = params.k2;
  const std::size_t t_count = params.n_terms();
  const std::size_t block = cfg.alpha_block == 0 ? t_count
                                                 : std::min(cfg.alpha_block, t_count);
  const CellStats stats(x, z.z1, z.z2, k1, k2);
  std::vector<double> proposal(t_count);
  std::vector<double> a_sum(k1), length(k1), new_sum(k1), new_length(k1);

  for (std::size_t j = 0; j < k2; ++j) {
    auto row = params.alpha.row(j);
    for (std::size_t i = 0; i < k1; ++i) {
      const std::size_t c = i * k2 + j;
      a_sum[i] = 0.0;
      for (std::size_t t = 0; t < t_count; ++t) {
        a_sum[i] += params.beta(i, t) * (1.0 + row[t]);
      }
      length[i] = stats.empty(c) ? 0.0 : stats.length_part(c, a_sum[i]);
    }
    for (std::size_t start = 0; start < t_count; start += block) {
      const std::size_t stop = std::min(t_count, start + block);
      for (std::size_t t = start; t < stop; ++t) {
        const double step = cfg.alpha_step * (2.0 * rng.uniform() - 1.0);
        proposal[t] = reflect_unit(row[t] + step);
      }
      const double log_u = std::log(rng.uniform_pos());
      ++tally.proposed;
      // A proposal landing exactly on a wall is outside the open support.
      if (!alpha_in_support({proposal.data() + start, stop - start})) continue;

      double log_ratio = 0.0;
      for (std::size_t i = 0; i < k1; ++i) {
        const std::size_t c = i * k2 + j;
        if (stats.empty(c)) continue;
        const auto beta = params.beta.row(i);
        double shift = 0.0;
        for (std::size_t t = start; t < stop; ++t) {
          shift += beta[t] * (proposal[t] - row[t]);
          if (!stats.has_term(c, t)) continue;
          const double a_old = beta[t] * (1.0 + row[t]);
          const double a_new = beta[t] * (1.0 + proposal[t]);
          log_ratio += stats.term_part(c, t, a_new, std::log(a_new)) -
                       stats.term_part(c, t, a_old, std::log(a_old));
        }
        new_sum[i] = a_sum[i] + shift;
        new_length[i] = stats.length_part(c, new_sum[i]);
        log_ratio -= new_length[i] - length[i];
      }
      if (log_u < log_ratio) {
        std::copy(proposal.begin() + start, proposal.begin() + stop,
                  row.begin() + start);
        // Sums of empty cells are never read.
        for (std::size_t i = 0; i < k1; ++i) {
          if (stats.empty(i * k2 + j)) continue;
          a_sum[i] = new_sum[i];
          length[i] = new_length[i];
        }
        ++tally.accepted;
      }
    }
  }
  return tally;
}

MhTally mh_update_beta(const SparseDocTermMatrix& x, DeepMouParams& params,
                       const LatentAllocations& z, const SamplerConfig& cfg,
                       RngStream& rng) {
  check_dims(x, params);
  MhTally tally;
  const std::size_t k1 = params.k1, k2 = params.k2;
  const std::size_t t_count = params.n_terms();
  const std::size_t block = cfg.beta_block == 0 ? t_count
                                                : std::min(cfg.beta_block, t_count);
  const CellStats stats(x, z.z1, z.z2, k1, k2);
  std::vector<double> proposal(t_count);
  std::vector<double> a_sum(k2), length(k2), new_sum(k2), new_length(k2);

  for (std::size_t i = 0; i < k1; ++i) {
    auto row = params.beta.row(i);
    for (std::size_t j = 0; j < k2; ++j) {
      const std::size_t c = i * k2 + j;
      a_sum[j] = 0.0;
      for (std::size_t t = 0; t < t_count; ++t) {
        a_sum[j] += row[t] * (1.0 + params.alpha(j, t));
      }
      length[j] = stats.empty(c) ? 0.0 : stats.length_part(c, a_sum[j]);
    }
    for (std::size_t start = 0; start < t_count; start += block) {
      const std::size_t stop = std::min(t_count, start + block);
      double jacobian = 0.0;
      for (std::size_t t = start; t < stop; ++t) {
        const double step = cfg.beta_step_rel * (2.0 * rng.uniform() - 1.0);
        proposal[t] = row[t] * std::exp(step);
        jacobian += std::log(proposal[t]) - std::log(row[t]);
      }
      const double log_u = std::log(rng.uniform_pos());
      ++tally.proposed;
      if (!beta_in_support({proposal.data() + start, stop - start})) continue;

      double log_ratio = jacobian;
      for (std::size_t j = 0; j < k2; ++j) {
        const std::size_t c = i * k2 + j;
        if (stats.empty(c)) continue;
        const auto alpha = params.alpha.row(j);
        double shift = 0.0;
        for (std::size_t t = start; t < stop; ++t) {
          const double scale = 1.0 + alpha[t];
          shift += (proposal[t] - row[t]) * scale;
          if (!stats.has_term(c, t)) continue;
          const double a_old = row[t] * scale;
          const double a_new = proposal[t] * scale;
          log_ratio += stats.term_part(c, t, a_new, std::log(a_new)) -
                       stats.term_part(c, t, a_old, std::log(a_old));
        }
        new_sum[j] = a_sum[j] + shift;
        new_length[j] = stats.length_part(c, new_sum[j]);
        log_ratio -= new_length[j] - length[j];
      }
      if (log_u < log_ratio) {
        std::copy(proposal.begin() + start, proposal.begin() + stop,
                  row.begin() + start);
        for (std::size_t j = 0; j < k2; ++j) {
          if (stats.empty(i * k2 + j)) continue;
          a_sum[j] = new_sum[j];
          length[j] = new_length[j];
        }
        ++tally.accepted;
      }
    }
  }
  return tally;
}

double log_posterior(const SparseDocTermMatrix& x, const DeepMouParams& params,
                     const LatentAllocations& z, double delta) {
  check_dims(x, params);
  for (std::size_t j = 0; j < params.k2; ++j) {
    if (!alpha_in_support(params.alpha.row(j))) return kNegInf;
  }
  for (std::size_t i = 0; i < params.k1; ++i) {
    if (!beta_in_support(params.beta.row(i))) return kNegInf;
  }
  const auto comps = component_concentrations(params);
  double out = 0.0;
  for (std::size_t d = 0; d < x.n_docs(); ++d) {
    const std::size_t i = z.z1[d], j = z.z2[d];
    out += log_dirmult(x.doc(d), x.doc_total(d), comps[i * params.k2 + j], true);
    out += std::log(params.pi2[j]) + std::log(params.pi1(i, j));
  }
  out += log_dirichlet_density(params.pi2, delta);
  for (std::size_t j = 0; j < params.k2; ++j) {
    out += log_dirichlet_density(column(params.pi1, j), delta);
  }
  return out;
}

ChainTrace run_chain(const SparseDocTermMatrix& x, std::size_t k1,
                     std::size_t k2, const SamplerConfig& cfg,
                     std::optional<DeepMouParams> initial_params,
                     const ProgressFn& progress) {
  cfg.validate();
  RngStream init_rng(cfg.seed, kInitStream);
  auto [params, z] = init_state(x, k1, k2, cfg, init_rng);
  if (initial_params) {
    validate(*initial_params);
    if (initial_params->k1 != k1 || initial_params->k2 != k2 ||
        initial_params->n_terms() != x.n_terms()) {
      throw DimensionError("initial parameters do not match k1, k2 or T");
    }
    params = std::move(*initial_params);
  }
  if (k2 == 1) params.alpha = Matrix(1, x.n_terms(), 0.0);

  const RngStream base(cfg.seed, 0);
  RngStream rng = base;
  ChainTrace trace;
  trace.k1 = k1;
  trace.k2 = k2;
  trace.states.reserve((cfg.iterations - cfg.burn_in) / cfg.thin);

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    z.z2 = sample_z2(x, params, z.z1, base, it, cfg.threads);
    z.z1 = sample_z1(x, params, z.z2, base, it, cfg.threads);
    params.pi2 = sample_pi2(z.z2, k2, cfg.delta, rng);
    params.pi1 = sample_pi1(z.z1, z.z2, k1, k2, cfg.delta, rng);
    MhCounts mh;
    mh.alpha = mh_update_alpha(x, params, z, cfg, rng);
    mh.beta = mh_update_beta(x, params, z, cfg, rng);
    trace.mh_total.alpha += mh.alpha;
    trace.mh_total.beta += mh.beta;

    const double lp = log_posterior(x, params, z, cfg.delta);
    if (!std::isfinite(lp)) {
      throw std::runtime_error("log posterior became non-finite at iteration " +
                               std::to_string(it));
    }
    if (progress) progress(it, lp, trace.mh_total);
    if (it >= cfg.burn_in && (it - cfg.burn_in + 1) % cfg.thin == 0) {
      trace.states.push_back({it, params, z, lp, mh});
    }
  }
  return trace;
}

Assignment assign_from_log_densities(const Matrix& log_dens,
                                     const DeepMouParams& params) {
  if (log_dens.cols() != params.k1 * params.k2) {
    throw DimensionError("log density matrix does not have k1 * k2 columns");
  }
  const std::size_t n = log_dens.rows();
  Assignment out{Matrix(n, params.k1), {std::vector<std::size_t>(n, 0), params.k1}};
  std::vector<double> per_j(params.k2), per_i(params.k1);
  for (std::size_t d = 0; d < n; ++d) {
    for (std::size_t i = 0; i < params.k1; ++i) {
      for (std::size_t j = 0; j < params.k2; ++j) {
        per_j[j] = std::log(params.pi1(i, j)) + std::log(params.pi2[j]) +
                   log_dens(d, i * params.k2 + j);
      }
      per_i[i] = log_sum_exp(per_j);
    }
    const double norm = log_sum_exp(per_i);
    for (std::size_t i = 0; i < params.k1; ++i) {
      out.soft(d, i) = std::exp(per_i[i] - norm);
    }
    out.hard.labels[d] = argmax_first(per_i);
  }
  return out;
}

Assignment posterior_assignment(const SparseDocTermMatrix& x,
                                const DeepMouParams& params, unsigned threads) {
  return assign_from_log_densities(log_dirmult_batch(x, params, threads), params);
}

namespace {

std::vector<std::size_t> align_labels(std::span<const std::size_t> labels,
                                      std::span<const std::size_t> pivot,
                                      std::size_t k) {
  Matrix table(k, k, 0.0);
  for (std::size_t d = 0; d < labels.size(); ++d) table(labels[d], pivot[d]) += 1.0;
  return solve_assignment_max(table);
}

}  // namespace

TraceAlignment align_trace(const ChainTrace& trace) {
  if (trace.states.empty()) throw std::invalid_argument("empty chain trace");
  TraceAlignment out;
  for (std::size_t s = 1; s < trace.states.size(); ++s) {
    if (trace.states[s].log_posterior > trace.states[out.pivot].log_posterior) {
      out.pivot = s;
    }
  }
  const auto& pivot = trace.states[out.pivot].z;
  out.z1_perm.reserve(trace.states.size());
  out.z2_perm.reserve(trace.states.size());
  for (const auto& s : trace.states) {
    out.z1_perm.push_back(align_labels(s.z.z1, pivot.z1, trace.k1));
    out.z2_perm.push_back(align_labels(s.z.z2, pivot.z2, trace.k2));
  }
  return out;
}

LabelVector consensus_partition(const ChainTrace& trace) {
  const auto align = align_trace(trace);
  const auto& pivot = trace.states[align.pivot].z.z1;
  const std::size_t n = pivot.size();
  std::vector<std::uint64_t> votes(n * trace.k1, 0);
  for (std::size_t s = 0; s < trace.states.size(); ++s) {
    const auto& perm = align.z1_perm[s];
    const auto& z1 = trace.states[s].z.z1;
    for (std::size_t d = 0; d < n; ++d) ++votes[d * trace.k1 + perm[z1[d]]];
  }
  // A label tied with the pivot's label loses to it; among the rest the
  // smallest index wins.
  LabelVector out{std::vector<std::size_t>(n, 0), trace.k1};
  for (std::size_t d = 0; d < n; ++d) {
    const auto* v = votes.data() + d * trace.k1;
    std::size_t best = pivot[d];
    for (std::size_t i = 0; i < trace.k1; ++i) {
      if (v[i] > v[best]) best = i;
    }
    out.labels[d] = best;
  }
  return out;
}

DeepMouParams posterior_mean(const ChainTrace& trace) {
  const auto align = align_trace(trace);
  const auto& first = trace.states.front().params;
  const std::size_t k1 = trace.k1, k2 = trace.k2, t_count = first.n_terms();
  DeepMouParams mean;
  mean.k1 = k1;
  mean.k2 = k2;
  mean.pi2.assign(k2, 0.0);
  mean.pi1 = Matrix(k1, k2, 0.0);
  mean.alpha = Matrix(k2, t_count, 0.0);
  mean.beta = Matrix(k1, t_count, 0.0);
  for (std::size_t s = 0; s < trace.states.size(); ++s) {
    const auto& p = trace.states[s].params;
    const auto& s1 = align.z1_perm[s];
    const auto& s2 = align.z2_perm[s];
    for (std::size_t j = 0; j < k2; ++j) {
      mean.pi2[s2[j]] += p.pi2[j];
      for (std::size_t t = 0; t < t_count; ++t) mean.alpha(s2[j], t) += p.alpha(j, t);
    }
    for (std::size_t i = 0; i < k1; ++i) {
      for (std::size_t j = 0; j < k2; ++j) mean.pi1(s1[i], s2[j]) += p.pi1(i, j);
      for (std::size_t t = 0; t < t_count; ++t) mean.beta(s1[i], t) += p.beta(i, t);
    }
  }
  const double inv = 1.0 / static_cast<double>(trace.states.size());
  for (double& v : mean.pi2) v *= inv;
  for (double& v : mean.pi1.data()) v *= inv;
  for (double& v : mean.alpha.data()) v *= inv;
  for (double& v : mean.beta.data()) v *= inv;
  return mean;
}

}  // namespace deepmou
