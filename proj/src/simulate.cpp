#include "deep_mou/simulate.hpp"

#include <cmath>
#include <string>

#include "deep_mou/errors.hpp"
#include "deep_mou/numerics.hpp"

namespace deepmou {

namespace {

// Parameters come from stream 0, document d from stream d + 1.
SimOutput generate_impl(const SimConfig& cfg, std::size_t k2, bool with_alpha,
                        RngStream& rng) {
  cfg.validate();
  const std::size_t t_count = cfg.n_terms;
  SimOutput out;
  out.config = cfg;
  out.config.k2 = k2;
  out.true_beta = Matrix(cfg.k1, t_count);
  out.true_alpha = Matrix(k2, t_count, 0.0);

  for (double& b : out.true_beta.data()) {
    b = cfg.beta_max * (1.0 - rng.uniform());
  }
  if (with_alpha) {
    for (double& a : out.true_alpha.data()) {
      // The model needs alpha strictly inside (-1, 1).
      do {
        a = -1.0 + 2.0 * rng.uniform();
      } while (a <= -1.0);
    }
  }

  std::vector<std::size_t> z1(cfg.n), z2(cfg.n);
  const std::size_t cells = cfg.k1 * k2;
  for (std::size_t d = 0; d < cfg.n; ++d) {
    const std::size_t c = d % cells;
    z1[d] = c / k2;
    z2[d] = c % k2;
  }

  std::vector<Triplet> entries;
  std::vector<double> conc(t_count);
  for (std::size_t d = 0; d < cfg.n; ++d) {
    RngStream doc_rng = rng.substream(rng.stream_id() + d + 1);
    const std::uint64_t length = sample_poisson(cfg.poisson_n, doc_rng);
    for (std::size_t t = 0; t < t_count; ++t) {
      conc[t] = out.true_beta(z1[d], t) * (1.0 + out.true_alpha(z2[d], t));
    }
    const auto omega = sample_dirichlet(conc, doc_rng);
    const auto counts = sample_multinomial(length, omega, doc_rng);
    for (std::size_t t = 0; t < t_count; ++t) {
      if (counts[t] > 0) {
        entries.push_back({d, t, static_cast<std::uint32_t>(counts[t])});
      }
    }
  }
  out.x = SparseDocTermMatrix(cfg.n, t_count, std::move(entries));
  out.true_z1 = LabelVector{std::move(z1), cfg.k1};
  out.true_z2 = LabelVector{std::move(z2), k2};
  return out;
}

}  // namespace

std::string_view study_name(Study s) {
  switch (s) {
    case Study::DeepGenerative: return "deep";
    case Study::FlatGenerative: return "flat";
    case Study::RecoveryGrid: return "grid";
  }
  return "deep";
}

Study parse_study(const std::string& name) {
  if (name == "deep" || name == "1") return Study::DeepGenerative;
  if (name == "flat" || name == "2") return Study::FlatGenerative;
  if (name == "grid" || name == "3") return Study::RecoveryGrid;
  throw std::invalid_argument("unknown study '" + name + "' (expected deep, flat or grid)");
}

void SimConfig::validate() const {
  if (n == 0 || n_terms == 0 || k1 == 0) {
    throw DomainError("n, T and k1 must be >= 1");
  }
  if (study == Study::DeepGenerative && k2 == 0) {
    throw DomainError("k2 must be >= 1 for deep data");
  }
  if (!(poisson_n > 0.0) || !std::isfinite(poisson_n)) {
    throw DomainError("Poisson length parameter must be positive");
  }
  if (!(beta_max > 0.0) || !std::isfinite(beta_max)) {
    throw DomainError("beta_max must be positive");
  }
}

SimOutput generate_deep(const SimConfig& cfg, RngStream& rng) {
  if (cfg.study != Study::DeepGenerative) {
    throw DomainError("generate_deep needs study = DeepGenerative");
  }
  return generate_impl(cfg, cfg.k2, true, rng);
}

SimOutput generate_flat(const SimConfig& cfg, RngStream& rng) {
  if (cfg.study != Study::FlatGenerative) {
    throw DomainError("generate_flat needs study = FlatGenerative");
  }
  return generate_impl(cfg, 1, false, rng);
}

std::vector<SimOutput> recovery_grid(RngStream& rng) {
  std::vector<SimOutput> out;
  for (std::size_t n : {100, 200}) {
    for (double length : {10.0, 20.0}) {
      for (std::size_t t : {100, 200}) {
        SimConfig cfg;
        cfg.study = Study::DeepGenerative;
        cfg.n = n;
        cfg.n_terms = t;
        cfg.k1 = 3;
        cfg.k2 = 2;
        cfg.poisson_n = length;
        cfg.seed = rng();
        RngStream cell_rng(cfg.seed, 0);
        out.push_back(generate_deep(cfg, cell_rng));
      }
    }
  }
  return out;
}

SimOutput generate(const SimConfig& cfg) {
  RngStream rng(cfg.seed, 0);
  switch (cfg.study) {
    case Study::DeepGenerative:
      return generate_deep(cfg, rng);
    case Study::FlatGenerative:
      return generate_flat(cfg, rng);
    case Study::RecoveryGrid:
      break;
  }
  throw DomainError("recovery grid produces several datasets; use recovery_grid");
}

}  // namespace deepmou
