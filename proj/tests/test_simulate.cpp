#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "deep_mou/errors.hpp"
#include "deep_mou/metrics.hpp"
#include "deep_mou/model.hpp"
#include "deep_mou/simulate.hpp"

using namespace deepmou;

namespace {

SimConfig deep_cfg(std::uint64_t seed) {
  SimConfig c;
  c.study = Study::DeepGenerative;
  c.n = 200;
  c.n_terms = 200;
  c.k1 = 3;
  c.k2 = 2;
  c.poisson_n = 20.0;
  c.seed = seed;
  return c;
}

double mean_length(const SparseDocTermMatrix& x) {
  double s = 0.0;
  for (auto v : x.doc_totals()) s += static_cast<double>(v);
  return s / static_cast<double>(x.n_docs());
}

}  // namespace

TEST_CASE("deep study dimensions and balance") {
  const auto sim = generate(deep_cfg(1));
  CHECK(sim.x.n_docs() == 200);
  CHECK(sim.x.n_terms() == 200);
  CHECK(sim.true_beta.rows() == 3);
  CHECK(sim.true_alpha.rows() == 2);
  CHECK(sim.true_z1.k == 3);
  CHECK(sim.true_z2.k == 2);
  // 200 documents over 6 cells: sizes 34 or 33
  std::vector<std::size_t> cells(6, 0);
  for (std::size_t d = 0; d < 200; ++d) ++cells[sim.true_z1.labels[d] * 2 + sim.true_z2.labels[d]];
  for (auto c : cells) CHECK((c == 33 || c == 34));
  for (double b : sim.true_beta.data()) CHECK((b > 0.0 && b <= 20.0));
  for (double a : sim.true_alpha.data()) CHECK((a > -1.0 && a < 1.0));
  CHECK(sim.x.sparsity() > 0.85);
}

TEST_CASE("document lengths follow the Poisson mean") {
  auto c = deep_cfg(2);
  c.n = 10000;
  c.n_terms = 50;
  c.poisson_n = 20.0;
  const auto sim = generate(c);
  CHECK(std::abs(mean_length(sim.x) - 20.0) < 3.0 * std::sqrt(20.0 / 10000.0));

  c.n = 200;
  c.poisson_n = 1e-9;
  CHECK(generate(c).x.nnz() == 0);
}

TEST_CASE("flat study") {
  auto c = deep_cfg(3);
  c.study = Study::FlatGenerative;
  const auto a = generate(c);
  const auto b = generate(c);
  CHECK(a.x.n_docs() == 200);
  CHECK(a.x.n_terms() == 200);
  CHECK(a.config.k2 == 1);
  CHECK(a.true_z2.k == 1);
  for (auto l : a.true_z2.labels) CHECK(l == 0);
  for (double v : a.true_alpha.data()) CHECK(v == 0.0);
  CHECK(a.x.triplets() == b.x.triplets());
  CHECK(a.true_beta == b.true_beta);
}

TEST_CASE("recovery grid") {
  RngStream rng(5, 0);
  const auto grid = recovery_grid(rng);
  REQUIRE(grid.size() == 8);
  std::size_t i = 0;
  for (std::size_t n : {100, 200}) {
    for (double len : {10.0, 20.0}) {
      for (std::size_t t : {100, 200}) {
        const auto& g = grid[i++];
        CHECK(g.x.n_docs() == n);
        CHECK(g.x.n_terms() == t);
        CHECK(g.config.poisson_n == len);
        CHECK(g.config.k1 == 3);
        CHECK(g.config.k2 == 2);
      }
    }
  }
  // (n=100, N=10, T=100): 100 Poisson(10) lengths
  CHECK(std::abs(mean_length(grid[0].x) - 10.0) < 3.0 * std::sqrt(10.0 / 100.0));
}

TEST_CASE("configuration errors") {
  auto c = deep_cfg(1);
  c.study = Study::RecoveryGrid;
  CHECK_THROWS_AS(generate(c), DomainError);
  c = deep_cfg(1);
  c.k2 = 0;
  CHECK_THROWS_AS(generate(c), DomainError);
  c = deep_cfg(1);
  c.poisson_n = 0.0;
  CHECK_THROWS_AS(generate(c), DomainError);
  CHECK(parse_study("flat") == Study::FlatGenerative);
  CHECK(parse_study("3") == Study::RecoveryGrid);
  CHECK(study_name(Study::DeepGenerative) == "deep");
  CHECK_THROWS_AS(parse_study("shallow"), std::invalid_argument);
}

TEST_CASE("true parameters separate the clusters better than chance") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto sim = generate(deep_cfg(seed));
    DeepMouParams p;
    p.k1 = 3;
    p.k2 = 2;
    p.pi2 = {0.5, 0.5};
    p.pi1 = Matrix(3, 2, 1.0 / 3.0);
    p.alpha = sim.true_alpha;
    p.beta = sim.true_beta;
    const double truth_ari = adjusted_rand_index(posterior_assignment(sim.x, p).hard, sim.true_z1);
    RngStream rng(seed, 9);
    std::vector<std::size_t> random(200);
    for (auto& l : random) l = rng() % 3;
    const double random_ari = adjusted_rand_index(make_labels(random), sim.true_z1);
    CAPTURE(seed);
    CHECK(truth_ari > random_ari);
    CHECK(truth_ari > 0.5);
  }
}
