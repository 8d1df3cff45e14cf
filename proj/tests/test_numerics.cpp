#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "deep_mou/errors.hpp"
#include "deep_mou/numerics.hpp"
#include "deep_mou/rng.hpp"

using namespace deepmou;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_rel(double got, double want, double tol) {
  CHECK(std::abs(got - want) <= tol * std::max(1.0, std::abs(want)));
}

}  // namespace

TEST_CASE("log_gamma against high-precision values") {
  CHECK(log_gamma(1.0) == 0.0);
  CHECK(log_gamma(2.0) == 0.0);
  // ln 9! computed exactly
  check_rel(log_gamma(10.0), std::log(362880.0), 1e-14);
  check_rel(log_gamma(0.5), 0.5 * std::log(M_PI), 1e-14);

  // 40-digit reference values, rounded
  struct Ref { double x, v; };
  const Ref refs[] = {
      {1e-6, 13.81550998074943166920783},
      {1e-3, 6.907178885383853682512345},
      {0.1, 2.252712651734205959869702},
      {1.5, -0.1207822376352452223455184},
      {2.5, 0.2846828704729191596324947},
      {3.7, 1.428072326665387921872381},
      {100.25, 360.2845596377642349684133},
      {12345.678, 103959.9199055460609210806},
      {1e6, 12815504.56914761165997697},
  };
  for (const auto& r : refs) {
    CAPTURE(r.x);
    CHECK(std::abs(log_gamma(r.x) - r.v) <= 1e-12 * std::abs(r.v));
  }
}

TEST_CASE("log_gamma recurrence") {
  for (double x : {0.1, 1.0, 10.0, 100.0}) {
    CAPTURE(x);
    CHECK(std::abs(log_gamma(x + 1.0) - log_gamma(x) - std::log(x)) <= 1e-10);
  }
}

TEST_CASE("log_gamma domain") {
  CHECK_THROWS_AS(log_gamma(0.0), DomainError);
  CHECK_THROWS_AS(log_gamma(-1.5), DomainError);
  CHECK_THROWS_AS(log_gamma(kInf), DomainError);
  CHECK_THROWS_AS(log_gamma(std::nan("")), DomainError);
}

TEST_CASE("log_beta") {
  CHECK(log_beta(1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
  // 1! 2! / 4!
  check_rel(log_beta(2.0, 3.0), -2.484906649788000310229709, 1e-14);
  check_rel(log_beta(0.5, 0.5), std::log(M_PI), 1e-14);
  CHECK_THROWS_AS(log_beta(0.0, 1.0), DomainError);
}

TEST_CASE("log_rising matches the defining product") {
  for (double a : {1e-4, 0.3, 1.0, 7.5, 250.0, 9e5}) {
    long double prod_log = 0.0L;
    for (std::uint64_t n = 0; n <= 40; ++n) {
      CAPTURE(a);
      CAPTURE(n);
      CHECK(std::abs(log_rising(a, n) - static_cast<double>(prod_log)) <=
            1e-12 * std::max(1.0L, std::abs(prod_log)));
      prod_log += std::log(static_cast<long double>(a) + n);
    }
  }
  CHECK(log_rising(3.0, 0) == 0.0);
}

TEST_CASE("log_sum_exp") {
  const std::vector<double> two{0.0, 0.0};
  CHECK(log_sum_exp(two) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  const std::vector<double> low{-1000.0, -1000.0};
  CHECK(std::abs(log_sum_exp(low) - (-1000.0 + std::log(2.0))) < 1e-12);
  const std::vector<double> v{1.0, 2.0, 3.0};
  CHECK(std::abs(log_sum_exp(v) - 3.40760596444438030448292) < 1e-14);
  const std::vector<double> none{-kInf, -kInf};
  CHECK(log_sum_exp(none) == -kInf);
  const std::vector<double> big{700.0, 700.0};
  CHECK(std::isfinite(log_sum_exp(big)));
  CHECK_THROWS_AS(log_sum_exp(std::vector<double>{}), DomainError);
  CHECK_THROWS_AS(log_sum_exp(std::vector<double>{0.0, std::nan("")}), DomainError);
}

TEST_CASE("log_sum_exp exponentiates to the plain sum") {
  RngStream rng(11, 0);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> v(1 + rng() % 8);
    double direct = 0.0;
    for (double& e : v) {
      e = -30.0 + 60.0 * rng.uniform();
      direct += std::exp(e);
    }
    CHECK(std::abs(std::exp(log_sum_exp(v)) - direct) <= 1e-12 * direct);
  }
}

TEST_CASE("sample_dirichlet") {
  RngStream rng(2, 0);
  const std::vector<double> tight{1e9, 1e9};
  const auto p = sample_dirichlet(tight, rng);
  CHECK(std::abs(p[0] - 0.5) < 1e-3);
  CHECK(std::abs(p[1] - 0.5) < 1e-3);

  const std::vector<double> flat{1.0, 1.0, 1.0};
  const int n = 100000;
  std::vector<double> mean(3, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto d = sample_dirichlet(flat, rng);
    double s = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      mean[k] += d[k];
      s += d[k];
    }
    REQUIRE(std::abs(s - 1.0) <= 1e-12);
  }
  // Var of a Dirichlet(1,1,1) margin = (1/3)(2/3)/4
  const double se = std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / 4.0 / n);
  for (double m : mean) CHECK(std::abs(m / n - 1.0 / 3.0) < 3.0 * se);

  const std::vector<double> tiny{1e-3, 1e-3, 2.0};
  for (int i = 0; i < 1000; ++i) {
    const auto d = sample_dirichlet(tiny, rng);
    REQUIRE(std::abs(d[0] + d[1] + d[2] - 1.0) <= 1e-12);
    REQUIRE(d[0] >= 0.0);
  }
  CHECK_THROWS_AS(sample_dirichlet(std::vector<double>{1.0, 0.0}, rng), DomainError);
}

TEST_CASE("sample_log_gamma small shapes") {
  RngStream rng(9, 0);
  const double shape = 0.1;
  const int n = 100000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::exp(sample_log_gamma(shape, rng));
  // mean = variance = shape
  CHECK(std::abs(s / n - shape) < 3.0 * std::sqrt(shape / n));
  CHECK(std::isfinite(sample_log_gamma(1e-8, rng)));
}

TEST_CASE("sample_categorical") {
  RngStream rng(4, 0);
  const std::vector<double> certain{0.0, -kInf};
  for (int i = 0; i < 100; ++i) REQUIRE(sample_categorical(certain, rng) == 0);

  const std::vector<double> w{std::log(0.3), std::log(0.7)};
  const int n = 100000;
  int ones = 0;
  for (int i = 0; i < n; ++i) ones += sample_categorical(w, rng) == 1;
  CHECK(std::abs(static_cast<double>(ones) / n - 0.7) < 3.0 * std::sqrt(0.21 / n));

  const std::vector<double> shifted{std::log(0.3) + 10.0, std::log(0.7) + 10.0};
  RngStream a(8, 0), b(8, 0);
  for (int i = 0; i < 1000; ++i) REQUIRE(sample_categorical(w, a) == sample_categorical(shifted, b));

  CHECK_THROWS_AS(sample_categorical(std::vector<double>{-kInf, -kInf}, rng), DomainError);
  CHECK_THROWS_AS(sample_categorical(std::vector<double>{}, rng), DomainError);
}

TEST_CASE("sample_poisson") {
  RngStream rng(6, 0);
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double k = static_cast<double>(sample_poisson(20.0, rng));
    s += k;
    s2 += k * k;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  CHECK(std::abs(mean - 20.0) < 3.0 * std::sqrt(20.0 / n));
  // Var of the sample variance of a Poisson: (mu + 2 mu^2) / n
  CHECK(std::abs(var - 20.0) < 3.0 * std::sqrt((20.0 + 2.0 * 400.0) / n));
  for (int i = 0; i < 1000; ++i) REQUIRE(sample_poisson(1e-9, rng) == 0);
  CHECK_THROWS_AS(sample_poisson(0.0, rng), DomainError);
  CHECK_THROWS_AS(sample_poisson(-2.0, rng), DomainError);
}

TEST_CASE("sample_multinomial") {
  RngStream rng(7, 0);
  const std::vector<double> p{0.2, 0.0, 0.5, 0.3};
  for (int i = 0; i < 1000; ++i) {
    const auto c = sample_multinomial(25, p, rng);
    REQUIRE(c[0] + c[1] + c[2] + c[3] == 25);
    REQUIRE(c[1] == 0);
  }
  CHECK(sample_multinomial(0, p, rng) == std::vector<std::uint64_t>(4, 0));
}

TEST_CASE("samplers reproduce bitwise") {
  auto draw = [] {
    RngStream rng(123, 4);
    std::vector<double> out;
    const std::vector<double> conc{0.5, 2.0, 7.0};
    for (int i = 0; i < 50; ++i) {
      for (double v : sample_dirichlet(conc, rng)) out.push_back(v);
      out.push_back(static_cast<double>(sample_poisson(3.0, rng)));
      out.push_back(sample_log_gamma(0.3, rng));
    }
    return out;
  };
  CHECK(draw() == draw());
}
