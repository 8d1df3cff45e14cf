#include "deep_mou/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "deep_mou/errors.hpp"

namespace deepmou {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(what) + " must be finite and positive, got " +
                      std::to_string(x));
  }
}

}  // namespace

double log_gamma(double x) {
  require_positive(x, "log_gamma argument");
  // glibc's lgamma is a minimax rational scheme with reflection near the
  // pole; the reentrant variant avoids the global signgam write.
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_beta(double a, double b) {
  require_positive(a, "log_beta a");
  require_positive(b, "log_beta b");
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double log_rising(double a, std::uint64_t n) {
  if (n == 0) return 0.0;
  if (n == 1) return std::log(a);
  if (n <= 16) {
    // Runs of four factors keep the partial products far from overflow for
    // any concentration the model can produce.
    double acc = 0.0;
    std::uint64_t m = 0;
    while (m < n) {
      double prod = 1.0;
      for (std::uint64_t stop = std::min(n, m + 4); m < stop; ++m) {
        prod *= a + static_cast<double>(m);
      }
      acc += std::log(prod);
    }
    return acc;
  }
  const double nd = static_cast<double>(n);
  if (a >= 20.0) {
    // Stirling difference; differencing two huge log-gammas would lose
    // most of the digits here.
    auto tail = [](double x) {
      const double r = 1.0 / (x * x);
      return (1.0 / 12.0 - r * (1.0 / 360.0 - r * (1.0 / 1260.0 - r / 1680.0))) / x;
    };
    return (a - 0.5) * std::log1p(nd / a) + nd * std::log(a + nd) - nd +
           (tail(a + nd) - tail(a));
  }
  return log_gamma(a + nd) - log_gamma(a);
}

double log_sum_exp(std::span<const double> v) {
  if (v.empty()) throw DomainError("log_sum_exp of an empty vector");
  double hi = -kInf;
  for (double x : v) {
    if (std::isnan(x)) throw DomainError("log_sum_exp: NaN entry");
    hi = std::max(hi, x);
  }
  if (hi == -kInf) return -kInf;
  if (hi == kInf) return kInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - hi);
  return hi + std::log(s);
}

double sample_log_gamma(double shape, RngStream& rng) {
  require_positive(shape, "gamma shape");
  if (shape >= 1.0) {
    std::gamma_distribution<double> g(shape, 1.0);
    double draw = g(rng);
    while (draw <= 0.0) draw = g(rng);
    return std::log(draw);
  }
  // Boost: G(a) = G(a + 1) * U^(1/a).
  std::gamma_distribution<double> g(shape + 1.0, 1.0);
  double draw = g(rng);
  while (draw <= 0.0) draw = g(rng);
  return std::log(draw) + std::log(rng.uniform_pos()) / shape;
}

std::vector<double> sample_dirichlet(std::span<const double> conc,
                                     RngStream& rng) {
  if (conc.empty()) throw DomainError("sample_dirichlet: empty concentration");
  std::vector<double> out(conc.size());
  for (std::size_t i = 0; i < conc.size(); ++i) {
    out[i] = sample_log_gamma(conc[i], rng);
  }
  const double norm = log_sum_exp(out);
  double total = 0.0;
  for (double& x : out) {
    x = std::exp(x - norm);
    total += x;
  }
  for (double& x : out) x /= total;
  return out;
}

std::size_t sample_categorical(std::span<const double> log_weights,
                               RngStream& rng) {
  if (log_weights.empty()) {
    throw DomainError("sample_categorical: empty weight vector");
  }
  const double hi = *std::max_element(log_weights.begin(), log_weights.end());
  if (!std::isfinite(hi)) {
    throw DomainError("sample_categorical: no finite weight");
  }
  double total = 0.0;
  for (double w : log_weights) total += std::exp(w - hi);
  double u = rng.uniform() * total;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    const double w = std::exp(log_weights[i] - hi);
    if (w <= 0.0) continue;
    last_positive = i;
    if (u < w) return i;
    u -= w;
  }
  // Rounding left u marginally above the accumulated mass.
  return last_positive;
}

std::uint64_t sample_poisson(double rate, RngStream& rng) {
  require_positive(rate, "poisson rate");
  std::poisson_distribution<std::uint64_t> p(rate);
  return p(rng);
}

std::vector<std::uint64_t> sample_multinomial(std::uint64_t n,
                                              std::span<const double> probs,
                                              RngStream& rng) {
  std::vector<std::uint64_t> out(probs.size(), 0);
  double remaining = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw DomainError("sample_multinomial: invalid probability");
    }
    remaining += p;
  }
  if (n == 0) return out;
  if (!(remaining > 0.0)) throw DomainError("sample_multinomial: zero mass");
  std::uint64_t left = n;
  for (std::size_t i = 0; i + 1 < probs.size() && left > 0; ++i) {
    const double p = std::clamp(probs[i] / remaining, 0.0, 1.0);
    if (p > 0.0) {
      std::binomial_distribution<std::uint64_t> b(left, p);
      out[i] = b(rng);
      left -= out[i];
    }
    remaining -= probs[i];
    if (remaining <= 0.0) break;
  }
  // Whatever is left goes to the last category with positive mass.
  if (left > 0) {
    std::size_t sink = probs.size() - 1;
    while (sink > 0 && probs[sink] <= 0.0) --sink;
    out[sink] += left;
  }
  return out;
}

}  // namespace deepmou
