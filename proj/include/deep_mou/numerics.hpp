#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "deep_mou/rng.hpp"

namespace deepmou {

// ln Gamma(x) for finite x > 0. Throws DomainError otherwise.
double log_gamma(double x);

// ln B(a, b).
double log_beta(double a, double b);

// ln Gamma(a + n) - ln Gamma(a), the log rising factorial a (a+1) ... (a+n-1).
// Evaluated as a product of short runs for small n, which is both faster
// and more accurate than differencing two large log-gammas.
double log_rising(double a, std::uint64_t n);

// ln sum_i exp(v_i) with max shifting. Returns -inf when every entry is
// -inf; throws DomainError on an empty input or a NaN entry.
double log_sum_exp(std::span<const double> v);

// Gamma(shape, 1) variate returned on the log scale, so that shapes far
// below 1 do not underflow to zero.
double sample_log_gamma(double shape, RngStream& rng);

// Dirichlet(conc) draw via normalized Gamma variates.
std::vector<double> sample_dirichlet(std::span<const double> conc,
                                     RngStream& rng);

// Index drawn with probability proportional to exp(log_weights[i]).
// Throws DomainError when no entry is finite.
std::size_t sample_categorical(std::span<const double> log_weights,
                               RngStream& rng);

std::uint64_t sample_poisson(double rate, RngStream& rng);

// Multinomial(n, probs). `probs` need not be normalized.
std::vector<std::uint64_t> sample_multinomial(std::uint64_t n,
                                              std::span<const double> probs,
                                              RngStream& rng);

}  // namespace deepmou
