#pragma once

// Reference implementations used only by the tests. They share no code
// with the library beyond the plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

// Dirichlet-Multinomial log pmf from dense counts via std::lgamma.
inline double log_dm(const std::vector<std::uint64_t>& x, const std::vector<double>& a,
                     bool coefficient) {
  double n = 0.0, sum_a = 0.0, out = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    n += static_cast<double>(x[t]);
    sum_a += a[t];
    out += std::lgamma(static_cast<double>(x[t]) + a[t]) - std::lgamma(a[t]);
    if (coefficient) out -= std::lgamma(static_cast<double>(x[t]) + 1.0);
  }
  out += std::lgamma(sum_a) - std::lgamma(sum_a + n);
  if (coefficient) out += std::lgamma(n + 1.0);
  return out;
}

// All compositions of n into t non-negative parts.
inline void compositions(std::uint64_t n, std::size_t t, std::vector<std::uint64_t>& cur,
                         std::vector<std::vector<std::uint64_t>>& out) {
  if (cur.size() + 1 == t) {
    cur.push_back(n);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (std::uint64_t k = 0; k <= n; ++k) {
    cur.push_back(k);
    compositions(n - k, t, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::vector<std::uint64_t>> compositions(std::uint64_t n, std::size_t t) {
  std::vector<std::vector<std::uint64_t>> out;
  std::vector<std::uint64_t> cur;
  compositions(n, t, cur, out);
  return out;
}

// ARI straight from the pair definition: counts agreeing pairs over all
// n(n-1)/2 pairs and applies the Hubert-Arabie correction in long double.
inline long double ari_pairs(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  long double both = 0, in_a = 0, in_b = 0, pairs = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const bool sa = a[i] == a[j], sb = b[i] == b[j];
      both += sa && sb;
      in_a += sa;
      in_b += sb;
      pairs += 1;
    }
  }
  const long double expected = pairs > 0 ? in_a * in_b / pairs : 0;
  const long double max = (in_a + in_b) / 2;
  if (max - expected == 0) return 1.0L;
  return (both - expected) / (max - expected);
}

// Best agreement over every injective relabeling of pred's labels.
inline double accuracy_brute(const std::vector<std::size_t>& pred,
                             const std::vector<std::size_t>& truth) {
  std::size_t kp = 0, kt = 0;
  for (auto l : pred) kp = std::max(kp, l + 1);
  for (auto l : truth) kt = std::max(kt, l + 1);
  const std::size_t k = std::max(kp, kt);
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hit = 0;
    for (std::size_t d = 0; d < pred.size(); ++d) hit += perm[pred[d]] == truth[d];
    best = std::max(best, hit);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(pred.size());
}

// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
inline double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

// Asymptotic one-sample KS critical value at level 0.01.
inline double ks_critical_01(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

}  // namespace oracle
