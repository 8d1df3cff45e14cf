#include "deep_mou/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "deep_mou/assignment.hpp"
#include "deep_mou/errors.hpp"

namespace deepmou {

namespace {

using Wide = __int128;

Wide pairs(std::uint64_t m) {
  return static_cast<Wide>(m) * static_cast<Wide>(m - (m > 0 ? 1 : 0)) / 2;
}

std::size_t effective_k(const Partition& p) {
  std::size_t k = p.k;
  for (auto l : p.labels) k = std::max(k, l + 1);
  return k;
}

void require_same_length(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) {
    throw DimensionError("partitions have different lengths: " +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  }
}

}  // namespace

Matrix contingency_table(const Partition& a, const Partition& b) {
  require_same_length(a, b);
  Matrix table(effective_k(a), effective_k(b), 0.0);
  for (std::size_t d = 0; d < a.size(); ++d) table(a.labels[d], b.labels[d]) += 1.0;
  return table;
}

double adjusted_rand_index(const Partition& a, const Partition& b) {
  require_same_length(a, b);
  const std::size_t ka = effective_k(a), kb = effective_k(b);
  std::vector<std::uint64_t> cells(ka * kb, 0), rows(ka, 0), cols(kb, 0);
  for (std::size_t d = 0; d < a.size(); ++d) {
    ++cells[a.labels[d] * kb + b.labels[d]];
    ++rows[a.labels[d]];
    ++cols[b.labels[d]];
  }
  Wide index = 0, sum_a = 0, sum_b = 0;
  for (auto c : cells) index += pairs(c);
  for (auto r : rows) sum_a += pairs(r);
  for (auto c : cols) sum_b += pairs(c);
  const Wide total = pairs(a.size());
  // (Index - Expected) / (Max - Expected) scaled by 2 * C(n, 2).
  const Wide num = 2 * (index * total - sum_a * sum_b);
  const Wide den = (sum_a + sum_b) * total - 2 * sum_a * sum_b;
  if (den == 0) return 1.0;
  return static_cast<double>(static_cast<long double>(num) /
                             static_cast<long double>(den));
}

double matched_accuracy(const Partition& pred, const Partition& truth) {
  require_same_length(pred, truth);
  if (pred.size() == 0) return 1.0;
  const auto table = contingency_table(pred, truth);
  const std::size_t side = std::max(table.rows(), table.cols());
  Matrix square(side, side, 0.0);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c) square(r, c) = table(r, c);
  }
  const auto match = solve_assignment_max(square);
  double correct = 0.0;
  for (std::size_t r = 0; r < side; ++r) correct += square(r, match[r]);
  return correct / static_cast<double>(pred.size());
}

std::vector<double> recovery_distance(const Matrix& truth, const Matrix& estimate) {
  if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols()) {
    throw DimensionError("parameter matrices differ in shape");
  }
  const std::size_t k = truth.rows(), t_count = truth.cols();
  Matrix dist(k, k);
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t e = 0; e < k; ++e) {
      double s = 0.0;
      for (std::size_t t = 0; t < t_count; ++t) {
        const double diff = truth(r, t) - estimate(e, t);
        s += diff * diff;
      }
      dist(r, e) = std::sqrt(s);
    }
  }
  const auto match = solve_assignment(dist);
  std::vector<double> out(k);
  for (std::size_t r = 0; r < k; ++r) {
    out[r] = t_count ? dist(r, match[r]) / static_cast<double>(t_count) : 0.0;
  }
  return out;
}

}  // namespace deepmou
