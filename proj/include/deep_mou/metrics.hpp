#pragma once

#include <vector>

#include "deep_mou/corpus.hpp"
#include "deep_mou/matrix.hpp"

namespace deepmou {

// A hard clustering; the same representation as ground-truth labels.
using Partition = LabelVector;

// Hubert-Arabie adjusted Rand index. Evaluated from exact integer pair
// counts with a single final division, so it is exactly symmetric. When
// the chance-corrected denominator vanishes (both partitions trivial) the
// result is 1.0. Throws DimensionError on a length mismatch.
double adjusted_rand_index(const Partition& a, const Partition& b);

// Fraction of items correctly labelled after the best one-to-one matching
// of predicted labels onto true labels.
double matched_accuracy(const Partition& pred, const Partition& truth);

// k x k contingency counts, rows = a's labels, columns = b's labels.
Matrix contingency_table(const Partition& a, const Partition& b);

// Rows of `estimate` are matched to rows of `truth` by the permutation of
// least total Euclidean distance; returns |truth_r - estimate_match(r)| / T
// for every truth row r.
std::vector<double> recovery_distance(const Matrix& truth, const Matrix& estimate);

}  // namespace deepmou
