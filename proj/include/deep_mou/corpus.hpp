#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace deepmou {

struct TermCount {
  std::uint32_t term;
  std::uint32_t count;

  friend bool operator==(const TermCount&, const TermCount&) = default;
};

struct Triplet {
  std::size_t doc;
  std::size_t term;
  std::uint32_t count;

  friend auto operator<=>(const Triplet&, const Triplet&) = default;
};

// Document-term count matrix in compressed sparse row form. Rows are
// documents; within a row entries are sorted by term. Immutable once built.
class SparseDocTermMatrix {
public:
  SparseDocTermMatrix() = default;

  // Validates indices, positivity of counts and uniqueness of (doc, term).
  // Throws DimensionError / DomainError.
  SparseDocTermMatrix(std::size_t n_docs, std::size_t n_terms,
                      std::vector<Triplet> entries);

  std::size_t n_docs() const noexcept { return n_docs_; }
  std::size_t n_terms() const noexcept { return n_terms_; }
  std::size_t nnz() const noexcept { return entries_.size(); }

  std::span<const TermCount> doc(std::size_t d) const {
    return {entries_.data() + offsets_[d], offsets_[d + 1] - offsets_[d]};
  }
  std::uint64_t doc_total(std::size_t d) const { return doc_totals_[d]; }
  std::span<const std::uint64_t> doc_totals() const { return doc_totals_; }

  // Sum of counts per term over all documents.
  std::vector<std::uint64_t> term_totals() const;

  std::vector<Triplet> triplets() const;

  // Fraction of zero cells, 1 - nnz / (n T).
  double sparsity() const;

  std::vector<std::size_t> empty_documents() const;

private:
  std::size_t n_docs_ = 0;
  std::size_t n_terms_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<TermCount> entries_;
  std::vector<std::uint64_t> doc_totals_;
};

// Hard cluster labels for n items, labels in [0, k).
struct LabelVector {
  std::vector<std::size_t> labels;
  std::size_t k = 0;

  std::size_t size() const noexcept { return labels.size(); }
};

// Builds a LabelVector with k = max label + 1.
LabelVector make_labels(std::vector<std::size_t> labels);

// "doc,term,count" rows with 0-based indices, optional "#dims n T" header.
// Blank lines and other '#' comment lines are skipped.
SparseDocTermMatrix load_triplets(const std::filesystem::path& path);
void write_triplets(const std::filesystem::path& path,
                    const SparseDocTermMatrix& x);

// Rectangular CSV of counts. With label_column the first field of each row
// is a class label; labels are re-indexed to 0..k-1 in first-seen order.
std::pair<SparseDocTermMatrix, std::optional<LabelVector>> load_dense_csv(
    const std::filesystem::path& path, bool label_column);

// One non-negative integer per line.
LabelVector load_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const LabelVector& labels);

}  // namespace deepmou
