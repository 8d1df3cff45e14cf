#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "deep_mou/corpus.hpp"
#include "deep_mou/errors.hpp"
#include "deep_mou/rng.hpp"

using namespace deepmou;
namespace fs = std::filesystem;

namespace {

// Writes `text` to a fresh file under the system temp dir.
fs::path temp_file(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "deep_mou_test_corpus";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

std::size_t parse_line(const fs::path& p) {
  try {
    load_triplets(p);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("load_triplets basic") {
  const auto x = load_triplets(temp_file("basic.txt", "0,0,2\n0,1,1\n1,1,3\n"));
  CHECK(x.n_docs() == 2);
  CHECK(x.n_terms() == 2);
  CHECK(x.doc_total(0) == 3);
  CHECK(x.doc_total(1) == 3);
  CHECK(x.nnz() == 3);
  REQUIRE(x.doc(1).size() == 1);
  CHECK(x.doc(1)[0] == TermCount{1, 3});
}

TEST_CASE("load_triplets dims header without entries") {
  const auto x = load_triplets(temp_file("dims.txt", "#dims 3 5\n"));
  CHECK(x.n_docs() == 3);
  CHECK(x.n_terms() == 5);
  for (std::size_t d = 0; d < 3; ++d) CHECK(x.doc_total(d) == 0);
  CHECK(x.empty_documents() == std::vector<std::size_t>{0, 1, 2});
  CHECK(x.sparsity() == 1.0);
}

TEST_CASE("load_triplets rejects bad lines with their line number") {
  CHECK(parse_line(temp_file("neg.txt", "0,0,-1\n")) == 1);
  CHECK(parse_line(temp_file("zero.txt", "0,0,1\n\n0,1,0\n")) == 3);
  CHECK(parse_line(temp_file("dup.txt", "#dims 2 2\n0,0,1\n1,1,1\n0,0,4\n")) == 4);
  CHECK(parse_line(temp_file("short.txt", "0,0\n")) == 1);
  CHECK(parse_line(temp_file("float.txt", "# c\n0,0,1.5\n")) == 2);
  CHECK(parse_line(temp_file("outside.txt", "#dims 1 1\n0,3,1\n")) == 2);
  CHECK_THROWS_AS(load_triplets("/nonexistent/file.txt"), ParseError);
}

TEST_CASE("triplet entries survive write and reload") {
  RngStream rng(17, 0);
  std::vector<Triplet> t;
  for (std::size_t d = 0; d < 30; ++d) {
    for (std::size_t w = 0; w < 40; ++w) {
      if (rng.uniform() < 0.1) t.push_back({d, w, static_cast<std::uint32_t>(1 + rng() % 9)});
    }
  }
  const SparseDocTermMatrix x(31, 40, t);  // last document empty
  const fs::path p = temp_file("round.txt", "");
  write_triplets(p, x);
  const auto y = load_triplets(p);
  CHECK(y.n_docs() == 31);
  CHECK(y.n_terms() == 40);
  auto a = x.triplets(), b = y.triplets();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);
}

TEST_CASE("matrix invariants") {
  const SparseDocTermMatrix x(3, 4, {{2, 3, 5}, {0, 1, 2}, {0, 0, 1}, {2, 0, 1}});
  CHECK(x.doc_total(0) == 3);
  CHECK(x.doc_total(1) == 0);
  CHECK(x.doc_total(2) == 6);
  CHECK(x.term_totals() == std::vector<std::uint64_t>{2, 2, 0, 5});
  // rows come out sorted by term
  REQUIRE(x.doc(0).size() == 2);
  CHECK(x.doc(0)[0].term == 0);
  CHECK(x.doc(0)[1].term == 1);
  CHECK(x.sparsity() == doctest::Approx(1.0 - 4.0 / 12.0).epsilon(1e-15));

  CHECK_THROWS_AS(SparseDocTermMatrix(2, 2, {{2, 0, 1}}), DimensionError);
  CHECK_THROWS_AS(SparseDocTermMatrix(2, 2, {{0, 2, 1}}), DimensionError);
  CHECK_THROWS_AS(SparseDocTermMatrix(2, 2, {{0, 0, 0}}), DomainError);
  CHECK_THROWS_AS(SparseDocTermMatrix(2, 2, {{0, 0, 1}, {0, 0, 2}}), DomainError);
}

TEST_CASE("load_dense_csv with a label column") {
  const auto [x, labels] =
      load_dense_csv(temp_file("dense.csv", "2,0,0,3,1\n7,1,0,0,0\n2,0,0,0,0\n"), true);
  CHECK(x.n_docs() == 3);
  CHECK(x.n_terms() == 4);
  REQUIRE(x.doc(0).size() == 2);
  CHECK(x.doc(0)[0] == TermCount{2, 3});
  CHECK(x.doc(0)[1] == TermCount{3, 1});
  CHECK(x.doc_total(2) == 0);
  REQUIRE(labels.has_value());
  CHECK(labels->labels == std::vector<std::size_t>{0, 1, 0});
  CHECK(labels->k == 2);
}

TEST_CASE("load_dense_csv without labels and its errors") {
  const auto [x, labels] = load_dense_csv(temp_file("plain.csv", "0,1\n4,0\n"), false);
  CHECK_FALSE(labels.has_value());
  CHECK(x.n_terms() == 2);
  CHECK(x.doc_total(1) == 4);

  try {
    load_dense_csv(temp_file("ragged.csv", "1,2,3\n1,2\n"), false);
    FAIL("ragged row accepted");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(load_dense_csv(temp_file("real.csv", "1,2.5\n"), false), ParseError);
  CHECK_THROWS_AS(load_dense_csv(temp_file("negc.csv", "1,-2\n"), false), ParseError);
}

TEST_CASE("labels files") {
  const auto l = load_labels(temp_file("labels.txt", "0\n2\n1\n2\n"));
  CHECK(l.labels == std::vector<std::size_t>{0, 2, 1, 2});
  CHECK(l.k == 3);
  const fs::path p = temp_file("labels_out.txt", "");
  write_labels(p, l);
  CHECK(load_labels(p).labels == l.labels);
  CHECK_THROWS_AS(load_labels(temp_file("badlab.txt", "0\n-1\n")), ParseError);
  CHECK(make_labels({3, 0}).k == 4);
}

// The CNAE-9 file is not shipped; point DEEP_MOU_CNAE at the UCI CSV to
// run this.
TEST_CASE("CNAE-9 shape") {
  const char* path = std::getenv("DEEP_MOU_CNAE");
  if (!path || !fs::exists(path)) {
    MESSAGE("DEEP_MOU_CNAE not set, skipping");
    return;
  }
  const auto [x, labels] = load_dense_csv(path, true);
  CHECK(x.n_docs() == 1080);
  CHECK(x.n_terms() == 856);
  REQUIRE(labels.has_value());
  CHECK(std::set<std::size_t>(labels->labels.begin(), labels->labels.end()).size() == 9);
}
