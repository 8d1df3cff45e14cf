#include "deep_mou/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>

#include "deep_mou/errors.hpp"

namespace deepmou {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Parses a signed integer field; rejects trailing garbage such as "1.5".
long long parse_int(std::string_view field, std::size_t line,
                    const char* what) {
  long long value = 0;
  const auto* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, value);
  if (field.empty() || res.ec != std::errc() || res.ptr != end) {
    throw ParseError(std::string("invalid ") + what + " '" +
                         std::string(field) + "'",
                     line);
  }
  return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  return in;
}

}  // namespace

SparseDocTermMatrix::SparseDocTermMatrix(std::size_t n_docs,
                                         std::size_t n_terms,
                                         std::vector<Triplet> entries)
    : n_docs_(n_docs), n_terms_(n_terms), doc_totals_(n_docs, 0) {
  if (n_terms > std::numeric_limits<std::uint32_t>::max()) {
    throw DimensionError("too many terms");
  }
  std::sort(entries.begin(), entries.end());
  offsets_.assign(n_docs + 1, 0);
  entries_.reserve(entries.size());
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const auto& t = entries[e];
    if (t.doc >= n_docs || t.term >= n_terms) {
      throw DimensionError("entry (" + std::to_string(t.doc) + "," +
                           std::to_string(t.term) + ") outside " +
                           std::to_string(n_docs) + "x" +
                           std::to_string(n_terms));
    }
    if (t.count == 0) throw DomainError("zero count stored in sparse entry");
    if (e > 0 && entries[e - 1].doc == t.doc && entries[e - 1].term == t.term) {
      throw DomainError("duplicate entry (" + std::to_string(t.doc) + "," +
                        std::to_string(t.term) + ")");
    }
    entries_.push_back({static_cast<std::uint32_t>(t.term), t.count});
    ++offsets_[t.doc + 1];
    doc_totals_[t.doc] += t.count;
  }
  for (std::size_t d = 0; d < n_docs; ++d) offsets_[d + 1] += offsets_[d];
}

std::vector<std::uint64_t> SparseDocTermMatrix::term_totals() const {
  std::vector<std::uint64_t> out(n_terms_, 0);
  for (const auto& e : entries_) out[e.term] += e.count;
  return out;
}

std::vector<Triplet> SparseDocTermMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(entries_.size());
  for (std::size_t d = 0; d < n_docs_; ++d) {
    for (const auto& e : doc(d)) out.push_back({d, e.term, e.count});
  }
  return out;
}

double SparseDocTermMatrix::sparsity() const {
  const double cells = static_cast<double>(n_docs_) * static_cast<double>(n_terms_);
  if (cells == 0.0) return 1.0;
  return 1.0 - static_cast<double>(entries_.size()) / cells;
}

std::vector<std::size_t> SparseDocTermMatrix::empty_documents() const {
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < n_docs_; ++d) {
    if (doc_totals_[d] == 0) out.push_back(d);
  }
  return out;
}

LabelVector make_labels(std::vector<std::size_t> labels) {
  std::size_t k = 0;
  for (auto l : labels) k = std::max(k, l + 1);
  return {std::move(labels), k};
}

SparseDocTermMatrix load_triplets(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::optional<std::pair<std::size_t, std::size_t>> dims;
  std::vector<Triplet> entries;
  std::vector<std::size_t> entry_lines;
  std::size_t max_doc = 0, max_term = 0;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream hdr{std::string(line.substr(1))};
      std::string tag;
      hdr >> tag;
      if (tag == "dims") {
        long long n = -1, t = -1;
        if (!(hdr >> n >> t) || n < 0 || t < 0) {
          throw ParseError("malformed #dims header", line_no);
        }
        dims.emplace(static_cast<std::size_t>(n), static_cast<std::size_t>(t));
      }
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 3) {
      throw ParseError("expected doc,term,count", line_no);
    }
    const auto doc = parse_int(fields[0], line_no, "document index");
    const auto term = parse_int(fields[1], line_no, "term index");
    const auto count = parse_int(fields[2], line_no, "count");
    if (doc < 0 || term < 0) throw ParseError("negative index", line_no);
    if (count <= 0) {
      throw ParseError("count must be positive, got " + std::to_string(count),
                       line_no);
    }
    if (count > std::numeric_limits<std::uint32_t>::max()) {
      throw ParseError("count too large", line_no);
    }
    entries.push_back({static_cast<std::size_t>(doc),
                       static_cast<std::size_t>(term),
                       static_cast<std::uint32_t>(count)});
    entry_lines.push_back(line_no);
    max_doc = std::max(max_doc, static_cast<std::size_t>(doc));
    max_term = std::max(max_term, static_cast<std::size_t>(term));
  }

  std::size_t n = entries.empty() ? 0 : max_doc + 1;
  std::size_t t = entries.empty() ? 0 : max_term + 1;
  if (dims) {
    for (std::size_t e = 0; e < entries.size(); ++e) {
      if (entries[e].doc >= dims->first || entries[e].term >= dims->second) {
        throw ParseError("entry outside #dims " + std::to_string(dims->first) +
                             " " + std::to_string(dims->second),
                         entry_lines[e]);
      }
    }
    n = dims->first;
    t = dims->second;
  }

  // Report duplicates with the offending line rather than from the ctor.
  {
    std::vector<std::pair<std::pair<std::size_t, std::size_t>, std::size_t>> keyed;
    keyed.reserve(entries.size());
    for (std::size_t e = 0; e < entries.size(); ++e) {
      keyed.push_back({{entries[e].doc, entries[e].term}, e});
    }
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t e = 1; e < keyed.size(); ++e) {
      if (keyed[e].first == keyed[e - 1].first) {
        throw ParseError("duplicate (doc, term) pair " +
                             std::to_string(keyed[e].first.first) + "," +
                             std::to_string(keyed[e].first.second),
                         entry_lines[std::max(keyed[e].second, keyed[e - 1].second)]);
      }
    }
  }
  return SparseDocTermMatrix(n, t, std::move(entries));
}

void write_triplets(const std::filesystem::path& path,
                    const SparseDocTermMatrix& x) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string(), 0);
  out << "#dims " << x.n_docs() << ' ' << x.n_terms() << '\n';
  for (const auto& t : x.triplets()) {
    out << t.doc << ',' << t.term << ',' << t.count << '\n';
  }
  if (!out) throw ParseError("write failed for " + path.string(), 0);
}

std::pair<SparseDocTermMatrix, std::optional<LabelVector>> load_dense_csv(
    const std::filesystem::path& path, bool label_column) {
  auto in = open_input(path);
  std::vector<Triplet> entries;
  std::vector<std::size_t> labels;
  std::unordered_map<long long, std::size_t> label_index;
  std::optional<std::size_t> width;
  std::size_t n = 0;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (!width) width = fields.size();
    if (fields.size() != *width) {
      throw ParseError("ragged row: expected " + std::to_string(*width) +
                           " fields, got " + std::to_string(fields.size()),
                       line_no);
    }
    std::size_t first = 0;
    if (label_column) {
      const auto raw_label = parse_int(fields[0], line_no, "label");
      auto [it, inserted] = label_index.try_emplace(raw_label, label_index.size());
      labels.push_back(it->second);
      first = 1;
    }
    for (std::size_t f = first; f < fields.size(); ++f) {
      const auto count = parse_int(fields[f], line_no, "count");
      if (count < 0) throw ParseError("negative count", line_no);
      if (count > 0) {
        entries.push_back({n, f - first, static_cast<std::uint32_t>(count)});
      }
    }
    ++n;
  }
  const std::size_t t = width ? *width - (label_column ? 1 : 0) : 0;
  std::optional<LabelVector> lv;
  if (label_column) lv = LabelVector{std::move(labels), label_index.size()};
  return {SparseDocTermMatrix(n, t, std::move(entries)), std::move(lv)};
}

LabelVector load_labels(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::size_t> labels;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    const auto v = parse_int(line, line_no, "label");
    if (v < 0) throw ParseError("negative label", line_no);
    labels.push_back(static_cast<std::size_t>(v));
  }
  return make_labels(std::move(labels));
}

void write_labels(const std::filesystem::path& path, const LabelVector& labels) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string(), 0);
  for (auto l : labels.labels) out << l << '\n';
  if (!out) throw ParseError("write failed for " + path.string(), 0);
}

}  // namespace deepmou
