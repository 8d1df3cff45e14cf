#include "deep_mou/chain_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>

#include "deep_mou/errors.hpp"

namespace deepmou {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

Json tally_to_json(const MhTally& t) {
  return Json{{"accepted", t.accepted}, {"proposed", t.proposed}};
}

MhTally tally_from_json(const Json& j) {
  return MhTally{j.at("accepted").get<std::uint64_t>(), j.at("proposed").get<std::uint64_t>()};
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out.push_back(Json(std::vector<double>(m.row(r).begin(), m.row(r).end())));
  }
  return out;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("matrix must be an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows ? j[0].size() : 0;
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ParseError("matrix row " + std::to_string(r) + " has the wrong length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw ParseError("matrix entry is not a number");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

Json params_to_json(const DeepMouParams& p) {
  return Json{{"k1", p.k1},
              {"k2", p.k2},
              {"pi2", p.pi2},
              {"pi1", matrix_to_json(p.pi1)},
              {"alpha", matrix_to_json(p.alpha)},
              {"beta", matrix_to_json(p.beta)}};
}

DeepMouParams params_from_json(const Json& j) {
  try {
    DeepMouParams p;
    p.k1 = j.at("k1").get<std::size_t>();
    p.k2 = j.at("k2").get<std::size_t>();
    p.pi2 = j.at("pi2").get<std::vector<double>>();
    p.pi1 = matrix_from_json(j.at("pi1"));
    p.alpha = matrix_from_json(j.at("alpha"));
    p.beta = matrix_from_json(j.at("beta"));
    validate(p);
    return p;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("bad parameter record: ") + e.what());
  }
}

Json state_to_json(const ChainState& s) {
  Json out = params_to_json(s.params);
  out["iteration"] = s.iteration;
  out["log_posterior"] = s.log_posterior;
  out["z1"] = s.z.z1;
  out["z2"] = s.z.z2;
  out["mh"] = Json{{"alpha", tally_to_json(s.mh.alpha)}, {"beta", tally_to_json(s.mh.beta)}};
  return out;
}

ChainState state_from_json(const Json& j) {
  try {
    ChainState s;
    s.params = params_from_json(j);
    s.iteration = j.at("iteration").get<std::size_t>();
    s.log_posterior = j.at("log_posterior").get<double>();
    s.z.z1 = j.at("z1").get<std::vector<std::size_t>>();
    s.z.z2 = j.at("z2").get<std::vector<std::size_t>>();
    s.mh.alpha = tally_from_json(j.at("mh").at("alpha"));
    s.mh.beta = tally_from_json(j.at("mh").at("beta"));
    return s;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("bad chain record: ") + e.what());
  }
}

void write_chain_jsonl(const std::filesystem::path& path, const ChainTrace& trace) {
  auto out = open_out(path);
  for (const auto& s : trace.states) out << state_to_json(s).dump() << '\n';
}

ChainTrace read_chain_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  ChainTrace trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      trace.states.push_back(state_from_json(Json::parse(line)));
    } catch (const Json::exception& e) {
      throw ParseError(e.what(), line_no);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (!trace.states.empty()) {
    trace.k1 = trace.states.front().params.k1;
    trace.k2 = trace.states.front().params.k2;
  }
  return trace;
}

void write_log_posterior_csv(const std::filesystem::path& path, const ChainTrace& trace) {
  auto out = open_out(path);
  out << "iteration,log_posterior\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& s : trace.states) out << s.iteration << ',' << s.log_posterior << '\n';
}

Json mou_to_json(const MouParams& p) {
  return Json{{"k", p.k}, {"pi", p.pi}, {"omega", matrix_to_json(p.omega)}};
}

MouParams mou_from_json(const Json& j) {
  try {
    MouParams p;
    p.k = j.at("k").get<std::size_t>();
    p.pi = j.at("pi").get<std::vector<double>>();
    p.omega = matrix_from_json(j.at("omega"));
    if (p.pi.size() != p.k || p.omega.rows() != p.k) {
      throw ParseError("MoU parameters have inconsistent sizes");
    }
    return p;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("bad MoU record: ") + e.what());
  }
}

Json truth_to_json(const SimOutput& sim) {
  return Json{{"study", study_name(sim.config.study)},
              {"k1", sim.true_beta.rows()},
              {"k2", sim.true_alpha.rows()},
              {"beta", matrix_to_json(sim.true_beta)},
              {"alpha", matrix_to_json(sim.true_alpha)}};
}

void write_json(const std::filesystem::path& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace deepmou
