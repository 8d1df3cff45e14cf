#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "deep_mou/chain_io.hpp"
#include "deep_mou/errors.hpp"
#include "deep_mou/model.hpp"
#include "deep_mou/simulate.hpp"

using namespace deepmou;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "deep_mou_test_chain_io";
  fs::create_directories(dir);
  return dir;
}

ChainTrace small_trace() {
  SimConfig sc;
  sc.n = 30;
  sc.n_terms = 15;
  sc.seed = 2;
  SamplerConfig cfg;
  cfg.iterations = 12;
  cfg.burn_in = 8;
  cfg.seed = 3;
  return run_chain(generate(sc).x, 3, 2, cfg);
}

}  // namespace

TEST_CASE("chain dump reads back bit for bit") {
  const auto trace = small_trace();
  const fs::path p = temp_dir() / "chain.jsonl";
  write_chain_jsonl(p, trace);
  const auto back = read_chain_jsonl(p);
  CHECK(back.k1 == 3);
  CHECK(back.k2 == 2);
  CHECK(back.states == trace.states);
}

TEST_CASE("log posterior CSV") {
  const auto trace = small_trace();
  const fs::path p = temp_dir() / "lp.csv";
  write_log_posterior_csv(p, trace);
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  CHECK(line == "iteration,log_posterior");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    REQUIRE(comma != std::string::npos);
    CHECK(std::stoul(line.substr(0, comma)) == trace.states[rows].iteration);
    CHECK(std::stod(line.substr(comma + 1)) == trace.states[rows].log_posterior);
    ++rows;
  }
  CHECK(rows == trace.states.size());
}

TEST_CASE("bad chain lines are reported with their line number") {
  const auto trace = small_trace();
  const fs::path good = temp_dir() / "good.jsonl";
  write_chain_jsonl(good, trace);
  std::ifstream in(good);
  std::string first, second;
  std::getline(in, first);
  std::getline(in, second);

  const fs::path bad = temp_dir() / "bad.jsonl";
  std::ofstream(bad) << first << "\n{not json\n";
  try {
    read_chain_jsonl(bad);
    FAIL("accepted invalid JSON");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }

  auto rec = Json::parse(second);
  rec["beta"][0].push_back(1.0);  // ragged beta
  std::ofstream(bad) << first << "\n" << first << "\n" << rec.dump() << "\n";
  try {
    read_chain_jsonl(bad);
    FAIL("accepted ragged matrix");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("parameter records are validated") {
  const auto trace = small_trace();
  Json j = params_to_json(trace.states[0].params);
  CHECK(params_from_json(j) == trace.states[0].params);
  j["alpha"][0][0] = 1.5;
  CHECK_THROWS_AS(params_from_json(j), DomainError);
  j.erase("beta");
  CHECK_THROWS_AS(params_from_json(j), ParseError);
  CHECK_THROWS_AS(matrix_from_json(Json::parse("[[1, 2], [3]]")), ParseError);
  CHECK_THROWS_AS(matrix_from_json(Json::parse("[[1, \"a\"]]")), ParseError);
}

TEST_CASE("MoU and truth records") {
  MouParams m;
  m.k = 2;
  m.pi = {0.25, 0.75};
  m.omega = Matrix(2, 2, 0.5);
  const auto back = mou_from_json(mou_to_json(m));
  CHECK(back.k == 2);
  CHECK(back.pi == m.pi);
  CHECK(back.omega == m.omega);
  Json broken = mou_to_json(m);
  broken["pi"].push_back(0.0);
  CHECK_THROWS_AS(mou_from_json(broken), ParseError);

  SimConfig sc;
  sc.n = 12;
  sc.n_terms = 5;
  const auto sim = generate(sc);
  const Json t = truth_to_json(sim);
  CHECK(t["study"] == "deep");
  CHECK(t["k1"] == 3);
  CHECK(t["k2"] == 2);
  CHECK(matrix_from_json(t["beta"]) == sim.true_beta);
  CHECK(matrix_from_json(t["alpha"]) == sim.true_alpha);

  const fs::path p = temp_dir() / "truth.json";
  write_json(p, t);
  CHECK(read_json(p) == t);
  std::ofstream(p) << "{";
  CHECK_THROWS_AS(read_json(p), ParseError);
}
