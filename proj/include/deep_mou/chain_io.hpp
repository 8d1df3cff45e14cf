#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "deep_mou/matrix.hpp"
#include "deep_mou/model.hpp"
#include "deep_mou/mou_em.hpp"
#include "deep_mou/params.hpp"
#include "deep_mou/simulate.hpp"

namespace deepmou {

using Json = nlohmann::json;

Json matrix_to_json(const Matrix& m);
// Throws ParseError on ragged or non-numeric rows.
Matrix matrix_from_json(const Json& j);

Json params_to_json(const DeepMouParams& p);
DeepMouParams params_from_json(const Json& j);

// One JSON-lines record: iteration, log_posterior, pi2, pi1, alpha, beta,
// z1, z2 and the iteration's acceptance tallies.
Json state_to_json(const ChainState& s);
ChainState state_from_json(const Json& j);

void write_chain_jsonl(const std::filesystem::path& path, const ChainTrace& trace);
// Reads a dump back; k1 and k2 come from the first record. mh_total is left
// empty since the dump only holds kept states.
ChainTrace read_chain_jsonl(const std::filesystem::path& path);

// "iteration,log_posterior" per kept state.
void write_log_posterior_csv(const std::filesystem::path& path, const ChainTrace& trace);

Json mou_to_json(const MouParams& p);
MouParams mou_from_json(const Json& j);

// Generating parameters of a simulated corpus.
Json truth_to_json(const SimOutput& sim);

void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

}  // namespace deepmou
