#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bcsmile/app/preprocess.hpp"
#include "bcsmile/corpus/synthetic.hpp"
#include "bcsmile/seq2seq/trainer.hpp"
#include "json.hpp"

namespace bcsmile::app {

struct AdaptOptions {
  std::string endpoint;  // http://host:port/path; empty = file sink
  int timeout_ms = 2000;
  int retries = 1;
  std::filesystem::path spool;    // default <out>/agent_spool.jsonl
  std::filesystem::path command_file;  // default <out>/commands.jsonl
};

// Everything a subcommand needs, resolved as defaults < environment <
// config file < flags. The root seed feeds every named sub-seed, including
// the training seed.
struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::filesystem::path out = "out";
  corpus::SyntheticSpec synth;
  PreprocessOptions preprocess;
  seq2seq::TrainConfig train;
  std::size_t n_repeats = 10;
  std::vector<seq2seq::Ablation> configs{seq2seq::kAllAblations.begin(), seq2seq::kAllAblations.end()};
  std::vector<double> sigmas{metrics::kDefaultSigmas.begin(), metrics::kDefaultSigmas.end()};
  AdaptOptions adapt;
};

nlohmann::json to_json(const RunConfig& c);

// Overlays a JSON document with optional top-level keys seed, jobs, out and
// sections synth, preprocess, train, evaluate, adapt. Unknown keys are errors.
RunConfig apply_json(RunConfig c, const nlohmann::json& j);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();

// BCSMILE_SEED, BCSMILE_JOBS, BCSMILE_OUT, AGENT_ENDPOINT.
RunConfig apply_env(RunConfig c, const EnvLookup& env);

RunConfig resolve_run_config(const std::optional<std::filesystem::path>& config_file, const EnvLookup& env,
                             const nlohmann::json& flags);

// Writes run_config.json into dir.
void echo_run_config(const RunConfig& c, const std::filesystem::path& dir);

}  // namespace bcsmile::app
