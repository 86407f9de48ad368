#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "bcsmile/agent/sink.hpp"
#include "bcsmile/app/instances.hpp"
#include "bcsmile/app/run_config.hpp"
#include "json.hpp"

namespace bcsmile::app {

// ---- analyze ---------------------------------------------------------------

struct AnalysisReport {
  std::string text;
  nlohmann::json json;
  std::vector<std::string> errors;  // analyses that could not be run
};

// Type-III ANOVA and Tukey HSD on smile duration, inverse-link GLM on
// intensity, over the smile instances of every split.
AnalysisReport analyze_instances(const std::vector<InstanceBundle>& bundles);

// ---- train / evaluate ------------------------------------------------------

// "<config>_r<repeat, 2 digits>.bcsm"
std::string checkpoint_name(seq2seq::Ablation a, std::size_t repeat);

struct EvaluationReport {
  std::string text;              // Table-2 style summary
  nlohmann::json json;
  std::string per_instance_csv;  // one row per (run, test instance)
  metrics::AblationComparison comparison;
  std::vector<std::string> notes;
};

// Scores every checkpoint in dir on the test split.
EvaluationReport evaluate_checkpoints(const std::vector<InstanceBundle>& bundles,
                                      const std::filesystem::path& checkpoint_dir, const std::vector<double>& sigmas);

// ---- subcommands -----------------------------------------------------------
// Each writes into c.out, echoes the resolved config there and throws Error on
// failure.

void cmd_synth(const RunConfig& c, std::ostream& log);
void cmd_preprocess(const RunConfig& c, const std::filesystem::path& manifest, std::ostream& log);
// Returns false when one of the analyses failed (the rest are still written).
bool cmd_analyze(const RunConfig& c, const std::filesystem::path& instances, std::ostream& log);
void cmd_train(const RunConfig& c, const std::filesystem::path& instances, std::ostream& log);
void cmd_evaluate(const RunConfig& c, const std::filesystem::path& instances,
                  const std::filesystem::path& checkpoints, std::ostream& log);
// sink: "" (endpoint from config/env, else the command file), "file:<path>"
// or an http:// URL.
agent::Acknowledgment cmd_adapt(const RunConfig& c, const std::filesystem::path& checkpoint,
                                const std::filesystem::path& instances, const std::string& instance_id,
                                const std::string& sink, std::ostream& log);

}  // namespace bcsmile::app
