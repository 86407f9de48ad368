// Command-line entry point: synth, preprocess, analyze, train, evaluate, adapt.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bcsmile/app/commands.hpp"
#include "bcsmile/error.hpp"
#include "json.hpp"

using nlohmann::json;
namespace app = bcsmile::app;

int main(int argc, char** argv) {
  CLI::App cli{"Backchannel smile generation toolkit"};
  cli.require_subcommand(1);
  cli.fallthrough();

  std::string config_file;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t jobs = 1;
  auto* o_config = cli.add_option("--config", config_file, "JSON run configuration")->check(CLI::ExistingFile);
  auto* o_seed = cli.add_option("--seed", seed, "Root seed");
  auto* o_out = cli.add_option("--out", out, "Output directory");
  auto* o_jobs = cli.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* synth = cli.add_subcommand("synth", "Generate a synthetic corpus");
  std::size_t dyads = 0, smiles = 0;
  auto* o_dyads = synth->add_option("--dyads", dyads, "Number of dyads");
  auto* o_smiles = synth->add_option("--smiles-per-dyad", smiles, "Smiles per dyad");

  auto* pre = cli.add_subcommand("preprocess", "Build model instances from a corpus manifest");
  std::string manifest;
  pre->add_option("--manifest", manifest, "Corpus manifest.json")->required()->check(CLI::ExistingFile);

  std::string instances;
  auto* analyze = cli.add_subcommand("analyze", "ANOVA, Tukey HSD and GLM on the smile instances");
  analyze->add_option("--instances", instances, "Preprocess output directory")->required()->check(CLI::ExistingDirectory);

  auto* train = cli.add_subcommand("train", "Train every configuration over the seeded repeats");
  train->add_option("--instances", instances, "Preprocess output directory")->required()->check(CLI::ExistingDirectory);
  int epochs = 0;
  std::size_t repeats = 0;
  std::vector<std::string> configs;
  auto* o_epochs = train->add_option("--epochs", epochs, "Training epochs");
  auto* o_repeats = train->add_option("--repeats", repeats, "Seeded repeats per configuration");
  auto* o_configs = train->add_option("--configs", configs, "Subset of configurations");

  auto* evaluate = cli.add_subcommand("evaluate", "Score checkpoints on the test split");
  std::string checkpoints;
  evaluate->add_option("--instances", instances, "Preprocess output directory")->required()->check(CLI::ExistingDirectory);
  evaluate->add_option("--checkpoints", checkpoints, "Directory of checkpoints")->required()->check(CLI::ExistingDirectory);

  auto* adapt = cli.add_subcommand("adapt", "Turn a generated smile into an agent command");
  std::string checkpoint, instance, sink;
  adapt->add_option("--checkpoint", checkpoint, "Model checkpoint")->required()->check(CLI::ExistingFile);
  adapt->add_option("--instances", instances, "Preprocess output directory")->required()->check(CLI::ExistingDirectory);
  adapt->add_option("--instance", instance, "Instance id")->required();
  adapt->add_option("--sink", sink, "file:<path> or an http:// endpoint (default: config or AGENT_ENDPOINT)");

  CLI11_PARSE(cli, argc, argv);

  try {
    json flags = json::object();
    if (o_seed->count()) flags["seed"] = seed;
    if (o_out->count()) flags["out"] = out;
    if (o_jobs->count()) flags["jobs"] = jobs;
    if (o_dyads->count()) flags["synth"]["n_dyads"] = dyads;
    if (o_smiles->count()) flags["synth"]["smiles_per_dyad"] = smiles;
    if (o_epochs->count()) flags["train"]["epochs"] = epochs;
    if (o_repeats->count()) flags["train"]["n_repeats"] = repeats;
    if (o_configs->count()) flags["train"]["configs"] = configs;
    std::optional<std::filesystem::path> cfg_path;
    if (o_config->count()) cfg_path = config_file;
    const auto c = app::resolve_run_config(cfg_path, app::process_env(), flags);

    if (*synth) app::cmd_synth(c, std::cout);
    else if (*pre) app::cmd_preprocess(c, manifest, std::cout);
    else if (*analyze) return app::cmd_analyze(c, instances, std::cout) ? 0 : 1;
    else if (*train) app::cmd_train(c, instances, std::cout);
    else if (*evaluate) app::cmd_evaluate(c, instances, checkpoints, std::cout);
    else if (*adapt) app::cmd_adapt(c, checkpoint, instances, instance, sink, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
