#include "bcsmile/app/run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bcsmile/agent/sink.hpp"
#include "bcsmile/error.hpp"

namespace bcsmile::app {

namespace fs = std::filesystem;
using nlohmann::json;

json to_json(const RunConfig& c) {
  json train = seq2seq::to_json(c.train);
  train["n_repeats"] = c.n_repeats;
  json configs = json::array();
  for (auto a : c.configs) configs.push_back(std::string(seq2seq::to_string(a)));
  train["configs"] = configs;
  return json{{"seed", c.seed},
              {"jobs", c.jobs},
              {"out", c.out.generic_string()},
              {"synth", corpus::to_json(c.synth)},
              {"preprocess", to_json(c.preprocess)},
              {"train", train},
              {"evaluate", {{"sigmas", c.sigmas}}},
              {"adapt",
               {{"endpoint", c.adapt.endpoint},
                {"timeout_ms", c.adapt.timeout_ms},
                {"retries", c.adapt.retries},
                {"spool", c.adapt.spool.generic_string()},
                {"command_file", c.adapt.command_file.generic_string()}}}};
}

RunConfig apply_json(RunConfig c, const json& j) {
  if (!j.is_object()) throw Error("run config: expected a JSON object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "jobs") c.jobs = v.get<std::size_t>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "synth") c.synth = corpus::synthetic_spec_from_json(v, c.synth);
      else if (key == "preprocess") c.preprocess = preprocess_options_from_json(v, c.preprocess);
      else if (key == "train") {
        json rest = v;
        if (rest.contains("n_repeats")) {
          c.n_repeats = rest["n_repeats"].get<std::size_t>();
          rest.erase("n_repeats");
        }
        if (rest.contains("configs")) {
          c.configs.clear();
          for (const auto& name : rest["configs"]) {
            auto a = seq2seq::parse_ablation(name.get<std::string>());
            if (!a) throw Error("unknown configuration '" + name.get<std::string>() + "'");
            c.configs.push_back(*a);
          }
          rest.erase("configs");
        }
        c.train = seq2seq::train_config_from_json(rest, c.train);
      } else if (key == "evaluate") {
        for (const auto& [k, e] : v.items()) {
          if (k == "sigmas") c.sigmas = e.get<std::vector<double>>();
          else throw Error("unknown key evaluate." + k);
        }
      } else if (key == "adapt") {
        for (const auto& [k, e] : v.items()) {
          if (k == "endpoint") c.adapt.endpoint = e.get<std::string>();
          else if (k == "timeout_ms") c.adapt.timeout_ms = e.get<int>();
          else if (k == "retries") c.adapt.retries = e.get<int>();
          else if (k == "spool") c.adapt.spool = e.get<std::string>();
          else if (k == "command_file") c.adapt.command_file = e.get<std::string>();
          else throw Error("unknown key adapt." + k);
        }
      } else {
        throw Error("unknown key");
      }
    } catch (const json::exception& e) {
      throw Error("run config: '" + key + "': " + e.what());
    } catch (const Error& e) {
      throw Error("run config: '" + key + "': " + e.what());
    }
  }
  return c;
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
  };
}

RunConfig apply_env(RunConfig c, const EnvLookup& env) {
  auto number = [](const std::string& name, const std::string& s) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != s.size() || s.empty()) throw Error("environment " + name + ": not a non-negative integer: '" + s + "'");
    return v;
  };
  if (auto v = env("BCSMILE_SEED")) c.seed = number("BCSMILE_SEED", *v);
  if (auto v = env("BCSMILE_JOBS")) c.jobs = number("BCSMILE_JOBS", *v);
  if (auto v = env("BCSMILE_OUT")) c.out = *v;
  if (auto v = env(agent::kEndpointEnv)) c.adapt.endpoint = *v;
  return c;
}

RunConfig resolve_run_config(const std::optional<fs::path>& config_file, const EnvLookup& env, const json& flags) {
  RunConfig c = apply_env(RunConfig{}, env);
  if (config_file) {
    std::ifstream in(*config_file, std::ios::binary);
    if (!in) throw Error("cannot open config file " + config_file->string());
    std::ostringstream os;
    os << in.rdbuf();
    json j;
    try {
      j = json::parse(os.str());
    } catch (const json::parse_error& e) {
      throw Error(config_file->string() + ": " + e.what());
    }
    c = apply_json(std::move(c), j);
  }
  if (!flags.is_null()) c = apply_json(std::move(c), flags);
  if (c.jobs == 0) c.jobs = 1;
  c.train.seed = c.seed;
  c.preprocess.seed = c.seed;
  c.preprocess.jobs = c.jobs;
  if (c.adapt.spool.empty()) c.adapt.spool = c.out / "agent_spool.jsonl";
  if (c.adapt.command_file.empty()) c.adapt.command_file = c.out / "commands.jsonl";
  if (c.n_repeats == 0) throw Error("run config: n_repeats must be positive");
  if (c.configs.empty()) throw Error("run config: no configurations selected");
  if (c.sigmas.empty()) throw Error("run config: no PCK thresholds");
  for (double s : c.sigmas) {
    if (!(s > 0.0)) throw Error("run config: PCK thresholds must be positive");
  }
  return c;
}

void echo_run_config(const RunConfig& c, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream out(dir / "run_config.json", std::ios::binary);
  if (!out) throw Error("cannot write " + (dir / "run_config.json").string());
  out << to_json(c).dump(2) << '\n';
}

}  // namespace bcsmile::app
