#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bcsmile/corpus/records.hpp"
#include "bcsmile/features/features.hpp"
#include "bcsmile/seq2seq/trainer.hpp"

namespace bcsmile::app {

// A preprocessed instance as stored on disk: the model-facing part plus the
// metadata the analysis and evaluation commands need.
struct InstanceBundle {
  seq2seq::TrainingInstance inst;
  std::string split;  // "train", "val" or "test"
  corpus::Side listener_side = corpus::Side::left;
  double window_start = 0.0;
  double window_end = 0.0;
  corpus::Sex speaker_sex = corpus::Sex::male;
  corpus::Sex listener_sex = corpus::Sex::male;
  corpus::Relationship relationship = corpus::Relationship::friends;
  std::string speaker_turn;
  std::string listener_turn;
  features::TurnFeatureRow speaker_raw{};
  features::TurnFeatureRow listener_raw{};
  features::TurnFeatureRow speaker_z{};
  features::TurnFeatureRow listener_z{};
};

nlohmann::json to_json(const InstanceBundle& b);
InstanceBundle bundle_from_json(const nlohmann::json& j);

void save_bundle(const InstanceBundle& b, const std::filesystem::path& path);
InstanceBundle load_bundle(const std::filesystem::path& path);

// Instance directory layout: index.json (ordered ids), split.json and one
// <id>.json per instance under instances/.
void save_instance_dir(const std::vector<InstanceBundle>& bundles, const corpus::DatasetSplit& split,
                       const std::filesystem::path& dir);
std::vector<InstanceBundle> load_instance_dir(const std::filesystem::path& dir);
InstanceBundle load_instance(const std::filesystem::path& dir, const std::string& id);

struct SplitView {
  std::vector<const seq2seq::TrainingInstance*> train;
  std::vector<const seq2seq::TrainingInstance*> val;
  std::vector<const seq2seq::TrainingInstance*> test;
};

SplitView split_view(const std::vector<InstanceBundle>& bundles);

}  // namespace bcsmile::app
