#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bcsmile/app/instances.hpp"
#include "bcsmile/corpus/corpus.hpp"
#include "json.hpp"

namespace bcsmile::app {

enum class EmbeddingSource { automatic, file, synthetic };

struct PreprocessOptions {
  std::filesystem::path manifest;
  std::filesystem::path annotations;  // default: annotations.csv next to the manifest
  std::filesystem::path lexicons;     // default: built-in seed lexicons
  std::uint64_t seed = 0;
  std::optional<double> max_duration;  // default: mean + 4 sd of the annotated durations
  int downsample = 3;
  std::size_t output_steps = 8;
  std::size_t embedding_dim = 128;
  std::array<double, 3> split_ratios = corpus::kPaperSplitRatios;
  EmbeddingSource embeddings = EmbeddingSource::automatic;
  std::size_t jobs = 1;
};

nlohmann::json to_json(const PreprocessOptions& o);
// Only the tunable fields (not the paths) are read from JSON.
PreprocessOptions preprocess_options_from_json(const nlohmann::json& j, PreprocessOptions base = {});

struct PreprocessResult {
  std::vector<InstanceBundle> bundles;
  corpus::DatasetSplit split;
  std::size_t annotations_in = 0;
  std::size_t smiles_kept = 0;
  std::size_t nonsmiles = 0;
  double max_duration = 0.0;
  std::vector<std::string> rejected_records;
  std::vector<std::string> dropped;   // "<instance id>: reason"
  std::vector<std::string> warnings;
};

// Reliability filter, non-smile augmentation, dyad split, mean-face alignment,
// displacement targets, turn features, z-scoring and embeddings.
PreprocessResult preprocess(const PreprocessOptions& options);

// Writes the instance directory plus features.csv and preprocess_report.json.
void write_preprocess_outputs(const PreprocessResult& result, const std::filesystem::path& out_dir);

// Column order of features.csv; the last six are the conditioning vector.
std::vector<std::string> feature_csv_header();

}  // namespace bcsmile::app
