#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bcsmile/corpus/records.hpp"
#include "json.hpp"

namespace bcsmile::corpus {

// Desk-scale stand-in for a recorded corpus. Per smile the generator draws a
// listener latent (planted in the listener-turn embeddings) and five context
// latents that drive negation count, speaker loudness, listener word count,
// comparison count and listener pitch. The smile's peak timing within its
// first second, the quantity the generator learns, is
//   tau = 0.5 + 0.35 tanh(0.8 listener_effect * l + 0.8 conditioning_effect * c)
// where c combines speaker sex and the five context latents.
struct SyntheticSpec {
  std::size_t n_dyads = 8;
  std::size_t smiles_per_dyad = 4;
  std::size_t landmark_count = 68;
  double fps = 25.0;
  int sample_rate = 16000;
  std::size_t embedding_dim = 128;
  double listener_effect = 1.0;
  double conditioning_effect = 1.0;
  double embedding_strength = 2.0;   // length of the planted listener direction per unit latent
  double duration_sex_effect = 0.8;  // seconds, female minus male listener
  double duration_noise = 0.3;
  double intensity_noise = 0.5;
  double smile_scale = 1.0;  // multiplies the smile displacement pattern
  double landmark_noise_px = 0.1;
  double head_motion = 1.0;
  std::size_t unreliable_per_dyad = 0;  // smiles written without an intensity level
  bool write_embeddings = true;
};

nlohmann::json to_json(const SyntheticSpec& s);
SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j, SyntheticSpec base = {});

// Ground truth behind each generated smile.
struct PlantedSmile {
  std::string dyad_id;
  Side listener_side = Side::left;
  double onset = 0.0;
  double offset = 0.0;
  std::optional<Intensity> intensity;
  double listener_latent = 0.0;
  std::array<double, 5> context{};  // negations, loudness, word count, comparisons, pitch
  double driver = 0.0;
  double peak_time = 0.0;  // tau, seconds after onset
};

struct SyntheticCorpus {
  std::filesystem::path manifest;
  std::filesystem::path annotations;
  std::vector<DyadRecord> records;
  std::vector<SmileAnnotation> smiles;
  std::vector<PlantedSmile> planted;
};

// Writes manifest.json, annotations.csv, turns/, landmarks/, audio/,
// embeddings/ (optional), planted.csv and synth_spec.json under out_dir.
SyntheticCorpus generate_synthetic_corpus(const SyntheticSpec& spec, std::uint64_t seed,
                                          const std::filesystem::path& out_dir);

}  // namespace bcsmile::corpus
