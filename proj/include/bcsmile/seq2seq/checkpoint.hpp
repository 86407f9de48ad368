#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "bcsmile/seq2seq/model.hpp"
#include "bcsmile/seq2seq/trainer.hpp"

namespace bcsmile::seq2seq {

inline constexpr char kCheckpointMagic[4] = {'B', 'C', 'S', 'M'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMeta {
  TrainConfig config;
  std::uint64_t seed = 0;
  int epoch = -1;  // epoch of the stored parameters
  double best_val = 0.0;
};

struct Checkpoint {
  ModelParams params;
  CheckpointMeta meta;
};

// Layout (docs/checkpoint_format.md): magic "BCSM", u32 version, u64 header
// length, JSON header, then every tensor as float64 little-endian in header
// order.
void save_checkpoint(const std::filesystem::path& path, const ModelParams& params, const CheckpointMeta& meta);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace bcsmile::seq2seq
