#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "bcsmile/corpus/records.hpp"

namespace bcsmile::corpus {

struct ManifestLoad {
  std::vector<DyadRecord> records;
  // One entry per rejected record, e.g. "d012: sex of right person unknown".
  std::vector<std::string> rejected;
};

// Manifest: JSON array of dyad objects. Paths are resolved against the
// manifest's directory and must exist (the embeddings directory is optional).
ManifestLoad load_manifest(const std::filesystem::path& path);
ManifestLoad parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir,
                            const std::string& source, bool check_media);
// Writes paths relative to the manifest directory.
void save_manifest(const std::vector<DyadRecord>& records, const std::filesystem::path& path);

std::vector<SmileAnnotation> load_annotations(const std::filesystem::path& path);
void save_annotations(const std::vector<SmileAnnotation>& annotations, const std::filesystem::path& path);

// One file per dyad side; rows are words, grouped into turns by turn_id.
std::vector<TurnSegment> load_turns(const std::filesystem::path& path, const std::string& dyad_id, Side side);
void save_turns(const std::vector<TurnSegment>& turns, const std::filesystem::path& path);

using AnnotationKey = std::tuple<std::string, Side, double>;
inline AnnotationKey key_of(const SmileAnnotation& a) { return {a.dyad_id, a.listener_side, a.onset}; }

// mean + 4 * population stddev of the durations.
double default_max_duration(const std::vector<SmileAnnotation>& annotations);

// Keeps annotations with a predicted level (A or higher) and duration <= max_duration;
// the predicted level replaces the annotation's intensity.
std::vector<SmileAnnotation> filter_reliable_smiles(
    const std::vector<SmileAnnotation>& annotations,
    const std::map<AnnotationKey, std::optional<Intensity>>& predicted_intensity, double max_duration);

struct DyadTiming {
  double video_duration = 0.0;
};

inline constexpr double kMinOnsetDistance = 2.0;

// Non-smile windows: each starts at least kMinOnsetDistance from every smile
// onset of its dyad and fits inside the video. Durations are drawn as whole
// permutations of the smile-duration multiset, so count must be a multiple of
// the smile count and the mean durations agree exactly.
std::vector<InstanceWindow> sample_nonsmile_windows(const std::vector<SmileAnnotation>& smiles,
                                                    const std::map<std::string, DyadTiming>& dyads,
                                                    std::size_t count, std::uint64_t seed);

// Feasible start intervals [lo, hi] for a window of the given duration.
std::vector<std::pair<double, double>> feasible_starts(const std::vector<double>& onsets, double video_duration,
                                                       double duration);

// Ratios are normalized; val/test get floor(n * r) (at least one each) and the
// remainder goes to train.
DatasetSplit split_by_dyad(std::vector<std::string> dyads, std::array<double, 3> ratios, std::uint64_t seed);

inline constexpr std::array<double, 3> kPaperSplitRatios{75.0, 15.0, 15.0};

}  // namespace bcsmile::corpus
