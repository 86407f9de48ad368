#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace bcsmile::landmarks {

// K points stored interleaved as x0, y0, x1, y1, ...
struct LandmarkFrame {
  std::vector<double> xy;

  std::size_t count() const { return xy.size() / 2; }
  double x(std::size_t i) const { return xy[2 * i]; }
  double y(std::size_t i) const { return xy[2 * i + 1]; }
  bool operator==(const LandmarkFrame&) const = default;
};

struct LandmarkSequence {
  std::vector<LandmarkFrame> frames;
  double fps = 25.0;
  double t0 = 0.0;

  std::size_t size() const { return frames.size(); }
  std::size_t landmark_count() const { return frames.empty() ? 0 : frames.front().count(); }
};

// Throws if empty, K varies, fps <= 0 or any coordinate is non-finite.
void validate(const LandmarkSequence& seq);

// Named landmark indices for the default 68-point layout.
struct LandmarkIndexMap {
  std::size_t lip_corner_left = 48;
  std::size_t lip_corner_right = 54;
  std::vector<std::size_t> brow_left{17, 18, 19, 20, 21};
  std::vector<std::size_t> brow_right{22, 23, 24, 25, 26};
  // Eye corners and nose bridge: rigid under facial expression.
  std::vector<std::size_t> stable_subset{27, 28, 29, 30, 36, 39, 42, 45};
};

struct MeanFace {
  LandmarkFrame points;
  std::vector<std::size_t> stable_subset;
};

// Uniform scale + rotation + translation: x' = a x - b y + tx, y' = b x + a y + ty.
struct Similarity {
  double a = 1.0;
  double b = 0.0;
  double tx = 0.0;
  double ty = 0.0;

  LandmarkFrame apply(const LandmarkFrame& f) const;
};

struct NormalizationParams {
  std::vector<double> min;
  std::vector<double> max;
  std::vector<bool> constant;
};

struct DisplacementSequence {
  std::vector<std::vector<double>> deltas;  // each 2K
  std::optional<NormalizationParams> normalization;

  std::size_t size() const { return deltas.size(); }
  std::size_t dims() const { return deltas.empty() ? 0 : deltas.front().size(); }
};

// Pointwise mean over every frame of every sequence.
MeanFace compute_mean_face(std::span<const LandmarkSequence> sequences, std::vector<std::size_t> stable_subset);

// Mean face moved to its stable-subset centroid and scaled to a unit distance
// between the two given points (outer eye corners by default), so aligned
// coordinates are in inter-ocular units.
MeanFace canonicalize(const MeanFace& mean, std::size_t left_point = 36, std::size_t right_point = 45);

// Least-squares similarity taking src onto dst over the given indices.
Similarity fit_similarity(const LandmarkFrame& src, const LandmarkFrame& dst, std::span<const std::size_t> subset);

// Sum of squared distances over the subset.
double subset_residual(const LandmarkFrame& a, const LandmarkFrame& b, std::span<const std::size_t> subset);

LandmarkFrame align_frame(const LandmarkFrame& frame, const MeanFace& mean);
LandmarkSequence align_to_mean_face(const LandmarkSequence& seq, const MeanFace& mean);

// Keeps frames 0, factor, 2 * factor, ...
LandmarkSequence downsample(const LandmarkSequence& seq, int factor);

DisplacementSequence to_displacements(const LandmarkSequence& seq);

// Per-dimension min-max to [0, 1]; constant dimensions map to 0.5.
DisplacementSequence minmax_normalize(const DisplacementSequence& disp);
DisplacementSequence denormalize(const DisplacementSequence& disp);

// Integrates denormalized deltas from last_frame; returns deltas + 1 frames.
LandmarkSequence reconstruct(const LandmarkFrame& last_frame, const DisplacementSequence& disp, double fps = 25.0 / 3.0);

// CSV: frame_idx,t_s,x0,y0,...,x{K-1},y{K-1}
LandmarkSequence read_landmark_csv(const std::filesystem::path& path, std::size_t k, double fps);
void write_landmark_csv(const LandmarkSequence& seq, const std::filesystem::path& path);

}  // namespace bcsmile::landmarks
