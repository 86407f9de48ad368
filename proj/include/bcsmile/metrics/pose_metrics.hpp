#pragma once

#include <array>
#include <cstddef>
#include <map>

#include "bcsmile/landmarks/landmarks.hpp"

namespace bcsmile::metrics {

inline constexpr std::array<double, 2> kDefaultSigmas{0.1, 0.2};

// Mean Euclidean landmark distance: averaged over the k landmarks of a
// frame, then uniformly over frames.
double ape(const landmarks::LandmarkSequence& pred, const landmarks::LandmarkSequence& gt);

// Fraction of (frame, landmark) pairs within sigma; a distance equal to sigma
// counts as correct.
double pck(const landmarks::LandmarkSequence& pred, const landmarks::LandmarkSequence& gt, double sigma);

struct PoseErrorReport {
  double ape = 0.0;
  std::map<double, double> pck_by_sigma;
  double pck_mean = 0.0;
  std::size_t k = 0;
  std::size_t n_frames = 0;
};

PoseErrorReport evaluate_pose(const landmarks::LandmarkSequence& pred, const landmarks::LandmarkSequence& gt,
                              std::span<const double> sigmas = kDefaultSigmas);

}  // namespace bcsmile::metrics
