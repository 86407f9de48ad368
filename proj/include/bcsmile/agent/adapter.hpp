#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "bcsmile/landmarks/landmarks.hpp"

namespace bcsmile::agent {

struct FacialParamFrame {
  double mouth_smile_left = 0.5;
  double mouth_smile_right = 0.5;
  double brow_up_left = 0.5;
  double brow_up_right = 0.5;
  bool operator==(const FacialParamFrame&) const = default;
};

struct SmileCommand {
  FacialParamFrame params;  // at the widest-smile frame
  double duration = 0.0;    // seconds
  double onset = 0.0;       // seconds into the dialogue
  bool operator==(const SmileCommand&) const = default;
};

// argmax over frames of |x(right corner) - x(left corner)|; ties go to the
// earliest frame.
std::size_t widest_smile_frame(const landmarks::LandmarkSequence& seq, const landmarks::LandmarkIndexMap& map);

struct AdapterResult {
  std::vector<FacialParamFrame> frames;
  SmileCommand command;
  std::size_t widest_frame = 0;
  // Per parameter (mouth left, mouth right, brow left, brow right): no motion,
  // value held at 0.5.
  std::array<bool, 4> neutral{};
};

// Lip corners: cumulative outward horizontal displacement from frame 0; brows:
// cumulative upward displacement of the brow mean. Each is min-max normalized
// over the sequence. Image-left landmarks drive the *_LEFT parameters.
AdapterResult landmarks_to_params(const landmarks::LandmarkSequence& seq, const landmarks::LandmarkIndexMap& map,
                                  double onset = 0.0);

// {"type":"smile","onset_s":..,"duration_s":..,"params":{"MOUTH_SMILE_LEFT":..,...}}
std::string to_json(const SmileCommand& cmd);
SmileCommand parse_command(const std::string& json_text);

}  // namespace bcsmile::agent
