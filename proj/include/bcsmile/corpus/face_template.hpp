#pragma once

#include "bcsmile/landmarks/landmarks.hpp"

namespace bcsmile::corpus {

// Frontal 68-point face in template units (outer eye corners 1.2 apart,
// origin near the nose bridge, y down).
landmarks::LandmarkFrame face_template_68();

// Per-point displacement of a full-strength smile (lip corners out and up,
// cheeks raised, lower lids lifted).
landmarks::LandmarkFrame smile_pattern_68();

// Per-point displacement of a fully open jaw while talking.
landmarks::LandmarkFrame talk_pattern_68();

}  // namespace bcsmile::corpus
