#include "bcsmile/corpus/face_template.hpp"

#include <cmath>
#include <numbers>

namespace bcsmile::corpus {
namespace {

void set(landmarks::LandmarkFrame& f, std::size_t i, double x, double y) {
  f.xy[2 * i] = x;
  f.xy[2 * i + 1] = y;
}

landmarks::LandmarkFrame zeros() {
  landmarks::LandmarkFrame f;
  f.xy.assign(136, 0.0);
  return f;
}

}  // namespace

landmarks::LandmarkFrame face_template_68() {
  auto f = zeros();
  for (std::size_t i = 0; i <= 16; ++i) {
    const double phi = std::numbers::pi * static_cast<double>(i) / 16.0;
    set(f, i, -0.95 * std::cos(phi), -0.15 + 1.05 * std::sin(phi));
  }
  for (std::size_t j = 0; j < 5; ++j) {
    const double arch = 0.08 * std::sin(std::numbers::pi * static_cast<double>(j) / 4.0);
    set(f, 17 + j, -0.75 + 0.15 * static_cast<double>(j), -0.55 - arch);
    set(f, 22 + j, 0.15 + 0.15 * static_cast<double>(j), -0.55 - arch);
  }
  const double bridge[4] = {-0.38, -0.25, -0.12, 0.0};
  for (std::size_t j = 0; j < 4; ++j) set(f, 27 + j, 0.0, bridge[j]);
  const double nx[5] = {-0.18, -0.09, 0.0, 0.09, 0.18};
  const double ny[5] = {0.10, 0.13, 0.15, 0.13, 0.10};
  for (std::size_t j = 0; j < 5; ++j) set(f, 31 + j, nx[j], ny[j]);

  set(f, 36, -0.60, -0.35);
  set(f, 37, -0.47, -0.41);
  set(f, 38, -0.33, -0.41);
  set(f, 39, -0.20, -0.35);
  set(f, 40, -0.33, -0.30);
  set(f, 41, -0.47, -0.30);
  set(f, 42, 0.20, -0.35);
  set(f, 43, 0.33, -0.41);
  set(f, 44, 0.47, -0.41);
  set(f, 45, 0.60, -0.35);
  set(f, 46, 0.47, -0.30);
  set(f, 47, 0.33, -0.30);

  const double ox[12] = {-0.35, -0.22, -0.08, 0.0, 0.08, 0.22, 0.35, 0.22, 0.10, 0.0, -0.10, -0.22};
  const double oy[12] = {0.45, 0.38, 0.35, 0.36, 0.35, 0.38, 0.45, 0.55, 0.59, 0.60, 0.59, 0.55};
  for (std::size_t j = 0; j < 12; ++j) set(f, 48 + j, ox[j], oy[j]);
  const double ix[8] = {-0.30, -0.10, 0.0, 0.10, 0.30, 0.10, 0.0, -0.10};
  const double iy[8] = {0.45, 0.42, 0.42, 0.42, 0.45, 0.48, 0.48, 0.48};
  for (std::size_t j = 0; j < 8; ++j) set(f, 60 + j, ix[j], iy[j]);
  return f;
}

landmarks::LandmarkFrame smile_pattern_68() {
  auto f = zeros();
  set(f, 48, -0.10, -0.06);
  set(f, 54, 0.10, -0.06);
  set(f, 49, -0.05, -0.04);
  set(f, 53, 0.05, -0.04);
  set(f, 50, -0.02, -0.02);
  set(f, 52, 0.02, -0.02);
  set(f, 51, 0.0, -0.01);
  set(f, 59, -0.06, -0.02);
  set(f, 55, 0.06, -0.02);
  set(f, 58, -0.03, 0.0);
  set(f, 56, 0.03, 0.0);
  set(f, 57, 0.0, 0.01);
  set(f, 60, -0.09, -0.05);
  set(f, 64, 0.09, -0.05);
  set(f, 61, -0.03, -0.02);
  set(f, 63, 0.03, -0.02);
  set(f, 65, 0.03, 0.0);
  set(f, 67, -0.03, 0.0);
  for (std::size_t i : {3, 4, 5}) set(f, i, -0.02, -0.01);
  for (std::size_t i : {11, 12, 13}) set(f, i, 0.02, -0.01);
  for (std::size_t i : {40, 41, 46, 47}) set(f, i, 0.0, -0.015);
  set(f, 31, -0.01, -0.01);
  set(f, 35, 0.01, -0.01);
  return f;
}

landmarks::LandmarkFrame talk_pattern_68() {
  auto f = zeros();
  for (std::size_t i = 5; i <= 11; ++i) {
    const double w = 1.0 - std::abs(static_cast<double>(i) - 8.0) / 4.0;
    set(f, i, 0.0, 0.06 * w);
  }
  for (std::size_t i : {55, 56, 57, 58, 59}) set(f, i, 0.0, 0.06);
  for (std::size_t i : {65, 66, 67}) set(f, i, 0.0, 0.05);
  return f;
}

}  // namespace bcsmile::corpus
