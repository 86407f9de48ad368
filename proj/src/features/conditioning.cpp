#include <cmath>

#include "bcsmile/error.hpp"
#include "bcsmile/features/features.hpp"

namespace bcsmile::features {

TrimmedTurn trim_speaker_turn_to_onset(const corpus::TurnSegment& turn, double onset) {
  if (onset <= turn.start) {
    throw Error("turn '" + turn.turn_id + "' starts at " + std::to_string(turn.start) +
                " s, not before the onset " + std::to_string(onset) + " s");
  }
  TrimmedTurn out;
  out.turn = turn;
  out.turn.words.clear();
  for (const auto& w : turn.words) {
    if (w.end <= onset) out.turn.words.push_back(w);
  }
  out.turn.end = std::min(turn.end, onset);
  out.audio_start = turn.start;
  out.audio_end = out.turn.end;
  return out;
}

std::string_view turn_feature_name(std::size_t index) {
  static constexpr std::array<std::string_view, kTurnFeatureCount> names{
      "mean_pitch", "pitch_range",      "rms_energy",       "word_count", "negations",     "comparisons",
      "interrogatives", "positive_emotion", "negative_emotion", "focus_past", "focus_present", "focus_future"};
  return names.at(index);
}

TurnFeatureRow flatten(const TurnFeatures& f) {
  TurnFeatureRow row{};
  row[kMeanPitch] = f.prosody.mean_pitch;
  row[kPitchRange] = f.prosody.pitch_range;
  row[kRmsEnergy] = f.prosody.rms_energy;
  row[kWordCount] = f.lexical.word_count;
  for (std::size_t c = 0; c < 8; ++c) row[kNegations + c] = f.lexical.categories[c];
  return row;
}

ZScoreParams zscore_fit(const std::vector<std::vector<double>>& rows, std::span<const std::size_t> fit_rows) {
  if (fit_rows.empty()) throw Error("z-score fit needs at least one training row");
  const std::size_t dims = rows.at(fit_rows[0]).size();
  ZScoreParams p;
  p.mean.assign(dims, 0.0);
  p.stddev.assign(dims, 0.0);
  p.constant.assign(dims, false);
  const auto n = static_cast<double>(fit_rows.size());
  for (std::size_t i : fit_rows) {
    if (rows.at(i).size() != dims) throw Error("z-score fit: ragged feature rows");
    for (std::size_t d = 0; d < dims; ++d) p.mean[d] += rows[i][d];
  }
  for (auto& m : p.mean) m /= n;
  for (std::size_t i : fit_rows) {
    for (std::size_t d = 0; d < dims; ++d) {
      const double e = rows[i][d] - p.mean[d];
      p.stddev[d] += e * e;
    }
  }
  for (std::size_t d = 0; d < dims; ++d) {
    p.stddev[d] = std::sqrt(p.stddev[d] / n);
    p.constant[d] = !(p.stddev[d] > 1e-12 * std::max(1.0, std::abs(p.mean[d])));
  }
  return p;
}

std::vector<double> zscore_apply(const ZScoreParams& params, std::span<const double> row) {
  if (row.size() != params.mean.size()) throw Error("z-score apply: row size mismatch");
  std::vector<double> out(row.size());
  for (std::size_t d = 0; d < row.size(); ++d) {
    out[d] = params.constant[d] ? 0.0 : (row[d] - params.mean[d]) / params.stddev[d];
  }
  return out;
}

ConditioningVector build_conditioning_vector(corpus::Sex speaker_sex, const TurnFeatureRow& speaker_z,
                                             const TurnFeatureRow& listener_z) {
  ConditioningVector v;
  v.values = {speaker_sex == corpus::Sex::female ? 1.0 : 0.0,
              speaker_z[kNegations],
              speaker_z[kRmsEnergy],
              listener_z[kWordCount],
              listener_z[kComparisons],
              listener_z[kMeanPitch]};
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    if (std::isnan(v.values[i])) {
      throw Error("conditioning vector: missing feature '" + std::string(kConditioningNames[i]) + "'");
    }
  }
  return v;
}

}  // namespace bcsmile::features
