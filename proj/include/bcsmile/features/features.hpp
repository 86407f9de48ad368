#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bcsmile/corpus/records.hpp"

namespace bcsmile::features {

// ---- prosody ---------------------------------------------------------------

struct PitchConfig {
  double window_s = 0.025;
  double hop_s = 0.010;
  double voicing_threshold = 0.3;  // normalized autocorrelation peak
  double f_min = 60.0;
  double f_max = 400.0;
};

struct ProsodyFeatures {
  double mean_pitch = 0.0;   // Hz, 0 when nothing is voiced
  double pitch_range = 0.0;  // Hz
  double rms_energy = 0.0;
};

// Per-frame f0 in Hz, 0 for unvoiced frames.
std::vector<double> track_pitch(std::span<const double> samples, double sample_rate, const PitchConfig& cfg = {});

ProsodyFeatures extract_prosody(std::span<const double> samples, double sample_rate, const PitchConfig& cfg = {});

// ---- lexical ---------------------------------------------------------------

inline constexpr std::array<std::string_view, 8> kLexicalCategories{
    "negations",        "comparisons",      "interrogatives", "positive_emotion",
    "negative_emotion", "focus_past",       "focus_present",  "focus_future"};

struct LexicalFeatures {
  int word_count = 0;
  std::array<int, 8> categories{};  // indexed like kLexicalCategories

  int negations() const { return categories[0]; }
  int comparisons() const { return categories[1]; }
  int interrogatives() const { return categories[2]; }
};

using Lexicons = std::map<std::string, std::set<std::string>>;

// Small open seed lexicons for the eight categories.
const Lexicons& default_lexicons();
// JSON object {category: [words...]}; all eight categories are required.
Lexicons load_lexicons(const std::filesystem::path& path);
Lexicons parse_lexicons(const std::string& json_text);
void save_lexicons(const Lexicons& lexicons, const std::filesystem::path& path);

// Case-insensitive exact-token matching.
LexicalFeatures count_lexical(std::span<const std::string> tokens, const Lexicons& lexicons);

// ---- turns -----------------------------------------------------------------

struct TrimmedTurn {
  corpus::TurnSegment turn;
  double audio_start = 0.0;
  double audio_end = 0.0;
};

// Speaker activity up to the smile onset: words ending after onset are dropped.
TrimmedTurn trim_speaker_turn_to_onset(const corpus::TurnSegment& turn, double onset);

enum class Role { speaker, listener };

struct TurnFeatures {
  ProsodyFeatures prosody;
  LexicalFeatures lexical;
  Role role = Role::speaker;
  std::string turn_ref;
};

// Flat per-turn feature layout: 3 prosodic values then word count and the
// eight category counts.
inline constexpr std::size_t kTurnFeatureCount = 12;
using TurnFeatureRow = std::array<double, kTurnFeatureCount>;

enum TurnFeature : std::size_t {
  kMeanPitch = 0,
  kPitchRange,
  kRmsEnergy,
  kWordCount,
  kNegations,
  kComparisons,
  kInterrogatives,
  kPositiveEmotion,
  kNegativeEmotion,
  kFocusPast,
  kFocusPresent,
  kFocusFuture,
};

std::string_view turn_feature_name(std::size_t index);
TurnFeatureRow flatten(const TurnFeatures& f);

// ---- z-scoring -------------------------------------------------------------

struct ZScoreParams {
  std::vector<double> mean;
  std::vector<double> stddev;  // population
  std::vector<bool> constant;
};

// Statistics over the rows listed in fit_rows (the train split).
ZScoreParams zscore_fit(const std::vector<std::vector<double>>& rows, std::span<const std::size_t> fit_rows);
std::vector<double> zscore_apply(const ZScoreParams& params, std::span<const double> row);

// ---- conditioning vector ---------------------------------------------------

inline constexpr std::size_t kConditioningSize = 6;

// Fixed entry order.
inline constexpr std::array<std::string_view, kConditioningSize> kConditioningNames{
    "speaker_sex",           "speaker_negations_z",     "speaker_rms_z",
    "listener_word_count_z", "listener_comparisons_z", "listener_mean_pitch_z"};

struct ConditioningVector {
  std::array<double, kConditioningSize> values{};
  bool operator==(const ConditioningVector&) const = default;
};

// speaker_z / listener_z are z-scored turn rows; sex is encoded 0 = male, 1 = female.
// Throws if a required entry is NaN (missing).
ConditioningVector build_conditioning_vector(corpus::Sex speaker_sex, const TurnFeatureRow& speaker_z,
                                             const TurnFeatureRow& listener_z);

}  // namespace bcsmile::features
