#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bcsmile::corpus {

enum class Relationship { siblings, friends, paternal, romantic };
enum class Sex { male, female };
enum class Side { left, right };
// Ordinal smile amplitude, A = trace .. E = maximum. Scores 1..5.
enum class Intensity { A = 1, B = 2, C = 3, D = 4, E = 5 };
enum class WindowKind { smile, nonsmile };

std::string_view to_string(Relationship r);
std::string_view to_string(Sex s);
std::string_view to_string(Side s);
std::string_view to_string(WindowKind k);
char to_char(Intensity i);

std::optional<Relationship> parse_relationship(std::string_view s);
std::optional<Sex> parse_sex(std::string_view s);
std::optional<Side> parse_side(std::string_view s);
std::optional<Intensity> parse_intensity(std::string_view s);

inline Side other(Side s) { return s == Side::left ? Side::right : Side::left; }
inline int score(Intensity i) { return static_cast<int>(i); }

struct PersonMeta {
  std::string person_id;
  Sex sex = Sex::male;
  bool operator==(const PersonMeta&) const = default;
};

// Per-side media; paths are absolute once loaded.
struct SideMedia {
  std::filesystem::path audio;
  std::filesystem::path landmarks;
  std::filesystem::path transcript;
  std::filesystem::path embeddings;  // directory of per-turn files; empty if absent
  bool operator==(const SideMedia&) const = default;
};

struct DyadRecord {
  std::string dyad_id;
  Relationship relationship = Relationship::friends;
  PersonMeta left_person;
  PersonMeta right_person;
  double video_fps = 25.0;
  double video_duration = 0.0;
  int landmark_count = 68;
  SideMedia left_media;
  SideMedia right_media;

  const PersonMeta& person(Side s) const { return s == Side::left ? left_person : right_person; }
  const SideMedia& media(Side s) const { return s == Side::left ? left_media : right_media; }
  bool operator==(const DyadRecord&) const = default;
};

// Throws Error describing the first violated invariant.
void validate(const DyadRecord& r);

struct SmileAnnotation {
  std::string dyad_id;
  Side listener_side = Side::left;
  double onset = 0.0;
  double offset = 0.0;
  std::optional<Intensity> intensity;

  double duration() const { return offset - onset; }
  bool operator==(const SmileAnnotation&) const = default;
};

struct Word {
  std::string token;
  double start = 0.0;
  double end = 0.0;
  bool operator==(const Word&) const = default;
};

struct TurnSegment {
  std::string dyad_id;
  Side side = Side::left;
  std::string turn_id;
  double start = 0.0;
  double end = 0.0;
  std::vector<Word> words;
  bool operator==(const TurnSegment&) const = default;
};

void validate(const TurnSegment& t);

struct InstanceWindow {
  std::string dyad_id;
  Side listener_side = Side::left;
  WindowKind kind = WindowKind::smile;
  double window_start = 0.0;
  double window_end = 0.0;
  std::optional<Intensity> intensity;
  std::string speaker_turn_ref;
  std::string listener_turn_ref;

  double duration() const { return window_end - window_start; }
};

struct DatasetSplit {
  std::vector<std::string> train_dyads;
  std::vector<std::string> val_dyads;
  std::vector<std::string> test_dyads;
  std::uint64_t seed = 0;
};

}  // namespace bcsmile::corpus
