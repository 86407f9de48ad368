#include "bcsmile/corpus/records.hpp"

#include <cmath>

#include "bcsmile/error.hpp"

namespace bcsmile::corpus {

std::string_view to_string(Relationship r) {
  switch (r) {
    case Relationship::siblings: return "siblings";
    case Relationship::friends: return "friends";
    case Relationship::paternal: return "paternal";
    case Relationship::romantic: return "romantic";
  }
  return "?";
}

std::string_view to_string(Sex s) { return s == Sex::male ? "male" : "female"; }
std::string_view to_string(Side s) { return s == Side::left ? "left" : "right"; }
std::string_view to_string(WindowKind k) { return k == WindowKind::smile ? "smile" : "nonsmile"; }
char to_char(Intensity i) { return static_cast<char>('A' + score(i) - 1); }

std::optional<Relationship> parse_relationship(std::string_view s) {
  if (s == "siblings") return Relationship::siblings;
  if (s == "friends") return Relationship::friends;
  if (s == "paternal") return Relationship::paternal;
  if (s == "romantic") return Relationship::romantic;
  return std::nullopt;
}

std::optional<Sex> parse_sex(std::string_view s) {
  if (s == "male") return Sex::male;
  if (s == "female") return Sex::female;
  return std::nullopt;
}

std::optional<Side> parse_side(std::string_view s) {
  if (s == "left") return Side::left;
  if (s == "right") return Side::right;
  return std::nullopt;
}

std::optional<Intensity> parse_intensity(std::string_view s) {
  if (s.size() != 1 || s[0] < 'A' || s[0] > 'E') return std::nullopt;
  return static_cast<Intensity>(s[0] - 'A' + 1);
}

void validate(const DyadRecord& r) {
  const std::string who = "dyad '" + r.dyad_id + "': ";
  if (r.dyad_id.empty()) throw Error("dyad record with empty dyad_id");
  if (!(r.video_fps > 0) || !std::isfinite(r.video_fps)) throw Error(who + "video_fps must be > 0");
  if (!(r.video_duration > 0) || !std::isfinite(r.video_duration)) throw Error(who + "video_duration must be > 0");
  if (r.left_person.person_id == r.right_person.person_id) throw Error(who + "left and right person ids must differ");
  if (r.landmark_count < 1) throw Error(who + "landmark_count must be >= 1");
}

void validate(const TurnSegment& t) {
  const std::string who = "turn '" + t.turn_id + "' of dyad '" + t.dyad_id + "': ";
  if (!(t.start < t.end)) throw Error(who + "start must precede end");
  double prev = t.start;
  for (const auto& w : t.words) {
    if (w.start < t.start || w.end > t.end || w.start > w.end) {
      throw Error(who + "word '" + w.token + "' lies outside the turn");
    }
    if (w.start < prev) throw Error(who + "word intervals must be non-decreasing");
    prev = w.start;
  }
}

}  // namespace bcsmile::corpus
