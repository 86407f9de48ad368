#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "bcsmile/corpus/corpus.hpp"
#include "bcsmile/error.hpp"
#include "bcsmile/io/csv.hpp"

namespace bcsmile::corpus {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

struct FieldReader {
  const std::string& source;
  std::string path;

  const json& get(const json& obj, const std::string& key) const {
    if (!obj.is_object() || !obj.contains(key)) throw ParseError(source, 0, path + "." + key, "missing");
    return obj.at(key);
  }
  std::string str(const json& obj, const std::string& key) const {
    const json& v = get(obj, key);
    if (!v.is_string()) throw ParseError(source, 0, path + "." + key, "expected string");
    return v.get<std::string>();
  }
  double num(const json& obj, const std::string& key) const {
    const json& v = get(obj, key);
    if (!v.is_number()) throw ParseError(source, 0, path + "." + key, "expected number");
    return v.get<double>();
  }
};

fs::path resolve(const fs::path& base, const std::string& rel) {
  if (rel.empty()) return {};
  fs::path p(rel);
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

std::string relative_to(const fs::path& p, const fs::path& base) {
  if (p.empty()) return "";
  auto rel = p.lexically_relative(base);
  return (rel.empty() ? p : rel).generic_string();
}

}  // namespace

ManifestLoad parse_manifest(const std::string& text, const fs::path& base_dir, const std::string& source,
                            bool check_media) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source, line_of(text, e.byte), "<document>", e.what());
  }
  if (!doc.is_array()) throw ParseError(source, 1, "<document>", "top level must be an array of dyads");

  ManifestLoad out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& d = doc[i];
    FieldReader rd{source, "[" + std::to_string(i) + "]"};
    DyadRecord r;
    r.dyad_id = rd.str(d, "dyad_id");
    rd.path = "[" + std::to_string(i) + "](" + r.dyad_id + ")";
    const std::string rel = rd.str(d, "relationship");
    auto relationship = parse_relationship(rel);
    if (!relationship) throw ParseError(source, 0, rd.path + ".relationship", "unknown relationship '" + rel + "'");
    r.relationship = *relationship;
    r.video_fps = rd.num(d, "video_fps");
    r.video_duration = rd.num(d, "video_duration_s");
    r.landmark_count = d.contains("landmark_count") ? static_cast<int>(rd.num(d, "landmark_count")) : 68;

    std::string rejection;
    for (Side side : {Side::left, Side::right}) {
      const std::string key(to_string(side));
      const json& sd = rd.get(d, key);
      FieldReader srd{source, rd.path + "." + key};
      PersonMeta pm;
      pm.person_id = srd.str(sd, "person_id");
      const json& sex = srd.get(sd, "sex");
      auto parsed = sex.is_string() ? parse_sex(sex.get<std::string>()) : std::nullopt;
      if (!parsed) {
        rejection = r.dyad_id + ": sex of " + key + " person unknown";
      } else {
        pm.sex = *parsed;
      }
      SideMedia m;
      m.audio = resolve(base_dir, srd.str(sd, "audio"));
      m.landmarks = resolve(base_dir, srd.str(sd, "landmarks"));
      m.transcript = resolve(base_dir, srd.str(sd, "transcript"));
      if (sd.contains("embeddings")) m.embeddings = resolve(base_dir, srd.str(sd, "embeddings"));
      (side == Side::left ? r.left_person : r.right_person) = pm;
      (side == Side::left ? r.left_media : r.right_media) = m;
    }
    if (!rejection.empty()) {
      out.rejected.push_back(rejection);
      continue;
    }
    validate(r);
    if (check_media) {
      for (Side side : {Side::left, Side::right}) {
        const SideMedia& m = r.media(side);
        for (const fs::path* p : {&m.audio, &m.landmarks, &m.transcript}) {
          if (!fs::exists(*p)) throw Error("dyad '" + r.dyad_id + "': missing media file " + p->string());
        }
        if (!m.embeddings.empty() && !fs::is_directory(m.embeddings)) {
          throw Error("dyad '" + r.dyad_id + "': missing embeddings directory " + m.embeddings.string());
        }
      }
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

ManifestLoad load_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.parent_path(), path.string(), true);
}

void save_manifest(const std::vector<DyadRecord>& records, const fs::path& path) {
  const fs::path base = path.parent_path();
  json doc = json::array();
  for (const auto& r : records) {
    json d;
    d["dyad_id"] = r.dyad_id;
    d["relationship"] = to_string(r.relationship);
    d["video_fps"] = r.video_fps;
    d["video_duration_s"] = r.video_duration;
    d["landmark_count"] = r.landmark_count;
    for (Side side : {Side::left, Side::right}) {
      const PersonMeta& p = r.person(side);
      const SideMedia& m = r.media(side);
      json s;
      s["person_id"] = p.person_id;
      s["sex"] = to_string(p.sex);
      s["audio"] = relative_to(m.audio, base);
      s["landmarks"] = relative_to(m.landmarks, base);
      s["transcript"] = relative_to(m.transcript, base);
      if (!m.embeddings.empty()) s["embeddings"] = relative_to(m.embeddings, base);
      d[std::string(to_string(side))] = s;
    }
    doc.push_back(d);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

std::vector<SmileAnnotation> load_annotations(const fs::path& path) {
  const auto table = io::read_csv(path);
  io::expect_header(table, {"dyad_id", "listener_side", "onset_s", "offset_s", "intensity"});
  std::vector<SmileAnnotation> out;
  out.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    SmileAnnotation a;
    a.dyad_id = table.text(i, 0);
    auto side = parse_side(table.text(i, 1));
    if (!side) throw ParseError(table.source, table.lines[i], "listener_side", "expected left|right");
    a.listener_side = *side;
    a.onset = table.number(i, 2);
    a.offset = table.number(i, 3);
    const std::string& level = table.text(i, 4);
    if (!level.empty()) {
      a.intensity = parse_intensity(level);
      if (!a.intensity) throw ParseError(table.source, table.lines[i], "intensity", "expected A-E or empty");
    }
    if (!(a.onset >= 0 && a.onset < a.offset)) {
      throw ParseError(table.source, table.lines[i], "onset_s", "need 0 <= onset < offset");
    }
    out.push_back(std::move(a));
  }
  return out;
}

void save_annotations(const std::vector<SmileAnnotation>& annotations, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "dyad_id,listener_side,onset_s,offset_s,intensity\n";
  for (const auto& a : annotations) {
    out << io::escape_field(a.dyad_id) << ',' << to_string(a.listener_side) << ',' << io::format_number(a.onset)
        << ',' << io::format_number(a.offset) << ',';
    if (a.intensity) out << to_char(*a.intensity);
    out << '\n';
  }
}

std::vector<TurnSegment> load_turns(const fs::path& path, const std::string& dyad_id, Side side) {
  const auto table = io::read_csv(path);
  io::expect_header(table, {"turn_id", "start_s", "end_s", "token", "word_start_s", "word_end_s"});
  std::vector<TurnSegment> turns;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const std::string& id = table.text(i, 0);
    auto [it, inserted] = index.try_emplace(id, turns.size());
    if (inserted) {
      TurnSegment t;
      t.dyad_id = dyad_id;
      t.side = side;
      t.turn_id = id;
      t.start = table.number(i, 1);
      t.end = table.number(i, 2);
      turns.push_back(std::move(t));
    }
    TurnSegment& t = turns[it->second];
    // A turn without words is written as a single row with an empty token.
    if (table.text(i, 3).empty()) continue;
    t.words.push_back(Word{table.text(i, 3), table.number(i, 4), table.number(i, 5)});
  }
  for (const auto& t : turns) validate(t);
  std::stable_sort(turns.begin(), turns.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  return turns;
}

void save_turns(const std::vector<TurnSegment>& turns, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "turn_id,start_s,end_s,token,word_start_s,word_end_s\n";
  for (const auto& t : turns) {
    const std::string head =
        io::escape_field(t.turn_id) + ',' + io::format_number(t.start) + ',' + io::format_number(t.end) + ',';
    if (t.words.empty()) {
      out << head << ",,\n";
      continue;
    }
    for (const auto& w : t.words) {
      out << head << io::escape_field(w.token) << ',' << io::format_number(w.start) << ','
          << io::format_number(w.end) << '\n';
    }
  }
}

}  // namespace bcsmile::corpus
