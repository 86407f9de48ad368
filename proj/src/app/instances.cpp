#include "bcsmile/app/instances.hpp"

#include <fstream>
#include <sstream>

#include "bcsmile/error.hpp"

namespace bcsmile::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json embedding_json(const seq2seq::EmbeddingSequence& e) {
  return json{{"dim", e.dim}, {"span_start", e.span_start}, {"span_end", e.span_end}, {"values", e.values}};
}

seq2seq::EmbeddingSequence embedding_from(const json& j) {
  seq2seq::EmbeddingSequence e;
  e.dim = j.at("dim").get<std::size_t>();
  e.span_start = j.at("span_start").get<double>();
  e.span_end = j.at("span_end").get<double>();
  e.values = j.at("values").get<std::vector<double>>();
  if (e.dim == 0 || e.values.size() % e.dim != 0) throw Error("embedding: value count is not a multiple of dim");
  return e;
}

json sequence_json(const landmarks::LandmarkSequence& s) {
  json frames = json::array();
  for (const auto& f : s.frames) frames.push_back(f.xy);
  return json{{"fps", s.fps}, {"t0", s.t0}, {"frames", frames}};
}

landmarks::LandmarkSequence sequence_from(const json& j) {
  landmarks::LandmarkSequence s;
  s.fps = j.at("fps").get<double>();
  s.t0 = j.at("t0").get<double>();
  for (const auto& f : j.at("frames")) s.frames.push_back(landmarks::LandmarkFrame{f.get<std::vector<double>>()});
  return s;
}

json row_json(const features::TurnFeatureRow& r) {
  json o = json::object();
  for (std::size_t i = 0; i < r.size(); ++i) o[std::string(features::turn_feature_name(i))] = r[i];
  return o;
}

features::TurnFeatureRow row_from(const json& j) {
  features::TurnFeatureRow r{};
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = j.at(std::string(features::turn_feature_name(i))).get<double>();
  return r;
}

template <class T, class Parse>
T parse_enum(const json& j, Parse parse, const char* what) {
  const auto s = j.get<std::string>();
  auto v = parse(s);
  if (!v) throw Error(std::string("unknown ") + what + " '" + s + "'");
  return *v;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

json to_json(const InstanceBundle& b) {
  const auto& in = b.inst;
  json j;
  j["id"] = in.id;
  j["dyad_id"] = in.dyad_id;
  j["split"] = b.split;
  j["kind"] = std::string(corpus::to_string(in.kind));
  j["intensity"] = in.intensity ? std::string(1, corpus::to_char(*in.intensity)) : std::string();
  j["duration"] = in.duration;
  j["listener_side"] = std::string(corpus::to_string(b.listener_side));
  j["window_start"] = b.window_start;
  j["window_end"] = b.window_end;
  j["speaker_sex"] = std::string(corpus::to_string(b.speaker_sex));
  j["listener_sex"] = std::string(corpus::to_string(b.listener_sex));
  j["relationship"] = std::string(corpus::to_string(b.relationship));
  j["speaker_turn"] = b.speaker_turn;
  j["listener_turn"] = b.listener_turn;
  j["features"] = json{{"speaker_raw", row_json(b.speaker_raw)},
                       {"listener_raw", row_json(b.listener_raw)},
                       {"speaker_z", row_json(b.speaker_z)},
                       {"listener_z", row_json(b.listener_z)}};
  j["conditioning"] = in.cond.values;
  j["speaker_embedding"] = embedding_json(in.speaker);
  j["listener_embedding"] = embedding_json(in.listener);
  j["target"] = in.target;
  j["last_frame"] = in.last_frame.xy;
  j["normalization"] = json{{"min", in.normalization.min},
                            {"max", in.normalization.max},
                            {"constant", in.normalization.constant}};
  j["ground_truth"] = sequence_json(in.ground_truth);
  return j;
}

InstanceBundle bundle_from_json(const json& j) {
  InstanceBundle b;
  auto& in = b.inst;
  try {
    in.id = j.at("id").get<std::string>();
    in.dyad_id = j.at("dyad_id").get<std::string>();
    b.split = j.at("split").get<std::string>();
    in.kind = j.at("kind").get<std::string>() == "smile" ? corpus::WindowKind::smile : corpus::WindowKind::nonsmile;
    const auto level = j.at("intensity").get<std::string>();
    if (!level.empty()) in.intensity = parse_enum<corpus::Intensity>(j.at("intensity"), corpus::parse_intensity, "intensity");
    in.duration = j.at("duration").get<double>();
    b.listener_side = parse_enum<corpus::Side>(j.at("listener_side"), corpus::parse_side, "side");
    b.window_start = j.at("window_start").get<double>();
    b.window_end = j.at("window_end").get<double>();
    b.speaker_sex = parse_enum<corpus::Sex>(j.at("speaker_sex"), corpus::parse_sex, "sex");
    b.listener_sex = parse_enum<corpus::Sex>(j.at("listener_sex"), corpus::parse_sex, "sex");
    b.relationship = parse_enum<corpus::Relationship>(j.at("relationship"), corpus::parse_relationship, "relationship");
    b.speaker_turn = j.at("speaker_turn").get<std::string>();
    b.listener_turn = j.at("listener_turn").get<std::string>();
    const auto& f = j.at("features");
    b.speaker_raw = row_from(f.at("speaker_raw"));
    b.listener_raw = row_from(f.at("listener_raw"));
    b.speaker_z = row_from(f.at("speaker_z"));
    b.listener_z = row_from(f.at("listener_z"));
    in.cond.values = j.at("conditioning").get<std::array<double, features::kConditioningSize>>();
    in.speaker = embedding_from(j.at("speaker_embedding"));
    in.listener = embedding_from(j.at("listener_embedding"));
    in.target = j.at("target").get<std::vector<std::vector<double>>>();
    in.last_frame.xy = j.at("last_frame").get<std::vector<double>>();
    const auto& n = j.at("normalization");
    in.normalization.min = n.at("min").get<std::vector<double>>();
    in.normalization.max = n.at("max").get<std::vector<double>>();
    in.normalization.constant = n.at("constant").get<std::vector<bool>>();
    in.ground_truth = sequence_from(j.at("ground_truth"));
  } catch (const json::exception& e) {
    throw Error("instance bundle" + (in.id.empty() ? std::string() : " " + in.id) + ": " + e.what());
  }
  return b;
}

void save_bundle(const InstanceBundle& b, const fs::path& path) { write_text(path, to_json(b).dump() + "\n"); }

InstanceBundle load_bundle(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
  return bundle_from_json(j);
}

void save_instance_dir(const std::vector<InstanceBundle>& bundles, const corpus::DatasetSplit& split,
                       const fs::path& dir) {
  fs::create_directories(dir / "instances");
  json index = json::array();
  for (const auto& b : bundles) {
    save_bundle(b, dir / "instances" / (b.inst.id + ".json"));
    index.push_back(b.inst.id);
  }
  write_text(dir / "index.json", index.dump(2) + "\n");
  json s{{"seed", split.seed}, {"train", split.train_dyads}, {"val", split.val_dyads}, {"test", split.test_dyads}};
  write_text(dir / "split.json", s.dump(2) + "\n");
}

std::vector<InstanceBundle> load_instance_dir(const fs::path& dir) {
  const fs::path index_path = dir / "index.json";
  if (!fs::exists(index_path)) throw Error(dir.string() + ": no index.json (run preprocess first)");
  json index;
  try {
    index = json::parse(read_text(index_path));
  } catch (const json::parse_error& e) {
    throw Error(index_path.string() + ": " + e.what());
  }
  std::vector<InstanceBundle> out;
  for (const auto& id : index) out.push_back(load_bundle(dir / "instances" / (id.get<std::string>() + ".json")));
  return out;
}

InstanceBundle load_instance(const fs::path& dir, const std::string& id) {
  const fs::path p = dir / "instances" / (id + ".json");
  if (!fs::exists(p)) throw Error("instance '" + id + "' not found under " + dir.string());
  return load_bundle(p);
}

SplitView split_view(const std::vector<InstanceBundle>& bundles) {
  SplitView v;
  for (const auto& b : bundles) {
    if (b.split == "train") v.train.push_back(&b.inst);
    else if (b.split == "val") v.val.push_back(&b.inst);
    else if (b.split == "test") v.test.push_back(&b.inst);
    else throw Error("instance " + b.inst.id + ": unknown split '" + b.split + "'");
  }
  return v;
}

}  // namespace bcsmile::app
