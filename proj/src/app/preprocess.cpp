#include "bcsmile/app/preprocess.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include "bcsmile/error.hpp"
#include "bcsmile/io/csv.hpp"
#include "bcsmile/io/wav.hpp"
#include "bcsmile/landmarks/landmarks.hpp"
#include "bcsmile/rng.hpp"

namespace bcsmile::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* to_string(EmbeddingSource s) {
  switch (s) {
    case EmbeddingSource::automatic: return "auto";
    case EmbeddingSource::file: return "file";
    case EmbeddingSource::synthetic: return "synthetic";
  }
  return "auto";
}

EmbeddingSource parse_source(const std::string& s) {
  if (s == "auto") return EmbeddingSource::automatic;
  if (s == "file") return EmbeddingSource::file;
  if (s == "synthetic") return EmbeddingSource::synthetic;
  throw Error("unknown embedding source '" + s + "' (auto, file, synthetic)");
}

struct SideData {
  landmarks::LandmarkSequence track;
  io::Waveform audio;
  std::vector<corpus::TurnSegment> turns;
  fs::path embeddings;
};

struct DyadData {
  const corpus::DyadRecord* record = nullptr;
  SideData left;
  SideData right;
  const SideData& side(corpus::Side s) const { return s == corpus::Side::left ? left : right; }
};

// Latest turn starting before t.
const corpus::TurnSegment* turn_before(const std::vector<corpus::TurnSegment>& turns, double t) {
  const corpus::TurnSegment* best = nullptr;
  for (const auto& turn : turns) {
    if (turn.start < t && (!best || turn.start > best->start)) best = &turn;
  }
  return best;
}

struct TurnResult {
  features::TurnFeatureRow row{};
  seq2seq::EmbeddingSequence embedding;
  std::string warning;
};

TurnResult process_turn(const corpus::TurnSegment& turn, double t, const SideData& side,
                        const features::Lexicons& lexicons, const PreprocessOptions& opt, features::Role role) {
  const auto trimmed = features::trim_speaker_turn_to_onset(turn, t);
  const auto samples = side.audio.slice(trimmed.audio_start, trimmed.audio_end);
  features::TurnFeatures f;
  f.role = role;
  f.turn_ref = turn.turn_id;
  f.prosody = features::extract_prosody(samples, side.audio.sample_rate);
  std::vector<std::string> tokens;
  for (const auto& w : trimmed.turn.words) tokens.push_back(w.token);
  f.lexical = features::count_lexical(tokens, lexicons);

  seq2seq::TurnAudio audio;
  audio.samples = samples;
  audio.sample_rate = side.audio.sample_rate;
  audio.turn_start = turn.start;
  audio.span_start = trimmed.audio_start;
  audio.span_end = trimmed.audio_end;
  const fs::path file = side.embeddings.empty() ? fs::path() : side.embeddings / (turn.turn_id + ".emb");
  bool use_file = false;
  switch (opt.embeddings) {
    case EmbeddingSource::file:
      if (file.empty() || !fs::exists(file)) throw Error("no embedding file for turn " + turn.turn_id);
      use_file = true;
      break;
    case EmbeddingSource::automatic: use_file = !file.empty() && fs::exists(file); break;
    case EmbeddingSource::synthetic: break;
  }
  TurnResult r;
  r.row = features::flatten(f);
  seq2seq::EmbedResult e;
  if (use_file) {
    audio.precomputed = file;
    e = seq2seq::embed_audio(seq2seq::FileEmbeddingProvider(opt.embedding_dim), audio);
  } else {
    e = seq2seq::embed_audio(seq2seq::SyntheticEmbeddingProvider(opt.embedding_dim), audio);
  }
  r.embedding = std::move(e.sequence);
  r.warning = e.warning;
  return r;
}

std::string format_id(const std::string& dyad, char kind, std::size_t n) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_%c%03zu", kind, n);
  return dyad + buf;
}

template <class F>
void parallel_for(std::size_t n, std::size_t jobs, F&& body) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& t : workers) t.join();
}

}  // namespace

json to_json(const PreprocessOptions& o) {
  json j{{"downsample", o.downsample},
         {"output_steps", o.output_steps},
         {"embedding_dim", o.embedding_dim},
         {"split_ratios", o.split_ratios},
         {"embeddings", to_string(o.embeddings)},
         {"max_duration", o.max_duration ? json(*o.max_duration) : json(nullptr)}};
  return j;
}

PreprocessOptions preprocess_options_from_json(const json& j, PreprocessOptions o) {
  if (!j.is_object()) throw Error("preprocess config: expected a JSON object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "downsample") o.downsample = v.get<int>();
      else if (key == "output_steps") o.output_steps = v.get<std::size_t>();
      else if (key == "embedding_dim") o.embedding_dim = v.get<std::size_t>();
      else if (key == "split_ratios") o.split_ratios = v.get<std::array<double, 3>>();
      else if (key == "embeddings") o.embeddings = parse_source(v.get<std::string>());
      else if (key == "max_duration") o.max_duration = v.is_null() ? std::nullopt : std::optional(v.get<double>());
      else throw Error("unknown key");
    } catch (const json::exception& e) {
      throw Error("preprocess config: field '" + key + "': " + e.what());
    } catch (const Error& e) {
      throw Error("preprocess config: field '" + key + "': " + e.what());
    }
  }
  return o;
}

std::vector<std::string> feature_csv_header() {
  std::vector<std::string> h{"id", "dyad_id", "split", "kind", "intensity", "duration_s"};
  for (const char* role : {"speaker", "listener"}) {
    for (std::size_t i = 0; i < features::kTurnFeatureCount; ++i)
      h.push_back(std::string(role) + "_" + std::string(features::turn_feature_name(i)));
  }
  for (auto name : features::kConditioningNames) h.emplace_back(name);
  return h;
}

PreprocessResult preprocess(const PreprocessOptions& opt) {
  if (opt.downsample < 1) throw Error("preprocess: downsample must be >= 1");
  if (opt.output_steps == 0) throw Error("preprocess: output_steps must be positive");
  PreprocessResult res;

  auto manifest = corpus::load_manifest(opt.manifest);
  res.rejected_records = manifest.rejected;
  if (manifest.records.empty()) throw Error("preprocess: manifest " + opt.manifest.string() + " has no usable dyads");
  std::map<std::string, const corpus::DyadRecord*> records;
  for (const auto& r : manifest.records) records[r.dyad_id] = &r;

  const fs::path ann_path = opt.annotations.empty() ? opt.manifest.parent_path() / "annotations.csv" : opt.annotations;
  auto annotations = corpus::load_annotations(ann_path);
  std::vector<corpus::SmileAnnotation> known;
  for (const auto& a : annotations) {
    if (records.count(a.dyad_id)) known.push_back(a);
    else res.warnings.push_back("annotation for unknown dyad " + a.dyad_id + " ignored");
  }
  res.annotations_in = known.size();

  // The annotated level stands in for the automatic intensity estimate.
  std::map<corpus::AnnotationKey, std::optional<corpus::Intensity>> predicted;
  for (const auto& a : known) predicted[corpus::key_of(a)] = a.intensity;
  res.max_duration = opt.max_duration ? *opt.max_duration : corpus::default_max_duration(known);
  auto smiles = corpus::filter_reliable_smiles(known, predicted, res.max_duration);
  if (smiles.empty()) throw Error("preprocess: no reliable smiles in " + ann_path.string());
  std::sort(smiles.begin(), smiles.end(), [](const auto& a, const auto& b) { return corpus::key_of(a) < corpus::key_of(b); });
  res.smiles_kept = smiles.size();

  std::map<std::string, corpus::DyadTiming> timing;
  for (const auto& [id, r] : records) timing[id] = corpus::DyadTiming{r->video_duration};
  auto nonsmiles = corpus::sample_nonsmile_windows(smiles, timing, smiles.size(), derive_seed(opt.seed, "nonsmile"));
  std::sort(nonsmiles.begin(), nonsmiles.end(), [](const auto& a, const auto& b) {
    return std::tie(a.dyad_id, a.window_start) < std::tie(b.dyad_id, b.window_start);
  });
  res.nonsmiles = nonsmiles.size();

  std::vector<std::string> dyad_ids;
  for (const auto& [id, r] : records) dyad_ids.push_back(id);
  res.split = corpus::split_by_dyad(dyad_ids, opt.split_ratios, derive_seed(opt.seed, "split"));
  std::map<std::string, std::string> split_of;
  for (const auto& d : res.split.train_dyads) split_of[d] = "train";
  for (const auto& d : res.split.val_dyads) split_of[d] = "val";
  for (const auto& d : res.split.test_dyads) split_of[d] = "test";

  // Every window, smiles first, each dyad in time order.
  std::vector<corpus::InstanceWindow> windows;
  std::map<std::string, std::size_t> n_smile, n_non;
  std::vector<std::string> ids;
  for (const auto& s : smiles) {
    corpus::InstanceWindow w;
    w.dyad_id = s.dyad_id;
    w.listener_side = s.listener_side;
    w.kind = corpus::WindowKind::smile;
    w.window_start = s.onset;
    w.window_end = s.offset;
    w.intensity = s.intensity;
    windows.push_back(w);
    ids.push_back(format_id(s.dyad_id, 's', n_smile[s.dyad_id]++));
  }
  for (const auto& w : nonsmiles) {
    windows.push_back(w);
    ids.push_back(format_id(w.dyad_id, 'n', n_non[w.dyad_id]++));
  }

  // Media for the dyads that have windows.
  std::map<std::string, DyadData> data;
  for (const auto& w : windows) data[w.dyad_id].record = records.at(w.dyad_id);
  const features::Lexicons lexicons = opt.lexicons.empty() ? features::default_lexicons() : features::load_lexicons(opt.lexicons);
  {
    std::vector<std::pair<DyadData*, corpus::Side>> sides;
    for (auto& [id, d] : data) {
      sides.emplace_back(&d, corpus::Side::left);
      sides.emplace_back(&d, corpus::Side::right);
    }
    std::vector<std::string> errors(sides.size());
    parallel_for(sides.size(), opt.jobs, [&](std::size_t i) {
      auto [d, s] = sides[i];
      const auto& rec = *d->record;
      const auto& media = rec.media(s);
      SideData& sd = s == corpus::Side::left ? d->left : d->right;
      try {
        sd.track = landmarks::read_landmark_csv(media.landmarks, static_cast<std::size_t>(rec.landmark_count),
                                                rec.video_fps);
        sd.audio = io::read_wav(media.audio);
        sd.turns = corpus::load_turns(media.transcript, rec.dyad_id, s);
        sd.embeddings = media.embeddings;
      } catch (const std::exception& e) {
        errors[i] = rec.dyad_id + " " + std::string(corpus::to_string(s)) + ": " + e.what();
      }
    });
    for (const auto& e : errors) {
      if (!e.empty()) throw Error("preprocess: " + e);
    }
  }

  // Mean face over the train dyads' tracks, in inter-ocular units.
  landmarks::MeanFace mean;
  {
    std::vector<landmarks::LandmarkSequence> tracks;
    for (const auto& [id, d] : data) {
      if (split_of.at(id) != "train") continue;
      tracks.push_back(d.left.track);
      tracks.push_back(d.right.track);
    }
    if (tracks.empty()) throw Error("preprocess: no train dyad has any smile");
    mean = landmarks::canonicalize(landmarks::compute_mean_face(tracks, landmarks::LandmarkIndexMap{}.stable_subset));
  }

  const std::size_t raw_frames = static_cast<std::size_t>(opt.downsample) * opt.output_steps + 1;
  std::vector<std::optional<InstanceBundle>> built(windows.size());
  std::vector<std::string> drop_reason(windows.size());
  std::vector<std::string> warn(windows.size());
  parallel_for(windows.size(), opt.jobs, [&](std::size_t i) {
    const auto& w = windows[i];
    const DyadData& d = data.at(w.dyad_id);
    const auto& rec = *d.record;
    const corpus::Side speaker_side = corpus::other(w.listener_side);
    try {
      InstanceBundle b;
      auto& in = b.inst;
      in.id = ids[i];
      in.dyad_id = w.dyad_id;
      in.kind = w.kind;
      in.intensity = w.intensity;
      in.duration = w.duration();
      b.split = split_of.at(w.dyad_id);
      b.listener_side = w.listener_side;
      b.window_start = w.window_start;
      b.window_end = w.window_end;
      b.speaker_sex = rec.person(speaker_side).sex;
      b.listener_sex = rec.person(w.listener_side).sex;
      b.relationship = rec.relationship;

      // Listener face from the window start.
      const auto& track = d.side(w.listener_side).track;
      const auto j0 = static_cast<std::size_t>(std::lround(w.window_start * rec.video_fps));
      if (j0 + raw_frames > track.size()) throw Error("landmark track ends before the window's first second");
      landmarks::LandmarkSequence raw;
      raw.fps = rec.video_fps;
      raw.t0 = static_cast<double>(j0) / rec.video_fps;
      raw.frames.assign(track.frames.begin() + static_cast<std::ptrdiff_t>(j0),
                        track.frames.begin() + static_cast<std::ptrdiff_t>(j0 + raw_frames));
      const auto ds = landmarks::downsample(landmarks::align_to_mean_face(raw, mean), opt.downsample);
      const auto disp = landmarks::minmax_normalize(landmarks::to_displacements(ds));
      in.target = disp.deltas;
      in.normalization = *disp.normalization;
      in.last_frame = ds.frames.front();
      in.ground_truth.fps = ds.fps;
      in.ground_truth.t0 = ds.t0 + 1.0 / ds.fps;
      in.ground_truth.frames.assign(ds.frames.begin() + 1, ds.frames.end());

      const auto* st = turn_before(d.side(speaker_side).turns, w.window_start);
      const auto* lt = turn_before(d.side(w.listener_side).turns, w.window_start);
      if (!st) throw Error("no speaker turn before the window");
      if (!lt) throw Error("no listener turn before the window");
      b.speaker_turn = st->turn_id;
      b.listener_turn = lt->turn_id;
      auto sp = process_turn(*st, w.window_start, d.side(speaker_side), lexicons, opt, features::Role::speaker);
      auto li = process_turn(*lt, w.window_start, d.side(w.listener_side), lexicons, opt, features::Role::listener);
      b.speaker_raw = sp.row;
      b.listener_raw = li.row;
      in.speaker = std::move(sp.embedding);
      in.listener = std::move(li.embedding);
      if (!sp.warning.empty()) warn[i] = in.id + ": speaker turn: " + sp.warning;
      if (!li.warning.empty()) warn[i] += (warn[i].empty() ? "" : "; ") + in.id + ": listener turn: " + li.warning;
      built[i] = std::move(b);
    } catch (const std::exception& e) {
      drop_reason[i] = ids[i] + ": " + e.what();
    }
  });
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (!drop_reason[i].empty()) res.dropped.push_back(drop_reason[i]);
    if (!warn[i].empty()) res.warnings.push_back(warn[i]);
    if (built[i]) res.bundles.push_back(std::move(*built[i]));
  }
  if (res.bundles.empty()) throw Error("preprocess: every instance was dropped");

  // z-scores with train statistics over the concatenated speaker + listener rows.
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> fit_rows;
  for (std::size_t i = 0; i < res.bundles.size(); ++i) {
    const auto& b = res.bundles[i];
    std::vector<double> r(b.speaker_raw.begin(), b.speaker_raw.end());
    r.insert(r.end(), b.listener_raw.begin(), b.listener_raw.end());
    rows.push_back(std::move(r));
    if (b.split == "train") fit_rows.push_back(i);
  }
  if (fit_rows.empty()) throw Error("preprocess: no train instances survived");
  const auto z = features::zscore_fit(rows, fit_rows);
  for (std::size_t i = 0; i < res.bundles.size(); ++i) {
    auto& b = res.bundles[i];
    const auto zr = features::zscore_apply(z, rows[i]);
    std::copy(zr.begin(), zr.begin() + features::kTurnFeatureCount, b.speaker_z.begin());
    std::copy(zr.begin() + features::kTurnFeatureCount, zr.end(), b.listener_z.begin());
    b.inst.cond = features::build_conditioning_vector(b.speaker_sex, b.speaker_z, b.listener_z);
  }
  return res;
}

void write_preprocess_outputs(const PreprocessResult& res, const fs::path& out_dir) {
  save_instance_dir(res.bundles, res.split, out_dir);

  std::ofstream csv(out_dir / "features.csv", std::ios::binary);
  if (!csv) throw Error("cannot write " + (out_dir / "features.csv").string());
  const auto header = feature_csv_header();
  for (std::size_t i = 0; i < header.size(); ++i) csv << (i ? "," : "") << header[i];
  csv << '\n';
  for (const auto& b : res.bundles) {
    const auto& in = b.inst;
    csv << in.id << ',' << in.dyad_id << ',' << b.split << ',' << corpus::to_string(in.kind) << ',';
    if (in.intensity) csv << corpus::to_char(*in.intensity);
    csv << ',' << io::format_number(in.duration);
    for (double v : b.speaker_raw) csv << ',' << io::format_number(v);
    for (double v : b.listener_raw) csv << ',' << io::format_number(v);
    for (double v : in.cond.values) csv << ',' << io::format_number(v);
    csv << '\n';
  }

  json report{{"annotations_in", res.annotations_in},
              {"smiles_kept", res.smiles_kept},
              {"nonsmiles", res.nonsmiles},
              {"instances", res.bundles.size()},
              {"max_duration", res.max_duration},
              {"rejected_records", res.rejected_records},
              {"dropped", res.dropped},
              {"warnings", res.warnings},
              {"split", {{"train", res.split.train_dyads}, {"val", res.split.val_dyads}, {"test", res.split.test_dyads}}}};
  std::ofstream rep(out_dir / "preprocess_report.json", std::ios::binary);
  rep << report.dump(2) << '\n';
}

}  // namespace bcsmile::app
