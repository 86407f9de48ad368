#include "bcsmile/corpus/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "bcsmile/corpus/corpus.hpp"
#include "bcsmile/corpus/face_template.hpp"
#include "bcsmile/error.hpp"
#include "bcsmile/io/csv.hpp"
#include "bcsmile/io/wav.hpp"
#include "bcsmile/landmarks/landmarks.hpp"
#include "bcsmile/rng.hpp"
#include "bcsmile/seq2seq/embedding.hpp"
#include "bcsmile/stats/distributions.hpp"

namespace bcsmile::corpus {

namespace fs = std::filesystem;

nlohmann::json to_json(const SyntheticSpec& s) {
  return nlohmann::json{{"n_dyads", s.n_dyads},
                        {"smiles_per_dyad", s.smiles_per_dyad},
                        {"landmark_count", s.landmark_count},
                        {"fps", s.fps},
                        {"sample_rate", s.sample_rate},
                        {"embedding_dim", s.embedding_dim},
                        {"listener_effect", s.listener_effect},
                        {"conditioning_effect", s.conditioning_effect},
                        {"embedding_strength", s.embedding_strength},
                        {"duration_sex_effect", s.duration_sex_effect},
                        {"duration_noise", s.duration_noise},
                        {"intensity_noise", s.intensity_noise},
                        {"smile_scale", s.smile_scale},
                        {"landmark_noise_px", s.landmark_noise_px},
                        {"head_motion", s.head_motion},
                        {"unreliable_per_dyad", s.unreliable_per_dyad},
                        {"write_embeddings", s.write_embeddings}};
}

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j, SyntheticSpec s) {
  if (!j.is_object()) throw Error("synthetic spec: expected a JSON object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "n_dyads") s.n_dyads = v.get<std::size_t>();
      else if (key == "smiles_per_dyad") s.smiles_per_dyad = v.get<std::size_t>();
      else if (key == "landmark_count") s.landmark_count = v.get<std::size_t>();
      else if (key == "fps") s.fps = v.get<double>();
      else if (key == "sample_rate") s.sample_rate = v.get<int>();
      else if (key == "embedding_dim") s.embedding_dim = v.get<std::size_t>();
      else if (key == "listener_effect") s.listener_effect = v.get<double>();
      else if (key == "conditioning_effect") s.conditioning_effect = v.get<double>();
      else if (key == "embedding_strength") s.embedding_strength = v.get<double>();
      else if (key == "duration_sex_effect") s.duration_sex_effect = v.get<double>();
      else if (key == "duration_noise") s.duration_noise = v.get<double>();
      else if (key == "intensity_noise") s.intensity_noise = v.get<double>();
      else if (key == "smile_scale") s.smile_scale = v.get<double>();
      else if (key == "landmark_noise_px") s.landmark_noise_px = v.get<double>();
      else if (key == "head_motion") s.head_motion = v.get<double>();
      else if (key == "unreliable_per_dyad") s.unreliable_per_dyad = v.get<std::size_t>();
      else if (key == "write_embeddings") s.write_embeddings = v.get<bool>();
      else throw Error("unknown key");
    } catch (const nlohmann::json::exception& e) {
      throw Error("synthetic spec: field '" + key + "': " + e.what());
    } catch (const Error& e) {
      throw Error("synthetic spec: field '" + key + "': " + e.what());
    }
  }
  return s;
}

namespace {

constexpr std::array<const char*, 36> kFiller{
    "yeah",  "so",     "the",    "kitchen", "dog",    "mom",    "car",    "work",   "paper",
    "really", "kind",  "of",     "like",    "uh",     "and",    "that",   "this",   "house",
    "cat",   "street", "party",  "teacher", "game",   "phone",  "movie",  "garden", "bread",
    "music", "letter", "window", "coffee",  "train",  "bus",    "city",   "school", "weekend"};
constexpr std::array<const char*, 3> kNegations{"no", "not", "never"};
constexpr std::array<const char*, 3> kComparisons{"greater", "best", "after"};
constexpr std::array<Relationship, 4> kRelationships{Relationship::siblings, Relationship::friends,
                                                     Relationship::paternal, Relationship::romantic};

constexpr double kRampWidth = 0.12;   // seconds, smile onset ramp
constexpr double kRelease = 0.5;      // seconds, smile release after offset
constexpr double kFacePixels = 75.0;  // template unit in pixels

double round_to(double v, double q) { return std::round(v / q) * q; }
double ms(double t) { return round_to(t, 1e-3); }

struct SpokenWord {
  std::string token;
  double start;
  double end;
  double f0;
  double gain;
};

struct SmileEvent {
  double onset;
  double offset;
  double peak;
  double amplitude;
};

struct SideState {
  Sex sex = Sex::male;
  std::vector<TurnSegment> turns;
  std::vector<SpokenWord> words;
  std::vector<SmileEvent> smiles;
  std::vector<std::size_t> planted_turns;  // turns carrying the listener latent
  std::vector<double> planted_latent;
};

std::vector<std::string> token_list(std::size_t n, std::size_t n_special, const auto& special, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick_filler(0, kFiller.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_special(0, special.size() - 1);
  std::vector<std::string> tokens(n);
  for (auto& t : tokens) t = kFiller[pick_filler(rng)];
  std::vector<std::size_t> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[i] = i;
  std::shuffle(pos.begin(), pos.end(), rng);
  for (std::size_t i = 0; i < std::min(n, n_special); ++i) tokens[pos[i]] = special[pick_special(rng)];
  return tokens;
}

// Lays words out from `start`; returns the end of the last word.
double speak(SideState& side, TurnSegment& turn, const std::vector<std::string>& tokens, double start, double f0,
             double gain, Rng& rng) {
  std::uniform_real_distribution<double> word_len(0.22, 0.36), gap(0.04, 0.10);
  double t = start;
  for (const auto& tok : tokens) {
    const double ws = ms(t);
    const double we = ms(ws + word_len(rng));
    turn.words.push_back(Word{tok, ws, we});
    side.words.push_back(SpokenWord{tok, ws, we, f0, gain});
    t = we + gap(rng);
  }
  return turn.words.empty() ? start : turn.words.back().end;
}

double base_pitch(Sex s) { return s == Sex::female ? 210.0 : 120.0; }

int intensity_level(double x) { return static_cast<int>(std::clamp(std::lround(x), 1L, 5L)); }

std::vector<double> render_audio(const SideState& side, double duration, int sample_rate, Rng& rng) {
  const std::size_t n = static_cast<std::size_t>(std::ceil(duration * sample_rate));
  std::vector<double> out(n, 0.0);
  std::normal_distribution<double> floor_noise(0.0, 0.0005);
  for (auto& v : out) v = floor_noise(rng);
  const double sr = sample_rate;
  for (const auto& w : side.words) {
    const auto a = static_cast<std::size_t>(w.start * sr);
    const auto b = std::min(n, static_cast<std::size_t>(w.end * sr));
    const double len = static_cast<double>(b - a) / sr;
    double phase = 0.0;
    for (std::size_t i = a; i < b; ++i) {
      const double t = static_cast<double>(i - a) / sr;
      const double env = std::min({1.0, t / 0.02, (len - t) / 0.02});
      const double f = w.f0 * (1.0 + 0.03 * std::sin(2.0 * std::numbers::pi * 5.0 * t));
      phase += 2.0 * std::numbers::pi * f / sr;
      double s = 0.0;
      for (int h = 1; h <= 5; ++h) s += std::sin(h * phase) / h;
      out[i] += w.gain * env * s;
    }
  }
  for (auto& v : out) v = std::clamp(v, -0.999, 0.999);
  return out;
}

double smile_level(const SmileEvent& e, double t) {
  if (t <= e.onset) return 0.0;
  auto ramp = [&](double u) {
    const double lo = stats::normal_cdf(-e.peak / kRampWidth);
    return (stats::normal_cdf((u - e.onset - e.peak) / kRampWidth) - lo) / (1.0 - lo);
  };
  if (t <= e.offset) return e.amplitude * ramp(t);
  return e.amplitude * ramp(e.offset) * std::max(0.0, 1.0 - (t - e.offset) / kRelease);
}

double talk_level(const SideState& side, double t) {
  for (const auto& w : side.words) {
    if (t >= w.start && t < w.end) return 0.5 * (1.0 + std::sin(2.0 * std::numbers::pi * 4.0 * (t - w.start)));
  }
  return 0.0;
}

landmarks::LandmarkSequence render_landmarks(const SideState& side, const SyntheticSpec& spec, double duration,
                                             Rng& rng) {
  const auto tmpl = face_template_68();
  const auto smile = smile_pattern_68();
  const auto talk = talk_pattern_68();
  std::normal_distribution<double> unit(0.0, 1.0);

  // Person-specific face: scale, centre and a little shape variation.
  const double scale = kFacePixels * (1.0 + 0.05 * unit(rng));
  const double cx = 320.0 + 10.0 * unit(rng);
  const double cy = 240.0 + 10.0 * unit(rng);
  landmarks::LandmarkFrame face = tmpl;
  for (auto& v : face.xy) v += 0.01 * unit(rng);

  landmarks::LandmarkSequence seq;
  seq.fps = spec.fps;
  const auto n = static_cast<std::size_t>(std::floor(duration * spec.fps)) + 1;
  double rot = 0.0, zoom = 0.0, tx = 0.0, ty = 0.0;
  const double hm = spec.head_motion;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = static_cast<double>(j) / spec.fps;
    rot = 0.98 * rot + 0.002 * hm * unit(rng);
    zoom = 0.98 * zoom + 0.002 * hm * unit(rng);
    tx = 0.98 * tx + 0.3 * hm * unit(rng);
    ty = 0.98 * ty + 0.3 * hm * unit(rng);
    double s_level = 0.0;
    for (const auto& e : side.smiles) s_level += spec.smile_scale * smile_level(e, t);
    const double t_level = talk_level(side, t);
    const double a = (1.0 + zoom) * std::cos(rot) * scale, b = (1.0 + zoom) * std::sin(rot) * scale;
    landmarks::LandmarkFrame fr;
    fr.xy.resize(face.xy.size());
    for (std::size_t p = 0; p < face.count(); ++p) {
      const double x = face.x(p) + s_level * smile.x(p) + t_level * talk.x(p);
      const double y = face.y(p) + s_level * smile.y(p) + t_level * talk.y(p);
      fr.xy[2 * p] = round_to(a * x - b * y + cx + tx + spec.landmark_noise_px * unit(rng), 1e-3);
      fr.xy[2 * p + 1] = round_to(b * x + a * y + cy + ty + spec.landmark_noise_px * unit(rng), 1e-3);
    }
    seq.frames.push_back(std::move(fr));
  }
  return seq;
}

std::string dyad_name(std::size_t d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "d%03zu", d);
  return buf;
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(const SyntheticSpec& spec, std::uint64_t seed, const fs::path& out_dir) {
  if (spec.n_dyads == 0) throw Error("synthetic spec: n_dyads must be positive");
  if (spec.smiles_per_dyad == 0) throw Error("synthetic spec: smiles_per_dyad must be positive");
  if (spec.landmark_count != 68) throw Error("synthetic spec: only the 68-point layout is supported");
  if (!(spec.fps > 0.0) || spec.sample_rate <= 0) throw Error("synthetic spec: fps and sample_rate must be positive");
  if (spec.unreliable_per_dyad > spec.smiles_per_dyad)
    throw Error("synthetic spec: unreliable_per_dyad exceeds smiles_per_dyad");

  for (const char* sub : {"turns", "landmarks", "audio", "embeddings"}) fs::create_directories(out_dir / sub);

  // Direction in embedding space that carries the listener latent.
  std::vector<double> direction(spec.embedding_dim);
  {
    Rng rng = make_rng(seed, "synth/direction");
    std::normal_distribution<double> unit(0.0, 1.0);
    double norm = 0.0;
    for (auto& v : direction) {
      v = unit(rng);
      norm += v * v;
    }
    for (auto& v : direction) v /= std::sqrt(norm);
  }

  SyntheticCorpus corpus;
  for (std::size_t d = 0; d < spec.n_dyads; ++d) {
    const std::string id = dyad_name(d);
    Rng rng = make_rng(seed, "synth/" + id);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    DyadRecord rec;
    rec.dyad_id = id;
    rec.relationship = kRelationships[d % 4];
    rec.left_person = PersonMeta{id + "a", ((d + d / 4) % 2) ? Sex::female : Sex::male};
    rec.right_person = PersonMeta{id + "b", ((d / 2) % 2) ? Sex::female : Sex::male};
    rec.video_fps = spec.fps;
    rec.landmark_count = static_cast<int>(spec.landmark_count);

    std::array<SideState, 2> sides;
    sides[0].sex = rec.left_person.sex;
    sides[1].sex = rec.right_person.sex;
    std::array<int, 2> turn_counter{0, 0};
    auto new_turn = [&](std::size_t s, double start) {
      TurnSegment t;
      t.dyad_id = id;
      t.side = s == 0 ? Side::left : Side::right;
      char buf[16];
      std::snprintf(buf, sizeof buf, "t%03d", turn_counter[s]++);
      t.turn_id = buf;
      t.start = ms(start);
      return t;
    };

    // Both people greet first, so every later window has a turn on each side before it.
    double t = 0.0;
    for (std::size_t s = 0; s < 2; ++s) {
      TurnSegment turn = new_turn(s, 0.05);
      const double f0 = base_pitch(sides[s].sex) * std::exp(0.1 * unit(rng));
      const double end = speak(sides[s], turn, token_list(2, 0, kNegations, rng), turn.start, f0, 0.1, rng);
      turn.end = ms(end);
      sides[s].turns.push_back(std::move(turn));
      t = std::max(t, end + 0.3);
    }
    for (std::size_t i = 0; i < spec.smiles_per_dyad; ++i) {
      const std::size_t ls = (i + d) % 2;  // listener side index
      const std::size_t ss = 1 - ls;
      PlantedSmile p;
      p.dyad_id = id;
      p.listener_side = ls == 0 ? Side::left : Side::right;
      p.listener_latent = unit(rng);
      for (auto& c : p.context) c = unit(rng);

      // Listener turn.
      {
        const auto words = static_cast<std::size_t>(std::clamp(std::lround(7.0 + 2.5 * p.context[2]), 2L, 16L));
        const auto comps = static_cast<std::size_t>(
            std::clamp(std::lround(1.5 + 1.2 * p.context[3]), 0L, static_cast<long>(words)));
        const double f0 = base_pitch(sides[ls].sex) * std::exp(0.1 * p.context[4]);
        const double gain = 0.1 * std::exp(0.2 * unit(rng));
        TurnSegment turn = new_turn(ls, t);
        const double end = speak(sides[ls], turn, token_list(words, comps, kComparisons, rng), turn.start, f0, gain, rng);
        turn.end = ms(end);
        sides[ls].planted_turns.push_back(sides[ls].turns.size());
        sides[ls].planted_latent.push_back(p.listener_latent);
        sides[ls].turns.push_back(std::move(turn));
        t = end + 0.3 + 0.3 * u01(rng);
      }

      // Speaker turn; the smile starts shortly after the last pre-onset word.
      double onset = 0.0;
      {
        const auto pre = static_cast<std::size_t>(5 + std::uniform_int_distribution<int>(0, 4)(rng));
        const auto negs = static_cast<std::size_t>(
            std::clamp(std::lround(2.0 + 1.3 * p.context[0]), 0L, static_cast<long>(pre)));
        const double gain = 0.1 * std::exp(0.35 * p.context[1]);
        const double f0 = base_pitch(sides[ss].sex) * std::exp(0.1 * unit(rng));
        TurnSegment turn = new_turn(ss, t);
        double end = speak(sides[ss], turn, token_list(pre, negs, kNegations, rng), turn.start, f0, gain, rng);
        onset = ms(end + 0.05 + 0.15 * u01(rng));
        const auto post = static_cast<std::size_t>(2 + std::uniform_int_distribution<int>(0, 1)(rng));
        end = speak(sides[ss], turn, token_list(post, 0, kNegations, rng), onset + 0.05, f0, gain, rng);
        turn.end = ms(end);
        sides[ss].turns.push_back(std::move(turn));
      }

      const bool female_listener = sides[ls].sex == Sex::female;
      const bool female_speaker = sides[ss].sex == Sex::female;
      p.driver = (female_speaker ? 0.4 : -0.4) +
                 (p.context[0] + p.context[1] + p.context[2] + p.context[3] + p.context[4]) / std::sqrt(5.0);
      p.peak_time = 0.5 + 0.35 * std::tanh(0.8 * spec.listener_effect * p.listener_latent +
                                           0.8 * spec.conditioning_effect * p.driver);
      double duration = 2.2 + spec.duration_sex_effect * (female_listener ? 0.5 : -0.5) +
                        (rec.relationship == Relationship::siblings && !female_listener ? 0.3 : 0.0) +
                        spec.duration_noise * unit(rng);
      duration = std::clamp(duration, 1.2, 4.0);
      const int level = intensity_level(3.0 + 0.9 * p.driver + 0.5 * p.listener_latent +
                                        spec.intensity_noise * unit(rng));
      p.onset = onset;
      p.offset = ms(onset + duration);
      p.intensity = static_cast<Intensity>(level);
      sides[ls].smiles.push_back(SmileEvent{p.onset, p.offset, p.peak_time, 0.6 + 0.35 * (level - 1)});

      t = std::max(sides[ss].turns.back().end, p.offset) + 3.5 + 1.5 * u01(rng);
      corpus.planted.push_back(p);
    }
    for (std::size_t i = 0; i < spec.unreliable_per_dyad; ++i)
      corpus.planted[corpus.planted.size() - spec.smiles_per_dyad + i].intensity.reset();

    rec.video_duration = ms(t + 1.0);

    for (std::size_t s = 0; s < 2; ++s) {
      const std::string side_name = s == 0 ? "left" : "right";
      const std::string stem = id + "_" + side_name;
      SideMedia media;
      media.audio = out_dir / "audio" / (stem + ".wav");
      media.landmarks = out_dir / "landmarks" / (stem + ".csv");
      media.transcript = out_dir / "turns" / (stem + ".csv");

      Rng side_rng = make_rng(seed, "synth/" + stem);
      const auto audio = render_audio(sides[s], rec.video_duration, spec.sample_rate, side_rng);
      io::write_wav(media.audio, audio, spec.sample_rate);
      landmarks::write_landmark_csv(render_landmarks(sides[s], spec, rec.video_duration, side_rng),
                                    media.landmarks);
      save_turns(sides[s].turns, media.transcript);

      if (spec.write_embeddings) {
        media.embeddings = out_dir / "embeddings" / stem;
        fs::create_directories(media.embeddings);
        const seq2seq::SyntheticEmbeddingProvider provider(spec.embedding_dim);
        for (std::size_t ti = 0; ti < sides[s].turns.size(); ++ti) {
          const auto& turn = sides[s].turns[ti];
          const auto a = static_cast<std::size_t>(turn.start * spec.sample_rate);
          const auto b = std::min(audio.size(), static_cast<std::size_t>(turn.end * spec.sample_rate));
          seq2seq::TurnAudio ta;
          ta.samples = std::span<const double>(audio.data() + a, b - a);
          ta.sample_rate = spec.sample_rate;
          ta.turn_start = ta.span_start = turn.start;
          ta.span_end = turn.end;
          auto emb = provider.compute(ta);
          auto it = std::find(sides[s].planted_turns.begin(), sides[s].planted_turns.end(), ti);
          if (it != sides[s].planted_turns.end()) {
            const double latent = sides[s].planted_latent[static_cast<std::size_t>(it - sides[s].planted_turns.begin())];
            for (std::size_t f = 0; f < emb.frames(); ++f) {
              for (std::size_t k = 0; k < emb.dim; ++k)
                emb.values[f * emb.dim + k] += spec.embedding_strength * latent * direction[k];
            }
          }
          seq2seq::write_embedding_file(media.embeddings / (turn.turn_id + ".emb"), emb);
        }
      }
      (s == 0 ? rec.left_media : rec.right_media) = media;
    }
    corpus.records.push_back(rec);
  }

  for (const auto& p : corpus.planted)
    corpus.smiles.push_back(SmileAnnotation{p.dyad_id, p.listener_side, p.onset, p.offset, p.intensity});

  corpus.manifest = out_dir / "manifest.json";
  corpus.annotations = out_dir / "annotations.csv";
  save_manifest(corpus.records, corpus.manifest);
  save_annotations(corpus.smiles, corpus.annotations);

  {
    std::ofstream f(out_dir / "planted.csv", std::ios::binary);
    f << "dyad_id,listener_side,onset_s,offset_s,intensity,listener_latent,c_negations,c_loudness,c_word_count,"
         "c_comparisons,c_pitch,driver,peak_time_s\n";
    for (const auto& p : corpus.planted) {
      f << p.dyad_id << ',' << to_string(p.listener_side) << ',' << io::format_number(p.onset) << ','
        << io::format_number(p.offset) << ',';
      if (p.intensity) f << to_char(*p.intensity);
      f << ',' << io::format_number(p.listener_latent);
      for (double c : p.context) f << ',' << io::format_number(c);
      f << ',' << io::format_number(p.driver) << ',' << io::format_number(p.peak_time) << '\n';
    }
  }
  {
    std::ofstream f(out_dir / "synth_spec.json", std::ios::binary);
    nlohmann::json j{{"seed", seed}, {"spec", to_json(spec)}};
    f << j.dump(2) << '\n';
  }
  return corpus;
}

}  // namespace bcsmile::corpus
