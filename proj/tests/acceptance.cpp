// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.
//
//   acceptance <work dir> <toy config>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bcsmile/agent/adapter.hpp"
#include "bcsmile/agent/sink.hpp"
#include "bcsmile/app/commands.hpp"
#include "bcsmile/app/preprocess.hpp"
#include "bcsmile/app/run_config.hpp"
#include "bcsmile/corpus/corpus.hpp"
#include "bcsmile/corpus/face_template.hpp"
#include "bcsmile/corpus/synthetic.hpp"
#include "bcsmile/error.hpp"
#include "bcsmile/landmarks/landmarks.hpp"
#include "bcsmile/metrics/comparison.hpp"
#include "bcsmile/metrics/pose_metrics.hpp"
#include "bcsmile/seq2seq/model.hpp"
#include "bcsmile/seq2seq/trainer.hpp"
#include "bcsmile/stats/anova.hpp"
#include "bcsmile/stats/distributions.hpp"
#include "bcsmile/stats/glm.hpp"
#include "bcsmile/stats/tukey.hpp"

using namespace bcsmile;
namespace fs = std::filesystem;
using nlohmann::json;
using landmarks::LandmarkFrame;
using landmarks::LandmarkSequence;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

fs::path g_work;
fs::path g_toy_config;

fs::path fresh_dir(const fs::path& d) {
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

app::EnvLookup no_env() {
  return [](const std::string&) -> std::optional<std::string> { return std::nullopt; };
}

LandmarkSequence random_sequence(std::mt19937_64& rng, std::size_t frames, std::size_t k, double spread = 1.0) {
  std::normal_distribution<double> n(0.0, spread);
  LandmarkSequence s;
  for (std::size_t t = 0; t < frames; ++t) {
    LandmarkFrame f;
    f.xy.resize(2 * k);
    for (auto& v : f.xy) v = n(rng);
    s.frames.push_back(f);
  }
  return s;
}

// ---- 1 ---------------------------------------------------------------------

double oracle_ape(const LandmarkSequence& p, const LandmarkSequence& g) {
  double total = 0.0;
  for (std::size_t t = 0; t < g.size(); ++t) {
    double frame = 0.0;
    const std::size_t k = g.frames[t].count();
    for (std::size_t i = 0; i < k; ++i) {
      const double dx = p.frames[t].xy[2 * i] - g.frames[t].xy[2 * i];
      const double dy = p.frames[t].xy[2 * i + 1] - g.frames[t].xy[2 * i + 1];
      frame += std::sqrt(dx * dx + dy * dy);
    }
    total += frame / static_cast<double>(k);
  }
  return total / static_cast<double>(g.size());
}

double oracle_pck(const LandmarkSequence& p, const LandmarkSequence& g, double sigma) {
  std::size_t hit = 0, all = 0;
  for (std::size_t t = 0; t < g.size(); ++t) {
    for (std::size_t i = 0; i < g.frames[t].count(); ++i) {
      const double dx = p.frames[t].xy[2 * i] - g.frames[t].xy[2 * i];
      const double dy = p.frames[t].xy[2 * i + 1] - g.frames[t].xy[2 * i + 1];
      hit += std::sqrt(dx * dx + dy * dy) <= sigma;
      ++all;
    }
  }
  return static_cast<double>(hit) / static_cast<double>(all);
}

Outcome criterion_metrics() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> frames(1, 16);
  std::normal_distribution<double> err(0.0, 0.15);
  const std::vector<double> sigmas{0.02, 0.05, 0.1, 0.2, 0.3, 0.5};
  double worst = 0.0;
  for (int pair = 0; pair < 200; ++pair) {
    const std::size_t k = pair % 2 ? 68 : 2;
    const auto gt = random_sequence(rng, frames(rng), k);
    auto pred = gt;
    for (auto& f : pred.frames)
      for (auto& v : f.xy) v += err(rng);
    worst = std::max(worst, std::abs(metrics::ape(pred, gt) - oracle_ape(pred, gt)));
    double last = -1.0;
    for (double s : sigmas) {
      const double p = metrics::pck(pred, gt, s);
      worst = std::max(worst, std::abs(p - oracle_pck(pred, gt, s)));
      o.require(p >= last, "pck not monotone in sigma");
      last = p;
    }
  }
  const double secs = seconds_since(t0);
  o.require(worst <= 1e-12, "max deviation " + num(worst));
  o.require(secs < 10.0, "took " + num(secs) + " s");
  if (o.pass) o.detail = "200 pairs, max deviation " + num(worst) + ", " + num(secs) + " s";
  return o;
}

// ---- 2 ---------------------------------------------------------------------

seq2seq::ModelShape shape_of(std::size_t d, std::size_t h, std::size_t k) {
  seq2seq::ModelShape s;
  s.embedding_dim = d;
  s.encoder_hidden = h;
  s.decoder_hidden = h;
  s.attention_hidden = h;
  s.landmark_count = k;
  return s;
}

seq2seq::EmbeddingSequence random_embeddings(std::mt19937_64& rng, std::size_t dim, std::size_t frames) {
  std::normal_distribution<double> n(0.0, 1.0);
  seq2seq::EmbeddingSequence e;
  e.dim = dim;
  e.values.resize(dim * frames);
  for (auto& v : e.values) v = n(rng);
  e.span_end = seq2seq::kEmbeddingHop * static_cast<double>(frames);
  return e;
}

Outcome criterion_attention_gradients() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> hid(1, 12), len(1, 40);
  double worst_sum = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t h = hid(rng);
    seq2seq::ModelParams p(shape_of(2, h, 1));
    p.initialize(static_cast<std::uint64_t>(trial));
    // Larger weights push the scores apart.
    const double scale = 1.0 + 4.0 * (trial % 5);
    for (auto& v : p.flat()) v *= scale;
    std::vector<double> s(h);
    for (auto& v : s) v = n(rng);
    std::vector<std::vector<double>> hs(len(rng), std::vector<double>(h));
    for (auto& row : hs)
      for (auto& v : row) v = 3.0 * n(rng);
    const auto r = seq2seq::attend(p, s, hs);
    double sum = 0.0;
    for (double w : r.weights) {
      o.require(w >= 0.0, "negative attention weight");
      sum += w;
    }
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
  }
  o.require(worst_sum <= 1e-9, "attention weights sum off by " + num(worst_sum));

  // Tiny model, every parameter, every configuration.
  const auto shape = shape_of(2, 4, 2);
  seq2seq::TrainingInstance inst;
  inst.speaker = random_embeddings(rng, 2, 3);
  inst.listener = random_embeddings(rng, 2, 2);
  for (auto& c : inst.cond.values) c = n(rng);
  inst.target.assign(2, std::vector<double>(shape.frame_dim()));
  for (auto& f : inst.target)
    for (auto& v : f) v = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
  double worst = 0.0;
  for (seq2seq::Ablation a : seq2seq::kAllAblations) {
    for (const std::vector<bool>& forced : {std::vector<bool>{false, false}, std::vector<bool>{false, true}}) {
      seq2seq::ModelParams p(shape);
      p.initialize(23);
      seq2seq::Gradients g;
      const auto in = seq2seq::model_input(inst);
      seq2seq::forward_backward(p, in, a, inst.target, forced, &g);
      for (std::size_t i = 0; i < p.flat().size(); ++i) {
        const double keep = p.flat()[i];
        p.flat()[i] = keep + 1e-5;
        const double up = seq2seq::forward_backward(p, in, a, inst.target, forced, nullptr);
        p.flat()[i] = keep - 1e-5;
        const double down = seq2seq::forward_backward(p, in, a, inst.target, forced, nullptr);
        p.flat()[i] = keep;
        const double num = (up - down) / 2e-5;
        worst = std::max(worst, std::abs(num - g[i]) / std::max({std::abs(num), std::abs(g[i]), 1e-6}));
      }
    }
  }
  const double secs = seconds_since(t0);
  o.require(worst < 1e-4, "gradient relative error " + num(worst));
  o.require(secs < 60.0, "took " + num(secs) + " s");
  if (o.pass)
    o.detail = "sum error " + num(worst_sum) + ", max gradient rel error " + num(worst) + ", " +
               num(secs) + " s";
  return o;
}

// ---- 3 ---------------------------------------------------------------------

Outcome criterion_pipeline_round_trip() {
  Outcome o;
  std::mt19937_64 rng(303);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto seq = random_sequence(rng, 2 + i % 20, i % 3 ? 68 : 1 + i % 7);
    const auto out = landmarks::reconstruct(seq.frames[0], landmarks::minmax_normalize(landmarks::to_displacements(seq)));
    o.require(out.size() == seq.size(), "reconstructed length differs");
    if (out.size() != seq.size()) continue;
    for (std::size_t t = 0; t < seq.size(); ++t)
      for (std::size_t j = 0; j < seq.frames[t].xy.size(); ++j)
        worst = std::max(worst, std::abs(out.frames[t].xy[j] - seq.frames[t].xy[j]));
  }
  o.require(worst <= 1e-9, "round trip error " + num(worst));

  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 1 + i;
    const int factor = 1 + i % 5;
    auto seq = random_sequence(rng, n, 3);
    seq.fps = 25.0;
    const auto d = landmarks::downsample(seq, factor);
    o.require(d.size() == (n + factor - 1) / factor, "downsampled length");
    for (std::size_t t = 0; t < d.size(); ++t) o.require(d.frames[t] == seq.frames[t * factor], "downsampled frame");
    o.require(std::abs(d.fps - 25.0 / factor) < 1e-12, "downsampled fps");
  }

  const landmarks::MeanFace mean{corpus::face_template_68(), landmarks::LandmarkIndexMap{}.stable_subset};
  std::normal_distribution<double> noise(0.0, 0.02);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst_align = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double ang = 0.5 * u(rng), sc = 20.0 + 30.0 * (u(rng) + 1.0);
    const double tx = 100.0 * u(rng), ty = 100.0 * u(rng);
    LandmarkFrame f = mean.points;
    for (std::size_t j = 0; j < f.count(); ++j) {
      const double x = mean.points.x(j) + noise(rng), y = mean.points.y(j) + noise(rng);
      f.xy[2 * j] = sc * (std::cos(ang) * x - std::sin(ang) * y) + tx;
      f.xy[2 * j + 1] = sc * (std::sin(ang) * x + std::cos(ang) * y) + ty;
    }
    const auto once = landmarks::align_frame(f, mean);
    const auto twice = landmarks::align_frame(once, mean);
    for (std::size_t j = 0; j < once.xy.size(); ++j) worst_align = std::max(worst_align, std::abs(once.xy[j] - twice.xy[j]));
  }
  o.require(worst_align <= 1e-9, "alignment not idempotent: " + num(worst_align));
  if (o.pass)
    o.detail = "round trip error " + num(worst) + ", alignment drift " + num(worst_align);
  return o;
}

// ---- 4 ---------------------------------------------------------------------

Outcome criterion_ablation_direction() {
  Outcome o;
  const auto t0 = Clock::now();
  const fs::path root = fresh_dir(g_work / "ablation");
  const std::size_t jobs = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 4);
  auto cfg = [&](const std::string& sub) {
    return app::resolve_run_config(g_toy_config, no_env(),
                                   json{{"out", (root / sub).string()}, {"jobs", jobs}});
  };
  std::ostringstream log;
  app::cmd_synth(cfg("corpus"), log);
  app::cmd_preprocess(cfg("instances"), root / "corpus" / "manifest.json", log);
  const auto c = cfg("train");
  if (c.n_repeats != 10 || c.train.shape.encoder_hidden != 32 || c.train.epochs > 50 || c.synth.n_dyads != 8) {
    o.require(false, "toy config does not match the required sizes");
    return o;
  }
  app::cmd_train(c, root / "instances", log);
  const auto bundles = app::load_instance_dir(root / "instances");
  const auto rep = app::evaluate_checkpoints(bundles, root / "train" / "checkpoints", c.sigmas);
  const double secs = seconds_since(t0);

  const metrics::AblationRow* so = nullptr;
  const metrics::AblationRow* slc = nullptr;
  for (const auto& r : rep.comparison.rows) {
    if (r.config == seq2seq::Ablation::speaker_only) so = &r;
    if (r.config == seq2seq::Ablation::speaker_listener_cond) slc = &r;
  }
  if (!so || !slc || !slc->ape_vs_baseline) {
    o.require(false, "missing configurations in the comparison");
    return o;
  }
  std::ostringstream d;
  d << "APE " << slc->mean_ape << " vs " << so->mean_ape << " (p=" << slc->ape_vs_baseline->p << "), PCK "
    << slc->mean_pck << " vs " << so->mean_pck << ", " << secs << " s";
  o.require(slc->mean_ape < so->mean_ape, "APE not lower: " + d.str());
  o.require(slc->ape_vs_baseline->p < 0.05, "APE difference not significant: " + d.str());
  o.require(slc->mean_pck > so->mean_pck, "PCK not higher: " + d.str());
  o.require(secs < 15 * 60.0, "took " + num(secs) + " s");
  if (o.pass) o.detail = d.str();
  return o;
}

// ---- 5 ---------------------------------------------------------------------

double pooled_t_p(const std::vector<double>& a, const std::vector<double>& b) {
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  const double ma = mean(a), mb = mean(b);
  double ss = 0.0;
  for (double x : a) ss += (x - ma) * (x - ma);
  for (double x : b) ss += (x - mb) * (x - mb);
  const double df = static_cast<double>(a.size() + b.size() - 2);
  const double t = (mb - ma) / std::sqrt(ss / df * (1.0 / a.size() + 1.0 / b.size()));
  return stats::t_two_sided(t, df);
}

Outcome criterion_statistics() {
  Outcome o;
  std::mt19937_64 rng(505);
  std::normal_distribution<double> n(0.0, 1.0);

  double worst_ss = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int la = 2 + trial % 3, lb = 2 + trial % 4, reps = 2 + trial % 3;
    stats::Factor a{"a", {}, {}}, b{"b", {}, {}};
    for (int i = 0; i < la; ++i) a.level_names.push_back("a" + std::to_string(i));
    for (int j = 0; j < lb; ++j) b.level_names.push_back("b" + std::to_string(j));
    std::vector<double> y;
    for (int i = 0; i < la; ++i)
      for (int j = 0; j < lb; ++j)
        for (int r = 0; r < reps; ++r) {
          a.codes.push_back(i);
          b.codes.push_back(j);
          y.push_back(0.5 * i - 0.3 * j + 0.2 * i * j + n(rng));
        }
    const std::vector<stats::Factor> f{a, b};
    const std::vector<stats::Term> terms{{{0}}, {{1}}, {{0, 1}}};
    const auto t3 = stats::anova_type3(y, f, terms), t1 = stats::anova_sequential(y, f, terms);
    for (std::size_t i = 0; i < 3; ++i) worst_ss = std::max(worst_ss, std::abs(t3.rows[i].sum_sq - t1.rows[i].sum_sq));
  }
  o.require(worst_ss <= 1e-9, "type-III vs sequential " + num(worst_ss));

  double worst_tukey = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(8 + trial), b(10 + 2 * trial);
    for (auto& v : a) v = n(rng);
    for (auto& v : b) v = 0.1 * trial + n(rng);
    const auto r = stats::tukey_hsd({{"a", a}, {"b", b}});
    worst_tukey = std::max(worst_tukey, std::abs(r.pairs[0].adjusted_p - pooled_t_p(a, b)));
  }
  o.require(worst_tukey <= 1e-3, "tukey vs pooled t " + num(worst_tukey));

  stats::Matrix x(40, 2);
  std::vector<double> y(40);
  for (std::size_t i = 0; i < 40; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = static_cast<double>(i) / 10.0;
    y[i] = 1.0 / (0.5 + 0.25 * x(i, 1));
  }
  const auto exact = stats::fit_glm_inverse_link(x, y);
  o.require(std::abs(exact.coefficients[0] - 0.5) <= 1e-6 && std::abs(exact.coefficients[1] - 0.25) <= 1e-6,
            "noiseless glm coefficients");

  std::normal_distribution<double> noise(0.0, 0.3);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  int recovered = 0;
  for (int sim = 0; sim < 100; ++sim) {
    stats::Matrix xs(500, 2);
    std::vector<double> ys(500);
    for (std::size_t i = 0; i < 500; ++i) {
      xs(i, 0) = 1.0;
      xs(i, 1) = u(rng);
      ys[i] = 1.0 / (0.5 + 0.25 * xs(i, 1)) + noise(rng);
    }
    const auto f = stats::fit_glm_inverse_link(xs, ys);
    recovered += f.coefficients[1] > 0.0 && f.p_values[1] < 0.05;
  }
  o.require(recovered >= 95, "glm recovered " + std::to_string(recovered) + "/100");

  // Limits: F(1, inf) is chi-square(1); Q(k=2, df) is sqrt(2)|t(df)|, and
  // sqrt(2)|z| at infinite df.
  double worst_tail = 0.0;
  for (double f : {0.25, 1.0, 2.5, 3.84, 6.63, 10.0}) {
    const double chi2 = 2.0 * (1.0 - stats::normal_cdf(std::sqrt(f)));
    worst_tail = std::max(worst_tail, std::abs(stats::f_upper_tail(f, 1.0, 1e7) - chi2));
  }
  for (double t : {0.5, 1.0, 1.96, 3.0}) {
    const double z = 2.0 * (1.0 - stats::normal_cdf(t));
    worst_tail = std::max(worst_tail,
                          std::abs(stats::studentized_range_upper_tail(std::sqrt(2.0) * t, 2.0, stats::kInfiniteDf) - z));
    for (double df : {4.0, 10.0, 30.0})
      worst_tail = std::max(worst_tail, std::abs(stats::studentized_range_upper_tail(std::sqrt(2.0) * t, 2.0, df) -
                                                 stats::t_two_sided(t, df)));
  }
  o.require(worst_tail <= 5e-3, "distribution tails off by " + num(worst_tail));
  if (o.pass)
    o.detail = "SS " + num(worst_ss) + ", tukey " + num(worst_tukey) + ", glm " +
               std::to_string(recovered) + "/100, tails " + num(worst_tail);
  return o;
}

// ---- 6 ---------------------------------------------------------------------

Outcome criterion_augmentation() {
  Outcome o;
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<int> n_dyads(3, 6), n_smiles(1, 10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_mean = 0.0;
  std::size_t windows = 0;
  for (int set = 0; set < 1000; ++set) {
    std::vector<corpus::SmileAnnotation> smiles;
    std::map<std::string, corpus::DyadTiming> dyads;
    std::vector<std::string> ids;
    const int nd = n_dyads(rng);
    for (int d = 0; d < nd; ++d) {
      const std::string id = "s" + std::to_string(set) + "_d" + std::to_string(d);
      const int ns = n_smiles(rng);
      const double video = 30.0 * ns + 60.0 * u(rng);
      dyads[id] = corpus::DyadTiming{video};
      ids.push_back(id);
      for (int i = 0; i < ns; ++i) {
        const double on = u(rng) * (video - 8.0);
        smiles.push_back({id, u(rng) < 0.5 ? corpus::Side::left : corpus::Side::right, on, on + 0.5 + 4.5 * u(rng),
                          static_cast<corpus::Intensity>(1 + i % 5)});
      }
    }
    const std::size_t count = smiles.size() * (set % 4 == 0 ? 2 : 1);
    const auto w = corpus::sample_nonsmile_windows(smiles, dyads, count, static_cast<std::uint64_t>(set));
    o.require(w.size() == count, "wrong number of non-smile windows");
    double ms = 0.0, mw = 0.0;
    for (const auto& s : smiles) ms += s.duration();
    for (const auto& x : w) mw += x.duration();
    worst_mean = std::max(worst_mean, std::abs(ms / static_cast<double>(smiles.size()) - mw / static_cast<double>(w.size())));
    for (const auto& x : w) {
      ++windows;
      o.require(x.window_start >= 0.0 && x.window_end <= dyads.at(x.dyad_id).video_duration + 1e-9,
                "window outside the video");
      for (const auto& s : smiles)
        if (s.dyad_id == x.dyad_id)
          o.require(std::abs(x.window_start - s.onset) >= corpus::kMinOnsetDistance, "window too close to an onset");
    }

    const auto split = corpus::split_by_dyad(ids, corpus::kPaperSplitRatios, static_cast<std::uint64_t>(set));
    std::map<std::string, int> seen;
    for (const auto* part : {&split.train_dyads, &split.val_dyads, &split.test_dyads})
      for (const auto& d : *part) ++seen[d];
    o.require(seen.size() == ids.size(), "split lost a dyad");
    for (const auto& [d, k] : seen) o.require(k == 1, "dyad " + d + " in more than one split");
  }
  o.require(worst_mean <= 1e-9, "mean duration differs by " + num(worst_mean));

  // Instances of a preprocessed corpus stay inside their dyad's split.
  const fs::path dir = fresh_dir(g_work / "augment_corpus");
  corpus::SyntheticSpec spec;
  spec.n_dyads = 8;
  spec.smiles_per_dyad = 6;
  spec.sample_rate = 4000;
  spec.embedding_dim = 8;
  const auto c = corpus::generate_synthetic_corpus(spec, 66, dir);
  app::PreprocessOptions opt;
  opt.manifest = c.manifest;
  opt.embedding_dim = 8;
  opt.seed = 66;
  const auto res = app::preprocess(opt);
  std::map<std::string, std::string> split_of;
  for (const auto& d : res.split.train_dyads) split_of[d] = "train";
  for (const auto& d : res.split.val_dyads) split_of[d] = "val";
  for (const auto& d : res.split.test_dyads) split_of[d] = "test";
  for (const auto& b : res.bundles) o.require(split_of.at(b.inst.dyad_id) == b.split, "instance " + b.inst.id + " leaked");
  o.require(res.nonsmiles == res.smiles_kept, "preprocess did not balance the classes");
  if (o.pass)
    o.detail = "1000 sets, " + std::to_string(windows) + " windows, mean diff " + num(worst_mean) + ", " +
               std::to_string(res.bundles.size()) + " preprocessed instances";
  return o;
}

// ---- 7 ---------------------------------------------------------------------

Outcome criterion_teacher_forcing() {
  Outcome o;
  o.require(seq2seq::teacher_forcing_prob(0) == 1.0, "p(0)");
  o.require(seq2seq::teacher_forcing_prob(20) == 0.9, "p(20)");
  o.require(seq2seq::teacher_forcing_prob(200) == 0.0, "p(200)");
  double last = 1.0;
  for (int e = 0; e <= 1000; ++e) {
    const double p = seq2seq::teacher_forcing_prob(e);
    o.require(p <= last && p >= 0.0, "not non-increasing at epoch " + std::to_string(e));
    last = p;
  }
  if (o.pass) o.detail = "p(0)=1, p(20)=0.9, p(200)=0, non-increasing to epoch 1000";
  return o;
}

// ---- 8 ---------------------------------------------------------------------

std::size_t oracle_widest(const LandmarkSequence& s) {
  std::size_t best = 0;
  double width = -1.0;
  for (std::size_t t = 0; t < s.size(); ++t) {
    const double w = std::abs(s.frames[t].xy[2 * 54] - s.frames[t].xy[2 * 48]);
    if (w > width) {
      width = w;
      best = t;
    }
  }
  return best;
}

bool in_unit(const agent::FacialParamFrame& f) {
  for (double v : {f.mouth_smile_left, f.mouth_smile_right, f.brow_up_left, f.brow_up_right})
    if (!(v >= 0.0 && v <= 1.0)) return false;
  return true;
}

Outcome criterion_adapter() {
  Outcome o;
  std::mt19937_64 rng(808);
  std::uniform_int_distribution<std::size_t> frames(2, 16);
  std::normal_distribution<double> n(0.0, 0.03);
  const double fps_choices[] = {25.0 / 3.0, 25.0, 30.0, 12.5};
  const auto face = corpus::face_template_68();
  const landmarks::LandmarkIndexMap map;
  std::vector<agent::SmileCommand> commands;
  for (int i = 0; i < 500; ++i) {
    LandmarkSequence s;
    s.fps = fps_choices[i % 4];
    const std::size_t len = frames(rng);
    for (std::size_t t = 0; t < len; ++t) {
      LandmarkFrame f = face;
      for (auto& v : f.xy) v += n(rng);
      s.frames.push_back(f);
    }
    const double onset = 100.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto r = agent::landmarks_to_params(s, map, onset);
    for (const auto& f : r.frames) o.require(in_unit(f), "frame parameter outside [0,1]");
    o.require(in_unit(r.command.params), "command parameter outside [0,1]");
    o.require(r.widest_frame == oracle_widest(s), "widest frame differs from the linear scan");
    o.require(agent::widest_smile_frame(s, map) == oracle_widest(s), "widest frame differs from the linear scan");
    o.require(r.command.duration == static_cast<double>(len) / s.fps, "duration is not frames / fps");
    o.require(agent::parse_command(agent::to_json(r.command)) == r.command, "command json does not round trip");
    commands.push_back(r.command);
  }

  const fs::path spool = fresh_dir(g_work / "adapter") / "spool.jsonl";
  agent::StubServer server;
  server.start();
  {
    agent::EndpointSink sink(agent::EndpointOptions{server.url(), std::chrono::milliseconds(2000), 1, spool});
    for (std::size_t i = 0; i < 25; ++i) o.require(sink.emit(commands[i]).delivered, "delivery failed");
  }
  const auto got = server.received();
  o.require(got.size() == 25, "stub received " + std::to_string(got.size()) + " requests for 25 commands");
  for (std::size_t i = 0; i < std::min<std::size_t>(got.size(), 25); ++i)
    o.require(agent::parse_command(got[i]) == commands[i], "stub received a different command");
  const int port = server.port();
  server.stop();

  agent::EndpointSink down(agent::EndpointOptions{"http://127.0.0.1:" + std::to_string(port) + "/command",
                                                  std::chrono::milliseconds(300), 1, spool});
  bool threw = false;
  try {
    down.emit(commands[0]);
  } catch (const Error&) {
    threw = true;
  }
  o.require(threw, "delivery to a stopped endpoint did not fail");
  std::ifstream in(spool);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  o.require(lines.size() == 1 && agent::parse_command(lines[0]) == commands[0], "spool does not hold the command");
  if (o.pass) o.detail = "500 sequences, 25/25 delivered, spool holds the failed command";
  return o;
}

// ---- 9 ---------------------------------------------------------------------

Outcome criterion_determinism() {
  Outcome o;
  const json tiny = {
      {"seed", 42},
      {"synth", {{"n_dyads", 6}, {"smiles_per_dyad", 4}, {"sample_rate", 4000}, {"embedding_dim", 16}}},
      {"preprocess", {{"embedding_dim", 16}}},
      {"train",
       {{"epochs", 3},
        {"embedding_dim", 16},
        {"encoder_hidden", 8},
        {"decoder_hidden", 8},
        {"attention_hidden", 4},
        {"n_repeats", 2}}}};
  auto run = [&](const fs::path& root, std::size_t jobs) {
    fresh_dir(root);
    auto cfg = [&](const std::string& sub) {
      json flags = tiny;
      flags["out"] = (root / sub).string();
      flags["jobs"] = jobs;
      return app::resolve_run_config(std::nullopt, no_env(), flags);
    };
    std::ostringstream log;
    app::cmd_synth(cfg("corpus"), log);
    app::cmd_preprocess(cfg("instances"), root / "corpus" / "manifest.json", log);
    app::cmd_train(cfg("train"), root / "instances", log);
    app::cmd_evaluate(cfg("eval"), root / "instances", root / "train" / "checkpoints", log);
  };
  run(g_work / "det_a", 1);
  run(g_work / "det_b", 3);
  for (const char* f : {"report.txt", "report.json", "metrics_per_instance.csv"}) {
    const auto a = slurp(g_work / "det_a" / "eval" / f), b = slurp(g_work / "det_b" / "eval" / f);
    o.require(!a.empty(), std::string(f) + " is empty");
    o.require(a == b, std::string(f) + " differs between runs");
  }
  if (o.pass) o.detail = "report.txt, report.json, metrics_per_instance.csv identical (1 vs 3 jobs)";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  g_work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "bcsmile_acceptance";
  g_toy_config = argc > 2 ? fs::path(argv[2]) : fs::path("configs/toy.json");
  fs::create_directories(g_work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"metric oracles", criterion_metrics},
      {"attention and gradient checks", criterion_attention_gradients},
      {"landmark pipeline round trip", criterion_pipeline_round_trip},
      {"ablation direction on the synthetic corpus", criterion_ablation_direction},
      {"statistics oracles", criterion_statistics},
      {"augmentation invariants", criterion_augmentation},
      {"teacher forcing schedule", criterion_teacher_forcing},
      {"agent adapter contract", criterion_adapter},
      {"determinism", criterion_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    failed += !r.pass;
    std::printf("criterion %zu %s: %s (%s)\n", i + 1, r.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                r.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed ? 1 : 0;
}
