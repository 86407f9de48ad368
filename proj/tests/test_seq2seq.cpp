#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <vector>

#include "bcsmile/error.hpp"
#include "bcsmile/seq2seq/checkpoint.hpp"
#include "bcsmile/seq2seq/embedding.hpp"
#include "bcsmile/seq2seq/model.hpp"
#include "bcsmile/seq2seq/trainer.hpp"
#include "doctest.h"

using namespace bcsmile;
using namespace bcsmile::seq2seq;
namespace fs = std::filesystem;

namespace {

EmbeddingSequence random_embeddings(std::mt19937_64& rng, std::size_t dim, std::size_t frames) {
  std::normal_distribution<double> n(0.0, 1.0);
  EmbeddingSequence e;
  e.dim = dim;
  e.values.resize(dim * frames);
  for (auto& v : e.values) v = n(rng);
  e.span_end = kEmbeddingHop * static_cast<double>(frames);
  return e;
}

ModelShape tiny_shape(std::size_t d, std::size_t h, std::size_t k) {
  ModelShape s;
  s.embedding_dim = d;
  s.encoder_hidden = h;
  s.decoder_hidden = h;
  s.attention_hidden = h;
  s.landmark_count = k;
  return s;
}

TrainingInstance make_instance(std::mt19937_64& rng, const ModelShape& shape, std::size_t t_len, std::size_t steps,
                               const std::string& id) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  TrainingInstance inst;
  inst.id = id;
  inst.dyad_id = "d0";
  inst.speaker = random_embeddings(rng, shape.embedding_dim, t_len);
  inst.listener = random_embeddings(rng, shape.embedding_dim, 2);
  for (auto& c : inst.cond.values) c = n(rng);
  const std::size_t fd = shape.frame_dim();
  const double phase = u(rng);
  inst.target.assign(steps, std::vector<double>(fd));
  for (std::size_t t = 0; t < steps; ++t)
    for (std::size_t j = 0; j < fd; ++j)
      inst.target[t][j] = 0.5 + 0.4 * std::sin(phase * 6.0 + 0.7 * static_cast<double>(t) + static_cast<double>(j));
  inst.last_frame.xy.assign(fd, 0.0);
  inst.normalization.min.assign(fd, -0.01);
  inst.normalization.max.assign(fd, 0.01);
  inst.normalization.constant.assign(fd, false);
  inst.ground_truth.fps = 25.0 / 3.0;
  landmarks::LandmarkFrame f = inst.last_frame;
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t j = 0; j < fd; ++j) f.xy[j] += -0.01 + 0.02 * inst.target[t][j];
    inst.ground_truth.frames.push_back(f);
  }
  return inst;
}

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST_CASE("teacher forcing schedule") {
  CHECK(teacher_forcing_prob(0) == 1.0);
  CHECK(teacher_forcing_prob(19) == 1.0);
  CHECK(teacher_forcing_prob(20) == 0.9);
  for (int e = 200; e < 250; ++e) CHECK(teacher_forcing_prob(e) == 0.0);
  double last = 1.0;
  for (int e = 0; e < 250; ++e) {
    CHECK(teacher_forcing_prob(e) <= last);
    last = teacher_forcing_prob(e);
  }
  CHECK_THROWS_AS(teacher_forcing_prob(-1), Error);
}

TEST_CASE("embedding framing") {
  CHECK(embedding_frame_count(2.0) == 2);
  CHECK(embedding_frame_count(120.0) == 125);
  CHECK(embedding_frame_count(0.5) == 1);

  const SyntheticEmbeddingProvider p(16);
  std::vector<double> s(16000 * 2);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = 0.3 * std::sin(2.0 * std::numbers::pi * 180.0 * i / 16000.0);
  TurnAudio a{s, 16000.0, 0.0, 0.0, 2.0, {}};
  const auto e1 = embed_audio(p, a), e2 = embed_audio(p, a);
  CHECK(e1.sequence.frames() == 2);
  CHECK(e1.sequence.dim == 16);
  CHECK(e1.sequence == e2.sequence);
  CHECK(e1.warning.empty());

  std::vector<double> longer(8000 * 120, 0.01);
  TurnAudio b{longer, 8000.0, 0.0, 0.0, 120.0, {}};
  const auto e3 = embed_audio(p, b);
  CHECK(e3.sequence.frames() == kMaxEmbeddingFrames);
  CHECK(e3.sequence.span_start == doctest::Approx(120.0 - kEmbeddingHop * kMaxEmbeddingFrames));

  TurnAudio none{{}, 16000.0, 1.0, 1.0, 1.0, {}};
  const auto e4 = embed_audio(p, none);
  CHECK(e4.sequence.frames() == 1);
  CHECK(!e4.warning.empty());
  for (double v : e4.sequence.values) CHECK(v == 0.0);
}

TEST_CASE("embedding file round trip at float precision") {
  std::mt19937_64 rng(51);
  const auto e = random_embeddings(rng, 8, 5);
  const auto path = fs::temp_directory_path() / "bcsmile_test.emb";
  write_embedding_file(path, e);
  const auto r = read_embedding_file(path);
  CHECK(r.dim == 8);
  REQUIRE(r.frames() == 5);
  for (std::size_t i = 0; i < e.values.size(); ++i) CHECK(r.values[i] == static_cast<double>(static_cast<float>(e.values[i])));
  std::ofstream(path, std::ios::binary) << "junk";
  CHECK_THROWS_AS(read_embedding_file(path), Error);
  fs::remove(path);
}

TEST_CASE("zero weights give zero encoder outputs and decoder state") {
  std::mt19937_64 rng(52);
  ModelParams p(tiny_shape(3, 4, 2));
  p.set_zero();
  const auto sp = random_embeddings(rng, 3, 5);
  const auto enc = encode(p, sp, nullptr, Ablation::speaker_only);
  CHECK(enc.outputs.size() == 5);
  for (const auto& h : enc.outputs)
    for (double v : h) CHECK(v == 0.0);
  features::ConditioningVector c;
  c.values = {1, 2, 3, 4, 5, 6};
  for (double v : init_decoder(p, enc.final_hidden, &c)) CHECK(v == 0.0);
}

TEST_CASE("encoder matches hand-unrolled GRU equations") {
  std::mt19937_64 rng(53);
  ModelParams p(tiny_shape(2, 3, 1));
  p.initialize(7);
  const auto sp = random_embeddings(rng, 2, 2);
  const auto lis = random_embeddings(rng, 2, 3);
  const auto wx = p.tensor(tensor::kEncWx), wh = p.tensor(tensor::kEncWh);
  const auto bx = p.tensor(tensor::kEncBx), bh = p.tensor(tensor::kEncBh);

  for (Ablation a : {Ablation::speaker_only, Ablation::speaker_listener}) {
    std::vector<double> h(3, 0.0);
    if (uses_listener(a)) {
      const auto lw = p.tensor(tensor::kListenerW), lb = p.tensor(tensor::kListenerB);
      const auto m = lis.mean();
      for (std::size_t i = 0; i < 3; ++i) h[i] = lb[i] + lw[i * 2] * m[0] + lw[i * 2 + 1] * m[1];
    }
    const auto enc = encode(p, sp, &lis, a);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(enc.initial[i] - h[i]) < 1e-12);
    for (std::size_t t = 0; t < 2; ++t) {
      const double* x = sp.values.data() + 2 * t;
      auto gx = [&](std::size_t row) { return bx[row] + wx[row * 2] * x[0] + wx[row * 2 + 1] * x[1]; };
      auto gh = [&](std::size_t row) {
        double s = bh[row];
        for (std::size_t k = 0; k < 3; ++k) s += wh[row * 3 + k] * h[k];
        return s;
      };
      std::vector<double> next(3);
      for (std::size_t i = 0; i < 3; ++i) {
        const double r = sig(gx(i) + gh(i));
        const double z = sig(gx(3 + i) + gh(3 + i));
        const double n = std::tanh(gx(6 + i) + r * gh(6 + i));
        next[i] = (1.0 - z) * n + z * h[i];
      }
      h = next;
      for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(enc.outputs[t][i] - h[i]) < 1e-10);
    }
  }
}

TEST_CASE("attention") {
  std::mt19937_64 rng(54);
  ModelParams p(tiny_shape(2, 4, 1));
  p.initialize(8);
  std::vector<double> s(4, 0.3);

  const std::vector<std::vector<double>> same(5, std::vector<double>{0.1, -0.2, 0.3, 0.4});
  for (double w : attend(p, s, same).weights) CHECK(w == doctest::Approx(0.2));

  const std::vector<std::vector<double>> one{{0.5, -0.5, 0.25, 1.0}};
  const auto r1 = attend(p, s, one);
  CHECK(r1.weights == std::vector<double>{1.0});
  for (std::size_t i = 0; i < 4; ++i) CHECK(r1.context[i] == doctest::Approx(one[0][i]));

  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<std::vector<double>> hs(3, std::vector<double>(4));
  for (auto& h : hs)
    for (auto& v : h) v = n(rng);
  const auto wa = p.tensor(tensor::kAttWa), wb = p.tensor(tensor::kAttWb), v = p.tensor(tensor::kAttV);
  std::vector<double> score(3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      double pre = 0.0;
      for (std::size_t k = 0; k < 4; ++k) pre += wa[j * 4 + k] * hs[i][k] + wb[j * 4 + k] * s[k];
      score[i] += v[j] * std::tanh(pre);
    }
  }
  double z = 0.0;
  for (double sc : score) z += std::exp(sc);
  const auto r3 = attend(p, s, hs);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(r3.weights[i] - std::exp(score[i]) / z) < 1e-10);
  CHECK_THROWS_AS(attend(p, s, {}), Error);
}

TEST_CASE("decoder initialisation") {
  std::mt19937_64 rng(55);
  ModelParams p(tiny_shape(2, 6, 1));
  p.initialize(9);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> h(6);
  for (auto& v : h) v = n(rng);
  features::ConditioningVector a, b;
  a.values = {1, 0, 0, 0, 0, 0};
  b.values = {0, 1.5, -2, 0.5, 0, 1};
  const auto sa = init_decoder(p, h, &a), sb = init_decoder(p, h, &b);
  for (double v : sa) CHECK(v >= 0.0);
  CHECK(sa != sb);
}

TEST_CASE("generation shape, range and determinism") {
  std::mt19937_64 rng(56);
  ModelParams p(tiny_shape(8, 8, 68));
  p.initialize(10);
  const auto sp = random_embeddings(rng, 8, 4);
  ModelInput in{&sp, nullptr, {}};
  const auto g = generate(p, in, Ablation::speaker_listener_cond, 8);
  REQUIRE(g.size() == 8);
  for (const auto& f : g) {
    CHECK(f.size() == 136);
    for (double v : f) CHECK((v >= 0.0 && v <= 1.0));
  }
  CHECK(generate(p, in, Ablation::speaker_listener_cond, 8) == g);
  EmbeddingSequence wrong = random_embeddings(rng, 5, 2);
  ModelInput bad{&wrong, nullptr, {}};
  CHECK_THROWS_AS(generate(p, bad, Ablation::speaker_only, 8), Error);
}

TEST_CASE("analytic gradients match central differences") {
  std::mt19937_64 rng(57);
  const auto shape = tiny_shape(2, 4, 2);
  const auto inst = make_instance(rng, shape, 3, 2, "g");
  for (Ablation a : kAllAblations) {
    for (const std::vector<bool>& forced : {std::vector<bool>{false, false}, std::vector<bool>{false, true}}) {
      ModelParams p(shape);
      p.initialize(11);
      Gradients g;
      forward_backward(p, model_input(inst), a, inst.target, forced, &g);
      double worst = 0.0;
      for (std::size_t i = 0; i < p.flat().size(); ++i) {
        const double keep = p.flat()[i];
        p.flat()[i] = keep + 1e-5;
        const double up = forward_backward(p, model_input(inst), a, inst.target, forced, nullptr);
        p.flat()[i] = keep - 1e-5;
        const double down = forward_backward(p, model_input(inst), a, inst.target, forced, nullptr);
        p.flat()[i] = keep;
        const double num = (up - down) / 2e-5;
        const double rel = std::abs(num - g[i]) / std::max({std::abs(num), std::abs(g[i]), 1e-6});
        worst = std::max(worst, rel);
      }
      CHECK(worst < 1e-4);
    }
  }
}

TEST_CASE("plateau halves the learning rate") {
  std::mt19937_64 rng(58);
  const auto shape = tiny_shape(2, 4, 2);
  const auto a = make_instance(rng, shape, 3, 8, "a"), b = make_instance(rng, shape, 3, 8, "b");
  TrainConfig c;
  c.shape = shape;
  c.epochs = 5;
  c.plateau_patience = 3;
  c.plateau_min_delta = 10.0;  // nothing counts as an improvement after the first epoch
  const auto r = train({&a}, {&b}, c);
  REQUIRE(r.history.lr_events.size() == 1);
  CHECK(r.history.lr_events[0].old_lr == 1e-4);
  CHECK(r.history.lr_events[0].new_lr == 5e-5);
  CHECK(r.history.learning_rate.back() == 5e-5);
}

TEST_CASE("a single instance can be overfit") {
  std::mt19937_64 rng(59);
  const auto shape = tiny_shape(4, 16, 2);
  const auto a = make_instance(rng, shape, 3, 8, "a");
  TrainConfig c;
  c.shape = shape;
  c.epochs = 2000;
  c.learning_rate = 0.01;
  c.momentum = 0.9;
  c.weight_decay = 0.0;
  c.plateau_patience = 1000;
  const auto r = train({&a}, {&a}, c);
  CHECK(r.history.train_loss.back() < 1e-3);
  CHECK(r.history.best_val < 1e-3);
}

TEST_CASE("training is deterministic for a seed") {
  std::mt19937_64 rng(60);
  const auto shape = tiny_shape(3, 4, 2);
  std::vector<TrainingInstance> set;
  for (int i = 0; i < 4; ++i) set.push_back(make_instance(rng, shape, 2 + i, 8, "i" + std::to_string(i)));
  TrainConfig c;
  c.shape = shape;
  c.epochs = 6;
  c.learning_rate = 1e-3;
  c.seed = 99;
  const auto r1 = train({&set[0], &set[1], &set[2]}, {&set[3]}, c);
  const auto r2 = train({&set[0], &set[1], &set[2]}, {&set[3]}, c);
  CHECK(r1.history.train_loss == r2.history.train_loss);
  CHECK(r1.history.val_loss == r2.history.val_loss);
  c.seed = 100;
  CHECK(train({&set[0], &set[1], &set[2]}, {&set[3]}, c).history.train_loss != r1.history.train_loss);
}

TEST_CASE("train config json") {
  TrainConfig c;
  c.epochs = 7;
  c.ablation = Ablation::speaker_cond;
  c.shape.encoder_hidden = 12;
  const auto back = train_config_from_json(to_json(c));
  CHECK(back.epochs == 7);
  CHECK(back.ablation == Ablation::speaker_cond);
  CHECK(back.shape == c.shape);
  CHECK_THROWS_AS(train_config_from_json(nlohmann::json{{"epoch", 3}}), Error);
  c.learning_rate = -1.0;
  CHECK_THROWS_AS(validate(c), Error);
}

TEST_CASE("ablation suite shape, pairing and thread independence") {
  std::mt19937_64 rng(61);
  const auto shape = tiny_shape(3, 4, 2);
  std::vector<TrainingInstance> set;
  for (int i = 0; i < 6; ++i) set.push_back(make_instance(rng, shape, 2, 8, "i" + std::to_string(i)));
  AblationSuiteConfig c;
  c.train.shape = shape;
  c.train.epochs = 2;
  c.train.seed = 5;
  c.n_repeats = 2;
  const std::vector<const TrainingInstance*> tr{&set[0], &set[1], &set[2]}, va{&set[3]}, te{&set[4], &set[5]};
  const auto one = run_ablation_suite(tr, va, te, c);
  c.jobs = 3;
  const auto many = run_ablation_suite(tr, va, te, c);
  REQUIRE(one.size() == 8);
  REQUIRE(many.size() == 8);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].config == many[i].config);
    CHECK(one[i].ape == many[i].ape);
    CHECK(one[i].per_instance.size() == 2);
    CHECK(one[i].seed == repeat_seed(5, one[i].repeat));
  }
  const auto res = collect_results(one);
  CHECK(res.size() == 4);
  for (const auto& [a, runs] : res) CHECK(runs.ape.size() == 2);
}

TEST_CASE("configuration names") {
  CHECK(display_name(Ablation::speaker_only) == "Speaker only (Baseline)");
  CHECK(display_name(Ablation::speaker_listener) == "Speaker and Listener");
  CHECK(display_name(Ablation::speaker_listener_cond) == "Speaker and Listener with Conditioning vector");
  CHECK(display_name(Ablation::speaker_cond) == "Speaker and Conditioning vector");
  for (Ablation a : kAllAblations) CHECK(parse_ablation(to_string(a)) == a);
  CHECK(!parse_ablation("everything"));
}

TEST_CASE("checkpoint round trip") {
  ModelParams p(tiny_shape(3, 5, 2));
  p.initialize(12);
  CheckpointMeta meta;
  meta.config.shape = p.shape();
  meta.config.epochs = 17;
  meta.seed = 1234567890123ull;
  meta.epoch = 9;
  meta.best_val = 0.125;
  const auto path = fs::temp_directory_path() / "bcsmile_test.bcsm";
  save_checkpoint(path, p, meta);
  const auto c = load_checkpoint(path);
  CHECK(c.params.shape() == p.shape());
  CHECK(std::equal(c.params.flat().begin(), c.params.flat().end(), p.flat().begin(), p.flat().end()));
  CHECK(c.meta.seed == meta.seed);
  CHECK(c.meta.epoch == 9);
  CHECK(c.meta.best_val == 0.125);
  CHECK(c.meta.config.epochs == 17);

  const auto size = fs::file_size(path);
  fs::resize_file(path, size - 8);
  CHECK_THROWS_AS(load_checkpoint(path), Error);
  std::ofstream(path, std::ios::binary) << "NOPE0000";
  CHECK_THROWS_AS(load_checkpoint(path), Error);
  fs::remove(path);
}
