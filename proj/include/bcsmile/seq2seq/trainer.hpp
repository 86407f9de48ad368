#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bcsmile/corpus/records.hpp"
#include "bcsmile/landmarks/landmarks.hpp"
#include "bcsmile/metrics/comparison.hpp"
#include "bcsmile/metrics/pose_metrics.hpp"
#include "bcsmile/seq2seq/model.hpp"
#include "json.hpp"

namespace bcsmile::seq2seq {

struct TrainConfig {
  int epochs = 250;
  double learning_rate = 1e-4;
  double momentum = 0.99;
  double weight_decay = 1e-4;
  int plateau_patience = 20;
  double plateau_factor = 0.5;
  double plateau_min_delta = 1e-6;
  double grad_clip = 5.0;
  std::size_t batch_size = 1;
  std::size_t output_steps = 8;
  double teacher_forcing_decrement = 0.1;
  int teacher_forcing_interval = 20;
  std::uint64_t seed = 0;
  Ablation ablation = Ablation::speaker_listener_cond;
  ModelShape shape;
};

nlohmann::json to_json(const TrainConfig& c);
// Missing keys keep their defaults; unknown keys are an error.
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});
void validate(const TrainConfig& c);

// max(0, 1 - decrement * floor(epoch / interval))
double teacher_forcing_prob(int epoch, double decrement = 0.1, int interval = 20);

// One smile or non-smile window ready for the model, plus what is needed to
// score a prediction in landmark space.
struct TrainingInstance {
  std::string id;
  std::string dyad_id;
  corpus::WindowKind kind = corpus::WindowKind::smile;
  std::optional<corpus::Intensity> intensity;
  double duration = 0.0;  // annotated window length, seconds
  EmbeddingSequence speaker;
  EmbeddingSequence listener;
  features::ConditioningVector cond;
  std::vector<std::vector<double>> target;  // output_steps x 2K, normalized displacements
  landmarks::LandmarkFrame last_frame;      // aligned frame at the window start
  landmarks::NormalizationParams normalization;
  landmarks::LandmarkSequence ground_truth;  // aligned frames following last_frame
};

ModelInput model_input(const TrainingInstance& inst);

struct LrEvent {
  int epoch = 0;
  double old_lr = 0.0;
  double new_lr = 0.0;
};

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  std::vector<double> learning_rate;
  std::vector<LrEvent> lr_events;
  int best_epoch = -1;
  double best_val = 0.0;
};

struct TrainResult {
  ModelParams best;
  ModelParams last;
  TrainHistory history;
};

// Called after every epoch with (epoch, train loss, val loss).
using EpochCallback = std::function<void(int, double, double)>;

// Seeded SGD with momentum over the train set; the parameters with the lowest
// validation loss are kept. Validation loss is the free-running MSE.
TrainResult train(const std::vector<const TrainingInstance*>& train_set,
                  const std::vector<const TrainingInstance*>& val_set, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

// Mean free-running MSE.
double evaluate_loss(const ModelParams& params, const std::vector<const TrainingInstance*>& set, Ablation ablation,
                     std::size_t n_steps);

// Normalized displacement frames for an instance.
std::vector<std::vector<double>> predict(const ModelParams& params, const TrainingInstance& inst, Ablation ablation,
                                         std::size_t n_steps);

// Denormalizes with the instance's parameters and integrates from its last
// frame; returns the frames after last_frame.
landmarks::LandmarkSequence to_landmarks(const TrainingInstance& inst, const std::vector<std::vector<double>>& pred);

metrics::PoseErrorReport score_instance(const ModelParams& params, const TrainingInstance& inst, Ablation ablation,
                                        std::size_t n_steps, std::span<const double> sigmas = metrics::kDefaultSigmas);

struct RepeatOutcome {
  Ablation config{};
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  TrainHistory history;
  ModelParams best;
  std::vector<metrics::PoseErrorReport> per_instance;  // test set order
  double ape = 0.0;
  double pck_mean = 0.0;
  std::map<double, double> pck_by_sigma;
};

struct AblationSuiteConfig {
  TrainConfig train;
  std::size_t n_repeats = 10;
  std::vector<Ablation> configs{kAllAblations.begin(), kAllAblations.end()};
  std::size_t jobs = 1;
  std::vector<double> sigmas{metrics::kDefaultSigmas.begin(), metrics::kDefaultSigmas.end()};
};

// Seed of repeat r; shared by every configuration so comparisons are paired.
std::uint64_t repeat_seed(std::uint64_t root, std::size_t repeat);

// Trains every configuration n_repeats times and scores each best model on the
// test set. Runs are independent and may execute on up to `jobs` threads;
// results do not depend on scheduling.
std::vector<RepeatOutcome> run_ablation_suite(const std::vector<const TrainingInstance*>& train_set,
                                              const std::vector<const TrainingInstance*>& val_set,
                                              const std::vector<const TrainingInstance*>& test_set,
                                              const AblationSuiteConfig& config);

metrics::AblationResults collect_results(const std::vector<RepeatOutcome>& runs);

}  // namespace bcsmile::seq2seq
