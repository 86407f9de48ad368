#include "bcsmile/seq2seq/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "bcsmile/error.hpp"
#include "bcsmile/rng.hpp"

namespace bcsmile::seq2seq {

nlohmann::json to_json(const TrainConfig& c) {
  return nlohmann::json{
      {"epochs", c.epochs},
      {"learning_rate", c.learning_rate},
      {"momentum", c.momentum},
      {"weight_decay", c.weight_decay},
      {"plateau_patience", c.plateau_patience},
      {"plateau_factor", c.plateau_factor},
      {"plateau_min_delta", c.plateau_min_delta},
      {"grad_clip", c.grad_clip},
      {"batch_size", c.batch_size},
      {"output_steps", c.output_steps},
      {"teacher_forcing_decrement", c.teacher_forcing_decrement},
      {"teacher_forcing_interval", c.teacher_forcing_interval},
      {"seed", c.seed},
      {"ablation", std::string(to_string(c.ablation))},
      {"embedding_dim", c.shape.embedding_dim},
      {"encoder_hidden", c.shape.encoder_hidden},
      {"decoder_hidden", c.shape.decoder_hidden},
      {"attention_hidden", c.shape.attention_hidden},
      {"landmark_count", c.shape.landmark_count},
  };
}

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig c) {
  if (!j.is_object()) throw Error("train config: expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "epochs") c.epochs = value.get<int>();
      else if (key == "learning_rate") c.learning_rate = value.get<double>();
      else if (key == "momentum") c.momentum = value.get<double>();
      else if (key == "weight_decay") c.weight_decay = value.get<double>();
      else if (key == "plateau_patience") c.plateau_patience = value.get<int>();
      else if (key == "plateau_factor") c.plateau_factor = value.get<double>();
      else if (key == "plateau_min_delta") c.plateau_min_delta = value.get<double>();
      else if (key == "grad_clip") c.grad_clip = value.get<double>();
      else if (key == "batch_size") c.batch_size = value.get<std::size_t>();
      else if (key == "output_steps") c.output_steps = value.get<std::size_t>();
      else if (key == "teacher_forcing_decrement") c.teacher_forcing_decrement = value.get<double>();
      else if (key == "teacher_forcing_interval") c.teacher_forcing_interval = value.get<int>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "embedding_dim") c.shape.embedding_dim = value.get<std::size_t>();
      else if (key == "encoder_hidden") c.shape.encoder_hidden = value.get<std::size_t>();
      else if (key == "decoder_hidden") c.shape.decoder_hidden = value.get<std::size_t>();
      else if (key == "attention_hidden") c.shape.attention_hidden = value.get<std::size_t>();
      else if (key == "landmark_count") c.shape.landmark_count = value.get<std::size_t>();
      else if (key == "ablation") {
        auto a = parse_ablation(value.get<std::string>());
        if (!a) throw Error("unknown ablation '" + value.get<std::string>() + "'");
        c.ablation = *a;
      } else {
        throw Error("unknown key");
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error("train config: field '" + key + "': " + e.what());
    } catch (const Error& e) {
      throw Error("train config: field '" + key + "': " + e.what());
    }
  }
  validate(c);
  return c;
}

void validate(const TrainConfig& c) {
  if (c.epochs <= 0) throw Error("train config: epochs must be positive");
  if (!(c.learning_rate > 0.0)) throw Error("train config: learning_rate must be positive");
  if (c.momentum < 0.0 || c.momentum >= 1.0) throw Error("train config: momentum must be in [0, 1)");
  if (c.weight_decay < 0.0) throw Error("train config: weight_decay must be non-negative");
  if (c.plateau_patience <= 0) throw Error("train config: plateau_patience must be positive");
  if (!(c.plateau_factor > 0.0 && c.plateau_factor < 1.0)) throw Error("train config: plateau_factor must be in (0, 1)");
  if (c.batch_size == 0) throw Error("train config: batch_size must be positive");
  if (c.output_steps == 0) throw Error("train config: output_steps must be positive");
  if (c.teacher_forcing_interval <= 0) throw Error("train config: teacher_forcing_interval must be positive");
}

double teacher_forcing_prob(int epoch, double decrement, int interval) {
  if (epoch < 0) throw Error("teacher forcing: negative epoch");
  const int steps = epoch / interval;
  return std::max(0.0, 1.0 - decrement * steps);
}

ModelInput model_input(const TrainingInstance& inst) {
  return ModelInput{&inst.speaker, inst.listener.frames() > 0 ? &inst.listener : nullptr, inst.cond};
}

namespace {

std::string instance_diagnostics(const TrainingInstance& inst, int epoch, double lr) {
  std::ostringstream os;
  os << "non-finite loss at epoch " << epoch << " on instance " << inst.id << " (dyad " << inst.dyad_id
     << ", lr " << lr << ", speaker frames " << inst.speaker.frames() << ", listener frames "
     << inst.listener.frames() << ")";
  return os.str();
}

double global_norm(const std::vector<double>& g) {
  double s = 0.0;
  for (double v : g) s += v * v;
  return std::sqrt(s);
}

}  // namespace

double evaluate_loss(const ModelParams& params, const std::vector<const TrainingInstance*>& set, Ablation ablation,
                     std::size_t n_steps) {
  if (set.empty()) throw Error("evaluate_loss: empty set");
  double total = 0.0;
  const std::vector<bool> free_running(n_steps, false);
  for (const TrainingInstance* inst : set) {
    std::vector<std::vector<double>> target(inst->target.begin(),
                                            inst->target.begin() + static_cast<std::ptrdiff_t>(n_steps));
    total += forward_backward(params, model_input(*inst), ablation, target, free_running, nullptr);
  }
  return total / static_cast<double>(set.size());
}

TrainResult train(const std::vector<const TrainingInstance*>& train_set,
                  const std::vector<const TrainingInstance*>& val_set, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  validate(config);
  if (train_set.empty()) throw Error("train: empty train set");
  if (val_set.empty()) throw Error("train: empty validation set");
  const std::size_t n_steps = config.output_steps;
  for (const auto* set : {&train_set, &val_set}) {
    for (const TrainingInstance* inst : *set) {
      if (inst->target.size() < n_steps)
        throw Error("train: instance " + inst->id + " has " + std::to_string(inst->target.size()) +
                    " target frames, need " + std::to_string(n_steps));
    }
  }

  ModelParams params(config.shape);
  params.initialize(derive_seed(config.seed, "init"));
  Rng shuffle_rng = make_rng(config.seed, "shuffle");
  Rng forcing_rng = make_rng(config.seed, "teacher_forcing");
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  TrainResult result;
  result.best = params;
  double lr = config.learning_rate;
  double plateau_best = std::numeric_limits<double>::infinity();
  int bad_epochs = 0;
  std::vector<double> velocity(params.flat().size(), 0.0);
  Gradients grad(params.flat().size(), 0.0);
  std::vector<std::size_t> order(train_set.size());

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double p_force = teacher_forcing_prob(epoch, config.teacher_forcing_decrement, config.teacher_forcing_interval);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t b = start; b < end; ++b) {
        const TrainingInstance& inst = *train_set[order[b]];
        std::vector<bool> forced(n_steps, false);
        for (std::size_t t = 1; t < n_steps; ++t) forced[t] = unit(forcing_rng) < p_force;
        std::vector<std::vector<double>> target(inst.target.begin(),
                                                inst.target.begin() + static_cast<std::ptrdiff_t>(n_steps));
        const double loss = forward_backward(params, model_input(inst), config.ablation, target, forced, &grad);
        if (!std::isfinite(loss)) throw Error("train: " + instance_diagnostics(inst, epoch, lr));
        epoch_loss += loss;
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (double& g : grad) g *= inv;
      const double norm = global_norm(grad);
      if (!std::isfinite(norm)) throw Error("train: non-finite gradient norm at epoch " + std::to_string(epoch));
      if (config.grad_clip > 0.0 && norm > config.grad_clip) {
        const double s = config.grad_clip / norm;
        for (double& g : grad) g *= s;
      }
      auto theta = params.flat();
      for (std::size_t i = 0; i < theta.size(); ++i) {
        const double g = grad[i] + config.weight_decay * theta[i];
        velocity[i] = config.momentum * velocity[i] + g;
        theta[i] -= lr * velocity[i];
      }
    }
    epoch_loss /= static_cast<double>(train_set.size());
    const double val_loss = evaluate_loss(params, val_set, config.ablation, n_steps);
    if (!std::isfinite(val_loss))
      throw Error("train: non-finite validation loss at epoch " + std::to_string(epoch) + " (lr " +
                  std::to_string(lr) + ")");

    auto& h = result.history;
    h.train_loss.push_back(epoch_loss);
    h.val_loss.push_back(val_loss);
    h.learning_rate.push_back(lr);
    if (h.best_epoch < 0 || val_loss < h.best_val) {
      h.best_epoch = epoch;
      h.best_val = val_loss;
      result.best = params;
    }
    if (val_loss < plateau_best - config.plateau_min_delta) {
      plateau_best = val_loss;
      bad_epochs = 0;
    } else if (++bad_epochs >= config.plateau_patience) {
      const double new_lr = lr * config.plateau_factor;
      h.lr_events.push_back(LrEvent{epoch, lr, new_lr});
      lr = new_lr;
      bad_epochs = 0;
    }
    if (on_epoch) on_epoch(epoch, epoch_loss, val_loss);
  }
  result.last = params;
  return result;
}

std::vector<std::vector<double>> predict(const ModelParams& params, const TrainingInstance& inst, Ablation ablation,
                                         std::size_t n_steps) {
  return generate(params, model_input(inst), ablation, n_steps);
}

landmarks::LandmarkSequence to_landmarks(const TrainingInstance& inst, const std::vector<std::vector<double>>& pred) {
  landmarks::DisplacementSequence disp;
  disp.deltas = pred;
  disp.normalization = inst.normalization;
  landmarks::LandmarkSequence seq = landmarks::reconstruct(inst.last_frame, disp, inst.ground_truth.fps);
  seq.frames.erase(seq.frames.begin());
  seq.t0 = inst.ground_truth.t0;
  return seq;
}

metrics::PoseErrorReport score_instance(const ModelParams& params, const TrainingInstance& inst, Ablation ablation,
                                        std::size_t n_steps, std::span<const double> sigmas) {
  return metrics::evaluate_pose(to_landmarks(inst, predict(params, inst, ablation, n_steps)), inst.ground_truth,
                                sigmas);
}

std::uint64_t repeat_seed(std::uint64_t root, std::size_t repeat) {
  return derive_seed(root, "repeat/" + std::to_string(repeat));
}

std::vector<RepeatOutcome> run_ablation_suite(const std::vector<const TrainingInstance*>& train_set,
                                              const std::vector<const TrainingInstance*>& val_set,
                                              const std::vector<const TrainingInstance*>& test_set,
                                              const AblationSuiteConfig& config) {
  if (config.n_repeats == 0) throw Error("ablation suite: n_repeats must be positive");
  if (config.configs.empty()) throw Error("ablation suite: no configurations");
  if (test_set.empty()) throw Error("ablation suite: empty test set");

  std::vector<RepeatOutcome> runs;
  for (Ablation a : config.configs) {
    for (std::size_t r = 0; r < config.n_repeats; ++r) {
      RepeatOutcome o;
      o.config = a;
      o.repeat = r;
      o.seed = repeat_seed(config.train.seed, r);
      runs.push_back(std::move(o));
    }
  }

  auto run_one = [&](RepeatOutcome& o) {
    TrainConfig tc = config.train;
    tc.ablation = o.config;
    tc.seed = o.seed;
    TrainResult tr = train(train_set, val_set, tc);
    o.history = std::move(tr.history);
    o.best = std::move(tr.best);
    double sum_ape = 0.0, sum_pck = 0.0;
    for (const TrainingInstance* inst : test_set) {
      auto rep = score_instance(o.best, *inst, o.config, tc.output_steps, config.sigmas);
      sum_ape += rep.ape;
      sum_pck += rep.pck_mean;
      for (const auto& [s, v] : rep.pck_by_sigma) o.pck_by_sigma[s] += v;
      o.per_instance.push_back(std::move(rep));
    }
    const double n = static_cast<double>(test_set.size());
    o.ape = sum_ape / n;
    o.pck_mean = sum_pck / n;
    for (auto& [s, v] : o.pck_by_sigma) v /= n;
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(config.jobs, runs.size()));
  if (jobs == 1) {
    for (auto& o : runs) run_one(o);
    return runs;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(runs.size());
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < runs.size(); i = next++) {
        try {
          run_one(runs[i]);
        } catch (const std::exception& e) {
          errors[i] = std::string(to_string(runs[i].config)) + " repeat " + std::to_string(runs[i].repeat) + ": " +
                      e.what();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  for (const auto& e : errors) {
    if (!e.empty()) throw Error("ablation suite: " + e);
  }
  return runs;
}

metrics::AblationResults collect_results(const std::vector<RepeatOutcome>& runs) {
  metrics::AblationResults out;
  std::vector<const RepeatOutcome*> sorted;
  for (const auto& r : runs) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [](const RepeatOutcome* a, const RepeatOutcome* b) {
    return std::pair(a->config, a->repeat) < std::pair(b->config, b->repeat);
  });
  for (const RepeatOutcome* r : sorted) {
    auto& c = out[r->config];
    c.ape.push_back(r->ape);
    c.pck_mean.push_back(r->pck_mean);
    for (const auto& [s, v] : r->pck_by_sigma) c.pck_by_sigma[s].push_back(v);
  }
  return out;
}

}  // namespace bcsmile::seq2seq
