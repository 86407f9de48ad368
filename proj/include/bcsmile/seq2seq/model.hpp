#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bcsmile/features/features.hpp"
#include "bcsmile/seq2seq/embedding.hpp"

namespace bcsmile::seq2seq {

enum class Ablation { speaker_only, speaker_listener, speaker_listener_cond, speaker_cond };

inline constexpr std::array<Ablation, 4> kAllAblations{Ablation::speaker_only, Ablation::speaker_listener,
                                                      Ablation::speaker_listener_cond, Ablation::speaker_cond};

std::string_view to_string(Ablation a);
// Row label as printed in the ablation table.
std::string_view display_name(Ablation a);
std::optional<Ablation> parse_ablation(std::string_view s);
inline bool uses_listener(Ablation a) { return a == Ablation::speaker_listener || a == Ablation::speaker_listener_cond; }
inline bool uses_conditioning(Ablation a) { return a == Ablation::speaker_listener_cond || a == Ablation::speaker_cond; }

struct ModelShape {
  std::size_t embedding_dim = 128;
  std::size_t encoder_hidden = 128;
  std::size_t decoder_hidden = 128;
  std::size_t attention_hidden = 64;
  std::size_t landmark_count = 68;

  std::size_t frame_dim() const { return 2 * landmark_count; }
  bool operator==(const ModelShape&) const = default;
};

struct TensorInfo {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t offset = 0;
  std::size_t fan = 1;  // init bound is 1/sqrt(fan)
  std::size_t size() const { return rows * cols; }
};

// All weights in one flat buffer; tensors are row-major views into it.
// Gate blocks of the GRUs are stacked as [reset; update; candidate].
class ModelParams {
 public:
  ModelParams() = default;
  explicit ModelParams(const ModelShape& shape);

  const ModelShape& shape() const { return shape_; }
  const std::vector<TensorInfo>& tensors() const { return tensors_; }
  const TensorInfo& info(std::string_view name) const;

  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }
  std::span<double> tensor(std::string_view name);
  std::span<const double> tensor(std::string_view name) const;

  // Uniform(-1/sqrt(fan), 1/sqrt(fan)) per tensor.
  void initialize(std::uint64_t seed);
  void set_zero();

 private:
  ModelShape shape_;
  std::vector<TensorInfo> tensors_;
  std::vector<double> data_;
};

// Tensor names.
namespace tensor {
inline constexpr std::string_view kEncWx = "encoder.w_input";
inline constexpr std::string_view kEncWh = "encoder.w_hidden";
inline constexpr std::string_view kEncBx = "encoder.b_input";
inline constexpr std::string_view kEncBh = "encoder.b_hidden";
inline constexpr std::string_view kListenerW = "listener_init.weight";
inline constexpr std::string_view kListenerB = "listener_init.bias";
inline constexpr std::string_view kCondW = "conditioning.weight";
inline constexpr std::string_view kCondB = "conditioning.bias";
inline constexpr std::string_view kAttWa = "attention.w_encoder";
inline constexpr std::string_view kAttWb = "attention.w_decoder";
inline constexpr std::string_view kAttV = "attention.v";
inline constexpr std::string_view kDecWx = "decoder.w_input";
inline constexpr std::string_view kDecWh = "decoder.w_hidden";
inline constexpr std::string_view kDecBx = "decoder.b_input";
inline constexpr std::string_view kDecBh = "decoder.b_hidden";
inline constexpr std::string_view kOutW = "output.weight";
inline constexpr std::string_view kOutB = "output.bias";
}  // namespace tensor

struct EncoderOutput {
  std::vector<std::vector<double>> outputs;  // h_1..h_T
  std::vector<double> initial;               // h_0
  std::vector<double> final_hidden;          // h_T
};

// GRU over the speaker frames. h_0 is the projected mean of the listener frames
// when the ablation uses the listener, zero otherwise.
EncoderOutput encode(const ModelParams& params, const EmbeddingSequence& speaker, const EmbeddingSequence* listener,
                     Ablation ablation);

struct AttentionResult {
  std::vector<double> weights;  // alpha, sums to 1
  std::vector<double> context;
};

// a_i = v^T tanh(W_a h_i + W_b s_prev); alpha = softmax(a); context = sum alpha_i h_i.
AttentionResult attend(const ModelParams& params, std::span<const double> s_prev,
                       const std::vector<std::vector<double>>& outputs);

// ReLU(W [final_hidden ; cond] + b); cond is replaced by zeros when absent.
std::vector<double> init_decoder(const ModelParams& params, std::span<const double> final_hidden,
                                 const features::ConditioningVector* cond);

struct ModelInput {
  const EmbeddingSequence* speaker = nullptr;
  const EmbeddingSequence* listener = nullptr;  // may be null
  features::ConditioningVector cond;
};

// Recursive decoding: step t consumes [context_t ; previous frame], where the
// first previous frame is initial_frame (zeros if empty). Outputs are clamped
// to [0, 1].
std::vector<std::vector<double>> generate(const ModelParams& params, const ModelInput& input, Ablation ablation,
                                          std::size_t n_steps, std::span<const double> initial_frame = {});

// Gradient buffer with the same layout as the parameters.
using Gradients = std::vector<double>;

// Mean squared error over all steps and dimensions. teacher_forced[t] (t >= 1)
// feeds target[t-1] instead of the model's own clamped output into step t.
// Accumulates d loss / d params into grad when non-null.
double forward_backward(const ModelParams& params, const ModelInput& input, Ablation ablation,
                        const std::vector<std::vector<double>>& target, const std::vector<bool>& teacher_forced,
                        Gradients* grad);

}  // namespace bcsmile::seq2seq
