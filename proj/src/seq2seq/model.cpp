#include "bcsmile/seq2seq/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "bcsmile/error.hpp"
#include "bcsmile/rng.hpp"
#include "bcsmile/simd/kernels.hpp"

namespace bcsmile::seq2seq {

std::string_view to_string(Ablation a) {
  switch (a) {
    case Ablation::speaker_only: return "speaker_only";
    case Ablation::speaker_listener: return "speaker_listener";
    case Ablation::speaker_listener_cond: return "speaker_listener_cond";
    case Ablation::speaker_cond: return "speaker_cond";
  }
  return "?";
}

std::string_view display_name(Ablation a) {
  switch (a) {
    case Ablation::speaker_only: return "Speaker only (Baseline)";
    case Ablation::speaker_listener: return "Speaker and Listener";
    case Ablation::speaker_listener_cond: return "Speaker and Listener with Conditioning vector";
    case Ablation::speaker_cond: return "Speaker and Conditioning vector";
  }
  return "?";
}

std::optional<Ablation> parse_ablation(std::string_view s) {
  for (Ablation a : kAllAblations) {
    if (s == to_string(a)) return a;
  }
  return std::nullopt;
}

ModelParams::ModelParams(const ModelShape& shape) : shape_(shape) {
  const std::size_t d = shape.embedding_dim, he = shape.encoder_hidden, hd = shape.decoder_hidden;
  const std::size_t ha = shape.attention_hidden, f = shape.frame_dim();
  if (d == 0 || he == 0 || hd == 0 || ha == 0 || shape.landmark_count == 0)
    throw Error("model shape: all sizes must be positive");
  std::size_t offset = 0;
  auto add = [&](std::string_view name, std::size_t rows, std::size_t cols, std::size_t fan) {
    tensors_.push_back(TensorInfo{std::string(name), rows, cols, offset, fan});
    offset += rows * cols;
  };
  add(tensor::kEncWx, 3 * he, d, he);
  add(tensor::kEncWh, 3 * he, he, he);
  add(tensor::kEncBx, 3 * he, 1, he);
  add(tensor::kEncBh, 3 * he, 1, he);
  add(tensor::kListenerW, he, d, d);
  add(tensor::kListenerB, he, 1, d);
  add(tensor::kCondW, hd, he + features::kConditioningSize, he + features::kConditioningSize);
  add(tensor::kCondB, hd, 1, he + features::kConditioningSize);
  add(tensor::kAttWa, ha, he, he);
  add(tensor::kAttWb, ha, hd, hd);
  add(tensor::kAttV, ha, 1, ha);
  add(tensor::kDecWx, 3 * hd, he + f, hd);
  add(tensor::kDecWh, 3 * hd, hd, hd);
  add(tensor::kDecBx, 3 * hd, 1, hd);
  add(tensor::kDecBh, 3 * hd, 1, hd);
  add(tensor::kOutW, f, hd, hd);
  add(tensor::kOutB, f, 1, hd);
  data_.assign(offset, 0.0);
}

const TensorInfo& ModelParams::info(std::string_view name) const {
  for (const auto& t : tensors_) {
    if (t.name == name) return t;
  }
  throw Error("unknown tensor '" + std::string(name) + "'");
}

std::span<double> ModelParams::tensor(std::string_view name) {
  const auto& t = info(name);
  return {data_.data() + t.offset, t.size()};
}

std::span<const double> ModelParams::tensor(std::string_view name) const {
  const auto& t = info(name);
  return {data_.data() + t.offset, t.size()};
}

void ModelParams::initialize(std::uint64_t seed) {
  Rng rng(seed);
  for (const auto& t : tensors_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(t.fan));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (std::size_t i = 0; i < t.size(); ++i) data_[t.offset + i] = u(rng);
  }
}

void ModelParams::set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Views of one GRU's weights (and their gradients, same layout).
struct GruView {
  const double* wx;
  const double* wh;
  const double* bx;
  const double* bh;
  std::size_t in;
  std::size_t hidden;
};

struct GruGrad {
  double* wx;
  double* wh;
  double* bx;
  double* bh;
};

struct GruStep {
  std::vector<double> x;
  std::vector<double> h_prev;
  std::vector<double> gh_n;  // W_hn h + b_hn
  std::vector<double> r, z, n;
  std::vector<double> h;
};

// PyTorch gate equations:
//   r = sig(W_ir x + b_ir + W_hr h + b_hr)
//   z = sig(W_iz x + b_iz + W_hz h + b_hz)
//   n = tanh(W_in x + b_in + r * (W_hn h + b_hn))
//   h' = (1 - z) * n + z * h
void gru_forward(const GruView& g, GruStep& s) {
  const auto& k = simd::kernels();
  const std::size_t h = g.hidden;
  std::vector<double> gx(g.bx, g.bx + 3 * h);
  std::vector<double> gh(g.bh, g.bh + 3 * h);
  k.gemv(g.wx, 3 * h, g.in, s.x.data(), gx.data());
  k.gemv(g.wh, 3 * h, h, s.h_prev.data(), gh.data());
  s.r.resize(h);
  s.z.resize(h);
  s.n.resize(h);
  s.h.resize(h);
  s.gh_n.assign(gh.begin() + 2 * h, gh.end());
  for (std::size_t i = 0; i < h; ++i) {
    s.r[i] = sigmoid(gx[i] + gh[i]);
    s.z[i] = sigmoid(gx[h + i] + gh[h + i]);
    s.n[i] = std::tanh(gx[2 * h + i] + s.r[i] * gh[2 * h + i]);
    s.h[i] = (1.0 - s.z[i]) * s.n[i] + s.z[i] * s.h_prev[i];
  }
}

// Given dL/dh', accumulates weight gradients and returns dL/dx; dL/dh_prev
// is added to dh_prev.
std::vector<double> gru_backward(const GruView& g, const GruGrad& gg, const GruStep& s, std::span<const double> dh,
                                 std::span<double> dh_prev) {
  const auto& k = simd::kernels();
  const std::size_t h = g.hidden;
  std::vector<double> dgx(3 * h), dgh(3 * h);
  for (std::size_t i = 0; i < h; ++i) {
    const double dn = dh[i] * (1.0 - s.z[i]);
    const double dz = dh[i] * (s.h_prev[i] - s.n[i]);
    dh_prev[i] += dh[i] * s.z[i];
    const double dn_pre = dn * (1.0 - s.n[i] * s.n[i]);
    const double dz_pre = dz * s.z[i] * (1.0 - s.z[i]);
    const double dr_pre = dn_pre * s.gh_n[i] * s.r[i] * (1.0 - s.r[i]);
    dgx[i] = dr_pre;
    dgx[h + i] = dz_pre;
    dgx[2 * h + i] = dn_pre;
    dgh[i] = dr_pre;
    dgh[h + i] = dz_pre;
    dgh[2 * h + i] = dn_pre * s.r[i];
  }
  k.rank1(gg.wx, 3 * h, g.in, dgx.data(), s.x.data());
  k.rank1(gg.wh, 3 * h, h, dgh.data(), s.h_prev.data());
  for (std::size_t i = 0; i < 3 * h; ++i) {
    gg.bx[i] += dgx[i];
    gg.bh[i] += dgh[i];
  }
  std::vector<double> dx(g.in, 0.0);
  k.gemv_t(g.wx, 3 * h, g.in, dgx.data(), dx.data());
  k.gemv_t(g.wh, 3 * h, h, dgh.data(), dh_prev.data());
  return dx;
}

GruView encoder_view(const ModelParams& p) {
  const auto& s = p.shape();
  return {p.tensor(tensor::kEncWx).data(), p.tensor(tensor::kEncWh).data(), p.tensor(tensor::kEncBx).data(),
          p.tensor(tensor::kEncBh).data(), s.embedding_dim,                  s.encoder_hidden};
}

GruView decoder_view(const ModelParams& p) {
  const auto& s = p.shape();
  return {p.tensor(tensor::kDecWx).data(),
          p.tensor(tensor::kDecWh).data(),
          p.tensor(tensor::kDecBx).data(),
          p.tensor(tensor::kDecBh).data(),
          s.encoder_hidden + s.frame_dim(),
          s.decoder_hidden};
}

double* grad_of(const ModelParams& p, Gradients& g, std::string_view name) { return g.data() + p.info(name).offset; }

GruGrad encoder_grad(const ModelParams& p, Gradients& g) {
  return {grad_of(p, g, tensor::kEncWx), grad_of(p, g, tensor::kEncWh), grad_of(p, g, tensor::kEncBx),
          grad_of(p, g, tensor::kEncBh)};
}

GruGrad decoder_grad(const ModelParams& p, Gradients& g) {
  return {grad_of(p, g, tensor::kDecWx), grad_of(p, g, tensor::kDecWh), grad_of(p, g, tensor::kDecBx),
          grad_of(p, g, tensor::kDecBh)};
}

void check_input(const ModelParams& params, const EmbeddingSequence& speaker, const EmbeddingSequence* listener) {
  const std::size_t d = params.shape().embedding_dim;
  if (speaker.frames() == 0) throw Error("encode: empty speaker sequence");
  if (speaker.dim != d)
    throw Error("encode: speaker embedding dim " + std::to_string(speaker.dim) + " != model dim " +
                std::to_string(d));
  if (listener && listener->frames() > 0 && listener->dim != d)
    throw Error("encode: listener embedding dim " + std::to_string(listener->dim) + " != model dim " +
                std::to_string(d));
}

struct EncoderCache {
  std::vector<double> listener_mean;  // empty when unused
  std::vector<GruStep> steps;
};

std::vector<double> initial_hidden(const ModelParams& params, const EmbeddingSequence* listener, Ablation ablation,
                                   std::vector<double>* mean_out) {
  const auto& s = params.shape();
  std::vector<double> h0(s.encoder_hidden, 0.0);
  if (!uses_listener(ablation) || listener == nullptr || listener->frames() == 0) return h0;
  std::vector<double> m = listener->mean();
  auto b = params.tensor(tensor::kListenerB);
  std::copy(b.begin(), b.end(), h0.begin());
  simd::kernels().gemv(params.tensor(tensor::kListenerW).data(), s.encoder_hidden, s.embedding_dim, m.data(),
                       h0.data());
  if (mean_out) *mean_out = std::move(m);
  return h0;
}

EncoderOutput run_encoder(const ModelParams& params, const EmbeddingSequence& speaker,
                          const EmbeddingSequence* listener, Ablation ablation, EncoderCache* cache) {
  check_input(params, speaker, listener);
  EncoderOutput out;
  out.initial = initial_hidden(params, listener, ablation, cache ? &cache->listener_mean : nullptr);
  const GruView g = encoder_view(params);
  std::vector<double> h = out.initial;
  for (std::size_t t = 0; t < speaker.frames(); ++t) {
    GruStep step;
    auto f = speaker.frame(t);
    step.x.assign(f.begin(), f.end());
    step.h_prev = h;
    gru_forward(g, step);
    h = step.h;
    out.outputs.push_back(h);
    if (cache) cache->steps.push_back(std::move(step));
  }
  out.final_hidden = h;
  return out;
}

// W_a h_i for every encoder output.
std::vector<std::vector<double>> project_outputs(const ModelParams& params,
                                                 const std::vector<std::vector<double>>& outputs) {
  const auto& s = params.shape();
  const double* wa = params.tensor(tensor::kAttWa).data();
  std::vector<std::vector<double>> e(outputs.size(), std::vector<double>(s.attention_hidden, 0.0));
  for (std::size_t i = 0; i < outputs.size(); ++i)
    simd::kernels().gemv(wa, s.attention_hidden, s.encoder_hidden, outputs[i].data(), e[i].data());
  return e;
}

struct AttentionCache {
  std::vector<std::vector<double>> m;  // tanh(W_a h_i + W_b s)
  AttentionResult result;
};

AttentionCache attend_projected(const ModelParams& params, std::span<const double> s_prev,
                                const std::vector<std::vector<double>>& outputs,
                                const std::vector<std::vector<double>>& projected) {
  const auto& s = params.shape();
  const auto& k = simd::kernels();
  const std::size_t ha = s.attention_hidden;
  std::vector<double> f(ha, 0.0);
  k.gemv(params.tensor(tensor::kAttWb).data(), ha, s.decoder_hidden, s_prev.data(), f.data());
  const double* v = params.tensor(tensor::kAttV).data();

  AttentionCache c;
  const std::size_t t_len = outputs.size();
  c.m.resize(t_len);
  std::vector<double> scores(t_len);
  for (std::size_t i = 0; i < t_len; ++i) {
    c.m[i].resize(ha);
    for (std::size_t j = 0; j < ha; ++j) c.m[i][j] = std::tanh(projected[i][j] + f[j]);
    scores[i] = k.dot(v, c.m[i].data(), ha);
  }
  const double mx = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  c.result.weights.resize(t_len);
  for (std::size_t i = 0; i < t_len; ++i) {
    c.result.weights[i] = std::exp(scores[i] - mx);
    total += c.result.weights[i];
  }
  c.result.context.assign(s.encoder_hidden, 0.0);
  for (std::size_t i = 0; i < t_len; ++i) {
    c.result.weights[i] /= total;
    k.axpy(c.result.weights[i], outputs[i].data(), c.result.context.data(), s.encoder_hidden);
  }
  return c;
}

std::vector<double> cond_input(std::span<const double> final_hidden, const features::ConditioningVector* cond) {
  std::vector<double> u(final_hidden.begin(), final_hidden.end());
  for (std::size_t i = 0; i < features::kConditioningSize; ++i) u.push_back(cond ? cond->values[i] : 0.0);
  return u;
}

// Pre-activation of the decoder initializer.
std::vector<double> init_pre(const ModelParams& params, std::span<const double> u) {
  const auto& s = params.shape();
  auto b = params.tensor(tensor::kCondB);
  std::vector<double> pre(b.begin(), b.end());
  simd::kernels().gemv(params.tensor(tensor::kCondW).data(), s.decoder_hidden, u.size(), u.data(), pre.data());
  return pre;
}

std::vector<double> output_frame(const ModelParams& params, std::span<const double> state) {
  const auto& s = params.shape();
  auto b = params.tensor(tensor::kOutB);
  std::vector<double> y(b.begin(), b.end());
  simd::kernels().gemv(params.tensor(tensor::kOutW).data(), s.frame_dim(), s.decoder_hidden, state.data(), y.data());
  return y;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

EncoderOutput encode(const ModelParams& params, const EmbeddingSequence& speaker, const EmbeddingSequence* listener,
                     Ablation ablation) {
  return run_encoder(params, speaker, listener, ablation, nullptr);
}

AttentionResult attend(const ModelParams& params, std::span<const double> s_prev,
                       const std::vector<std::vector<double>>& outputs) {
  if (outputs.empty()) throw Error("attend: no encoder outputs");
  return attend_projected(params, s_prev, outputs, project_outputs(params, outputs)).result;
}

std::vector<double> init_decoder(const ModelParams& params, std::span<const double> final_hidden,
                                 const features::ConditioningVector* cond) {
  std::vector<double> pre = init_pre(params, cond_input(final_hidden, cond));
  for (double& v : pre) v = std::max(v, 0.0);
  return pre;
}

std::vector<std::vector<double>> generate(const ModelParams& params, const ModelInput& input, Ablation ablation,
                                          std::size_t n_steps, std::span<const double> initial_frame) {
  const auto& s = params.shape();
  if (!input.speaker) throw Error("generate: missing speaker embeddings");
  if (!initial_frame.empty() && initial_frame.size() != s.frame_dim())
    throw Error("generate: initial frame has " + std::to_string(initial_frame.size()) + " values, expected " +
                std::to_string(s.frame_dim()));
  const EncoderOutput enc = encode(params, *input.speaker, input.listener, ablation);
  const auto projected = project_outputs(params, enc.outputs);
  std::vector<double> state =
      init_decoder(params, enc.final_hidden, uses_conditioning(ablation) ? &input.cond : nullptr);
  std::vector<double> prev(s.frame_dim(), 0.0);
  if (!initial_frame.empty()) prev.assign(initial_frame.begin(), initial_frame.end());

  const GruView dec = decoder_view(params);
  std::vector<std::vector<double>> frames;
  for (std::size_t t = 0; t < n_steps; ++t) {
    AttentionCache att = attend_projected(params, state, enc.outputs, projected);
    GruStep step;
    step.x = std::move(att.result.context);
    step.x.insert(step.x.end(), prev.begin(), prev.end());
    step.h_prev = state;
    gru_forward(dec, step);
    state = step.h;
    std::vector<double> y = output_frame(params, state);
    for (double& v : y) v = clamp01(v);
    prev = y;
    frames.push_back(std::move(y));
  }
  return frames;
}

double forward_backward(const ModelParams& params, const ModelInput& input, Ablation ablation,
                        const std::vector<std::vector<double>>& target, const std::vector<bool>& teacher_forced,
                        Gradients* grad) {
  const auto& s = params.shape();
  const auto& k = simd::kernels();
  if (!input.speaker) throw Error("forward_backward: missing speaker embeddings");
  const std::size_t n = target.size();
  const std::size_t fd = s.frame_dim();
  const std::size_t he = s.encoder_hidden, hd = s.decoder_hidden, ha = s.attention_hidden;
  if (n == 0) throw Error("forward_backward: empty target");
  for (const auto& t : target) {
    if (t.size() != fd) throw Error("forward_backward: target frame size mismatch");
  }

  // ---- forward ----
  EncoderCache enc_cache;
  const EncoderOutput enc = run_encoder(params, *input.speaker, input.listener, ablation, &enc_cache);
  const auto projected = project_outputs(params, enc.outputs);
  const features::ConditioningVector* cond = uses_conditioning(ablation) ? &input.cond : nullptr;
  const std::vector<double> u = cond_input(enc.final_hidden, cond);
  const std::vector<double> pre0 = init_pre(params, u);
  std::vector<double> state(pre0);
  for (double& v : state) v = std::max(v, 0.0);

  const GruView dec = decoder_view(params);
  std::vector<AttentionCache> atts;
  std::vector<GruStep> steps;
  std::vector<std::vector<double>> ys;
  std::vector<bool> fed_back(n, false);  // step t's input frame is the model's own output
  std::vector<double> prev(fd, 0.0);
  double loss = 0.0;
  const double scale = 1.0 / static_cast<double>(n * fd);
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) {
      const bool forced = t < teacher_forced.size() && teacher_forced[t];
      if (forced) {
        prev = target[t - 1];
      } else {
        prev = ys[t - 1];
        for (double& v : prev) v = clamp01(v);
        fed_back[t] = true;
      }
    }
    atts.push_back(attend_projected(params, state, enc.outputs, projected));
    GruStep step;
    step.x = atts.back().result.context;
    step.x.insert(step.x.end(), prev.begin(), prev.end());
    step.h_prev = state;
    gru_forward(dec, step);
    state = step.h;
    std::vector<double> y = output_frame(params, state);
    for (std::size_t j = 0; j < fd; ++j) {
      const double e = y[j] - target[t][j];
      loss += e * e;
    }
    steps.push_back(std::move(step));
    ys.push_back(std::move(y));
  }
  loss *= scale;
  if (!grad) return loss;

  // ---- backward ----
  Gradients& g = *grad;
  if (g.size() != params.flat().size()) g.assign(params.flat().size(), 0.0);
  const GruGrad dec_g = decoder_grad(params, g);
  double* d_out_w = grad_of(params, g, tensor::kOutW);
  double* d_out_b = grad_of(params, g, tensor::kOutB);
  double* d_att_wb = grad_of(params, g, tensor::kAttWb);
  double* d_att_v = grad_of(params, g, tensor::kAttV);
  const double* out_w = params.tensor(tensor::kOutW).data();
  const double* att_wb = params.tensor(tensor::kAttWb).data();
  const double* att_v = params.tensor(tensor::kAttV).data();

  const std::size_t t_len = enc.outputs.size();
  std::vector<std::vector<double>> d_enc_out(t_len, std::vector<double>(he, 0.0));
  std::vector<std::vector<double>> d_projected(t_len, std::vector<double>(ha, 0.0));
  std::vector<double> d_state(hd, 0.0);         // dL/ds_t flowing back from later steps
  std::vector<double> d_fed(fd, 0.0);           // dL/d clamp(y_t) from step t+1's input

  for (std::size_t t = n; t-- > 0;) {
    std::vector<double> dy(fd);
    for (std::size_t j = 0; j < fd; ++j) {
      dy[j] = 2.0 * (ys[t][j] - target[t][j]) * scale;
      if (t + 1 < n && fed_back[t + 1] && ys[t][j] > 0.0 && ys[t][j] < 1.0) dy[j] += d_fed[j];
    }
    const GruStep& step = steps[t];
    k.rank1(d_out_w, fd, hd, dy.data(), step.h.data());
    for (std::size_t j = 0; j < fd; ++j) d_out_b[j] += dy[j];
    k.gemv_t(out_w, fd, hd, dy.data(), d_state.data());

    std::vector<double> d_prev_state(hd, 0.0);
    const std::vector<double> dx = gru_backward(dec, dec_g, step, d_state, d_prev_state);
    std::fill(d_fed.begin(), d_fed.end(), 0.0);
    std::copy(dx.begin() + static_cast<std::ptrdiff_t>(he), dx.end(), d_fed.begin());

    // Attention at step t used s_{t-1} = step.h_prev.
    const AttentionCache& att = atts[t];
    const auto& alpha = att.result.weights;
    std::vector<double> d_alpha(t_len);
    double weighted = 0.0;
    for (std::size_t i = 0; i < t_len; ++i) {
      d_alpha[i] = k.dot(dx.data(), enc.outputs[i].data(), he);
      weighted += alpha[i] * d_alpha[i];
      k.axpy(alpha[i], dx.data(), d_enc_out[i].data(), he);
    }
    std::vector<double> d_f(ha, 0.0);
    for (std::size_t i = 0; i < t_len; ++i) {
      const double da = alpha[i] * (d_alpha[i] - weighted);
      if (da == 0.0) continue;
      for (std::size_t j = 0; j < ha; ++j) {
        d_att_v[j] += da * att.m[i][j];
        const double dpre = da * att_v[j] * (1.0 - att.m[i][j] * att.m[i][j]);
        d_projected[i][j] += dpre;
        d_f[j] += dpre;
      }
    }
    k.rank1(d_att_wb, ha, hd, d_f.data(), step.h_prev.data());
    k.gemv_t(att_wb, ha, hd, d_f.data(), d_prev_state.data());
    d_state = std::move(d_prev_state);
  }

  // Decoder initializer: s_0 = ReLU(W_c u + b_c).
  {
    double* d_cond_w = grad_of(params, g, tensor::kCondW);
    double* d_cond_b = grad_of(params, g, tensor::kCondB);
    std::vector<double> dpre(hd);
    for (std::size_t j = 0; j < hd; ++j) dpre[j] = pre0[j] > 0.0 ? d_state[j] : 0.0;
    k.rank1(d_cond_w, hd, u.size(), dpre.data(), u.data());
    for (std::size_t j = 0; j < hd; ++j) d_cond_b[j] += dpre[j];
    std::vector<double> du(u.size(), 0.0);
    k.gemv_t(params.tensor(tensor::kCondW).data(), hd, u.size(), dpre.data(), du.data());
    k.axpy(1.0, du.data(), d_enc_out[t_len - 1].data(), he);
  }

  // Attention projections W_a h_i.
  {
    double* d_att_wa = grad_of(params, g, tensor::kAttWa);
    const double* att_wa = params.tensor(tensor::kAttWa).data();
    for (std::size_t i = 0; i < t_len; ++i) {
      k.rank1(d_att_wa, ha, he, d_projected[i].data(), enc.outputs[i].data());
      k.gemv_t(att_wa, ha, he, d_projected[i].data(), d_enc_out[i].data());
    }
  }

  // Encoder BPTT.
  const GruView enc_v = encoder_view(params);
  const GruGrad enc_g = encoder_grad(params, g);
  std::vector<double> dh(he, 0.0);
  for (std::size_t t = t_len; t-- > 0;) {
    k.axpy(1.0, d_enc_out[t].data(), dh.data(), he);
    std::vector<double> dh_prev(he, 0.0);
    gru_backward(enc_v, enc_g, enc_cache.steps[t], dh, dh_prev);
    dh = std::move(dh_prev);
  }
  if (!enc_cache.listener_mean.empty()) {
    k.rank1(grad_of(params, g, tensor::kListenerW), he, s.embedding_dim, dh.data(), enc_cache.listener_mean.data());
    double* d_lb = grad_of(params, g, tensor::kListenerB);
    for (std::size_t j = 0; j < he; ++j) d_lb[j] += dh[j];
  }
  return loss;
}

}  // namespace bcsmile::seq2seq
