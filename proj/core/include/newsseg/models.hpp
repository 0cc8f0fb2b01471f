#pragma once

#include <atomic>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "newsseg/cnn.hpp"
#include "newsseg/features.hpp"
#include "newsseg/labels.hpp"
#include "newsseg/nn.hpp"
#include "newsseg/tensor.hpp"

namespace newsseg {

/// Reduced transformer dimensions shared by the video and audio branches.
struct TransformerConfig {
  int layers = 6;
  int heads = 6;
  int hidden = 384;
  int mlp_dim = 0;  // 0 -> 4 * hidden
  int patch = 16;
  int tubelet = 2;  // temporal extent of video tubelets
  double dropout = 0.1;

  int effective_mlp_dim() const { return mlp_dim > 0 ? mlp_dim : 4 * hidden; }
  bool operator==(const TransformerConfig&) const = default;
};

/// Video/clip geometry the model is built for. Shorter clips than
/// max_frames are accepted (positional prefix); larger are rejected.
struct ClipGeometry {
  int max_frames = 16;
  int height = 224;
  int width = 224;
  bool operator==(const ClipGeometry&) const = default;
};

struct CnnConfig {
  int stem_channels = 16;
  std::vector<int> stage_blocks = {1, 1, 1};
  std::vector<int> stage_channels = {16, 32, 64};
  int group_norm_groups = 8;
  int input_size = 224;
  bool operator==(const CnnConfig&) const = default;
};

/// Token-count laws (class token included).
int64_t vivit_token_count(int frames, int height, int width, int tubelet,
                          int patch);
int64_t ast_token_count(int64_t n_mel_frames, int n_mels, int patch);

/// Probability vector over 5 scene labels (or 2 for binary models).
struct ProbVector {
  std::vector<float> p;

  int argmax() const;
  void validate() const;  // non-negative, sums to 1 within 1e-6
};

/// Numerically stable softmax (max subtraction).
ProbVector softmax(const TensorF& logits);

/// Arithmetic mean of per-frame probabilities, renormalized.
/// Throws EmptyInputError on an empty list.
ProbVector frame_vote(const std::vector<ProbVector>& probs);

/// One-vs-all relabel: 0 for the target class, 1 for the rest.
int binary_relabel(SceneLabel target, SceneLabel actual);

/// Materialized inputs for one training/inference example. Unused
/// modalities stay empty.
struct Example {
  TensorF video;  // [frames, H, W, 3], values in [0,1]
  TensorF audio;  // [n_mels, n_frames], log-mel power
  TensorF image;  // [H, W, 3], values in [0,1]
  int label = 0;
};

/// Type-erased classifier with a derivative path for the trainer.
class Model {
 public:
  virtual ~Model() = default;
  virtual std::string kind() const = 0;
  virtual int num_classes() const = 0;
  /// Canonical JSON fingerprint of the architecture settings.
  virtual std::string config_fingerprint() const = 0;
  virtual TensorF forward(const Example& ex, bool training) = 0;
  virtual void backward(const TensorF& dlogits) = 0;
  virtual void visit_params(const nn::ParamVisitor<float>& fn) = 0;
  virtual void seed_dropout(uint64_t seed) = 0;
  /// Token count consumed by the most recent forward (transformer models;
  /// 0 for the frame CNN).
  virtual int64_t last_token_count() const { return 0; }

  void zero_grads();
  int64_t parameter_count();
};

/// Everything needed to build (or re-build) a model; serialized into the
/// weight-file header.
struct ModelSpec {
  std::string kind = "fusion";  // frame|vivit|ast|fusion|fusion-l|binary:<L>
  int num_classes = 5;
  TransformerConfig transformer;
  ClipGeometry geometry;
  int ast_max_mel_frames = 64;  // padded time extent the AST branch accepts
  CnnConfig cnn;
  std::optional<SceneLabel> binary_target;

  std::string fingerprint() const;
  static ModelSpec from_fingerprint(const std::string& json_text);
  bool operator==(const ModelSpec&) const = default;
};

/// Named presets: frame, vivit, ast, fusion, fusion-l, binary:<Label>.
/// Throws SchemaError for unknown ids.
ModelSpec model_spec_for(const std::string& id);

/// One-vs-all wrapper: same backbone settings, two-way head.
ModelSpec binary_wrap(const ModelSpec& base, SceneLabel target);

std::unique_ptr<Model> build_model(const ModelSpec& spec, uint64_t init_seed);

// ---------------------------------------------------------------------------
// Concrete nets, templated so gradient checks can run in double precision.
// ---------------------------------------------------------------------------

/// Spatio-temporal transformer over tubelet embeddings of an RGB clip.
template <typename T>
class VivitNet {
 public:
  VivitNet(const TransformerConfig& cfg, const ClipGeometry& geo,
           int num_classes, uint64_t init_seed);

  /// clip: [frames, H, W, 3] with frames divisible by tubelet and
  /// frames <= geometry max. Returns logits [num_classes].
  Tensor<T> forward(const Tensor<T>& clip, bool training);
  void backward(const Tensor<T>& dlogits);
  Tensor<T> forward_feature(const Tensor<T>& clip, bool training);
  Tensor<T> backward_feature(const Tensor<T>& dfeat);

  int64_t last_token_count() const { return last_tokens_; }
  void visit(const std::string& prefix, const nn::ParamVisitor<T>& fn);
  void set_rng(RngStream* rng);

  TransformerConfig config;
  ClipGeometry geometry;

 private:
  Tensor<T> patchify(const Tensor<T>& clip) const;

  nn::Linear<T> embed_;
  nn::TransformerTrunk<T> trunk_;
  nn::Linear<T> head_;
  // Relaxed atomic: concurrent eval forwards may race on the report value.
  std::atomic<int64_t> last_tokens_{0};
  bool has_head_;
};

/// Transformer over 16x16 patches of a log-mel spectrogram, zero-padded on
/// the time axis to a multiple of the patch size.
template <typename T>
class AstNet {
 public:
  AstNet(const TransformerConfig& cfg, int n_mels, int max_mel_frames,
         int num_classes, uint64_t init_seed);

  /// spec: [n_mels, n_frames] with n_frames <= max. Returns logits.
  Tensor<T> forward(const Tensor<T>& spec, bool training);
  void backward(const Tensor<T>& dlogits);
  Tensor<T> forward_feature(const Tensor<T>& spec, bool training);
  Tensor<T> backward_feature(const Tensor<T>& dfeat);

  int64_t last_token_count() const { return last_tokens_; }
  void visit(const std::string& prefix, const nn::ParamVisitor<T>& fn);
  void set_rng(RngStream* rng);

  TransformerConfig config;
  int n_mels;
  int max_mel_frames;

 private:
  Tensor<T> patchify(const Tensor<T>& spec) const;

  nn::Linear<T> embed_;
  nn::TransformerTrunk<T> trunk_;
  nn::Linear<T> head_;
  std::atomic<int64_t> last_tokens_{0};
  bool has_head_;
};

/// Video and audio class-token features concatenated into a single linear
/// fusion layer.
template <typename T>
class FusionNet {
 public:
  FusionNet(const TransformerConfig& cfg, const ClipGeometry& geo, int n_mels,
            int max_mel_frames, int num_classes, uint64_t init_seed);

  Tensor<T> forward(const Tensor<T>& clip, const Tensor<T>& spec,
                    bool training);
  void backward(const Tensor<T>& dlogits);

  int64_t fusion_input_width() const { return 2 * config.hidden; }
  int64_t last_token_count() const {
    return video_.last_token_count() + audio_.last_token_count();
  }
  void visit(const std::string& prefix, const nn::ParamVisitor<T>& fn);
  void set_rng(RngStream* rng);

  TransformerConfig config;

 private:
  VivitNet<T> video_;
  AstNet<T> audio_;
  nn::Linear<T> fusion_;
};

/// Residual CNN over a single RGB frame.
template <typename T>
class CnnNet {
 public:
  CnnNet(const CnnConfig& cfg, int num_classes, uint64_t init_seed);

  /// image: [H, W, 3] in [0,1]. Returns logits.
  Tensor<T> forward(const Tensor<T>& image, bool training);
  void backward(const Tensor<T>& dlogits);
  void visit(const std::string& prefix, const nn::ParamVisitor<T>& fn);
  void set_rng(RngStream*) {}

  CnnConfig config;

 private:
  nn::Conv2d<T> stem_;
  nn::GroupNorm<T> stem_norm_;
  nn::Relu<T> stem_relu_;
  std::vector<nn::ResidualBlock<T>> blocks_;
  nn::Linear<T> head_;
  int64_t cached_positions_ = 0;
  std::array<int64_t, 2> pooled_input_dims_{};
};

extern template class VivitNet<float>;
extern template class VivitNet<double>;
extern template class AstNet<float>;
extern template class AstNet<double>;
extern template class FusionNet<float>;
extern template class FusionNet<double>;
extern template class CnnNet<float>;
extern template class CnnNet<double>;

}  // namespace newsseg
