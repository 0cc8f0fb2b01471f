#include "newsseg/models.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "newsseg/error.hpp"

namespace newsseg {

using nlohmann::json;

int64_t vivit_token_count(int frames, int height, int width, int tubelet,
                          int patch) {
  return 1 + (static_cast<int64_t>(frames) / tubelet) * (height / patch) *
                 (width / patch);
}

int64_t ast_token_count(int64_t n_mel_frames, int n_mels, int patch) {
  int64_t padded = (n_mel_frames + patch - 1) / patch;
  return 1 + (static_cast<int64_t>(n_mels) / patch) * padded;
}

int ProbVector::argmax() const {
  int best = 0;
  for (size_t i = 1; i < p.size(); ++i) {
    if (p[i] > p[static_cast<size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

void ProbVector::validate() const {
  float sum = 0.0f;
  for (float v : p) {
    if (!(v >= 0.0f)) throw ShapeError("probability component is negative");
    sum += v;
  }
  if (std::abs(sum - 1.0f) > 1e-6f) {
    throw ShapeError("probabilities sum to " + std::to_string(sum));
  }
}

ProbVector softmax(const TensorF& logits) {
  if (logits.numel() == 0) throw EmptyInputError("softmax of empty logits");
  ProbVector out;
  out.p.resize(logits.data.size());
  float mx = logits.data[0];
  for (float v : logits.data) mx = std::max(mx, v);
  double sum = 0.0;
  for (size_t i = 0; i < logits.data.size(); ++i) {
    double e = std::exp(static_cast<double>(logits.data[i]) - mx);
    out.p[i] = static_cast<float>(e);
    sum += e;
  }
  float inv = static_cast<float>(1.0 / sum);
  for (float& v : out.p) v *= inv;
  return out;
}

ProbVector frame_vote(const std::vector<ProbVector>& probs) {
  if (probs.empty()) throw EmptyInputError("frame_vote over no frames");
  const size_t arity = probs.front().p.size();
  std::vector<double> acc(arity, 0.0);
  for (const ProbVector& pv : probs) {
    if (pv.p.size() != arity) {
      throw ShapeError("frame probability vectors disagree on arity");
    }
    for (size_t i = 0; i < arity; ++i) acc[i] += pv.p[i];
  }
  double sum = 0.0;
  for (double v : acc) sum += v;
  ProbVector out;
  out.p.resize(arity);
  for (size_t i = 0; i < arity; ++i) {
    out.p[i] = static_cast<float>(acc[i] / sum);
  }
  return out;
}

int binary_relabel(SceneLabel target, SceneLabel actual) {
  return actual == target ? 0 : 1;
}

void Model::zero_grads() {
  visit_params([](const std::string&, TensorF*, TensorF* grad) {
    grad->fill(0.0f);
  });
}

int64_t Model::parameter_count() {
  int64_t n = 0;
  visit_params([&](const std::string&, TensorF* p, TensorF*) {
    n += p->numel();
  });
  return n;
}

// ---------------------------------------------------------------------------
// VivitNet
// ---------------------------------------------------------------------------

template <typename T>
VivitNet<T>::VivitNet(const TransformerConfig& cfg, const ClipGeometry& geo,
                      int num_classes, uint64_t init_seed)
    : config(cfg), geometry(geo), has_head_(num_classes > 0) {
  if (geo.height % cfg.patch != 0 || geo.width % cfg.patch != 0) {
    throw ShapeError("clip height/width must be divisible by the patch size");
  }
  if (geo.max_frames % cfg.tubelet != 0) {
    throw ShapeError("max_frames must be divisible by the tubelet extent");
  }
  const int64_t patch_dim =
      static_cast<int64_t>(cfg.tubelet) * cfg.patch * cfg.patch * 3;
  const int64_t max_patch_tokens =
      vivit_token_count(geo.max_frames, geo.height, geo.width, cfg.tubelet,
                        cfg.patch) -
      1;
  embed_.resize(patch_dim, cfg.hidden);
  trunk_ = nn::TransformerTrunk<T>(cfg.hidden, cfg.layers, cfg.heads,
                                   cfg.effective_mlp_dim(), cfg.dropout,
                                   max_patch_tokens);
  if (has_head_) head_.resize(cfg.hidden, num_classes);

  RngStream rng(init_seed, /*stream=*/1);
  embed_.init(rng);
  trunk_.init(rng);
  if (has_head_) head_.init(rng);
}

template <typename T>
Tensor<T> VivitNet<T>::patchify(const Tensor<T>& clip) const {
  const int64_t frames = clip.dim(0);
  const int64_t h = clip.dim(1);
  const int64_t w = clip.dim(2);
  const int64_t tub = config.tubelet;
  const int64_t p = config.patch;
  const int64_t gh = h / p;
  const int64_t gw = w / p;
  const int64_t n_tokens = (frames / tub) * gh * gw;
  const int64_t patch_dim = tub * p * p * 3;
  Tensor<T> tokens({n_tokens, patch_dim});
  int64_t row = 0;
  for (int64_t t0 = 0; t0 < frames; t0 += tub) {
    for (int64_t gy = 0; gy < gh; ++gy) {
      for (int64_t gx = 0; gx < gw; ++gx) {
        T* dst = tokens.ptr() + row * patch_dim;
        for (int64_t dt = 0; dt < tub; ++dt) {
          const T* frame = clip.ptr() + (t0 + dt) * h * w * 3;
          for (int64_t py = 0; py < p; ++py) {
            const T* src = frame + ((gy * p + py) * w + gx * p) * 3;
            std::copy(src, src + p * 3, dst);
            dst += p * 3;
          }
        }
        ++row;
      }
    }
  }
  return tokens;
}

template <typename T>
Tensor<T> VivitNet<T>::forward_feature(const Tensor<T>& clip, bool training) {
  if (clip.rank() != 4 || clip.dim(3) != 3) {
    throw ShapeError("clip must have shape [frames, height, width, 3]");
  }
  const int64_t frames = clip.dim(0);
  if (frames < 1 || frames % config.tubelet != 0) {
    throw ShapeError("frame count " + std::to_string(frames) +
                     " must be a positive multiple of tubelet " +
                     std::to_string(config.tubelet));
  }
  if (frames > geometry.max_frames) {
    throw ShapeError("clip of " + std::to_string(frames) +
                     " frames exceeds the configured maximum of " +
                     std::to_string(geometry.max_frames));
  }
  if (clip.dim(1) != geometry.height || clip.dim(2) != geometry.width) {
    throw ShapeError("clip resolution must be " +
                     std::to_string(geometry.height) + "x" +
                     std::to_string(geometry.width));
  }
  Tensor<T> tokens = embed_.forward(patchify(clip), training);
  last_tokens_ = tokens.rows() + 1;
  return trunk_.forward(tokens, training);
}

template <typename T>
Tensor<T> VivitNet<T>::forward(const Tensor<T>& clip, bool training) {
  Tensor<T> feat = forward_feature(clip, training);
  Tensor<T> logits = head_.forward(feat, training);
  logits.shape = {logits.numel()};
  return logits;
}

template <typename T>
Tensor<T> VivitNet<T>::backward_feature(const Tensor<T>& dfeat) {
  Tensor<T> dtokens = trunk_.backward(dfeat);
  return embed_.backward(dtokens, /*compute_dx=*/false);
}

template <typename T>
void VivitNet<T>::backward(const Tensor<T>& dlogits) {
  Tensor<T> dl = dlogits;
  dl.shape = {1, dlogits.numel()};
  Tensor<T> dfeat = head_.backward(dl);
  backward_feature(dfeat);
}

template <typename T>
void VivitNet<T>::visit(const std::string& prefix,
                        const nn::ParamVisitor<T>& fn) {
  embed_.visit(prefix + ".embed", fn);
  trunk_.visit(prefix + ".trunk", fn);
  if (has_head_) head_.visit(prefix + ".head", fn);
}

template <typename T>
void VivitNet<T>::set_rng(RngStream* rng) {
  trunk_.set_rng(rng);
}

// ---------------------------------------------------------------------------
// AstNet
// ---------------------------------------------------------------------------

template <typename T>
AstNet<T>::AstNet(const TransformerConfig& cfg, int mels, int max_frames,
                  int num_classes, uint64_t init_seed)
    : config(cfg),
      n_mels(mels),
      max_mel_frames(max_frames),
      has_head_(num_classes > 0) {
  if (n_mels % cfg.patch != 0) {
    throw ShapeError("n_mels must be divisible by the patch size");
  }
  if (max_mel_frames % cfg.patch != 0) {
    throw ShapeError("max_mel_frames must be divisible by the patch size");
  }
  const int64_t patch_dim = static_cast<int64_t>(cfg.patch) * cfg.patch;
  const int64_t max_patch_tokens =
      ast_token_count(max_mel_frames, n_mels, cfg.patch) - 1;
  embed_.resize(patch_dim, cfg.hidden);
  trunk_ = nn::TransformerTrunk<T>(cfg.hidden, cfg.layers, cfg.heads,
                                   cfg.effective_mlp_dim(), cfg.dropout,
                                   max_patch_tokens);
  if (has_head_) head_.resize(cfg.hidden, num_classes);

  RngStream rng(init_seed, /*stream=*/2);
  embed_.init(rng);
  trunk_.init(rng);
  if (has_head_) head_.init(rng);
}

template <typename T>
Tensor<T> AstNet<T>::patchify(const Tensor<T>& spec) const {
  const int64_t p = config.patch;
  const int64_t nf = spec.dim(1);
  const int64_t padded = ((nf + p - 1) / p) * p;
  const int64_t grid_f = n_mels / p;
  const int64_t grid_t = padded / p;
  const int64_t patch_dim = p * p;
  Tensor<T> tokens({grid_t * grid_f, patch_dim});
  int64_t row = 0;
  // Time-major token order so shorter inputs consume a positional prefix.
  for (int64_t gt = 0; gt < grid_t; ++gt) {
    for (int64_t gf = 0; gf < grid_f; ++gf) {
      T* dst = tokens.ptr() + row * patch_dim;
      for (int64_t py = 0; py < p; ++py) {
        const int64_t mel = gf * p + py;
        for (int64_t px = 0; px < p; ++px) {
          const int64_t tcol = gt * p + px;
          *dst++ = tcol < nf ? spec.ptr()[mel * nf + tcol] : T{0};
        }
      }
      ++row;
    }
  }
  return tokens;
}

template <typename T>
Tensor<T> AstNet<T>::forward_feature(const Tensor<T>& spec, bool training) {
  if (spec.rank() != 2 || spec.dim(0) != n_mels) {
    throw ShapeError("spectrogram must have shape [" +
                     std::to_string(n_mels) + ", n_frames]");
  }
  if (spec.dim(1) < 1 || spec.dim(1) > max_mel_frames) {
    throw ShapeError("spectrogram frame count " + std::to_string(spec.dim(1)) +
                     " outside [1," + std::to_string(max_mel_frames) + "]");
  }
  Tensor<T> tokens = embed_.forward(patchify(spec), training);
  last_tokens_ = tokens.rows() + 1;
  return trunk_.forward(tokens, training);
}

template <typename T>
Tensor<T> AstNet<T>::forward(const Tensor<T>& spec, bool training) {
  Tensor<T> feat = forward_feature(spec, training);
  Tensor<T> logits = head_.forward(feat, training);
  logits.shape = {logits.numel()};
  return logits;
}

template <typename T>
Tensor<T> AstNet<T>::backward_feature(const Tensor<T>& dfeat) {
  Tensor<T> dtokens = trunk_.backward(dfeat);
  return embed_.backward(dtokens, /*compute_dx=*/false);
}

template <typename T>
void AstNet<T>::backward(const Tensor<T>& dlogits) {
  Tensor<T> dl = dlogits;
  dl.shape = {1, dlogits.numel()};
  Tensor<T> dfeat = head_.backward(dl);
  backward_feature(dfeat);
}

template <typename T>
void AstNet<T>::visit(const std::string& prefix,
                      const nn::ParamVisitor<T>& fn) {
  embed_.visit(prefix + ".embed", fn);
  trunk_.visit(prefix + ".trunk", fn);
  if (has_head_) head_.visit(prefix + ".head", fn);
}

template <typename T>
void AstNet<T>::set_rng(RngStream* rng) {
  trunk_.set_rng(rng);
}

// ---------------------------------------------------------------------------
// FusionNet
// ---------------------------------------------------------------------------

template <typename T>
FusionNet<T>::FusionNet(const TransformerConfig& cfg, const ClipGeometry& geo,
                        int n_mels, int max_mel_frames, int num_classes,
                        uint64_t init_seed)
    : config(cfg),
      video_(cfg, geo, /*num_classes=*/0, init_seed),
      audio_(cfg, n_mels, max_mel_frames, /*num_classes=*/0, init_seed) {
  fusion_.resize(2 * cfg.hidden, num_classes);
  RngStream rng(init_seed, /*stream=*/3);
  fusion_.init(rng);
}

template <typename T>
Tensor<T> FusionNet<T>::forward(const Tensor<T>& clip, const Tensor<T>& spec,
                                bool training) {
  Tensor<T> vfeat = video_.forward_feature(clip, training);
  Tensor<T> afeat = audio_.forward_feature(spec, training);
  Tensor<T> joint({1, 2 * static_cast<int64_t>(config.hidden)});
  std::copy(vfeat.data.begin(), vfeat.data.end(), joint.data.begin());
  std::copy(afeat.data.begin(), afeat.data.end(),
            joint.data.begin() + static_cast<size_t>(config.hidden));
  Tensor<T> logits = fusion_.forward(joint, training);
  logits.shape = {logits.numel()};
  return logits;
}

template <typename T>
void FusionNet<T>::backward(const Tensor<T>& dlogits) {
  Tensor<T> dl = dlogits;
  dl.shape = {1, dlogits.numel()};
  Tensor<T> djoint = fusion_.backward(dl);
  const int64_t d = config.hidden;
  Tensor<T> dv({d});
  Tensor<T> da({d});
  std::copy(djoint.data.begin(), djoint.data.begin() + static_cast<size_t>(d),
            dv.data.begin());
  std::copy(djoint.data.begin() + static_cast<size_t>(d), djoint.data.end(),
            da.data.begin());
  video_.backward_feature(dv);
  audio_.backward_feature(da);
}

template <typename T>
void FusionNet<T>::visit(const std::string& prefix,
                         const nn::ParamVisitor<T>& fn) {
  video_.visit(prefix + ".video", fn);
  audio_.visit(prefix + ".audio", fn);
  fusion_.visit(prefix + ".fusion", fn);
}

template <typename T>
void FusionNet<T>::set_rng(RngStream* rng) {
  video_.set_rng(rng);
  audio_.set_rng(rng);
}

// ---------------------------------------------------------------------------
// CnnNet
// ---------------------------------------------------------------------------

template <typename T>
CnnNet<T>::CnnNet(const CnnConfig& cfg, int num_classes, uint64_t init_seed)
    : config(cfg) {
  if (cfg.stage_blocks.size() != cfg.stage_channels.size() ||
      cfg.stage_blocks.empty()) {
    throw ShapeError("stage_blocks and stage_channels must align");
  }
  stem_ = nn::Conv2d<T>(3, cfg.stem_channels, 7, 4, 3);
  stem_norm_ = nn::GroupNorm<T>(
      cfg.stem_channels,
      std::min<int64_t>(cfg.group_norm_groups, cfg.stem_channels));
  int64_t channels = cfg.stem_channels;
  for (size_t s = 0; s < cfg.stage_blocks.size(); ++s) {
    int64_t out = cfg.stage_channels[s];
    for (int b = 0; b < cfg.stage_blocks[s]; ++b) {
      int64_t stride = (s > 0 && b == 0) ? 2 : 1;
      int64_t groups = std::min<int64_t>(cfg.group_norm_groups, out);
      blocks_.emplace_back(channels, out, stride, groups);
      channels = out;
    }
  }
  head_.resize(channels, num_classes);

  RngStream rng(init_seed, /*stream=*/4);
  stem_.init(rng);
  for (auto& b : blocks_) b.init(rng);
  head_.init(rng);
}

template <typename T>
Tensor<T> CnnNet<T>::forward(const Tensor<T>& image, bool training) {
  if (image.rank() != 3 || image.dim(2) != 3) {
    throw ShapeError("image must have shape [height, width, 3]");
  }
  if (image.dim(0) != config.input_size || image.dim(1) != config.input_size) {
    throw ShapeError("image must be " + std::to_string(config.input_size) +
                     "x" + std::to_string(config.input_size));
  }
  nn::FeatureMap<T> x;
  x.height = image.dim(0);
  x.width = image.dim(1);
  x.data = image;
  x.data.shape = {x.height * x.width, 3};

  x = stem_.forward(x, training);
  x.data = stem_norm_.forward(x.data, training);
  x.data = stem_relu_.forward(x.data, training);
  for (auto& b : blocks_) x = b.forward(x, training);

  // Global average pool over spatial positions.
  const int64_t positions = x.height * x.width;
  const int64_t channels = x.data.cols();
  Tensor<T> pooled({1, channels});
  for (int64_t r = 0; r < positions; ++r) {
    const T* row = x.data.ptr() + r * channels;
    for (int64_t c = 0; c < channels; ++c) {
      pooled.data[static_cast<size_t>(c)] += row[c];
    }
  }
  for (auto& v : pooled.data) v /= static_cast<T>(positions);
  if (training) {
    cached_positions_ = positions;
    pooled_input_dims_ = {x.height, x.width};
  }

  Tensor<T> logits = head_.forward(pooled, training);
  logits.shape = {logits.numel()};
  return logits;
}

template <typename T>
void CnnNet<T>::backward(const Tensor<T>& dlogits) {
  Tensor<T> dl = dlogits;
  dl.shape = {1, dlogits.numel()};
  Tensor<T> dpooled = head_.backward(dl);
  const int64_t channels = dpooled.numel();
  nn::FeatureMap<T> dx;
  dx.height = pooled_input_dims_[0];
  dx.width = pooled_input_dims_[1];
  dx.data = Tensor<T>({dx.height * dx.width, channels});
  const T inv = T{1} / static_cast<T>(cached_positions_);
  for (int64_t r = 0; r < cached_positions_; ++r) {
    T* row = dx.data.ptr() + r * channels;
    for (int64_t c = 0; c < channels; ++c) {
      row[c] = dpooled.data[static_cast<size_t>(c)] * inv;
    }
  }
  for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) {
    dx = it->backward(dx, /*compute_dx=*/true);
  }
  dx.data = stem_relu_.backward(dx.data);
  dx.data = stem_norm_.backward(dx.data);
  stem_.backward(dx, /*compute_dx=*/false);
}

template <typename T>
void CnnNet<T>::visit(const std::string& prefix,
                      const nn::ParamVisitor<T>& fn) {
  stem_.visit(prefix + ".stem", fn);
  stem_norm_.visit(prefix + ".stem_norm", fn);
  for (size_t i = 0; i < blocks_.size(); ++i) {
    blocks_[i].visit(prefix + ".block" + std::to_string(i), fn);
  }
  head_.visit(prefix + ".head", fn);
}

template class VivitNet<float>;
template class VivitNet<double>;
template class AstNet<float>;
template class AstNet<double>;
template class FusionNet<float>;
template class FusionNet<double>;
template class CnnNet<float>;
template class CnnNet<double>;

// ---------------------------------------------------------------------------
// ModelSpec and the type-erased wrappers
// ---------------------------------------------------------------------------

namespace {

json transformer_to_json(const TransformerConfig& c) {
  return json{{"layers", c.layers},   {"heads", c.heads},
              {"hidden", c.hidden},   {"mlp_dim", c.mlp_dim},
              {"patch", c.patch},     {"tubelet", c.tubelet},
              {"dropout", c.dropout}};
}

TransformerConfig transformer_from_json(const json& j) {
  TransformerConfig c;
  c.layers = j.at("layers").get<int>();
  c.heads = j.at("heads").get<int>();
  c.hidden = j.at("hidden").get<int>();
  c.mlp_dim = j.at("mlp_dim").get<int>();
  c.patch = j.at("patch").get<int>();
  c.tubelet = j.at("tubelet").get<int>();
  c.dropout = j.at("dropout").get<double>();
  return c;
}

}  // namespace

std::string ModelSpec::fingerprint() const {
  json j;
  j["kind"] = kind;
  j["num_classes"] = num_classes;
  j["transformer"] = transformer_to_json(transformer);
  j["geometry"] = {{"max_frames", geometry.max_frames},
                   {"height", geometry.height},
                   {"width", geometry.width}};
  j["ast_max_mel_frames"] = ast_max_mel_frames;
  j["cnn"] = {{"stem_channels", cnn.stem_channels},
              {"stage_blocks", cnn.stage_blocks},
              {"stage_channels", cnn.stage_channels},
              {"group_norm_groups", cnn.group_norm_groups},
              {"input_size", cnn.input_size}};
  if (binary_target.has_value()) {
    j["binary_target"] = std::string(label_name(*binary_target));
  } else {
    j["binary_target"] = nullptr;
  }
  return j.dump();
}

ModelSpec ModelSpec::from_fingerprint(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw CorruptFileError(std::string("bad model fingerprint JSON: ") +
                           e.what());
  }
  ModelSpec spec;
  spec.kind = j.at("kind").get<std::string>();
  spec.num_classes = j.at("num_classes").get<int>();
  spec.transformer = transformer_from_json(j.at("transformer"));
  spec.geometry.max_frames = j.at("geometry").at("max_frames").get<int>();
  spec.geometry.height = j.at("geometry").at("height").get<int>();
  spec.geometry.width = j.at("geometry").at("width").get<int>();
  spec.ast_max_mel_frames = j.at("ast_max_mel_frames").get<int>();
  const json& cj = j.at("cnn");
  spec.cnn.stem_channels = cj.at("stem_channels").get<int>();
  spec.cnn.stage_blocks = cj.at("stage_blocks").get<std::vector<int>>();
  spec.cnn.stage_channels = cj.at("stage_channels").get<std::vector<int>>();
  spec.cnn.group_norm_groups = cj.at("group_norm_groups").get<int>();
  spec.cnn.input_size = cj.at("input_size").get<int>();
  if (j.contains("binary_target") && !j.at("binary_target").is_null()) {
    spec.binary_target = parse_label(j.at("binary_target").get<std::string>());
  }
  return spec;
}

ModelSpec model_spec_for(const std::string& id) {
  ModelSpec spec;
  if (id == "frame") {
    spec.kind = "frame";
    return spec;
  }
  if (id == "vivit") {
    spec.kind = "vivit";
    return spec;
  }
  if (id == "ast") {
    spec.kind = "ast";
    return spec;
  }
  if (id == "fusion") {
    spec.kind = "fusion";
    return spec;
  }
  if (id == "fusion-l") {
    // 32 frames for the larger temporal context; mel window grows with it.
    spec.kind = "fusion-l";
    spec.geometry.max_frames = 32;
    spec.ast_max_mel_frames = 112;  // 55,296 samples -> 105 frames -> pad 112
    return spec;
  }
  if (id.rfind("binary:", 0) == 0) {
    SceneLabel target = parse_label(id.substr(7));
    return binary_wrap(model_spec_for("fusion-l"), target);
  }
  throw SchemaError("unknown model id \"" + id +
                    "\" (expected frame|vivit|ast|fusion|fusion-l|"
                    "binary:<Label>)");
}

ModelSpec binary_wrap(const ModelSpec& base, SceneLabel target) {
  ModelSpec spec = base;
  spec.num_classes = 2;
  spec.binary_target = target;
  return spec;
}

namespace {

std::string display_id(const ModelSpec& spec) {
  if (spec.binary_target.has_value()) {
    return "binary:" + std::string(label_name(*spec.binary_target));
  }
  return spec.kind;
}

class VivitModel : public Model {
 public:
  VivitModel(const ModelSpec& spec, uint64_t seed)
      : spec_(spec),
        net_(spec.transformer, spec.geometry, spec.num_classes, seed),
        drop_rng_(seed, 100) {
    net_.set_rng(&drop_rng_);
  }
  std::string kind() const override { return display_id(spec_); }
  int num_classes() const override { return spec_.num_classes; }
  std::string config_fingerprint() const override {
    return spec_.fingerprint();
  }
  TensorF forward(const Example& ex, bool training) override {
    if (ex.video.empty()) throw ShapeError("model needs a video clip input");
    return net_.forward(ex.video, training);
  }
  void backward(const TensorF& dlogits) override { net_.backward(dlogits); }
  void visit_params(const nn::ParamVisitor<float>& fn) override {
    net_.visit("vivit", fn);
  }
  void seed_dropout(uint64_t seed) override {
    drop_rng_ = RngStream(seed, 100);
  }
  int64_t last_token_count() const override {
    return net_.last_token_count();
  }

 private:
  ModelSpec spec_;
  VivitNet<float> net_;
  RngStream drop_rng_;
};

class AstModel : public Model {
 public:
  AstModel(const ModelSpec& spec, uint64_t seed)
      : spec_(spec),
        net_(spec.transformer, 128, spec.ast_max_mel_frames, spec.num_classes,
             seed),
        drop_rng_(seed, 101) {
    net_.set_rng(&drop_rng_);
  }
  std::string kind() const override { return display_id(spec_); }
  int num_classes() const override { return spec_.num_classes; }
  std::string config_fingerprint() const override {
    return spec_.fingerprint();
  }
  TensorF forward(const Example& ex, bool training) override {
    if (ex.audio.empty()) throw ShapeError("model needs a spectrogram input");
    return net_.forward(ex.audio, training);
  }
  void backward(const TensorF& dlogits) override { net_.backward(dlogits); }
  void visit_params(const nn::ParamVisitor<float>& fn) override {
    net_.visit("ast", fn);
  }
  void seed_dropout(uint64_t seed) override {
    drop_rng_ = RngStream(seed, 101);
  }
  int64_t last_token_count() const override {
    return net_.last_token_count();
  }

 private:
  ModelSpec spec_;
  AstNet<float> net_;
  RngStream drop_rng_;
};

class FusionModel : public Model {
 public:
  FusionModel(const ModelSpec& spec, uint64_t seed)
      : spec_(spec),
        net_(spec.transformer, spec.geometry, 128, spec.ast_max_mel_frames,
             spec.num_classes, seed),
        drop_rng_(seed, 102) {
    net_.set_rng(&drop_rng_);
  }
  std::string kind() const override { return display_id(spec_); }
  int num_classes() const override { return spec_.num_classes; }
  std::string config_fingerprint() const override {
    return spec_.fingerprint();
  }
  TensorF forward(const Example& ex, bool training) override {
    if (ex.video.empty() || ex.audio.empty()) {
      throw ShapeError("fusion model needs both video and audio inputs");
    }
    return net_.forward(ex.video, ex.audio, training);
  }
  void backward(const TensorF& dlogits) override { net_.backward(dlogits); }
  void visit_params(const nn::ParamVisitor<float>& fn) override {
    net_.visit("fusion_model", fn);
  }
  void seed_dropout(uint64_t seed) override {
    drop_rng_ = RngStream(seed, 102);
  }
  int64_t last_token_count() const override {
    return net_.last_token_count();
  }

 private:
  ModelSpec spec_;
  FusionNet<float> net_;
  RngStream drop_rng_;
};

class FrameModel : public Model {
 public:
  FrameModel(const ModelSpec& spec, uint64_t seed)
      : spec_(spec), net_(spec.cnn, spec.num_classes, seed) {}
  std::string kind() const override { return display_id(spec_); }
  int num_classes() const override { return spec_.num_classes; }
  std::string config_fingerprint() const override {
    return spec_.fingerprint();
  }
  TensorF forward(const Example& ex, bool training) override {
    if (ex.image.empty()) throw ShapeError("frame model needs an image input");
    return net_.forward(ex.image, training);
  }
  void backward(const TensorF& dlogits) override { net_.backward(dlogits); }
  void visit_params(const nn::ParamVisitor<float>& fn) override {
    net_.visit("frame", fn);
  }
  void seed_dropout(uint64_t) override {}

 private:
  ModelSpec spec_;
  CnnNet<float> net_;
};

}  // namespace

std::unique_ptr<Model> build_model(const ModelSpec& spec, uint64_t init_seed) {
  if (spec.kind == "frame") {
    return std::make_unique<FrameModel>(spec, init_seed);
  }
  if (spec.kind == "vivit") {
    return std::make_unique<VivitModel>(spec, init_seed);
  }
  if (spec.kind == "ast") {
    return std::make_unique<AstModel>(spec, init_seed);
  }
  if (spec.kind == "fusion" || spec.kind == "fusion-l") {
    return std::make_unique<FusionModel>(spec, init_seed);
  }
  throw SchemaError("unknown model kind \"" + spec.kind + "\"");
}

}  // namespace newsseg
