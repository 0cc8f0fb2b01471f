#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "newsseg/rng.hpp"
#include "newsseg/tensor.hpp"

namespace newsseg::nn {

template <typename T>
using EMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using EMap = Eigen::Map<EMat<T>>;
template <typename T>
using ECMap = Eigen::Map<const EMat<T>>;

template <typename T>
EMap<T> as_matrix(Tensor<T>& t, int64_t rows, int64_t cols) {
  return EMap<T>(t.ptr(), rows, cols);
}
template <typename T>
ECMap<T> as_matrix(const Tensor<T>& t, int64_t rows, int64_t cols) {
  return ECMap<T>(t.ptr(), rows, cols);
}

/// Parameter visitor: (qualified name, parameter, gradient).
template <typename T>
using ParamVisitor =
    std::function<void(const std::string&, Tensor<T>*, Tensor<T>*)>;

template <typename T>
void init_truncated_normal(Tensor<T>& t, RngStream& rng, double stddev = 0.02) {
  for (auto& v : t.data) v = static_cast<T>(rng.truncated_normal(stddev));
}

// ---------------------------------------------------------------------------
// Linear: y = x W^T + b, x is [n, in], W is [out, in].
// ---------------------------------------------------------------------------
template <typename T>
struct Linear {
  int64_t in = 0;
  int64_t out = 0;
  Tensor<T> weight, bias;
  Tensor<T> dweight, dbias;
  Tensor<T> cached_x;

  Linear() = default;
  Linear(int64_t in_dim, int64_t out_dim) { resize(in_dim, out_dim); }

  void resize(int64_t in_dim, int64_t out_dim) {
    in = in_dim;
    out = out_dim;
    weight = Tensor<T>({out, in});
    bias = Tensor<T>({out});
    dweight = Tensor<T>({out, in});
    dbias = Tensor<T>({out});
  }

  void init(RngStream& rng, double stddev = 0.02) {
    init_truncated_normal(weight, rng, stddev);
    bias.fill(T{0});
  }

  Tensor<T> forward(const Tensor<T>& x, bool training) {
    const int64_t n = x.numel() / in;
    Tensor<T> y({n, out});
    as_matrix(y, n, out).noalias() =
        as_matrix(x, n, in) * as_matrix(weight, out, in).transpose();
    auto ymap = as_matrix(y, n, out);
    ymap.rowwise() +=
        Eigen::Map<const Eigen::RowVectorX<T>>(bias.ptr(), out);
    if (training) cached_x = x;
    return y;
  }

  /// Returns dx (empty when compute_dx is false). Accumulates dweight/dbias.
  Tensor<T> backward(const Tensor<T>& dy, bool compute_dx = true) {
    const int64_t n = dy.numel() / out;
    as_matrix(dweight, out, in).noalias() +=
        as_matrix(dy, n, out).transpose() * as_matrix(cached_x, n, in);
    Eigen::Map<Eigen::RowVectorX<T>>(dbias.ptr(), out) +=
        as_matrix(dy, n, out).colwise().sum();
    Tensor<T> dx;
    if (compute_dx) {
      dx = Tensor<T>({n, in});
      as_matrix(dx, n, in).noalias() =
          as_matrix(dy, n, out) * as_matrix(weight, out, in);
    }
    return dx;
  }

  void visit(const std::string& prefix, const ParamVisitor<T>& fn) {
    fn(prefix + ".weight", &weight, &dweight);
    fn(prefix + ".bias", &bias, &dbias);
  }
};

// ---------------------------------------------------------------------------
// LayerNorm over the last dimension, learned affine.
// ---------------------------------------------------------------------------
template <typename T>
struct LayerNorm {
  int64_t dim = 0;
  T eps = static_cast<T>(1e-5);
  Tensor<T> gamma, beta;
  Tensor<T> dgamma, dbeta;
  Tensor<T> cached_xhat;
  std::vector<T> cached_inv_std;

  LayerNorm() = default;
  explicit LayerNorm(int64_t d) { resize(d); }

  void resize(int64_t d) {
    dim = d;
    gamma = Tensor<T>({d});
    beta = Tensor<T>({d});
    dgamma = Tensor<T>({d});
    dbeta = Tensor<T>({d});
    gamma.fill(T{1});
  }

  Tensor<T> forward(const Tensor<T>& x, bool training) {
    const int64_t n = x.numel() / dim;
    Tensor<T> y = x;
    Tensor<T> xhat({n, dim});
    std::vector<T> inv_std(static_cast<size_t>(n));
    for (int64_t r = 0; r < n; ++r) {
      const T* xr = x.ptr() + r * dim;
      T mean = T{0};
      for (int64_t c = 0; c < dim; ++c) mean += xr[c];
      mean /= static_cast<T>(dim);
      T var = T{0};
      for (int64_t c = 0; c < dim; ++c) {
        T d = xr[c] - mean;
        var += d * d;
      }
      var /= static_cast<T>(dim);
      T is = T{1} / std::sqrt(var + eps);
      inv_std[static_cast<size_t>(r)] = is;
      T* xh = xhat.ptr() + r * dim;
      T* yr = y.ptr() + r * dim;
      for (int64_t c = 0; c < dim; ++c) {
        xh[c] = (xr[c] - mean) * is;
        yr[c] = gamma.data[static_cast<size_t>(c)] * xh[c] +
                beta.data[static_cast<size_t>(c)];
      }
    }
    if (training) {
      cached_xhat = std::move(xhat);
      cached_inv_std = std::move(inv_std);
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    const int64_t n = dy.numel() / dim;
    Tensor<T> dx({n, dim});
    for (int64_t r = 0; r < n; ++r) {
      const T* dyr = dy.ptr() + r * dim;
      const T* xh = cached_xhat.ptr() + r * dim;
      T mean_dxhat = T{0};
      T mean_dxhat_xhat = T{0};
      for (int64_t c = 0; c < dim; ++c) {
        T dxhat = dyr[c] * gamma.data[static_cast<size_t>(c)];
        mean_dxhat += dxhat;
        mean_dxhat_xhat += dxhat * xh[c];
        dgamma.data[static_cast<size_t>(c)] += dyr[c] * xh[c];
        dbeta.data[static_cast<size_t>(c)] += dyr[c];
      }
      mean_dxhat /= static_cast<T>(dim);
      mean_dxhat_xhat /= static_cast<T>(dim);
      T is = cached_inv_std[static_cast<size_t>(r)];
      T* dxr = dx.ptr() + r * dim;
      for (int64_t c = 0; c < dim; ++c) {
        T dxhat = dyr[c] * gamma.data[static_cast<size_t>(c)];
        dxr[c] = is * (dxhat - mean_dxhat - xh[c] * mean_dxhat_xhat);
      }
    }
    return dx;
  }

  void visit(const std::string& prefix, const ParamVisitor<T>& fn) {
    fn(prefix + ".gamma", &gamma, &dgamma);
    fn(prefix + ".beta", &beta, &dbeta);
  }
};

// ---------------------------------------------------------------------------
// Exact GELU.
// ---------------------------------------------------------------------------
template <typename T>
struct Gelu {
  Tensor<T> cached_x;

  Tensor<T> forward(const Tensor<T>& x, bool training) {
    Tensor<T> y = x;
    for (auto& v : y.data) {
      v = static_cast<T>(
          0.5 * static_cast<double>(v) *
          (1.0 + std::erf(static_cast<double>(v) / std::sqrt(2.0))));
    }
    if (training) cached_x = x;
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    Tensor<T> dx = dy;
    constexpr double inv_sqrt2 = 0.7071067811865475244;
    constexpr double inv_sqrt2pi = 0.3989422804014326779;
    for (size_t i = 0; i < dx.data.size(); ++i) {
      double x = static_cast<double>(cached_x.data[i]);
      double g = 0.5 * (1.0 + std::erf(x * inv_sqrt2)) +
                 x * inv_sqrt2pi * std::exp(-0.5 * x * x);
      dx.data[i] = static_cast<T>(static_cast<double>(dy.data[i]) * g);
    }
    return dx;
  }
};

// ---------------------------------------------------------------------------
// ReLU.
// ---------------------------------------------------------------------------
template <typename T>
struct Relu {
  Tensor<T> cached_x;

  Tensor<T> forward(const Tensor<T>& x, bool training) {
    Tensor<T> y = x;
    for (auto& v : y.data) v = v > T{0} ? v : T{0};
    if (training) cached_x = x;
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    Tensor<T> dx = dy;
    for (size_t i = 0; i < dx.data.size(); ++i) {
      if (cached_x.data[i] <= T{0}) dx.data[i] = T{0};
    }
    return dx;
  }
};

// ---------------------------------------------------------------------------
// Inverted dropout. Inactive (identity) outside training or when rate == 0.
// ---------------------------------------------------------------------------
template <typename T>
struct Dropout {
  double rate = 0.0;
  RngStream* rng = nullptr;
  Tensor<T> cached_mask;

  Tensor<T> forward(const Tensor<T>& x, bool training) {
    // Eval path writes nothing; concurrent eval forwards stay safe.
    if (!training || rate <= 0.0) return x;
    Tensor<T> y = x;
    cached_mask = Tensor<T>(x.shape);
    const T keep = static_cast<T>(1.0 / (1.0 - rate));
    for (size_t i = 0; i < y.data.size(); ++i) {
      T m = rng->bernoulli(rate) ? T{0} : keep;
      cached_mask.data[i] = m;
      y.data[i] *= m;
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    if (cached_mask.empty()) return dy;
    Tensor<T> dx = dy;
    for (size_t i = 0; i < dx.data.size(); ++i) {
      dx.data[i] *= cached_mask.data[i];
    }
    return dx;
  }
};

/// Row-wise softmax with max subtraction; returns probabilities.
template <typename T>
void softmax_rows_inplace(T* data, int64_t rows, int64_t cols) {
  for (int64_t r = 0; r < rows; ++r) {
    T* row = data + r * cols;
    T mx = row[0];
    for (int64_t c = 1; c < cols; ++c) mx = std::max(mx, row[c]);
    T sum = T{0};
    for (int64_t c = 0; c < cols; ++c) {
      row[c] = std::exp(row[c] - mx);
      sum += row[c];
    }
    T inv = T{1} / sum;
    for (int64_t c = 0; c < cols; ++c) row[c] *= inv;
  }
}

/// dS for S -> softmax rows -> P given dP. Writes into dp in place.
template <typename T>
void softmax_rows_backward_inplace(const T* probs, T* dp, int64_t rows,
                                   int64_t cols) {
  for (int64_t r = 0; r < rows; ++r) {
    const T* p = probs + r * cols;
    T* d = dp + r * cols;
    T dot = T{0};
    for (int64_t c = 0; c < cols; ++c) dot += p[c] * d[c];
    for (int64_t c = 0; c < cols; ++c) d[c] = p[c] * (d[c] - dot);
  }
}

// ---------------------------------------------------------------------------
// Multi-head self-attention (full, no mask), pre-computed qkv projection.
// ---------------------------------------------------------------------------
template <typename T>
struct MultiHeadSelfAttention {
  int64_t dim = 0;
  int64_t heads = 0;
  Linear<T> qkv;
  Linear<T> proj;
  Dropout<T> attn_drop;
  Dropout<T> proj_drop;

  Tensor<T> cached_qkv;
  Tensor<T> cached_probs;  // [heads, n, n] post-dropout
  Tensor<T> cached_probs_raw;
  Tensor<T> cached_ctx;

  MultiHeadSelfAttention() = default;
  MultiHeadSelfAttention(int64_t d, int64_t num_heads, double dropout) {
    resize(d, num_heads, dropout);
  }

  void resize(int64_t d, int64_t num_heads, double dropout) {
    if (num_heads <= 0 || d % num_heads != 0) {
      throw ShapeError("hidden dim " + std::to_string(d) +
                       " must be divisible by heads " +
                       std::to_string(num_heads));
    }
    dim = d;
    heads = num_heads;
    qkv.resize(d, 3 * d);
    proj.resize(d, d);
    attn_drop.rate = dropout;
    proj_drop.rate = dropout;
  }

  void init(RngStream& rng) {
    qkv.init(rng);
    proj.init(rng);
  }

  void set_rng(RngStream* rng) {
    attn_drop.rng = rng;
    proj_drop.rng = rng;
  }

  Tensor<T> forward(const Tensor<T>& x, bool training) {
    const int64_t n = x.rows();
    const int64_t dh = dim / heads;
    const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh)));

    Tensor<T> qkv_out = qkv.forward(x, training);  // [n, 3d]
    Tensor<T> probs_raw({heads, n, n});
    Tensor<T> ctx({n, dim});

    for (int64_t h = 0; h < heads; ++h) {
      ECMap<T> qkv_map(qkv_out.ptr(), n, 3 * dim);
      auto q = qkv_map.block(0, h * dh, n, dh);
      auto k = qkv_map.block(0, dim + h * dh, n, dh);
      EMap<T> scores(probs_raw.ptr() + h * n * n, n, n);
      scores.noalias() = q * k.transpose() * scale;
      softmax_rows_inplace(probs_raw.ptr() + h * n * n, n, n);
    }
    Tensor<T> probs = attn_drop.forward(probs_raw, training);
    for (int64_t h = 0; h < heads; ++h) {
      ECMap<T> qkv_map(qkv_out.ptr(), n, 3 * dim);
      auto v = qkv_map.block(0, 2 * dim + h * dh, n, dh);
      ECMap<T> p(probs.ptr() + h * n * n, n, n);
      EMap<T> ctx_map(ctx.ptr(), n, dim);
      ctx_map.block(0, h * dh, n, dh).noalias() = p * v;
    }
    Tensor<T> y = proj.forward(ctx, training);
    y = proj_drop.forward(y, training);
    if (training) {
      cached_qkv = std::move(qkv_out);
      cached_probs = std::move(probs);
      cached_probs_raw = std::move(probs_raw);
      cached_ctx = std::move(ctx);
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy_in) {
    const int64_t n = dy_in.rows();
    const int64_t dh = dim / heads;
    const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh)));

    Tensor<T> dy = proj_drop.backward(dy_in);
    Tensor<T> dctx = proj.backward(dy);

    Tensor<T> dqkv({n, 3 * dim});
    ECMap<T> qkv_map(cached_qkv.ptr(), n, 3 * dim);
    EMap<T> dqkv_map(dqkv.ptr(), n, 3 * dim);
    Tensor<T> dprobs({n, n});
    for (int64_t h = 0; h < heads; ++h) {
      ECMap<T> dctx_map(dctx.ptr(), n, dim);
      auto dctx_h = dctx_map.block(0, h * dh, n, dh);
      ECMap<T> p(cached_probs.ptr() + h * n * n, n, n);
      auto v = qkv_map.block(0, 2 * dim + h * dh, n, dh);

      // dV and d(probs)
      dqkv_map.block(0, 2 * dim + h * dh, n, dh).noalias() =
          p.transpose() * dctx_h;
      EMap<T> dp(dprobs.ptr(), n, n);
      dp.noalias() = dctx_h * v.transpose();

      // back through attention dropout (mask slice), then softmax
      if (!attn_drop.cached_mask.empty()) {
        const T* mask = attn_drop.cached_mask.ptr() + h * n * n;
        for (int64_t i = 0; i < n * n; ++i) dprobs.data[static_cast<size_t>(i)] *= mask[i];
      }
      softmax_rows_backward_inplace(cached_probs_raw.ptr() + h * n * n,
                                    dprobs.ptr(), n, n);

      auto q = qkv_map.block(0, h * dh, n, dh);
      auto k = qkv_map.block(0, dim + h * dh, n, dh);
      EMap<T> ds(dprobs.ptr(), n, n);
      dqkv_map.block(0, h * dh, n, dh).noalias() = ds * k * scale;
      dqkv_map.block(0, dim + h * dh, n, dh).noalias() =
          ds.transpose() * q * scale;
    }
    return qkv.backward(dqkv);
  }

  void visit(const std::string& prefix, const ParamVisitor<T>& fn) {
    qkv.visit(prefix + ".qkv", fn);
    proj.visit(prefix + ".proj", fn);
  }
};

// ---------------------------------------------------------------------------
// Transformer MLP: Linear -> GELU -> Linear -> dropout.
// ---------------------------------------------------------------------------
template <typename T>
struct Mlp {
  Linear<T> fc1, fc2;
  Gelu<T> act;
  Dropout<T> drop;

  Mlp() = default;
  Mlp(int64_t d, int64_t hidden, double dropout) { resize(d, hidden, dropout); }

  void resize(int64_t d, int64_t hidden, double dropout) {
    fc1.resize(d, hidden);
    fc2.resize(hidden, d);
    drop.rate = dropout;
  }

  void init(RngStream& rng) {
    fc1.init(rng);
    fc2.init(rng);
  }

  void set_rng(RngStream* rng) { drop.rng = rng; }

  Tensor<T> forward(const Tensor<T>& x, bool training) {
    Tensor<T> h = fc1.forward(x, training);
    h = act.forward(h, training);
    h = fc2.forward(h, training);
    return drop.forward(h, training);
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    Tensor<T> d = drop.backward(dy);
    d = fc2.backward(d);
    d = act.backward(d);
    return fc1.backward(d);
  }

  void visit(const std::string& prefix, const ParamVisitor<T>& fn) {
    fc1.visit(prefix + ".fc1", fn);
    fc2.visit(prefix + ".fc2", fn);
  }
};

// ---------------------------------------------------------------------------
// Pre-norm encoder block: x + attn(ln1(x)), then x + mlp(ln2(x)).
// ---------------------------------------------------------------------------
template <typename T>
struct EncoderBlock {
  LayerNorm<T> ln1, ln2;
  MultiHeadSelfAttention<T> attn;
  Mlp<T> mlp;

  EncoderBlock() = default;
  EncoderBlock(int64_t d, int64_t heads, int64_t mlp_dim, double dropout) {
    ln1.resize(d);
    ln2.resize(d);
    attn.resize(d, heads, dropout);
    mlp.resize(d, mlp_dim, dropout);
  }

  void init(RngStream& rng) {
    attn.init(rng);
    mlp.init(rng);
  }

  void set_rng(RngStream* rng) {
    attn.set_rng(rng);
    mlp.set_rng(rng);
  }

  Tensor<T> forward(const Tensor<T>& x, bool training) {
    Tensor<T> h = attn.forward(ln1.forward(x, training), training);
    Tensor<T> mid = x;
    for (size_t i = 0; i < mid.data.size(); ++i) mid.data[i] += h.data[i];
    Tensor<T> m = mlp.forward(ln2.forward(mid, training), training);
    for (size_t i = 0; i < mid.data.size(); ++i) m.data[i] += mid.data[i];
    return m;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    Tensor<T> dmid = ln2.backward(mlp.backward(dy));
    for (size_t i = 0; i < dmid.data.size(); ++i) dmid.data[i] += dy.data[i];
    Tensor<T> dx = ln1.backward(attn.backward(dmid));
    for (size_t i = 0; i < dx.data.size(); ++i) dx.data[i] += dmid.data[i];
    return dx;
  }

  void visit(const std::string& prefix, const ParamVisitor<T>& fn) {
    ln1.visit(prefix + ".ln1", fn);
    attn.visit(prefix + ".attn", fn);
    ln2.visit(prefix + ".ln2", fn);
    mlp.visit(prefix + ".mlp", fn);
  }
};

// ---------------------------------------------------------------------------
// Class token + learned positional embeddings + encoder stack + final norm.
// Consumes patch tokens [n, d]; yields the class-token feature [d].
// Inputs shorter than max_tokens use the positional prefix.
// ---------------------------------------------------------------------------
template <typename T>
struct TransformerTrunk {
  int64_t dim = 0;
  int64_t max_tokens = 0;  // including the class token
  Tensor<T> cls_token, dcls_token;
  Tensor<T> pos_embed, dpos_embed;
  std::vector<EncoderBlock<T>> blocks;
  LayerNorm<T> final_norm;
  Dropout<T> embed_drop;

  int64_t cached_tokens = 0;

  TransformerTrunk() = default;
  TransformerTrunk(int64_t d, int64_t layers, int64_t heads, int64_t mlp_dim,
                   double dropout, int64_t max_patch_tokens) {
    dim = d;
    max_tokens = max_patch_tokens + 1;
    cls_token = Tensor<T>({d});
    dcls_token = Tensor<T>({d});
    pos_embed = Tensor<T>({max_tokens, d});
    dpos_embed = Tensor<T>({max_tokens, d});
    blocks.reserve(static_cast<size_t>(layers));
    for (int64_t i = 0; i < layers; ++i) {
      blocks.emplace_back(d, heads, mlp_dim, dropout);
    }
    final_norm.resize(d);
    embed_drop.rate = dropout;
  }

  void init(RngStream& rng) {
    init_truncated_normal(cls_token, rng);
    init_truncated_normal(pos_embed, rng);
    for (auto& b : blocks) b.init(rng);
  }

  void set_rng(RngStream* rng) {
    embed_drop.rng = rng;
    for (auto& b : blocks) b.set_rng(rng);
  }

  Tensor<T> forward(const Tensor<T>& patch_tokens, bool training) {
    const int64_t n = patch_tokens.rows();
    const int64_t total = n + 1;
    if (total > max_tokens) {
      throw ShapeError("sequence of " + std::to_string(total) +
                       " tokens exceeds the configured maximum of " +
                       std::to_string(max_tokens));
    }
    Tensor<T> x({total, dim});
    for (int64_t c = 0; c < dim; ++c) {
      x.data[static_cast<size_t>(c)] = cls_token.data[static_cast<size_t>(c)];
    }
    std::copy(patch_tokens.data.begin(), patch_tokens.data.end(),
              x.data.begin() + static_cast<size_t>(dim));
    for (int64_t i = 0; i < total * dim; ++i) {
      x.data[static_cast<size_t>(i)] += pos_embed.data[static_cast<size_t>(i)];
    }
    x = embed_drop.forward(x, training);
    for (auto& b : blocks) x = b.forward(x, training);
    x = final_norm.forward(x, training);
    if (training) cached_tokens = total;
    Tensor<T> cls({dim});
    std::copy(x.data.begin(), x.data.begin() + static_cast<size_t>(dim),
              cls.data.begin());
    return cls;
  }

  /// Backward from the class-token feature gradient. Returns d(patch_tokens).
  Tensor<T> backward(const Tensor<T>& dcls) {
    const int64_t total = cached_tokens;
    Tensor<T> dx({total, dim});
    std::copy(dcls.data.begin(), dcls.data.end(), dx.data.begin());
    dx = final_norm.backward(dx);
    for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
      dx = it->backward(dx);
    }
    dx = embed_drop.backward(dx);
    for (int64_t i = 0; i < total * dim; ++i) {
      dpos_embed.data[static_cast<size_t>(i)] +=
          dx.data[static_cast<size_t>(i)];
    }
    for (int64_t c = 0; c < dim; ++c) {
      dcls_token.data[static_cast<size_t>(c)] +=
          dx.data[static_cast<size_t>(c)];
    }
    Tensor<T> dtokens({total - 1, dim});
    std::copy(dx.data.begin() + static_cast<size_t>(dim), dx.data.end(),
              dtokens.data.begin());
    return dtokens;
  }

  void visit(const std::string& prefix, const ParamVisitor<T>& fn) {
    fn(prefix + ".cls_token", &cls_token, &dcls_token);
    fn(prefix + ".pos_embed", &pos_embed, &dpos_embed);
    for (size_t i = 0; i < blocks.size(); ++i) {
      blocks[i].visit(prefix + ".block" + std::to_string(i), fn);
    }
    final_norm.visit(prefix + ".norm", fn);
  }
};

}  // namespace newsseg::nn
