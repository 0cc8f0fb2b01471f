#pragma once

#include <string>
#include <vector>

#include "newsseg/nn.hpp"
#include "newsseg/tensor.hpp"

namespace newsseg::nn {

/// Feature maps are stored channels-last: [H*W, C] with H and W carried
/// alongside. Convolutions run as im2col + GEMM.
template <typename T>
struct FeatureMap {
  int64_t height = 0;
  int64_t width = 0;
  Tensor<T> data;  // [height*width, channels]

  int64_t channels() const { return data.cols(); }
};

template <typename T>
struct Conv2d {
  int64_t in_channels = 0, out_channels = 0;
  int64_t kernel = 3, stride = 1, pad = 1;
  Linear<T> gemm;  // weight [out, in*k*k]

  Tensor<T> cached_col;
  int64_t cached_in_h = 0, cached_in_w = 0;

  Conv2d() = default;
  Conv2d(int64_t cin, int64_t cout, int64_t k, int64_t s, int64_t p) {
    in_channels = cin;
    out_channels = cout;
    kernel = k;
    stride = s;
    pad = p;
    gemm.resize(cin * k * k, cout);
  }

  void init(RngStream& rng) {
    // He-style fan-in scaling keeps deep stacks trainable.
    double fan_in = static_cast<double>(in_channels * kernel * kernel);
    init_truncated_normal(gemm.weight, rng, std::sqrt(2.0 / fan_in));
    gemm.bias.fill(T{0});
  }

  int64_t out_size(int64_t in) const {
    return (in + 2 * pad - kernel) / stride + 1;
  }

  Tensor<T> im2col(const FeatureMap<T>& x) const {
    const int64_t oh = out_size(x.height);
    const int64_t ow = out_size(x.width);
    const int64_t patch = in_channels * kernel * kernel;
    Tensor<T> col({oh * ow, patch});
    for (int64_t oy = 0; oy < oh; ++oy) {
      for (int64_t ox = 0; ox < ow; ++ox) {
        T* row = col.ptr() + (oy * ow + ox) * patch;
        int64_t w = 0;
        for (int64_t ky = 0; ky < kernel; ++ky) {
          int64_t iy = oy * stride + ky - pad;
          for (int64_t kx = 0; kx < kernel; ++kx) {
            int64_t ix = ox * stride + kx - pad;
            if (iy >= 0 && iy < x.height && ix >= 0 && ix < x.width) {
              const T* px = x.data.ptr() + (iy * x.width + ix) * in_channels;
              for (int64_t c = 0; c < in_channels; ++c) row[w++] = px[c];
            } else {
              for (int64_t c = 0; c < in_channels; ++c) row[w++] = T{0};
            }
          }
        }
      }
    }
    return col;
  }

  FeatureMap<T> forward(const FeatureMap<T>& x, bool training) {
    if (x.channels() != in_channels) {
      throw ShapeError("conv expects " + std::to_string(in_channels) +
                       " channels, got " + std::to_string(x.channels()));
    }
    Tensor<T> col = im2col(x);
    FeatureMap<T> y;
    y.height = out_size(x.height);
    y.width = out_size(x.width);
    y.data = gemm.forward(col, training);
    if (training) {
      cached_in_h = x.height;
      cached_in_w = x.width;
    }
    return y;
  }

  FeatureMap<T> backward(const FeatureMap<T>& dy, bool compute_dx = true) {
    Tensor<T> dcol = gemm.backward(dy.data, compute_dx);
    FeatureMap<T> dx;
    if (!compute_dx) return dx;
    dx.height = cached_in_h;
    dx.width = cached_in_w;
    dx.data = Tensor<T>({cached_in_h * cached_in_w, in_channels});
    const int64_t oh = dy.height;
    const int64_t ow = dy.width;
    const int64_t patch = in_channels * kernel * kernel;
    for (int64_t oy = 0; oy < oh; ++oy) {
      for (int64_t ox = 0; ox < ow; ++ox) {
        const T* row = dcol.ptr() + (oy * ow + ox) * patch;
        int64_t w = 0;
        for (int64_t ky = 0; ky < kernel; ++ky) {
          int64_t iy = oy * stride + ky - pad;
          for (int64_t kx = 0; kx < kernel; ++kx) {
            int64_t ix = ox * stride + kx - pad;
            if (iy >= 0 && iy < cached_in_h && ix >= 0 && ix < cached_in_w) {
              T* px = dx.data.ptr() + (iy * cached_in_w + ix) * in_channels;
              for (int64_t c = 0; c < in_channels; ++c) px[c] += row[w++];
            } else {
              w += in_channels;
            }
          }
        }
      }
    }
    return dx;
  }

  void visit(const std::string& prefix, const ParamVisitor<T>& fn) {
    gemm.visit(prefix, fn);
  }
};

/// GroupNorm over [positions, channels]; per-example, batch-independent.
template <typename T>
struct GroupNorm {
  int64_t channels = 0;
  int64_t groups = 1;
  T eps = static_cast<T>(1e-5);
  Tensor<T> gamma, beta, dgamma, dbeta;
  Tensor<T> cached_xhat;
  std::vector<T> cached_inv_std;

  GroupNorm() = default;
  GroupNorm(int64_t c, int64_t g) {
    if (g <= 0 || c % g != 0) {
      throw ShapeError("channels must be divisible by groups");
    }
    channels = c;
    groups = g;
    gamma = Tensor<T>({c});
    beta = Tensor<T>({c});
    dgamma = Tensor<T>({c});
    dbeta = Tensor<T>({c});
    gamma.fill(T{1});
  }

  Tensor<T> forward(const Tensor<T>& x, bool training) {
    const int64_t p = x.rows();
    const int64_t cg = channels / groups;
    Tensor<T> y = x;
    Tensor<T> xhat(x.shape);
    std::vector<T> inv_std(static_cast<size_t>(groups));
    for (int64_t g = 0; g < groups; ++g) {
      T mean = T{0};
      for (int64_t r = 0; r < p; ++r) {
        const T* row = x.ptr() + r * channels + g * cg;
        for (int64_t c = 0; c < cg; ++c) mean += row[c];
      }
      const T count = static_cast<T>(p * cg);
      mean /= count;
      T var = T{0};
      for (int64_t r = 0; r < p; ++r) {
        const T* row = x.ptr() + r * channels + g * cg;
        for (int64_t c = 0; c < cg; ++c) {
          T d = row[c] - mean;
          var += d * d;
        }
      }
      var /= count;
      T is = T{1} / std::sqrt(var + eps);
      inv_std[static_cast<size_t>(g)] = is;
      for (int64_t r = 0; r < p; ++r) {
        const T* row = x.ptr() + r * channels + g * cg;
        T* xh = xhat.ptr() + r * channels + g * cg;
        T* yr = y.ptr() + r * channels + g * cg;
        for (int64_t c = 0; c < cg; ++c) {
          xh[c] = (row[c] - mean) * is;
          yr[c] = gamma.data[static_cast<size_t>(g * cg + c)] * xh[c] +
                  beta.data[static_cast<size_t>(g * cg + c)];
        }
      }
    }
    if (training) {
      cached_xhat = std::move(xhat);
      cached_inv_std = std::move(inv_std);
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    const int64_t p = dy.rows();
    const int64_t cg = channels / groups;
    Tensor<T> dx(dy.shape);
    for (int64_t g = 0; g < groups; ++g) {
      const T count = static_cast<T>(p * cg);
      T mean_dxhat = T{0};
      T mean_dxhat_xhat = T{0};
      for (int64_t r = 0; r < p; ++r) {
        const T* dyr = dy.ptr() + r * channels + g * cg;
        const T* xh = cached_xhat.ptr() + r * channels + g * cg;
        for (int64_t c = 0; c < cg; ++c) {
          size_t ci = static_cast<size_t>(g * cg + c);
          T dxhat = dyr[c] * gamma.data[ci];
          mean_dxhat += dxhat;
          mean_dxhat_xhat += dxhat * xh[c];
          dgamma.data[ci] += dyr[c] * xh[c];
          dbeta.data[ci] += dyr[c];
        }
      }
      mean_dxhat /= count;
      mean_dxhat_xhat /= count;
      T is = cached_inv_std[static_cast<size_t>(g)];
      for (int64_t r = 0; r < p; ++r) {
        const T* dyr = dy.ptr() + r * channels + g * cg;
        const T* xh = cached_xhat.ptr() + r * channels + g * cg;
        T* dxr = dx.ptr() + r * channels + g * cg;
        for (int64_t c = 0; c < cg; ++c) {
          size_t ci = static_cast<size_t>(g * cg + c);
          T dxhat = dyr[c] * gamma.data[ci];
          dxr[c] = is * (dxhat - mean_dxhat - xh[c] * mean_dxhat_xhat);
        }
      }
    }
    return dx;
  }

  void visit(const std::string& prefix, const ParamVisitor<T>& fn) {
    fn(prefix + ".gamma", &gamma, &dgamma);
    fn(prefix + ".beta", &beta, &dbeta);
  }
};

/// conv-gn-relu-conv-gn with identity (or 1x1 projected) skip, relu after.
template <typename T>
struct ResidualBlock {
  Conv2d<T> conv1, conv2;
  GroupNorm<T> gn1, gn2;
  Relu<T> relu_mid, relu_out;
  bool projected = false;
  Conv2d<T> proj;
  GroupNorm<T> gn_proj;

  ResidualBlock() = default;
  ResidualBlock(int64_t cin, int64_t cout, int64_t stride, int64_t groups)
      : conv1(cin, cout, 3, stride, 1),
        conv2(cout, cout, 3, 1, 1),
        gn1(cout, groups),
        gn2(cout, groups) {
    if (cin != cout || stride != 1) {
      projected = true;
      proj = Conv2d<T>(cin, cout, 1, stride, 0);
      gn_proj = GroupNorm<T>(cout, groups);
    }
  }

  void init(RngStream& rng) {
    conv1.init(rng);
    conv2.init(rng);
    if (projected) proj.init(rng);
  }

  FeatureMap<T> forward(const FeatureMap<T>& x, bool training) {
    FeatureMap<T> h = conv1.forward(x, training);
    h.data = gn1.forward(h.data, training);
    h.data = relu_mid.forward(h.data, training);
    h = conv2.forward(h, training);
    h.data = gn2.forward(h.data, training);

    FeatureMap<T> skip = x;
    if (projected) {
      skip = proj.forward(x, training);
      skip.data = gn_proj.forward(skip.data, training);
    }
    for (size_t i = 0; i < h.data.data.size(); ++i) {
      h.data.data[i] += skip.data.data[i];
    }
    h.data = relu_out.forward(h.data, training);
    return h;
  }

  FeatureMap<T> backward(const FeatureMap<T>& dy, bool compute_dx = true) {
    FeatureMap<T> d = dy;
    d.data = relu_out.backward(d.data);
    Tensor<T> dsum = d.data;

    d.data = gn2.backward(dsum);
    FeatureMap<T> dh = conv2.backward(d, true);
    dh.data = relu_mid.backward(dh.data);
    dh.data = gn1.backward(dh.data);
    FeatureMap<T> dx = conv1.backward(dh, compute_dx || projected);

    FeatureMap<T> dskip = dy;
    dskip.data = dsum;
    if (projected) {
      dskip.data = gn_proj.backward(dskip.data);
      // proj shares dy's spatial dims with conv1's output
      dskip.height = dy.height;
      dskip.width = dy.width;
      FeatureMap<T> dps = proj.backward(dskip, compute_dx);
      if (compute_dx) {
        for (size_t i = 0; i < dx.data.data.size(); ++i) {
          dx.data.data[i] += dps.data.data[i];
        }
      }
    } else if (compute_dx) {
      for (size_t i = 0; i < dx.data.data.size(); ++i) {
        dx.data.data[i] += dsum.data[i];
      }
    }
    return dx;
  }

  void visit(const std::string& prefix, const ParamVisitor<T>& fn) {
    conv1.visit(prefix + ".conv1", fn);
    gn1.visit(prefix + ".gn1", fn);
    conv2.visit(prefix + ".conv2", fn);
    gn2.visit(prefix + ".gn2", fn);
    if (projected) {
      proj.visit(prefix + ".proj", fn);
      gn_proj.visit(prefix + ".gn_proj", fn);
    }
  }
};

}  // namespace newsseg::nn
