#ifndef XENS_LAYERS_HPP
#define XENS_LAYERS_HPP

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "xens/rng.hpp"
#include "xens/tensor.hpp"

namespace xens {

// Zero-mean uniform fan-in initialization; biases start at zero.
template <typename T>
void init_uniform_fan_in(Tensor<T>& w, std::int64_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (auto& v : w.data)
    v = static_cast<T>(rng.uniform_range(-bound, bound));
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  return a >= 0 ? a / b : -((-a + b - 1) / b);
}
inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return a > 0 ? (a + b - 1) / b : -((-a) / b);
}

// 2D convolution over NCHW with optional bias. Caches its input in training
// mode for the weight/input gradients.
template <typename T>
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(int in_ch, int out_ch, int ksize, int stride, int pad, bool bias)
      : in_ch_(in_ch), out_ch_(out_ch), k_(ksize), stride_(stride), pad_(pad),
        has_bias_(bias) {
    weight = Tensor<T>({out_ch, in_ch, ksize, ksize});
    weight_grad = Tensor<T>(weight.shape);
    if (has_bias_) {
      bias_t = Tensor<T>({out_ch});
      bias_grad = Tensor<T>({out_ch});
    }
  }

  void init(Rng& rng) {
    init_uniform_fan_in(weight, static_cast<std::int64_t>(in_ch_) * k_ * k_, rng);
    if (has_bias_) bias_t.zero();
  }

  std::int64_t out_size(std::int64_t in) const {
    return (in + 2 * pad_ - k_) / stride_ + 1;
  }

  Tensor<T> forward(const Tensor<T>& x, bool train) {
    require(x.ndim() == 4 && x.dim(1) == in_ch_, "conv2d: bad input shape");
    const std::int64_t n = x.dim(0), ih = x.dim(2), iw = x.dim(3);
    const std::int64_t oh = out_size(ih), ow = out_size(iw);
    require(oh >= 1 && ow >= 1, "conv2d: input too small");
    Tensor<T> y({n, out_ch_, oh, ow});

    for (std::int64_t b = 0; b < n; ++b) {
      for (std::int64_t co = 0; co < out_ch_; ++co) {
        T* yp = y.ptr() + ((b * out_ch_ + co) * oh) * ow;
        if (has_bias_) {
          const T bv = bias_t.data[static_cast<std::size_t>(co)];
          for (std::int64_t i = 0; i < oh * ow; ++i) yp[i] = bv;
        }
        for (std::int64_t ci = 0; ci < in_ch_; ++ci) {
          const T* xp = x.ptr() + ((b * in_ch_ + ci) * ih) * iw;
          const T* wp = weight.ptr() + ((co * in_ch_ + ci) * k_) * k_;
          for (int ky = 0; ky < k_; ++ky) {
            for (int kx = 0; kx < k_; ++kx) {
              const T w = wp[ky * k_ + kx];
              if (w == T(0)) continue;
              for (std::int64_t oy = 0; oy < oh; ++oy) {
                const std::int64_t iy = oy * stride_ - pad_ + ky;
                if (iy < 0 || iy >= ih) continue;
                // valid ox range so that ix stays in bounds
                const std::int64_t ox0 =
                    std::max<std::int64_t>(0, ceil_div(pad_ - kx, stride_));
                const std::int64_t ox1 = std::min<std::int64_t>(
                    ow, floor_div(iw - 1 + pad_ - kx, stride_) + 1);
                T* yrow = yp + oy * ow;
                const T* xrow = xp + iy * iw - pad_ + kx;
                if (stride_ == 1) {
                  for (std::int64_t ox = ox0; ox < ox1; ++ox)
                    yrow[ox] += w * xrow[ox];
                } else {
                  for (std::int64_t ox = ox0; ox < ox1; ++ox)
                    yrow[ox] += w * xrow[ox * stride_];
                }
              }
            }
          }
        }
      }
    }
    if (train) cached_input_ = x;
    out_h_ = oh;
    out_w_ = ow;
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    const Tensor<T>& x = cached_input_;
    require(x.numel() > 0, "conv2d backward without cached forward");
    const std::int64_t n = x.dim(0), ih = x.dim(2), iw = x.dim(3);
    const std::int64_t oh = out_h_, ow = out_w_;

    // dW and db
    for (std::int64_t co = 0; co < out_ch_; ++co) {
      if (has_bias_) {
        T acc = 0;
        for (std::int64_t b = 0; b < n; ++b) {
          const T* dp = dy.ptr() + ((b * out_ch_ + co) * oh) * ow;
          for (std::int64_t i = 0; i < oh * ow; ++i) acc += dp[i];
        }
        bias_grad.data[static_cast<std::size_t>(co)] += acc;
      }
      for (std::int64_t ci = 0; ci < in_ch_; ++ci) {
        T* wg = weight_grad.ptr() + ((co * in_ch_ + ci) * k_) * k_;
        for (int ky = 0; ky < k_; ++ky) {
          for (int kx = 0; kx < k_; ++kx) {
            T acc = 0;
            for (std::int64_t b = 0; b < n; ++b) {
              const T* dp = dy.ptr() + ((b * out_ch_ + co) * oh) * ow;
              const T* xp = x.ptr() + ((b * in_ch_ + ci) * ih) * iw;
              for (std::int64_t oy = 0; oy < oh; ++oy) {
                const std::int64_t iy = oy * stride_ - pad_ + ky;
                if (iy < 0 || iy >= ih) continue;
                const std::int64_t ox0 =
                    std::max<std::int64_t>(0, ceil_div(pad_ - kx, stride_));
                const std::int64_t ox1 = std::min<std::int64_t>(
                    ow, floor_div(iw - 1 + pad_ - kx, stride_) + 1);
                const T* drow = dp + oy * ow;
                const T* xrow = xp + iy * iw - pad_ + kx;
                if (stride_ == 1) {
                  for (std::int64_t ox = ox0; ox < ox1; ++ox)
                    acc += drow[ox] * xrow[ox];
                } else {
                  for (std::int64_t ox = ox0; ox < ox1; ++ox)
                    acc += drow[ox] * xrow[ox * stride_];
                }
              }
            }
            wg[ky * k_ + kx] += acc;
          }
        }
      }
    }

    // dX
    Tensor<T> dx(x.shape);
    for (std::int64_t b = 0; b < n; ++b) {
      for (std::int64_t co = 0; co < out_ch_; ++co) {
        const T* dp = dy.ptr() + ((b * out_ch_ + co) * oh) * ow;
        for (std::int64_t ci = 0; ci < in_ch_; ++ci) {
          T* dxp = dx.ptr() + ((b * in_ch_ + ci) * ih) * iw;
          const T* wp = weight.ptr() + ((co * in_ch_ + ci) * k_) * k_;
          for (int ky = 0; ky < k_; ++ky) {
            for (int kx = 0; kx < k_; ++kx) {
              const T w = wp[ky * k_ + kx];
              if (w == T(0)) continue;
              for (std::int64_t oy = 0; oy < oh; ++oy) {
                const std::int64_t iy = oy * stride_ - pad_ + ky;
                if (iy < 0 || iy >= ih) continue;
                const std::int64_t ox0 =
                    std::max<std::int64_t>(0, ceil_div(pad_ - kx, stride_));
                const std::int64_t ox1 = std::min<std::int64_t>(
                    ow, floor_div(iw - 1 + pad_ - kx, stride_) + 1);
                const T* drow = dp + oy * ow;
                T* dxrow = dxp + iy * iw - pad_ + kx;
                if (stride_ == 1) {
                  for (std::int64_t ox = ox0; ox < ox1; ++ox)
                    dxrow[ox] += w * drow[ox];
                } else {
                  for (std::int64_t ox = ox0; ox < ox1; ++ox)
                    dxrow[ox * stride_] += w * drow[ox];
                }
              }
            }
          }
        }
      }
    }
    return dx;
  }

  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    out.push_back({prefix + ".weight", &weight, &weight_grad, false});
    if (has_bias_) out.push_back({prefix + ".bias", &bias_t, &bias_grad, false});
  }

  void release_cache() { cached_input_ = Tensor<T>(); }

  Tensor<T> weight, weight_grad;
  Tensor<T> bias_t, bias_grad;

 private:
  std::int64_t in_ch_ = 0, out_ch_ = 0;
  int k_ = 0, stride_ = 1, pad_ = 0;
  bool has_bias_ = true;
  Tensor<T> cached_input_;
  std::int64_t out_h_ = 0, out_w_ = 0;
};

template <typename T>
class ReLU {
 public:
  Tensor<T> forward(const Tensor<T>& x, bool train) {
    Tensor<T> y(x.shape);
    for (std::size_t i = 0; i < x.data.size(); ++i)
      y.data[i] = x.data[i] > T(0) ? x.data[i] : T(0);
    if (train) cached_output_ = y;
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    Tensor<T> dx(dy.shape);
    for (std::size_t i = 0; i < dy.data.size(); ++i)
      dx.data[i] = cached_output_.data[i] > T(0) ? dy.data[i] : T(0);
    return dx;
  }

  void release_cache() { cached_output_ = Tensor<T>(); }

 private:
  Tensor<T> cached_output_;
};

// Max pooling with -inf padding; ties go to the first scanned position so
// the gradient routing is deterministic.
template <typename T>
class MaxPool2d {
 public:
  MaxPool2d() = default;
  MaxPool2d(int ksize, int stride, int pad) : k_(ksize), stride_(stride), pad_(pad) {}

  Tensor<T> forward(const Tensor<T>& x, bool train) {
    const std::int64_t n = x.dim(0), c = x.dim(1), ih = x.dim(2), iw = x.dim(3);
    const std::int64_t oh = (ih + 2 * pad_ - k_) / stride_ + 1;
    const std::int64_t ow = (iw + 2 * pad_ - k_) / stride_ + 1;
    require(oh >= 1 && ow >= 1, "maxpool: input too small");
    Tensor<T> y({n, c, oh, ow});
    if (train) {
      argmax_.assign(static_cast<std::size_t>(n * c * oh * ow), 0);
      in_shape_ = x.shape;
    }
    std::size_t oi = 0;
    for (std::int64_t b = 0; b < n; ++b) {
      for (std::int64_t ch = 0; ch < c; ++ch) {
        const T* xp = x.ptr() + ((b * c + ch) * ih) * iw;
        for (std::int64_t oy = 0; oy < oh; ++oy) {
          for (std::int64_t ox = 0; ox < ow; ++ox, ++oi) {
            T best = -std::numeric_limits<T>::infinity();
            std::int64_t best_idx = -1;
            for (int ky = 0; ky < k_; ++ky) {
              const std::int64_t iy = oy * stride_ - pad_ + ky;
              if (iy < 0 || iy >= ih) continue;
              for (int kx = 0; kx < k_; ++kx) {
                const std::int64_t ix = ox * stride_ - pad_ + kx;
                if (ix < 0 || ix >= iw) continue;
                const T v = xp[iy * iw + ix];
                if (v > best) {
                  best = v;
                  best_idx = iy * iw + ix;
                }
              }
            }
            y.data[oi] = best;
            if (train) argmax_[oi] = best_idx;
          }
        }
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    Tensor<T> dx(in_shape_);
    const std::int64_t n = dy.dim(0), c = dy.dim(1), oh = dy.dim(2), ow = dy.dim(3);
    const std::int64_t ih = in_shape_[2], iw = in_shape_[3];
    std::size_t oi = 0;
    for (std::int64_t b = 0; b < n; ++b) {
      for (std::int64_t ch = 0; ch < c; ++ch) {
        T* dxp = dx.ptr() + ((b * c + ch) * ih) * iw;
        for (std::int64_t i = 0; i < oh * ow; ++i, ++oi)
          dxp[argmax_[oi]] += dy.data[oi];
      }
    }
    return dx;
  }

  void release_cache() { argmax_.clear(); }

 private:
  int k_ = 2, stride_ = 2, pad_ = 0;
  std::vector<std::int64_t> argmax_;
  std::vector<std::int64_t> in_shape_;
};

// Batch normalization over NCHW channels. Training mode normalizes by batch
// statistics (biased variance) and maintains running statistics with the
// unbiased correction; eval mode uses the running statistics.
template <typename T>
class BatchNorm2d {
 public:
  BatchNorm2d() = default;
  explicit BatchNorm2d(int channels, double momentum = 0.1, double eps = 1e-5)
      : c_(channels), momentum_(momentum), eps_(eps) {
    weight = Tensor<T>({channels});
    bias_t = Tensor<T>({channels});
    weight_grad = Tensor<T>({channels});
    bias_grad = Tensor<T>({channels});
    running_mean = Tensor<T>({channels});
    running_var = Tensor<T>({channels});
    for (auto& v : weight.data) v = T(1);
    for (auto& v : running_var.data) v = T(1);
  }

  Tensor<T> forward(const Tensor<T>& x, bool train) {
    require(x.ndim() == 4 && x.dim(1) == c_, "batchnorm: bad input shape");
    const std::int64_t n = x.dim(0), h = x.dim(2), w = x.dim(3);
    const std::int64_t plane = h * w;
    const double count = static_cast<double>(n * plane);
    Tensor<T> y(x.shape);

    if (train) {
      xhat_ = Tensor<T>(x.shape);
      invstd_.assign(static_cast<std::size_t>(c_), T(0));
      for (std::int64_t ch = 0; ch < c_; ++ch) {
        double mean = 0;
        for (std::int64_t b = 0; b < n; ++b) {
          const T* xp = x.ptr() + ((b * c_ + ch) * plane);
          for (std::int64_t i = 0; i < plane; ++i) mean += xp[i];
        }
        mean /= count;
        double var = 0;
        for (std::int64_t b = 0; b < n; ++b) {
          const T* xp = x.ptr() + ((b * c_ + ch) * plane);
          for (std::int64_t i = 0; i < plane; ++i) {
            const double d = xp[i] - mean;
            var += d * d;
          }
        }
        var /= count;
        const double invstd = 1.0 / std::sqrt(var + eps_);
        invstd_[static_cast<std::size_t>(ch)] = static_cast<T>(invstd);
        const T g = weight.data[static_cast<std::size_t>(ch)];
        const T be = bias_t.data[static_cast<std::size_t>(ch)];
        for (std::int64_t b = 0; b < n; ++b) {
          const T* xp = x.ptr() + ((b * c_ + ch) * plane);
          T* xh = xhat_.ptr() + ((b * c_ + ch) * plane);
          T* yp = y.ptr() + ((b * c_ + ch) * plane);
          for (std::int64_t i = 0; i < plane; ++i) {
            const T v = static_cast<T>((xp[i] - mean) * invstd);
            xh[i] = v;
            yp[i] = g * v + be;
          }
        }
        const double unbiased =
            count > 1 ? var * count / (count - 1.0) : var;
        running_mean.data[static_cast<std::size_t>(ch)] = static_cast<T>(
            (1.0 - momentum_) * running_mean.data[static_cast<std::size_t>(ch)] +
            momentum_ * mean);
        running_var.data[static_cast<std::size_t>(ch)] = static_cast<T>(
            (1.0 - momentum_) * running_var.data[static_cast<std::size_t>(ch)] +
            momentum_ * unbiased);
      }
      train_cached_ = true;
    } else {
      for (std::int64_t ch = 0; ch < c_; ++ch) {
        const double invstd = 1.0 / std::sqrt(
            static_cast<double>(running_var.data[static_cast<std::size_t>(ch)]) + eps_);
        const double mean = running_mean.data[static_cast<std::size_t>(ch)];
        const T g = weight.data[static_cast<std::size_t>(ch)];
        const T be = bias_t.data[static_cast<std::size_t>(ch)];
        for (std::int64_t b = 0; b < n; ++b) {
          const T* xp = x.ptr() + ((b * c_ + ch) * plane);
          T* yp = y.ptr() + ((b * c_ + ch) * plane);
          for (std::int64_t i = 0; i < plane; ++i)
            yp[i] = static_cast<T>(g * ((xp[i] - mean) * invstd) + be);
        }
      }
      train_cached_ = false;
      eval_shape_ = x.shape;
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    if (!train_cached_) {
      // eval-mode: plain affine scaling by gamma * invstd(running)
      Tensor<T> dx(eval_shape_);
      const std::int64_t n = dy.dim(0), plane = dy.dim(2) * dy.dim(3);
      for (std::int64_t ch = 0; ch < c_; ++ch) {
        const double invstd = 1.0 / std::sqrt(
            static_cast<double>(running_var.data[static_cast<std::size_t>(ch)]) + eps_);
        const T scale = static_cast<T>(weight.data[static_cast<std::size_t>(ch)] * invstd);
        for (std::int64_t b = 0; b < n; ++b) {
          const T* dp = dy.ptr() + ((b * c_ + ch) * plane);
          T* dxp = dx.ptr() + ((b * c_ + ch) * plane);
          for (std::int64_t i = 0; i < plane; ++i) dxp[i] = scale * dp[i];
        }
      }
      return dx;
    }

    const std::int64_t n = dy.dim(0), h = dy.dim(2), w = dy.dim(3);
    const std::int64_t plane = h * w;
    const double count = static_cast<double>(n * plane);
    Tensor<T> dx(dy.shape);
    for (std::int64_t ch = 0; ch < c_; ++ch) {
      double sum_dy = 0, sum_dy_xhat = 0;
      for (std::int64_t b = 0; b < n; ++b) {
        const T* dp = dy.ptr() + ((b * c_ + ch) * plane);
        const T* xh = xhat_.ptr() + ((b * c_ + ch) * plane);
        for (std::int64_t i = 0; i < plane; ++i) {
          sum_dy += dp[i];
          sum_dy_xhat += static_cast<double>(dp[i]) * xh[i];
        }
      }
      bias_grad.data[static_cast<std::size_t>(ch)] += static_cast<T>(sum_dy);
      weight_grad.data[static_cast<std::size_t>(ch)] += static_cast<T>(sum_dy_xhat);

      const double g = weight.data[static_cast<std::size_t>(ch)];
      const double invstd = invstd_[static_cast<std::size_t>(ch)];
      const double mean_dy = sum_dy / count;
      const double mean_dy_xhat = sum_dy_xhat / count;
      for (std::int64_t b = 0; b < n; ++b) {
        const T* dp = dy.ptr() + ((b * c_ + ch) * plane);
        const T* xh = xhat_.ptr() + ((b * c_ + ch) * plane);
        T* dxp = dx.ptr() + ((b * c_ + ch) * plane);
        for (std::int64_t i = 0; i < plane; ++i)
          dxp[i] = static_cast<T>(
              g * invstd * (dp[i] - mean_dy - xh[i] * mean_dy_xhat));
      }
    }
    return dx;
  }

  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    out.push_back({prefix + ".weight", &weight, &weight_grad, false});
    out.push_back({prefix + ".bias", &bias_t, &bias_grad, false});
    out.push_back({prefix + ".running_mean", &running_mean, nullptr, true});
    out.push_back({prefix + ".running_var", &running_var, nullptr, true});
  }

  void release_cache() {
    xhat_ = Tensor<T>();
    invstd_.clear();
  }

  Tensor<T> weight, bias_t, weight_grad, bias_grad;
  Tensor<T> running_mean, running_var;

 private:
  std::int64_t c_ = 0;
  double momentum_ = 0.1, eps_ = 1e-5;
  Tensor<T> xhat_;
  std::vector<T> invstd_;
  bool train_cached_ = false;
  std::vector<std::int64_t> eval_shape_;
};

// [N,C,H,W] -> [N,C] mean over the spatial plane.
template <typename T>
class GlobalAvgPool {
 public:
  Tensor<T> forward(const Tensor<T>& x, bool /*train*/) {
    const std::int64_t n = x.dim(0), c = x.dim(1), plane = x.dim(2) * x.dim(3);
    in_shape_ = x.shape;
    Tensor<T> y({n, c});
    for (std::int64_t b = 0; b < n; ++b) {
      for (std::int64_t ch = 0; ch < c; ++ch) {
        const T* xp = x.ptr() + ((b * c + ch) * plane);
        double acc = 0;
        for (std::int64_t i = 0; i < plane; ++i) acc += xp[i];
        y.data[static_cast<std::size_t>(b * c + ch)] =
            static_cast<T>(acc / static_cast<double>(plane));
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    Tensor<T> dx(in_shape_);
    const std::int64_t n = dy.dim(0), c = dy.dim(1);
    const std::int64_t plane = in_shape_[2] * in_shape_[3];
    for (std::int64_t b = 0; b < n; ++b) {
      for (std::int64_t ch = 0; ch < c; ++ch) {
        const T g = static_cast<T>(
            dy.data[static_cast<std::size_t>(b * c + ch)] / static_cast<T>(plane));
        T* dxp = dx.ptr() + ((b * c + ch) * plane);
        for (std::int64_t i = 0; i < plane; ++i) dxp[i] = g;
      }
    }
    return dx;
  }

  void release_cache() {}

 private:
  std::vector<std::int64_t> in_shape_;
};

// Affine layer: y = x W + b with W stored [in_dim, out_dim].
template <typename T>
class Linear {
 public:
  Linear() = default;
  Linear(std::int64_t in_dim, std::int64_t out_dim) : in_(in_dim), out_(out_dim) {
    weight = Tensor<T>({in_dim, out_dim});
    bias_t = Tensor<T>({out_dim});
    weight_grad = Tensor<T>(weight.shape);
    bias_grad = Tensor<T>(bias_t.shape);
  }

  void init(Rng& rng) {
    init_uniform_fan_in(weight, in_, rng);
    bias_t.zero();
  }

  Tensor<T> forward(const Tensor<T>& x, bool train) {
    require(x.ndim() == 2 && x.dim(1) == in_, "linear: bad input shape");
    const std::int64_t n = x.dim(0);
    Tensor<T> y({n, out_});
    for (std::int64_t b = 0; b < n; ++b) {
      const T* xp = x.ptr() + b * in_;
      T* yp = y.ptr() + b * out_;
      for (std::int64_t k = 0; k < out_; ++k) yp[k] = bias_t.data[static_cast<std::size_t>(k)];
      for (std::int64_t d = 0; d < in_; ++d) {
        const T xv = xp[d];
        if (xv == T(0)) continue;
        const T* wrow = weight.ptr() + d * out_;
        for (std::int64_t k = 0; k < out_; ++k) yp[k] += xv * wrow[k];
      }
    }
    if (train) cached_input_ = x;
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    const Tensor<T>& x = cached_input_;
    require(x.numel() > 0, "linear backward without cached forward");
    const std::int64_t n = x.dim(0);
    for (std::int64_t b = 0; b < n; ++b) {
      const T* dp = dy.ptr() + b * out_;
      const T* xp = x.ptr() + b * in_;
      for (std::int64_t k = 0; k < out_; ++k)
        bias_grad.data[static_cast<std::size_t>(k)] += dp[k];
      for (std::int64_t d = 0; d < in_; ++d) {
        const T xv = xp[d];
        T* wg = weight_grad.ptr() + d * out_;
        for (std::int64_t k = 0; k < out_; ++k) wg[k] += xv * dp[k];
      }
    }
    Tensor<T> dx({n, in_});
    for (std::int64_t b = 0; b < n; ++b) {
      const T* dp = dy.ptr() + b * out_;
      T* dxp = dx.ptr() + b * in_;
      for (std::int64_t d = 0; d < in_; ++d) {
        const T* wrow = weight.ptr() + d * out_;
        T acc = 0;
        for (std::int64_t k = 0; k < out_; ++k) acc += wrow[k] * dp[k];
        dxp[d] = acc;
      }
    }
    return dx;
  }

  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    out.push_back({prefix + ".weight", &weight, &weight_grad, false});
    out.push_back({prefix + ".bias", &bias_t, &bias_grad, false});
  }

  void release_cache() { cached_input_ = Tensor<T>(); }

  std::int64_t in_dim() const { return in_; }
  std::int64_t out_dim() const { return out_; }

  Tensor<T> weight, bias_t, weight_grad, bias_grad;

 private:
  std::int64_t in_ = 0, out_ = 0;
  Tensor<T> cached_input_;
};

// Row-wise numerically stable softmax.
template <typename T>
Tensor<T> softmax_rows(const Tensor<T>& logits) {
  require(logits.ndim() == 2, "softmax: expected [N,K]");
  const std::int64_t n = logits.dim(0), k = logits.dim(1);
  Tensor<T> p(logits.shape);
  for (std::int64_t b = 0; b < n; ++b) {
    const T* lp = logits.ptr() + b * k;
    T* pp = p.ptr() + b * k;
    T maxv = lp[0];
    for (std::int64_t i = 1; i < k; ++i) maxv = std::max(maxv, lp[i]);
    double sum = 0;
    for (std::int64_t i = 0; i < k; ++i) {
      const double e = std::exp(static_cast<double>(lp[i] - maxv));
      pp[i] = static_cast<T>(e);
      sum += e;
    }
    for (std::int64_t i = 0; i < k; ++i)
      pp[i] = static_cast<T>(pp[i] / sum);
  }
  return p;
}

}  // namespace xens

#endif
