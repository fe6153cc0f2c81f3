#ifndef XENS_LOSS_HPP
#define XENS_LOSS_HPP

#include <cmath>
#include <vector>

#include "xens/layers.hpp"
#include "xens/tensor.hpp"

namespace xens {

// Per-class weights w_c = N_total / (K * N_c).
struct ClassWeights {
  std::vector<double> w;
};

ClassWeights class_weights(const std::vector<std::int64_t>& class_counts);

template <typename T>
struct LossValue {
  double loss = 0.0;
  Tensor<T> dlogits;  // d loss / d logits, same shape as logits
};

// Weighted cross entropy over logits with a weighted-mean reduction:
//   l_i = -log softmax(logits_i)[y_i]
//   L   = sum_i w_{y_i} l_i / sum_i w_{y_i}
template <typename T>
LossValue<T> weighted_cross_entropy(const Tensor<T>& logits,
                                    const std::vector<int>& labels,
                                    const std::vector<double>& weights,
                                    bool want_grad = true) {
  require(logits.ndim() == 2, "cross entropy: logits must be [N,K]");
  const std::int64_t n = logits.dim(0), k = logits.dim(1);
  require(static_cast<std::int64_t>(labels.size()) == n,
          "cross entropy: labels/logits length mismatch");
  require(static_cast<std::int64_t>(weights.size()) == k,
          "cross entropy: weights length must equal class count");

  LossValue<T> out;
  if (want_grad) out.dlogits = Tensor<T>(logits.shape);

  double weight_sum = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    require(y >= 0 && y < k, "cross entropy: label ", y, " out of range [0,", k,
            ")");
    weight_sum += weights[static_cast<std::size_t>(y)];
  }
  require(weight_sum > 0.0, "cross entropy: zero total weight");

  double loss_acc = 0.0;
  std::vector<double> probs(static_cast<std::size_t>(k));
  for (std::int64_t i = 0; i < n; ++i) {
    const T* lp = logits.ptr() + i * k;
    const int y = labels[static_cast<std::size_t>(i)];
    double maxv = lp[0];
    for (std::int64_t j = 1; j < k; ++j) maxv = std::max(maxv, static_cast<double>(lp[j]));
    double denom = 0.0;
    for (std::int64_t j = 0; j < k; ++j) {
      probs[static_cast<std::size_t>(j)] = std::exp(static_cast<double>(lp[j]) - maxv);
      denom += probs[static_cast<std::size_t>(j)];
    }
    const double log_denom = std::log(denom);
    const double sample_loss = -(static_cast<double>(lp[y]) - maxv - log_denom);
    const double wy = weights[static_cast<std::size_t>(y)];
    loss_acc += wy * sample_loss;

    if (want_grad) {
      T* gp = out.dlogits.ptr() + i * k;
      const double scale = wy / weight_sum;
      for (std::int64_t j = 0; j < k; ++j) {
        double p = probs[static_cast<std::size_t>(j)] / denom;
        double target = (j == y) ? 1.0 : 0.0;
        gp[j] = static_cast<T>(scale * (p - target));
      }
    }
  }
  out.loss = loss_acc / weight_sum;
  return out;
}

// Adam over an explicit trainable-parameter list. Parameters outside the
// list are untouched by construction, which is what enforces head-only
// training scope.
template <typename T>
class Adam {
 public:
  Adam(std::vector<ParamRef<T>> params, double lr, double beta1, double beta2,
       double eps)
      : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2),
        eps_(eps) {
    for (const auto& p : params_) {
      require(!p.is_buffer && p.grad != nullptr,
              "optimizer given a non-trainable tensor: ", p.name);
      m_.emplace_back(p.value->data.size(), 0.0);
      v_.emplace_back(p.value->data.size(), 0.0);
    }
  }

  void zero_grad() {
    for (auto& p : params_) p.grad->zero();
  }

  void step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t pi = 0; pi < params_.size(); ++pi) {
      auto& value = params_[pi].value->data;
      auto& grad = params_[pi].grad->data;
      auto& m = m_[pi];
      auto& v = v_[pi];
      for (std::size_t i = 0; i < value.size(); ++i) {
        const double g = static_cast<double>(grad[i]);
        m[i] = beta1_ * m[i] + (1.0 - beta1_) * g;
        v[i] = beta2_ * v[i] + (1.0 - beta2_) * g * g;
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        value[i] = static_cast<T>(value[i] - lr_ * mhat / (std::sqrt(vhat) + eps_));
      }
    }
  }

 private:
  std::vector<ParamRef<T>> params_;
  double lr_, beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace xens

#endif
