#ifndef XENS_BACKBONES_HPP
#define XENS_BACKBONES_HPP

#include <memory>
#include <string>
#include <vector>

#include "xens/layers.hpp"

namespace xens {

// A feature extractor body: images in, penultimate feature vectors out.
template <typename T>
class Backbone {
 public:
  virtual ~Backbone() = default;
  virtual Tensor<T> forward(const Tensor<T>& x, bool train) = 0;
  virtual Tensor<T> backward(const Tensor<T>& dfeat) = 0;
  virtual std::int64_t feature_dim() const = 0;
  virtual std::string arch_id() const = 0;
  virtual void collect_params(std::vector<ParamRef<T>>& out) = 0;
  virtual void init(Rng& rng) = 0;
  virtual std::unique_ptr<Backbone<T>> clone() const = 0;
  virtual void release_caches() = 0;
};

// Three conv+pool stages ending in global average pooling. Small enough to
// fine-tune end to end on a CPU in seconds; same interface as the real thing.
template <typename T>
class TinyBackbone : public Backbone<T> {
 public:
  explicit TinyBackbone(std::int64_t feature_dim = 64) : dim_(feature_dim) {
    require(feature_dim >= 4, "tiny backbone feature_dim must be >= 4");
    const int c1 = static_cast<int>(std::max<std::int64_t>(4, dim_ / 4));
    const int c2 = static_cast<int>(std::max<std::int64_t>(4, dim_ / 2));
    conv1_ = Conv2d<T>(3, c1, 3, 1, 1, true);
    conv2_ = Conv2d<T>(c1, c2, 3, 1, 1, true);
    conv3_ = Conv2d<T>(c2, static_cast<int>(dim_), 3, 1, 1, true);
    pool1_ = MaxPool2d<T>(2, 2, 0);
    pool2_ = MaxPool2d<T>(2, 2, 0);
  }

  Tensor<T> forward(const Tensor<T>& x, bool train) override {
    Tensor<T> h = conv1_.forward(x, train);
    h = relu1_.forward(h, train);
    h = pool1_.forward(h, train);
    h = conv2_.forward(h, train);
    h = relu2_.forward(h, train);
    h = pool2_.forward(h, train);
    h = conv3_.forward(h, train);
    h = relu3_.forward(h, train);
    return gap_.forward(h, train);
  }

  Tensor<T> backward(const Tensor<T>& dfeat) override {
    Tensor<T> g = gap_.backward(dfeat);
    g = relu3_.backward(g);
    g = conv3_.backward(g);
    g = pool2_.backward(g);
    g = relu2_.backward(g);
    g = conv2_.backward(g);
    g = pool1_.backward(g);
    g = relu1_.backward(g);
    return conv1_.backward(g);
  }

  std::int64_t feature_dim() const override { return dim_; }
  std::string arch_id() const override { return "tiny"; }

  void collect_params(std::vector<ParamRef<T>>& out) override {
    conv1_.collect("conv1", out);
    conv2_.collect("conv2", out);
    conv3_.collect("conv3", out);
  }

  void init(Rng& rng) override {
    conv1_.init(rng);
    conv2_.init(rng);
    conv3_.init(rng);
  }

  std::unique_ptr<Backbone<T>> clone() const override {
    auto copy = std::make_unique<TinyBackbone<T>>(dim_);
    copy->conv1_.weight = conv1_.weight;
    copy->conv1_.bias_t = conv1_.bias_t;
    copy->conv2_.weight = conv2_.weight;
    copy->conv2_.bias_t = conv2_.bias_t;
    copy->conv3_.weight = conv3_.weight;
    copy->conv3_.bias_t = conv3_.bias_t;
    return copy;
  }

  void release_caches() override {
    conv1_.release_cache();
    conv2_.release_cache();
    conv3_.release_cache();
    relu1_.release_cache();
    relu2_.release_cache();
    relu3_.release_cache();
    pool1_.release_cache();
    pool2_.release_cache();
  }

 private:
  std::int64_t dim_;
  Conv2d<T> conv1_, conv2_, conv3_;
  ReLU<T> relu1_, relu2_, relu3_;
  MaxPool2d<T> pool1_, pool2_;
  GlobalAvgPool<T> gap_;
};

// Two 3x3 convolutions with batch norm and an identity (or 1x1-projected)
// skip connection.
template <typename T>
class BasicBlock {
 public:
  BasicBlock() = default;
  BasicBlock(int in_ch, int out_ch, int stride)
      : downsample_(in_ch != out_ch || stride != 1) {
    conv1_ = Conv2d<T>(in_ch, out_ch, 3, stride, 1, false);
    bn1_ = BatchNorm2d<T>(out_ch);
    conv2_ = Conv2d<T>(out_ch, out_ch, 3, 1, 1, false);
    bn2_ = BatchNorm2d<T>(out_ch);
    if (downsample_) {
      down_conv_ = Conv2d<T>(in_ch, out_ch, 1, stride, 0, false);
      down_bn_ = BatchNorm2d<T>(out_ch);
    }
  }

  Tensor<T> forward(const Tensor<T>& x, bool train) {
    Tensor<T> h = conv1_.forward(x, train);
    h = bn1_.forward(h, train);
    h = relu1_.forward(h, train);
    h = conv2_.forward(h, train);
    h = bn2_.forward(h, train);
    Tensor<T> skip =
        downsample_ ? down_bn_.forward(down_conv_.forward(x, train), train) : x;
    require(h.same_shape(skip), "residual block: shape mismatch on skip");
    for (std::size_t i = 0; i < h.data.size(); ++i) h.data[i] += skip.data[i];
    return relu2_.forward(h, train);
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    Tensor<T> g = relu2_.backward(dy);
    // g flows both into the main path and the skip path
    Tensor<T> gmain = bn2_.backward(g);
    gmain = conv2_.backward(gmain);
    gmain = relu1_.backward(gmain);
    gmain = bn1_.backward(gmain);
    Tensor<T> dx = conv1_.backward(gmain);
    if (downsample_) {
      Tensor<T> gskip = down_bn_.backward(g);
      gskip = down_conv_.backward(gskip);
      for (std::size_t i = 0; i < dx.data.size(); ++i)
        dx.data[i] += gskip.data[i];
    } else {
      for (std::size_t i = 0; i < dx.data.size(); ++i) dx.data[i] += g.data[i];
    }
    return dx;
  }

  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    conv1_.collect(prefix + ".conv1", out);
    bn1_.collect(prefix + ".bn1", out);
    conv2_.collect(prefix + ".conv2", out);
    bn2_.collect(prefix + ".bn2", out);
    if (downsample_) {
      down_conv_.collect(prefix + ".downsample.0", out);
      down_bn_.collect(prefix + ".downsample.1", out);
    }
  }

  void init(Rng& rng) {
    conv1_.init(rng);
    conv2_.init(rng);
    if (downsample_) down_conv_.init(rng);
  }

  void release_caches() {
    conv1_.release_cache();
    conv2_.release_cache();
    bn1_.release_cache();
    bn2_.release_cache();
    relu1_.release_cache();
    relu2_.release_cache();
    if (downsample_) {
      down_conv_.release_cache();
      down_bn_.release_cache();
    }
  }

 private:
  bool downsample_ = false;
  Conv2d<T> conv1_, conv2_, down_conv_;
  BatchNorm2d<T> bn1_, bn2_, down_bn_;
  ReLU<T> relu1_, relu2_;

  template <typename U>
  friend class ResNet18Backbone;
};

// Standard 18-layer residual network up to (and including) the global average
// pool; the classification layer is a separate head. Parameter names follow
// the common conv1/bn1/layerX.Y.* convention so converted pretrained archives
// drop straight in.
template <typename T>
class ResNet18Backbone : public Backbone<T> {
 public:
  ResNet18Backbone() {
    conv1_ = Conv2d<T>(3, 64, 7, 2, 3, false);
    bn1_ = BatchNorm2d<T>(64);
    maxpool_ = MaxPool2d<T>(3, 2, 1);
    const int chans[4] = {64, 128, 256, 512};
    int in_ch = 64;
    for (int s = 0; s < 4; ++s) {
      const int stride = s == 0 ? 1 : 2;
      blocks_[s][0] = BasicBlock<T>(in_ch, chans[s], stride);
      blocks_[s][1] = BasicBlock<T>(chans[s], chans[s], 1);
      in_ch = chans[s];
    }
  }

  Tensor<T> forward(const Tensor<T>& x, bool train) override {
    Tensor<T> h = conv1_.forward(x, train);
    h = bn1_.forward(h, train);
    h = relu_.forward(h, train);
    h = maxpool_.forward(h, train);
    for (auto& stage : blocks_)
      for (auto& block : stage) h = block.forward(h, train);
    return gap_.forward(h, train);
  }

  Tensor<T> backward(const Tensor<T>& dfeat) override {
    Tensor<T> g = gap_.backward(dfeat);
    for (int s = 3; s >= 0; --s)
      for (int i = 1; i >= 0; --i) g = blocks_[s][i].backward(g);
    g = maxpool_.backward(g);
    g = relu_.backward(g);
    g = bn1_.backward(g);
    return conv1_.backward(g);
  }

  std::int64_t feature_dim() const override { return 512; }
  std::string arch_id() const override { return "resnet18"; }

  void collect_params(std::vector<ParamRef<T>>& out) override {
    conv1_.collect("conv1", out);
    bn1_.collect("bn1", out);
    for (int s = 0; s < 4; ++s)
      for (int i = 0; i < 2; ++i)
        blocks_[s][i].collect("layer" + std::to_string(s + 1) + "." +
                                  std::to_string(i),
                              out);
  }

  void init(Rng& rng) override {
    conv1_.init(rng);
    for (auto& stage : blocks_)
      for (auto& block : stage) block.init(rng);
  }

  std::unique_ptr<Backbone<T>> clone() const override {
    auto copy = std::make_unique<ResNet18Backbone<T>>();
    std::vector<ParamRef<T>> src, dst;
    const_cast<ResNet18Backbone<T>*>(this)->collect_params(src);
    copy->collect_params(dst);
    for (std::size_t i = 0; i < src.size(); ++i) *dst[i].value = *src[i].value;
    return copy;
  }

  void release_caches() override {
    conv1_.release_cache();
    bn1_.release_cache();
    relu_.release_cache();
    maxpool_.release_cache();
    for (auto& stage : blocks_)
      for (auto& block : stage) block.release_caches();
  }

 private:
  Conv2d<T> conv1_;
  BatchNorm2d<T> bn1_;
  ReLU<T> relu_;
  MaxPool2d<T> maxpool_;
  BasicBlock<T> blocks_[4][2];
  GlobalAvgPool<T> gap_;
};

template <typename T>
std::unique_ptr<Backbone<T>> make_backbone(const std::string& arch_id,
                                           std::int64_t tiny_dim = 64) {
  if (arch_id == "resnet18") return std::make_unique<ResNet18Backbone<T>>();
  if (arch_id == "tiny") return std::make_unique<TinyBackbone<T>>(tiny_dim);
  fail("unknown backbone arch '", arch_id, "'");
}

}  // namespace xens

#endif
