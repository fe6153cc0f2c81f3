#ifndef XENS_MODEL_HPP
#define XENS_MODEL_HPP

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "xens/backbones.hpp"
#include "xens/image.hpp"
#include "xens/layers.hpp"

namespace xens {

// Input contract: 3-channel crop_size x crop_size, grayscale replicated to
// three channels, normalized with the pretrained archive's training
// statistics.
inline constexpr float kChannelMean[3] = {0.485f, 0.456f, 0.406f};
inline constexpr float kChannelStd[3] = {0.229f, 0.224f, 0.225f};

// Pack preprocessed grayscale images into a normalized [N,3,H,W] batch.
TensorF images_to_batch(const std::vector<Image>& images);

// How an extractor's parameters came to be; recorded in checkpoints.
struct InitProvenance {
  enum class Kind { pretrained_archive, random };
  Kind kind = Kind::random;
  std::string archive_digest;  // pretrained only
  std::uint64_t seed = 0;      // random only

  std::string to_string() const;
  static InitProvenance parse(const std::string& s);
};

struct FeatureExtractor {
  std::string arch;  // "resnet18" | "tiny"
  std::shared_ptr<Backbone<float>> net;
  bool frozen = false;
  InitProvenance init_provenance;

  std::int64_t feature_dim() const { return net->feature_dim(); }

  // Frozen extractors always run in eval mode: no batch statistics, no
  // running-stat updates, parameters untouched.
  TensorF forward(const TensorF& x, bool train) {
    return net->forward(x, frozen ? false : train);
  }

  std::vector<ParamRef<float>> params() {
    std::vector<ParamRef<float>> out;
    net->collect_params(out);
    return out;
  }

  FeatureExtractor deep_copy() const {
    FeatureExtractor copy = *this;
    copy.net = std::shared_ptr<Backbone<float>>(net->clone());
    return copy;
  }
};

// A backbone plus a K-way affine head (softmax applied at the loss / at
// forward() for probabilities).
struct ClassifierModel {
  FeatureExtractor extractor;
  Linear<float> head;
  int num_classes = 0;
  std::vector<std::string> class_names;

  TensorF forward_logits(const TensorF& x, bool train) {
    TensorF feat = extractor.forward(x, train);
    return head.forward(feat, train);
  }
};

// Frozen member extractors, concatenated features, one trainable head.
struct EnsembleModel {
  std::vector<FeatureExtractor> members;
  std::vector<std::string> member_ids;  // e.g. {"a","b","c"}
  Linear<float> head;
  int num_classes = 0;
  std::vector<std::string> class_names;
  std::int64_t concat_dim = 0;

  TensorF forward_logits(const TensorF& x, bool train);
};

struct ForwardResult {
  TensorF logits;
  TensorF probabilities;
};

// Initialization source for build_extractor.
struct PretrainedInit {
  std::string archive_path;
};
struct RandomInit {
  std::uint64_t seed = 0;
};
using ExtractorInit = std::variant<PretrainedInit, RandomInit>;

// Build a backbone and initialize it either from a pretrained archive (all
// extractor parameter names must be present with matching shapes) or from a
// seeded random scheme.
FeatureExtractor build_extractor(const std::string& arch,
                                 const ExtractorInit& init,
                                 std::int64_t tiny_dim = 64);

// Attach a freshly initialized K-way head. K must be at least 2.
ClassifierModel attach_head(const FeatureExtractor& extractor, int num_classes,
                            std::uint64_t head_seed,
                            std::vector<std::string> class_names = {});

// Drop the head and freeze the extractor; parameters are bit-equal to the
// trained model's extractor parameters.
FeatureExtractor strip_and_freeze(const ClassifierModel& model);

// Concatenate two or more frozen extractors under a new K-way head. Member
// order is argument order.
EnsembleModel assemble_ensemble(const std::vector<FeatureExtractor>& extractors,
                                const std::vector<std::string>& member_ids,
                                int num_classes, std::uint64_t head_seed,
                                std::vector<std::string> class_names = {});

ForwardResult forward(ClassifierModel& model, const TensorF& batch);
ForwardResult forward(EnsembleModel& model, const TensorF& batch);

// All parameters and buffers, prefixed: extractor.* / head.* for classifier
// models, members.<i>.* / head.* for ensembles.
std::vector<ParamRef<float>> all_params(ClassifierModel& model);
std::vector<ParamRef<float>> all_params(EnsembleModel& model);

// The subset the optimizer may update.
enum class TrainableScope { all, head_only };
std::vector<ParamRef<float>> trainable_params(ClassifierModel& model,
                                              TrainableScope scope);
std::vector<ParamRef<float>> trainable_params(EnsembleModel& model,
                                              TrainableScope scope);

}  // namespace xens

#endif
