#ifndef XENS_SAMPLING_HPP
#define XENS_SAMPLING_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "xens/image.hpp"
#include "xens/rng.hpp"

namespace xens {

struct LabeledId {
  std::string id;
  int label = 0;
};

struct SplitPlan {
  std::vector<std::string> train_ids;  // sorted
  std::vector<std::string> test_ids;   // sorted
  double ratio = 0.9;                  // train share
  std::uint64_t seed = 0;
};

struct FoldPlan {
  int k = 5;
  std::vector<std::vector<std::string>> folds;  // each sorted; disjoint
  std::uint64_t seed = 0;
};

struct AugmentationConfig {
  int resize_to = 256;
  int crop_size = 224;
  double rotation_deg = 10.0;  // +/- range
  double hflip_prob = 0.5;

  void validate() const;
};

struct SamplingPlan {
  enum class Mode { weighted, permutation };
  Mode mode = Mode::weighted;
  std::vector<std::string> ids;
  std::vector<double> weights;     // aligned with ids; constant within a class
  std::int64_t epoch_length = 0;   // draws per epoch
};

// Stratified 9:1-style holdout. Per-class test count is
// round-half-up((1 - ratio) * N_c), at least 1; selection is uniform under
// `seed` and fully deterministic. Classes with fewer than 2 members are fatal.
SplitPlan holdout_split(const std::vector<LabeledId>& items, double ratio,
                        std::uint64_t seed);

// Stratified k-fold partition of the training ids. Within each class the fold
// sizes differ by at most one, remainder going to the lowest-index folds.
FoldPlan make_folds(const std::vector<LabeledId>& train_items, int k,
                    std::uint64_t seed);

// Class-inverse draw weights (1/N_c) so expected per-class draw counts are
// equal; epoch_length equals the total image count.
SamplingPlan oversample_weights(const std::vector<LabeledId>& items);

// Each image exactly once per epoch, shuffled. The non-oversampled variant.
SamplingPlan permutation_plan(const std::vector<LabeledId>& items);

// Draw one epoch under the plan and chunk into batches in draw order.
// The last batch may be short. Deterministic given `seed`.
std::vector<std::vector<std::string>> epoch_batches(const SamplingPlan& plan,
                                                    int batch_size,
                                                    std::uint64_t seed);

// Training-time augmentation: resize -> random rotation -> random crop ->
// horizontal flip. Output is crop_size x crop_size. Deterministic given the
// rng state; label semantics untouched.
Image augment(const Image& img, const AugmentationConfig& cfg, Rng& rng);

// Deterministic validation/test preprocessing: resize + center crop.
Image center_preprocess(const Image& img, const AugmentationConfig& cfg);

// ---- files -----------------------------------------------------------------

void save_split(const SplitPlan& p, const std::string& path);
SplitPlan load_split(const std::string& path);

void save_folds(const FoldPlan& p, const std::string& path);
FoldPlan load_folds(const std::string& path);

}  // namespace xens

#endif
