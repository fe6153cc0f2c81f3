#include "xens/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "xens/error.hpp"
#include "xens/io_util.hpp"

namespace xens {

void AugmentationConfig::validate() const {
  require(resize_to >= 1, "resize_to must be >= 1");
  require(crop_size >= 1 && crop_size <= resize_to,
          "crop_size must be in [1, resize_to]");
  require(rotation_deg >= 0.0, "rotation range must be >= 0");
  require(hflip_prob >= 0.0 && hflip_prob <= 1.0, "hflip_prob must be in [0,1]");
}

// Ids per class, map keyed by label so class order is stable.
static std::map<int, std::vector<std::string>> group_by_label(
    const std::vector<LabeledId>& items) {
  std::map<int, std::vector<std::string>> groups;
  for (const auto& it : items) groups[it.label].push_back(it.id);
  for (auto& [label, ids] : groups) std::sort(ids.begin(), ids.end());
  return groups;
}

// round-half-up((1 - ratio) * n) in exact integer arithmetic. The ratio is
// taken at micro precision (6 decimals) so that decimal ratios like 0.9 do
// not lose exact .5 ties to binary representation error.
static std::int64_t test_count_for(std::int64_t n, double ratio) {
  const std::int64_t ppm = std::llround((1.0 - ratio) * 1e6);
  const std::int64_t numer = n * ppm;
  std::int64_t t = (numer + 500000) / 1000000;
  if (t < 1) t = 1;
  if (t > n - 1) t = n - 1;  // keep at least one training member
  return t;
}

SplitPlan holdout_split(const std::vector<LabeledId>& items, double ratio,
                        std::uint64_t seed) {
  require(ratio > 0.0 && ratio < 1.0, "split ratio must be in (0,1)");
  require(!items.empty(), "holdout_split: empty input");

  SplitPlan plan;
  plan.ratio = ratio;
  plan.seed = seed;
  auto groups = group_by_label(items);
  for (auto& [label, ids] : groups) {
    require(ids.size() >= 2, "holdout_split: class ", label, " has ",
            ids.size(), " member(s), need >= 2");
    const std::int64_t n_test =
        test_count_for(static_cast<std::int64_t>(ids.size()), ratio);
    Rng rng(mix_seed({seed, 0x5eedu, static_cast<std::uint64_t>(label)}));
    rng.shuffle(ids);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i < static_cast<std::size_t>(n_test))
        plan.test_ids.push_back(ids[i]);
      else
        plan.train_ids.push_back(ids[i]);
    }
  }
  std::sort(plan.train_ids.begin(), plan.train_ids.end());
  std::sort(plan.test_ids.begin(), plan.test_ids.end());
  return plan;
}

FoldPlan make_folds(const std::vector<LabeledId>& train_items, int k,
                    std::uint64_t seed) {
  require(k >= 2, "make_folds: k must be >= 2");
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.folds.assign(k, {});

  auto groups = group_by_label(train_items);
  for (auto& [label, ids] : groups) {
    require(static_cast<int>(ids.size()) >= k, "make_folds: class ", label,
            " has ", ids.size(), " member(s), need >= k=", k);
    Rng rng(mix_seed({seed, 0xf01d5u, static_cast<std::uint64_t>(label)}));
    rng.shuffle(ids);
    const std::size_t base = ids.size() / k;
    const std::size_t rem = ids.size() % k;
    std::size_t pos = 0;
    for (int f = 0; f < k; ++f) {
      std::size_t take = base + (static_cast<std::size_t>(f) < rem ? 1 : 0);
      for (std::size_t i = 0; i < take; ++i)
        plan.folds[f].push_back(ids[pos++]);
    }
  }
  for (auto& fold : plan.folds) std::sort(fold.begin(), fold.end());
  return plan;
}

SamplingPlan oversample_weights(const std::vector<LabeledId>& items) {
  require(!items.empty(), "oversample_weights: empty input");
  std::map<int, std::int64_t> counts;
  for (const auto& it : items) counts[it.label]++;
  for (const auto& [label, n] : counts)
    require(n >= 1, "oversample_weights: empty class ", label);

  SamplingPlan plan;
  plan.mode = SamplingPlan::Mode::weighted;
  plan.epoch_length = static_cast<std::int64_t>(items.size());
  std::vector<LabeledId> sorted = items;
  std::sort(sorted.begin(), sorted.end(),
            [](const LabeledId& a, const LabeledId& b) { return a.id < b.id; });
  for (const auto& it : sorted) {
    plan.ids.push_back(it.id);
    plan.weights.push_back(1.0 / static_cast<double>(counts[it.label]));
  }
  return plan;
}

SamplingPlan permutation_plan(const std::vector<LabeledId>& items) {
  require(!items.empty(), "permutation_plan: empty input");
  SamplingPlan plan;
  plan.mode = SamplingPlan::Mode::permutation;
  plan.epoch_length = static_cast<std::int64_t>(items.size());
  for (const auto& it : items) plan.ids.push_back(it.id);
  std::sort(plan.ids.begin(), plan.ids.end());
  plan.weights.assign(plan.ids.size(), 1.0);
  return plan;
}

std::vector<std::vector<std::string>> epoch_batches(const SamplingPlan& plan,
                                                    int batch_size,
                                                    std::uint64_t seed) {
  require(batch_size >= 1, "batch_size must be >= 1");
  require(!plan.ids.empty(), "epoch_batches: empty plan");

  std::vector<std::size_t> draw_order;
  draw_order.reserve(static_cast<std::size_t>(plan.epoch_length));
  Rng rng(mix_seed({seed, 0xba7c4u}));

  if (plan.mode == SamplingPlan::Mode::permutation) {
    std::vector<std::size_t> perm(plan.ids.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    rng.shuffle(perm);
    draw_order = std::move(perm);
  } else {
    // Inverse-CDF sampling with replacement over the cumulative weights.
    std::vector<double> cum(plan.weights.size());
    double total = 0.0;
    for (std::size_t i = 0; i < plan.weights.size(); ++i) {
      require(plan.weights[i] > 0.0, "sampling weight must be positive");
      total += plan.weights[i];
      cum[i] = total;
    }
    for (std::int64_t d = 0; d < plan.epoch_length; ++d) {
      double u = rng.uniform_double() * total;
      auto it = std::upper_bound(cum.begin(), cum.end(), u);
      std::size_t idx = static_cast<std::size_t>(it - cum.begin());
      if (idx >= plan.ids.size()) idx = plan.ids.size() - 1;
      draw_order.push_back(idx);
    }
  }

  std::vector<std::vector<std::string>> batches;
  for (std::size_t pos = 0; pos < draw_order.size(); pos += batch_size) {
    std::vector<std::string> batch;
    for (std::size_t i = pos;
         i < std::min(draw_order.size(), pos + batch_size); ++i)
      batch.push_back(plan.ids[draw_order[i]]);
    batches.push_back(std::move(batch));
  }
  return batches;
}

Image augment(const Image& img, const AugmentationConfig& cfg, Rng& rng) {
  cfg.validate();
  require(!img.empty(), "augment: undecodable or empty image");

  Image out = resize_bilinear(img, cfg.resize_to, cfg.resize_to);
  if (cfg.rotation_deg > 0.0) {
    double angle = rng.uniform_range(-cfg.rotation_deg, cfg.rotation_deg);
    out = rotate_bilinear(out, angle);
  }
  if (cfg.crop_size < cfg.resize_to) {
    int max_off = cfg.resize_to - cfg.crop_size;
    int x0 = static_cast<int>(rng.uniform_u64(max_off + 1));
    int y0 = static_cast<int>(rng.uniform_u64(max_off + 1));
    out = crop(out, x0, y0, cfg.crop_size, cfg.crop_size);
  }
  if (cfg.hflip_prob > 0.0 && rng.bernoulli(cfg.hflip_prob)) out = hflip(out);
  return out;
}

Image center_preprocess(const Image& img, const AugmentationConfig& cfg) {
  cfg.validate();
  require(!img.empty(), "center_preprocess: undecodable or empty image");
  Image out = resize_bilinear(img, cfg.resize_to, cfg.resize_to);
  if (cfg.crop_size < cfg.resize_to) {
    int off = (cfg.resize_to - cfg.crop_size) / 2;
    out = crop(out, off, off, cfg.crop_size, cfg.crop_size);
  }
  return out;
}

// ---- files -----------------------------------------------------------------

void save_split(const SplitPlan& p, const std::string& path) {
  std::ostringstream os;
  os << "# xens-split v1\n";
  os << "# seed: " << p.seed << '\n';
  os << "# ratio: " << format_double(p.ratio) << '\n';
  os << "id\trole\n";
  for (const auto& id : p.train_ids) os << id << "\ttrain\n";
  for (const auto& id : p.test_ids) os << id << "\ttest\n";
  write_text_file(path, os.str());
}

SplitPlan load_split(const std::string& path) {
  SplitPlan p;
  bool header_seen = false;
  for (const auto& line : read_lines(path)) {
    if (line.rfind("# seed: ", 0) == 0) {
      p.seed = std::stoull(line.substr(8));
      continue;
    }
    if (line.rfind("# ratio: ", 0) == 0) {
      p.ratio = std::stod(line.substr(9));
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    auto f = split_tsv(line);
    require(f.size() == 2, "bad split row in ", path, ": ", line);
    if (f[1] == "train")
      p.train_ids.push_back(f[0]);
    else if (f[1] == "test")
      p.test_ids.push_back(f[0]);
    else
      fail("bad split role '", f[1], "' in ", path);
  }
  return p;
}

void save_folds(const FoldPlan& p, const std::string& path) {
  std::ostringstream os;
  os << "# xens-folds v1\n";
  os << "# seed: " << p.seed << '\n';
  os << "# k: " << p.k << '\n';
  os << "id\tfold\n";
  // Row order: sorted by id across all folds, for byte-stable files.
  std::vector<std::pair<std::string, int>> rows;
  for (int f = 0; f < p.k; ++f)
    for (const auto& id : p.folds[f]) rows.emplace_back(id, f);
  std::sort(rows.begin(), rows.end());
  for (const auto& [id, f] : rows) os << id << '\t' << f << '\n';
  write_text_file(path, os.str());
}

FoldPlan load_folds(const std::string& path) {
  FoldPlan p;
  p.k = 0;
  bool header_seen = false;
  for (const auto& line : read_lines(path)) {
    if (line.rfind("# seed: ", 0) == 0) {
      p.seed = std::stoull(line.substr(8));
      continue;
    }
    if (line.rfind("# k: ", 0) == 0) {
      p.k = std::stoi(line.substr(5));
      p.folds.assign(p.k, {});
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    auto f = split_tsv(line);
    require(f.size() == 2, "bad folds row in ", path, ": ", line);
    int fold = std::stoi(f[1]);
    require(p.k > 0 && fold >= 0 && fold < p.k, "fold index out of range in ",
            path);
    p.folds[fold].push_back(f[0]);
  }
  require(p.k >= 2, "folds file missing k header: ", path);
  return p;
}

}  // namespace xens
