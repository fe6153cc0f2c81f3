#include "xens/model.hpp"

#include <sstream>

#include "xens/checkpoint.hpp"
#include "xens/digest.hpp"
#include "xens/error.hpp"

namespace xens {

TensorF images_to_batch(const std::vector<Image>& images) {
  require(!images.empty(), "images_to_batch: empty batch");
  const int h = images[0].height, w = images[0].width;
  TensorF batch({static_cast<std::int64_t>(images.size()), 3, h, w});
  float* out = batch.ptr();
  const std::int64_t plane = static_cast<std::int64_t>(h) * w;
  for (std::size_t n = 0; n < images.size(); ++n) {
    const Image& img = images[n];
    require(img.height == h && img.width == w,
            "images_to_batch: inconsistent image sizes in batch");
    for (int c = 0; c < 3; ++c) {
      float* dst = out + (static_cast<std::int64_t>(n) * 3 + c) * plane;
      const float mean = kChannelMean[c], inv_std = 1.0f / kChannelStd[c];
      for (std::int64_t i = 0; i < plane; ++i)
        dst[i] = (img.pixels[static_cast<std::size_t>(i)] - mean) * inv_std;
    }
  }
  return batch;
}

std::string InitProvenance::to_string() const {
  if (kind == Kind::pretrained_archive) return "pretrained-archive:" + archive_digest;
  return "random:" + std::to_string(seed);
}

InitProvenance InitProvenance::parse(const std::string& s) {
  InitProvenance p;
  if (s.rfind("pretrained-archive:", 0) == 0) {
    p.kind = Kind::pretrained_archive;
    p.archive_digest = s.substr(19);
  } else if (s.rfind("random:", 0) == 0) {
    p.kind = Kind::random;
    p.seed = std::stoull(s.substr(7));
  } else {
    fail("bad init provenance string: ", s);
  }
  return p;
}

FeatureExtractor build_extractor(const std::string& arch,
                                 const ExtractorInit& init,
                                 std::int64_t tiny_dim) {
  FeatureExtractor ex;
  ex.arch = arch;
  ex.net = std::shared_ptr<Backbone<float>>(make_backbone<float>(arch, tiny_dim));

  if (std::holds_alternative<RandomInit>(init)) {
    const auto seed = std::get<RandomInit>(init).seed;
    Rng rng(mix_seed({seed, hash_string(arch)}));
    ex.net->init(rng);
    ex.init_provenance = {InitProvenance::Kind::random, "", seed};
    return ex;
  }

  const auto& path = std::get<PretrainedInit>(init).archive_path;
  ParamArchive archive = load_param_archive(path);

  std::vector<ParamRef<float>> params;
  ex.net->collect_params(params);
  std::vector<std::string> problems;
  for (auto& p : params) {
    auto it = archive.tensors.find(p.name);
    if (it == archive.tensors.end()) {
      problems.push_back("missing " + p.name);
      continue;
    }
    if (it->second.shape != p.value->shape) {
      std::ostringstream os;
      os << "shape mismatch " << p.name << " (archive";
      for (auto d : it->second.shape) os << ' ' << d;
      os << " vs model";
      for (auto d : p.value->shape) os << ' ' << d;
      os << ')';
      problems.push_back(os.str());
      continue;
    }
    *p.value = it->second;
  }
  if (!problems.empty()) {
    std::ostringstream os;
    os << "pretrained archive " << path << " unusable:";
    for (const auto& p : problems) os << ' ' << p << ';';
    fail(os.str());
  }
  ex.init_provenance = {InitProvenance::Kind::pretrained_archive,
                        archive.content_digest, 0};
  return ex;
}

ClassifierModel attach_head(const FeatureExtractor& extractor, int num_classes,
                            std::uint64_t head_seed,
                            std::vector<std::string> class_names) {
  require(num_classes >= 2, "attach_head: K must be >= 2, got ", num_classes);
  ClassifierModel m;
  m.extractor = extractor;
  m.num_classes = num_classes;
  m.class_names = std::move(class_names);
  m.head = Linear<float>(extractor.feature_dim(), num_classes);
  Rng rng(mix_seed({head_seed, hash_string("head")}));
  m.head.init(rng);
  return m;
}

FeatureExtractor strip_and_freeze(const ClassifierModel& model) {
  FeatureExtractor ex = model.extractor.deep_copy();
  ex.frozen = true;
  return ex;
}

EnsembleModel assemble_ensemble(const std::vector<FeatureExtractor>& extractors,
                                const std::vector<std::string>& member_ids,
                                int num_classes, std::uint64_t head_seed,
                                std::vector<std::string> class_names) {
  require(extractors.size() >= 2, "assemble_ensemble: need >= 2 extractors");
  require(member_ids.size() == extractors.size(),
          "assemble_ensemble: member id per extractor required");
  EnsembleModel e;
  e.concat_dim = 0;
  for (std::size_t i = 0; i < extractors.size(); ++i) {
    require(extractors[i].frozen, "assemble_ensemble: member '", member_ids[i],
            "' is not frozen");
    e.concat_dim += extractors[i].feature_dim();
  }
  e.members = extractors;
  e.member_ids = member_ids;
  e.num_classes = num_classes;
  e.class_names = std::move(class_names);
  e.head = Linear<float>(e.concat_dim, num_classes);
  Rng rng(mix_seed({head_seed, hash_string("ensemble-head")}));
  e.head.init(rng);
  return e;
}

TensorF EnsembleModel::forward_logits(const TensorF& x, bool train) {
  const std::int64_t n = x.dim(0);
  TensorF concat({n, concat_dim});
  std::int64_t offset = 0;
  for (auto& member : members) {
    TensorF feat = member.forward(x, train);
    const std::int64_t d = feat.dim(1);
    for (std::int64_t b = 0; b < n; ++b) {
      const float* src = feat.ptr() + b * d;
      float* dst = concat.ptr() + b * concat_dim + offset;
      for (std::int64_t i = 0; i < d; ++i) dst[i] = src[i];
    }
    offset += d;
  }
  return head.forward(concat, train);
}

static ForwardResult run_forward(TensorF logits) {
  ForwardResult r;
  r.probabilities = softmax_rows(logits);
  r.logits = std::move(logits);
  return r;
}

ForwardResult forward(ClassifierModel& model, const TensorF& batch) {
  return run_forward(model.forward_logits(batch, false));
}

ForwardResult forward(EnsembleModel& model, const TensorF& batch) {
  return run_forward(model.forward_logits(batch, false));
}

std::vector<ParamRef<float>> all_params(ClassifierModel& model) {
  std::vector<ParamRef<float>> out;
  model.extractor.net->collect_params(out);
  for (auto& p : out) p.name = "extractor." + p.name;
  model.head.collect("head", out);
  return out;
}

std::vector<ParamRef<float>> all_params(EnsembleModel& model) {
  std::vector<ParamRef<float>> out;
  for (std::size_t i = 0; i < model.members.size(); ++i) {
    std::vector<ParamRef<float>> member;
    model.members[i].net->collect_params(member);
    for (auto& p : member)
      p.name = "members." + std::to_string(i) + "." + p.name;
    out.insert(out.end(), member.begin(), member.end());
  }
  model.head.collect("head", out);
  return out;
}

std::vector<ParamRef<float>> trainable_params(ClassifierModel& model,
                                              TrainableScope scope) {
  std::vector<ParamRef<float>> out;
  if (scope == TrainableScope::all && !model.extractor.frozen) {
    model.extractor.net->collect_params(out);
    std::erase_if(out, [](const ParamRef<float>& p) { return p.is_buffer; });
  }
  model.head.collect("head", out);
  return out;
}

std::vector<ParamRef<float>> trainable_params(EnsembleModel& model,
                                              TrainableScope /*scope*/) {
  // Members are frozen by construction; only the head ever trains.
  std::vector<ParamRef<float>> out;
  model.head.collect("head", out);
  return out;
}

}  // namespace xens
