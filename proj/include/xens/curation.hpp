#ifndef XENS_CURATION_HPP
#define XENS_CURATION_HPP

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace xens {

enum class RawLabel { normal = 0, pneumonia = 1, covid19 = 2 };
constexpr int kRawLabelCount = 3;

const char* raw_label_name(RawLabel l);
RawLabel parse_raw_label(const std::string& s);

// Fig. 1 dataset composition schemes.
//   A: normal vs diseased (pneumonia + covid19)
//   B: pneumonia vs non-pneumonia (normal + covid19)
//   C: covid19 vs non-covid19 (normal + pneumonia)
//   D: identity three-class relabeling
enum class Scheme { A, B, C, D };

char scheme_letter(Scheme s);
Scheme parse_scheme(const std::string& s);

struct ImageRecord {
  std::string id;          // source_id + "/" + relative path
  std::string path;        // as given at ingest
  std::string source_id;
  RawLabel raw_label = RawLabel::normal;
  std::string content_hash;  // sha256 of file bytes, hex
  bool excluded = false;
  std::string exclusion_reason;
  int width = 0;
  int height = 0;
};

// Immutable after construction; records sorted by id, ids unique.
struct Collection {
  std::vector<ImageRecord> records;

  // Active = not excluded.
  std::array<std::int64_t, kRawLabelCount> active_counts() const;
  const ImageRecord* find(const std::string& id) const;
  // Digest over the canonical serialization, used in manifest provenance.
  std::string digest() const;
};

struct SourceSpec {
  std::string directory;
  RawLabel raw_label;
  std::string source_id;
};

struct SkipEntry {
  std::string path;
  std::string reason;
};

struct IngestResult {
  Collection collection;
  std::vector<SkipEntry> skipped;
};

struct CurationReport {
  // (survivor id, ids removed in its favor)
  std::vector<std::pair<std::string, std::vector<std::string>>> duplicates_removed;
  std::vector<std::pair<std::string, std::string>> excluded;  // (id, reason)
  std::vector<std::string> stale_warnings;
  std::array<std::int64_t, kRawLabelCount> counts_before{};
  std::array<std::int64_t, kRawLabelCount> counts_after{};
};

struct ExclusionEntry {
  std::string id;
  std::string reason;
};

struct ExclusionList {
  std::vector<ExclusionEntry> entries;
  std::string source_digest;  // sha256 of the list file, "none" when empty
};

struct Provenance {
  std::string collection_digest;
  std::string exclusions_digest;
  std::int64_t created = 0;
};

struct ManifestEntry {
  std::string id;
  std::string path;
  std::string hash;
  int label = 0;  // index into class_names
};

struct DatasetManifest {
  Scheme scheme = Scheme::D;
  std::vector<std::string> class_names;
  std::vector<ManifestEntry> entries;  // sorted by id
  std::map<std::string, std::int64_t> class_counts;
  Provenance provenance;

  int num_classes() const { return static_cast<int>(class_names.size()); }
};

// Walk the source directories, hash and decode every regular file, and emit
// one record per decodable image. Undecodable files land on the skip list.
// A missing directory or zero decodable images overall is fatal.
IngestResult ingest_sources(const std::vector<SourceSpec>& specs);

// Keep exactly one record per content hash; the survivor is the
// lexicographically smallest id. Idempotent.
std::pair<Collection, CurationReport> deduplicate(const Collection& in);

ExclusionList load_exclusion_list(const std::string& path);

// Mark listed records as excluded. Stale ids produce warnings in the report,
// never a failure. An empty list is the "raw" variant.
Collection apply_exclusions(const Collection& in, const ExclusionList& list,
                            CurationReport* report);

DatasetManifest compose_dataset(const Collection& collection, Scheme scheme,
                                const std::string& exclusions_digest = "none");

std::vector<std::string> class_names_for(Scheme scheme);
int map_label(Scheme scheme, RawLabel raw);

// ---- files -----------------------------------------------------------------

void save_collection(const Collection& c, const std::string& path);
Collection load_collection(const std::string& path);

void save_manifest(const DatasetManifest& m, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

void save_curation_report(const CurationReport& r,
                          const std::vector<SkipEntry>& skipped,
                          const std::string& path);

}  // namespace xens

#endif
