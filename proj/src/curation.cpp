#include "xens/curation.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "xens/digest.hpp"
#include "xens/error.hpp"
#include "xens/image.hpp"
#include "xens/io_util.hpp"

namespace fs = std::filesystem;

namespace xens {

const char* raw_label_name(RawLabel l) {
  switch (l) {
    case RawLabel::normal: return "normal";
    case RawLabel::pneumonia: return "pneumonia";
    case RawLabel::covid19: return "covid19";
  }
  return "?";
}

RawLabel parse_raw_label(const std::string& s) {
  if (s == "normal") return RawLabel::normal;
  if (s == "pneumonia") return RawLabel::pneumonia;
  if (s == "covid19") return RawLabel::covid19;
  fail("unknown raw label '", s, "' (expected normal|pneumonia|covid19)");
}

char scheme_letter(Scheme s) {
  switch (s) {
    case Scheme::A: return 'A';
    case Scheme::B: return 'B';
    case Scheme::C: return 'C';
    case Scheme::D: return 'D';
  }
  return '?';
}

Scheme parse_scheme(const std::string& s) {
  if (s == "A") return Scheme::A;
  if (s == "B") return Scheme::B;
  if (s == "C") return Scheme::C;
  if (s == "D") return Scheme::D;
  fail("unknown scheme '", s, "' (expected A|B|C|D)");
}

std::vector<std::string> class_names_for(Scheme scheme) {
  switch (scheme) {
    case Scheme::A: return {"normal", "diseased"};
    case Scheme::B: return {"pneumonia", "non-pneumonia"};
    case Scheme::C: return {"covid19", "non-covid19"};
    case Scheme::D: return {"normal", "pneumonia", "covid19"};
  }
  fail("bad scheme");
}

int map_label(Scheme scheme, RawLabel raw) {
  switch (scheme) {
    case Scheme::A:
      return raw == RawLabel::normal ? 0 : 1;
    case Scheme::B:
      return raw == RawLabel::pneumonia ? 0 : 1;
    case Scheme::C:
      return raw == RawLabel::covid19 ? 0 : 1;
    case Scheme::D:
      return static_cast<int>(raw);
  }
  fail("bad scheme");
}

std::array<std::int64_t, kRawLabelCount> Collection::active_counts() const {
  std::array<std::int64_t, kRawLabelCount> counts{};
  for (const auto& r : records)
    if (!r.excluded) ++counts[static_cast<int>(r.raw_label)];
  return counts;
}

const ImageRecord* Collection::find(const std::string& id) const {
  auto it = std::lower_bound(
      records.begin(), records.end(), id,
      [](const ImageRecord& r, const std::string& key) { return r.id < key; });
  if (it != records.end() && it->id == id) return &*it;
  return nullptr;
}

std::string Collection::digest() const {
  std::ostringstream os;
  for (const auto& r : records)
    os << r.id << '\t' << raw_label_name(r.raw_label) << '\t' << r.content_hash
       << '\t' << (r.excluded ? 1 : 0) << '\n';
  return sha256_hex(os.str());
}

static void check_no_tabs(const std::string& s, const std::string& what) {
  if (s.find('\t') != std::string::npos || s.find('\n') != std::string::npos)
    fail(what, " contains tab or newline: ", s);
}

IngestResult ingest_sources(const std::vector<SourceSpec>& specs) {
  require(!specs.empty(), "ingest: no sources given");
  IngestResult result;
  std::set<std::string> seen_ids;
  for (const auto& spec : specs) {
    check_no_tabs(spec.source_id, "source id");
    std::vector<std::string> files = list_files_recursive(spec.directory);
    for (const auto& rel : files) {
      std::string path = (fs::path(spec.directory) / rel).generic_string();
      check_no_tabs(path, "image path");
      std::string bytes;
      try {
        bytes = read_file_bytes(path);
      } catch (const Error& e) {
        result.skipped.push_back({path, "unreadable"});
        continue;
      }
      Image img = decode_image(bytes);
      if (img.empty()) {
        result.skipped.push_back({path, "undecodable"});
        continue;
      }
      ImageRecord rec;
      rec.id = spec.source_id + "/" + rel;
      rec.path = path;
      rec.source_id = spec.source_id;
      rec.raw_label = spec.raw_label;
      rec.content_hash = sha256_hex(bytes);
      rec.width = img.width;
      rec.height = img.height;
      if (!seen_ids.insert(rec.id).second)
        fail("duplicate record id (reused source id?): ", rec.id);
      result.collection.records.push_back(std::move(rec));
    }
  }
  require(!result.collection.records.empty(),
          "ingest: no decodable images in any source");
  std::sort(result.collection.records.begin(), result.collection.records.end(),
            [](const ImageRecord& a, const ImageRecord& b) { return a.id < b.id; });
  return result;
}

std::pair<Collection, CurationReport> deduplicate(const Collection& in) {
  require(!in.records.empty(), "deduplicate: empty collection");
  CurationReport report;
  for (const auto& r : in.records) ++report.counts_before[static_cast<int>(r.raw_label)];

  // Records are already sorted by id, so the first record seen for a hash is
  // the lexicographically smallest id.
  std::map<std::string, std::size_t> survivor_by_hash;
  std::map<std::string, std::vector<std::string>> removed_by_survivor;
  Collection out;
  for (const auto& r : in.records) {
    auto [it, inserted] = survivor_by_hash.emplace(r.content_hash, out.records.size());
    if (inserted) {
      out.records.push_back(r);
    } else {
      removed_by_survivor[out.records[it->second].id].push_back(r.id);
    }
  }
  for (auto& [kept, removed] : removed_by_survivor)
    report.duplicates_removed.emplace_back(kept, removed);
  for (const auto& r : out.records) ++report.counts_after[static_cast<int>(r.raw_label)];
  return {std::move(out), std::move(report)};
}

ExclusionList load_exclusion_list(const std::string& path) {
  ExclusionList list;
  if (path.empty() || path == "none") {
    list.source_digest = "none";
    return list;
  }
  list.source_digest = sha256_file_hex(path);
  for (const auto& line : read_lines(path)) {
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_tsv(line);
    ExclusionEntry e;
    e.id = fields[0];
    if (fields.size() > 1) e.reason = fields[1];
    if (e.reason.empty()) e.reason = "excluded";
    if (!e.id.empty()) list.entries.push_back(std::move(e));
  }
  return list;
}

Collection apply_exclusions(const Collection& in, const ExclusionList& list,
                            CurationReport* report) {
  Collection out = in;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < out.records.size(); ++i)
    index.emplace(out.records[i].id, i);
  for (const auto& e : list.entries) {
    auto it = index.find(e.id);
    if (it == index.end()) {
      if (report)
        report->stale_warnings.push_back("stale exclusion id: " + e.id);
      continue;
    }
    auto& rec = out.records[it->second];
    if (!rec.excluded) {
      rec.excluded = true;
      rec.exclusion_reason = e.reason;
      if (report) report->excluded.emplace_back(e.id, e.reason);
    }
  }
  return out;
}

DatasetManifest compose_dataset(const Collection& collection, Scheme scheme,
                                const std::string& exclusions_digest) {
  DatasetManifest m;
  m.scheme = scheme;
  m.class_names = class_names_for(scheme);
  for (const auto& name : m.class_names) m.class_counts[name] = 0;

  auto raw_counts = collection.active_counts();
  for (const auto& r : collection.records) {
    if (r.excluded) continue;
    ManifestEntry e;
    e.id = r.id;
    e.path = r.path;
    e.hash = r.content_hash;
    e.label = map_label(scheme, r.raw_label);
    m.class_counts[m.class_names[e.label]]++;
    m.entries.push_back(std::move(e));
  }

  for (const auto& [name, count] : m.class_counts) {
    if (count == 0) {
      std::ostringstream os;
      os << "scheme " << scheme_letter(scheme) << " class '" << name
         << "' has zero members; active raw counts:";
      for (int i = 0; i < kRawLabelCount; ++i)
        os << ' ' << raw_label_name(static_cast<RawLabel>(i)) << '='
           << raw_counts[i];
      fail(os.str());
    }
  }

  m.provenance.collection_digest = collection.digest();
  m.provenance.exclusions_digest =
      exclusions_digest.empty() ? "none" : exclusions_digest;
  m.provenance.created = artifact_timestamp();
  return m;
}

// ---- files -----------------------------------------------------------------

static std::string dash_if_empty(const std::string& s) {
  return s.empty() ? "-" : s;
}
static std::string empty_if_dash(const std::string& s) {
  return s == "-" ? "" : s;
}

void save_collection(const Collection& c, const std::string& path) {
  std::ostringstream os;
  os << "# xens-collection v1\n";
  os << "id\tpath\tlabel\thash\texcluded\treason\twidth\theight\n";
  for (const auto& r : c.records) {
    os << r.id << '\t' << r.path << '\t' << raw_label_name(r.raw_label) << '\t'
       << r.content_hash << '\t' << (r.excluded ? 1 : 0) << '\t'
       << dash_if_empty(r.exclusion_reason) << '\t' << r.width << '\t'
       << r.height << '\n';
  }
  write_text_file(path, os.str());
}

Collection load_collection(const std::string& path) {
  Collection c;
  bool header_seen = false;
  for (const auto& line : read_lines(path)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // column header row
      continue;
    }
    auto f = split_tsv(line);
    require(f.size() == 8, "bad collection row in ", path, ": ", line);
    ImageRecord r;
    r.id = f[0];
    r.path = f[1];
    r.raw_label = parse_raw_label(f[2]);
    r.content_hash = f[3];
    r.excluded = f[4] == "1";
    r.exclusion_reason = empty_if_dash(f[5]);
    r.width = std::stoi(f[6]);
    r.height = std::stoi(f[7]);
    auto slash = r.id.find('/');
    r.source_id = slash == std::string::npos ? r.id : r.id.substr(0, slash);
    c.records.push_back(std::move(r));
  }
  require(std::is_sorted(c.records.begin(), c.records.end(),
                         [](const ImageRecord& a, const ImageRecord& b) {
                           return a.id < b.id;
                         }),
          "collection not sorted by id: ", path);
  return c;
}

void save_manifest(const DatasetManifest& m, const std::string& path) {
  std::ostringstream os;
  os << "# xens-manifest v1\n";
  os << "# scheme: " << scheme_letter(m.scheme) << '\n';
  os << "# classes:";
  for (const auto& n : m.class_names) os << ' ' << n;
  os << '\n';
  os << "# counts:";
  for (const auto& n : m.class_names) os << ' ' << n << '=' << m.class_counts.at(n);
  os << '\n';
  os << "# provenance: collection=" << m.provenance.collection_digest
     << " exclusions=" << m.provenance.exclusions_digest
     << " created=" << m.provenance.created << '\n';
  os << "id\tpath\tlabel\thash\texcluded\treason\n";
  for (const auto& e : m.entries) {
    os << e.id << '\t' << e.path << '\t' << m.class_names[e.label] << '\t'
       << e.hash << "\t0\t-\n";
  }
  write_text_file(path, os.str());
}

DatasetManifest load_manifest(const std::string& path) {
  DatasetManifest m;
  std::map<std::string, int> label_index;
  bool header_seen = false;
  for (const auto& line : read_lines(path)) {
    if (line.rfind("# scheme: ", 0) == 0) {
      m.scheme = parse_scheme(line.substr(10));
      m.class_names = class_names_for(m.scheme);
      for (std::size_t i = 0; i < m.class_names.size(); ++i)
        label_index[m.class_names[i]] = static_cast<int>(i);
      continue;
    }
    if (line.rfind("# provenance: ", 0) == 0) {
      std::istringstream is(line.substr(14));
      std::string kv;
      while (is >> kv) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
        if (key == "collection") m.provenance.collection_digest = val;
        else if (key == "exclusions") m.provenance.exclusions_digest = val;
        else if (key == "created") m.provenance.created = std::stoll(val);
      }
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    auto f = split_tsv(line);
    require(f.size() == 6, "bad manifest row in ", path, ": ", line);
    ManifestEntry e;
    e.id = f[0];
    e.path = f[1];
    auto it = label_index.find(f[2]);
    require(it != label_index.end(), "label '", f[2],
            "' not in manifest classes: ", path);
    e.label = it->second;
    e.hash = f[3];
    m.entries.push_back(std::move(e));
  }
  require(!m.class_names.empty(), "manifest missing scheme header: ", path);
  for (const auto& n : m.class_names) m.class_counts[n] = 0;
  for (const auto& e : m.entries) m.class_counts[m.class_names[e.label]]++;
  return m;
}

void save_curation_report(const CurationReport& r,
                          const std::vector<SkipEntry>& skipped,
                          const std::string& path) {
  std::ostringstream os;
  os << "# xens-curation v1\n";
  auto counts_line = [&](const char* tag,
                         const std::array<std::int64_t, kRawLabelCount>& c) {
    os << "# " << tag << ':';
    for (int i = 0; i < kRawLabelCount; ++i)
      os << ' ' << raw_label_name(static_cast<RawLabel>(i)) << '=' << c[i];
    os << '\n';
  };
  counts_line("counts-before", r.counts_before);
  counts_line("counts-after", r.counts_after);
  os << "kind\ta\tb\n";
  for (const auto& [kept, removed] : r.duplicates_removed)
    for (const auto& rm : removed)
      os << "duplicate\t" << kept << '\t' << rm << '\n';
  for (const auto& [id, reason] : r.excluded)
    os << "excluded\t" << id << '\t' << reason << '\n';
  for (const auto& s : skipped)
    os << "skipped\t" << s.path << '\t' << s.reason << '\n';
  for (const auto& w : r.stale_warnings) os << "warning\t" << w << "\t-\n";
  write_text_file(path, os.str());
}

}  // namespace xens
