#include "handgest/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "handgest/errors.hpp"
#include "handgest/frame_io.hpp"
#include "json_util.hpp"

namespace handgest {

DatasetManifest::DatasetManifest(std::vector<ManifestRecord> records)
    : records_(std::move(records)) {
  std::unordered_set<std::string> seen;
  for (const auto& r : records_) {
    if (r.label.empty()) throw FormatError(0, "record '" + r.source_id + "' has an empty label");
    if (!seen.insert(r.source_id).second) {
      throw FormatError(0, "duplicate source_id '" + r.source_id + "'");
    }
  }
}

std::map<std::string, std::size_t> DatasetManifest::class_counts() const {
  std::map<std::string, std::size_t> counts;
  for (const auto& r : records_) ++counts[r.label];
  return counts;
}

std::vector<std::string> DatasetManifest::classes() const {
  std::vector<std::string> out;
  for (const auto& [label, n] : class_counts()) out.push_back(label);
  return out;
}

DatasetManifest DatasetManifest::select(const std::vector<std::string>& source_ids) const {
  std::unordered_set<std::string> wanted(source_ids.begin(), source_ids.end());
  std::vector<ManifestRecord> out;
  for (const auto& r : records_) {
    if (wanted.erase(r.source_id) > 0) out.push_back(r);
  }
  if (!wanted.empty()) {
    throw FormatError(0, "source_id '" + *wanted.begin() + "' is not in the manifest");
  }
  return DatasetManifest(std::move(out));
}

namespace {

std::string required_string(const nlohmann::json& j, const char* key, std::size_t line_no) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw FormatError(line_no, std::string("missing nonempty string '") + key + "'");
  }
  return it->get<std::string>();
}

}  // namespace

DatasetManifest load_manifest(std::istream& in, const std::filesystem::path& base_dir) {
  std::vector<ManifestRecord> records;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = detail::parse_object(line, line_no);
    ManifestRecord r;
    r.source_id = required_string(j, "source_id", line_no);
    r.label = required_string(j, "label", line_no);
    if (!seen.insert(r.source_id).second) {
      throw FormatError(line_no, "duplicate source_id '" + r.source_id + "'");
    }
    if (auto s = j.find("subject"); s != j.end() && !s->is_null()) {
      if (!s->is_string()) throw FormatError(line_no, "'subject' must be a string");
      r.subject = s->get<std::string>();
    }
    const bool has_inline = j.contains("landmarks") && !j["landmarks"].is_null();
    const bool has_file = j.contains("landmarks_file") && !j["landmarks_file"].is_null();
    if (has_inline && has_file) {
      throw FormatError(line_no, "record has both 'landmarks' and 'landmarks_file'");
    }
    if (has_inline) {
      r.landmarks = detail::parse_inline_landmarks(j, r.source_id, line_no);
    } else if (has_file) {
      if (!j["landmarks_file"].is_string()) {
        throw FormatError(line_no, "'landmarks_file' must be a string");
      }
      std::filesystem::path p = j["landmarks_file"].get<std::string>();
      r.landmarks_file = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    records.push_back(std::move(r));
  }
  return DatasetManifest(std::move(records));
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(0, "cannot open manifest '" + path.string() + "'");
  return load_manifest(in, path.parent_path());
}

void save_manifest(const DatasetManifest& manifest, std::ostream& out) {
  for (const auto& r : manifest.records()) {
    nlohmann::ordered_json j;
    j["source_id"] = r.source_id;
    j["label"] = r.label;
    if (r.subject) j["subject"] = *r.subject;
    if (r.landmarks) {
      auto pts = nlohmann::ordered_json::array();
      for (const auto& p : r.landmarks->points()) pts.push_back({p.x, p.y, p.z});
      j["landmarks"] = std::move(pts);
      j["handedness"] = std::string(to_string(r.landmarks->handedness()));
    } else if (r.landmarks_file) {
      j["landmarks_file"] = r.landmarks_file->generic_string();
    }
    out << j.dump() << '\n';
  }
}

std::optional<HandLandmarks> resolve_landmarks(const ManifestRecord& record,
                                               std::string* why) {
  if (record.landmarks) return record.landmarks;
  if (!record.landmarks_file) {
    if (why) *why = "no landmarks";
    return std::nullopt;
  }
  try {
    auto frames = load_frame_file(*record.landmarks_file);
    if (frames.empty()) {
      if (why) *why = "landmark file is empty";
      return std::nullopt;
    }
    const auto& lm = frames.front().landmarks;
    return HandLandmarks(lm.points(), lm.handedness(), record.source_id);
  } catch (const Error& e) {
    if (why) *why = e.what();
    return std::nullopt;
  }
}

namespace {

// Uniform integer in [0, bound) from raw mt19937_64 output. std's
// distributions are implementation-defined; this keeps splits identical
// across standard libraries.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[bounded(rng, i)]);
  }
}

// Train count per class for a fraction split, largest remainder first.
std::map<std::string, std::size_t> fraction_allocation(
    const std::map<std::string, std::size_t>& counts, double fraction) {
  const std::size_t total = std::accumulate(
      counts.begin(), counts.end(), std::size_t{0},
      [](std::size_t acc, const auto& kv) { return acc + kv.second; });
  const auto target = static_cast<std::size_t>(std::floor(fraction * total + 0.5));

  std::map<std::string, std::size_t> alloc;
  std::vector<std::pair<double, std::string>> remainders;
  std::size_t assigned = 0;
  for (const auto& [label, n] : counts) {
    const double share = fraction * static_cast<double>(n);
    const auto base = static_cast<std::size_t>(std::floor(share));
    alloc[label] = base;
    assigned += base;
    remainders.emplace_back(share - static_cast<double>(base), label);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < target && i < remainders.size(); ++i, ++assigned) {
    ++alloc[remainders[i].second];
  }
  for (auto& [label, n] : alloc) {
    n = std::clamp<std::size_t>(n, 1, counts.at(label) - 1);
  }
  return alloc;
}

}  // namespace

Split make_split(const DatasetManifest& manifest, const SplitSpec& spec) {
  std::vector<std::size_t> kept;
  if (spec.class_filter) {
    const std::set<std::string> filter(spec.class_filter->begin(), spec.class_filter->end());
    const auto counts = manifest.class_counts();
    for (const auto& label : filter) {
      if (!counts.contains(label)) throw InsufficientSamples(label, "no records");
    }
    for (std::size_t i = 0; i < manifest.size(); ++i) {
      if (filter.contains(manifest.records()[i].label)) kept.push_back(i);
    }
  } else {
    kept.resize(manifest.size());
    std::iota(kept.begin(), kept.end(), std::size_t{0});
  }

  std::map<std::string, std::vector<std::size_t>> by_class;
  for (auto i : kept) by_class[manifest.records()[i].label].push_back(i);
  std::map<std::string, std::size_t> counts;
  for (const auto& [label, idx] : by_class) counts[label] = idx.size();

  std::map<std::string, std::size_t> train_count;
  if (const auto* per = std::get_if<PerClassK>(&spec.mode)) {
    if (per->k == 0) throw std::invalid_argument("k must be at least 1");
    for (const auto& [label, n] : counts) {
      if (n < per->k + 1) {
        throw InsufficientSamples(label, std::to_string(n) + " records, need " +
                                             std::to_string(per->k) + " train + 1 test");
      }
      train_count[label] = per->k;
    }
  } else {
    const double f = std::get<TrainFraction>(spec.mode).train_fraction;
    if (!(f > 0.0 && f < 1.0)) throw std::invalid_argument("train fraction must be in (0, 1)");
    for (const auto& [label, n] : counts) {
      if (n < 2) throw InsufficientSamples(label, "fraction split needs at least 2 records");
    }
    train_count = fraction_allocation(counts, f);
  }

  std::mt19937_64 rng(spec.seed);
  std::vector<bool> in_train(manifest.size(), false);
  for (auto& [label, idx] : by_class) {
    shuffle(idx, rng);
    for (std::size_t i = 0; i < train_count[label]; ++i) in_train[idx[i]] = true;
  }

  std::vector<ManifestRecord> train;
  std::vector<ManifestRecord> test;
  for (auto i : kept) {
    (in_train[i] ? train : test).push_back(manifest.records()[i]);
  }
  return {DatasetManifest(std::move(train)), DatasetManifest(std::move(test))};
}

void write_id_list(const DatasetManifest& manifest, std::ostream& out) {
  for (const auto& r : manifest.records()) out << r.source_id << '\n';
}

std::vector<std::string> read_id_list(std::istream& in) {
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) ids.push_back(line);
  }
  return ids;
}

std::size_t EnrollSummary::enrolled_total() const {
  std::size_t n = 0;
  for (const auto& [label, c] : enrolled) n += c;
  return n;
}

EnrollSummary enroll(const DatasetManifest& manifest, const AnchorSet& reference,
                     Gallery& gallery) {
  EnrollSummary summary;
  for (const auto& r : manifest.records()) {
    std::string why;
    auto lm = resolve_landmarks(r, &why);
    if (!lm) {
      summary.rejected.emplace_back(r.source_id, why);
      continue;
    }
    try {
      const auto v = normalize(*lm, reference);
      gallery.add(r.label, v, EntryMeta{r.source_id, r.subject});
      ++summary.enrolled[r.label];
    } catch (const GeometryError& e) {
      summary.rejected.emplace_back(r.source_id, e.what());
    }
  }
  return summary;
}

}  // namespace handgest
