#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "handgest/gallery.hpp"
#include "handgest/geometry.hpp"
#include "handgest/landmarks.hpp"

namespace handgest {

// One labeled sample. Landmarks are either inline or in a separate landmark
// file; a record with neither stands for an image where no hand was found.
struct ManifestRecord {
  std::string source_id;
  std::string label;
  std::optional<HandLandmarks> landmarks;
  std::optional<std::filesystem::path> landmarks_file;
  std::optional<std::string> subject;

  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

class DatasetManifest {
 public:
  DatasetManifest() = default;
  // Throws FormatError(0, ...) on a duplicate source_id or empty label.
  explicit DatasetManifest(std::vector<ManifestRecord> records);

  const std::vector<ManifestRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  // Sorted class labels and their record counts.
  std::map<std::string, std::size_t> class_counts() const;
  std::vector<std::string> classes() const;

  // Records whose source_id is listed, in manifest order. Unknown ids throw
  // FormatError.
  DatasetManifest select(const std::vector<std::string>& source_ids) const;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;

 private:
  std::vector<ManifestRecord> records_;
};

// JSON Lines, one record per line:
//   {"source_id", "label", "landmarks_file": path}  or
//   {"source_id", "label", "landmarks": [[x,y,z] x 21], "handedness": ...}
// with optional "subject". Relative landmark paths resolve against base_dir.
DatasetManifest load_manifest(std::istream& in,
                              const std::filesystem::path& base_dir = {});
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, std::ostream& out);

// Loads the record's landmarks; nullopt (with `why` set) when they are
// absent or the landmark file cannot be read.
std::optional<HandLandmarks> resolve_landmarks(const ManifestRecord& record,
                                               std::string* why = nullptr);

struct PerClassK {
  std::size_t k = 1;
};
struct TrainFraction {
  double train_fraction = 0.8;
};

struct SplitSpec {
  std::variant<PerClassK, TrainFraction> mode = PerClassK{};
  std::uint64_t seed = 42;
  std::optional<std::vector<std::string>> class_filter;
};

struct Split {
  DatasetManifest train;
  DatasetManifest test;
};

// Stratified, seed-deterministic split of the (filtered) manifest. PerClassK
// draws exactly k train samples per class; TrainFraction gives each class its
// proportional share with the total rounded to nearest, at least one sample
// per side. Both sides keep manifest order. Throws InsufficientSamples.
Split make_split(const DatasetManifest& manifest, const SplitSpec& spec);

// Split files: one source_id per line.
void write_id_list(const DatasetManifest& manifest, std::ostream& out);
std::vector<std::string> read_id_list(std::istream& in);

struct EnrollSummary {
  std::map<std::string, std::size_t> enrolled;  // per class
  std::vector<std::pair<std::string, std::string>> rejected;  // source_id, cause

  std::size_t enrolled_total() const;
};

// Normalizes every record and adds it to the gallery under its label.
// Records without usable landmarks or with degenerate anchors are skipped
// and listed in the summary.
EnrollSummary enroll(const DatasetManifest& manifest, const AnchorSet& reference,
                     Gallery& gallery);

}  // namespace handgest
