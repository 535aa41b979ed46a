#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "handgest/dataset.hpp"
#include "handgest/geometry.hpp"

namespace handgest {

struct EvalConfig {
  AnchorSet reference = default_reference_anchors();
  // Worker threads for classifying the test set; 0 picks the hardware count.
  unsigned threads = 1;
  // Recorded in the report only.
  std::optional<std::uint64_t> seed;
};

struct ClassMetrics {
  std::string label;
  std::size_t support = 0;    // test records of this class, rejected included
  std::size_t scored = 0;     // support minus rejected
  std::size_t correct = 0;
  std::size_t predicted = 0;  // scored records of any class predicted as this
  double precision = 0.0;     // correct / predicted, 0 when nothing predicted
  double recall = 0.0;        // correct / scored, 0 when nothing scored

  friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

// Rows are true classes, columns predicted classes in `labels` order plus a
// final column for rejected samples (no usable landmarks or degenerate
// anchors). Rejected samples are excluded from the accuracy denominator.
struct EvalReport {
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> confusion;
  std::vector<ClassMetrics> per_class;
  std::size_t train_size = 0;
  std::size_t train_rejected = 0;
  std::size_t test_size = 0;
  std::size_t scored = 0;
  std::size_t correct = 0;
  std::size_t rejected = 0;
  double accuracy = 0.0;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> rejected_ids;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Enrolls `train` into a fresh gallery and classifies each test record by its
// single nearest neighbor with no distance threshold. Throws EmptyTrain when
// nothing could be enrolled, EmptyTest when `test` has no records.
EvalReport evaluate(const DatasetManifest& train, const DatasetManifest& test,
                    const EvalConfig& config = {});

// Fills per_class, scored, correct, rejected and accuracy from `confusion`.
void finalize_report(EvalReport& report);

enum class ReportFormat { kText, kJson, kCsv };

// Throws std::invalid_argument for anything but text/json/csv.
ReportFormat parse_report_format(std::string_view name);
std::string render_report(const EvalReport& report, ReportFormat format);
// Inverse of render_report(..., kJson). Throws FormatError.
EvalReport report_from_json(std::string_view json_text);

}  // namespace handgest
