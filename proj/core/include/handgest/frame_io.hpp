#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "handgest/geometry.hpp"
#include "handgest/landmarks.hpp"

namespace handgest {

// One landmark frame as exchanged on the wire:
//   {"source_id": "...", "landmarks": [[x, y, z] x 21],
//    "handedness": "Left"|"Right"|"Unknown", "timestamp_ms": 123}
// source_id, handedness and timestamp_ms are optional.
struct FrameRecord {
  HandLandmarks landmarks;
  std::optional<std::int64_t> timestamp_ms;
};

// Throws FormatError (tagged with line_no) on malformed JSON or schema
// violations, including non-finite or miscounted landmarks.
FrameRecord parse_frame_record(std::string_view json_text, std::size_t line_no = 0);
std::string to_json_line(const FrameRecord& record);

// A landmark file holds either a single JSON frame object (possibly spread
// over several lines) or JSON Lines with one frame per line. A record with
// no source_id gets "<file stem>#<index>".
std::vector<FrameRecord> load_frame_file(const std::filesystem::path& path);

// {"anchors": [[x, y, z] x 4]} in wrist, thumb base, index base, pinky base
// order. Throws FormatError or AnchorDegenerate.
AnchorSet load_anchor_file(const std::filesystem::path& path);
std::string anchors_to_json(const AnchorSet& anchors);

}  // namespace handgest
