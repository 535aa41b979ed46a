#include "handgest/frame_io.hpp"

#include <fstream>
#include <sstream>

#include "json_util.hpp"

namespace handgest {

namespace detail {

HandLandmarks parse_inline_landmarks(const nlohmann::json& obj, std::string source_id,
                                     std::size_t line_no) {
  auto pts = obj.find("landmarks");
  if (pts == obj.end() || !pts->is_array()) {
    throw FormatError(line_no, "missing array 'landmarks'");
  }
  if (pts->size() != kLandmarkCount) {
    throw FormatError(line_no, "expected 21 landmarks, got " + std::to_string(pts->size()));
  }
  LandmarkArray arr;
  for (std::size_t i = 0; i < kLandmarkCount; ++i) arr[i] = parse_point((*pts)[i], line_no);

  Handedness hand = Handedness::kUnknown;
  if (auto h = obj.find("handedness"); h != obj.end() && !h->is_null()) {
    if (!h->is_string()) throw FormatError(line_no, "'handedness' must be a string");
    try {
      hand = parse_handedness(h->get<std::string>());
    } catch (const InvalidLandmarks& e) {
      throw FormatError(line_no, e.what());
    }
  }
  try {
    return HandLandmarks(arr, hand, std::move(source_id));
  } catch (const InvalidLandmarks& e) {
    throw FormatError(line_no, e.what());
  }
}

}  // namespace detail

namespace {

FrameRecord frame_from_json(const nlohmann::json& j, std::size_t line_no,
                            std::string fallback_id) {
  std::string source_id = std::move(fallback_id);
  if (auto s = j.find("source_id"); s != j.end() && !s->is_null()) {
    if (!s->is_string()) throw FormatError(line_no, "'source_id' must be a string");
    source_id = s->get<std::string>();
  }
  FrameRecord rec{detail::parse_inline_landmarks(j, std::move(source_id), line_no),
                  std::nullopt};
  if (auto t = j.find("timestamp_ms"); t != j.end() && !t->is_null()) {
    if (!t->is_number_integer()) throw FormatError(line_no, "'timestamp_ms' must be an integer");
    rec.timestamp_ms = t->get<std::int64_t>();
  }
  return rec;
}

}  // namespace

FrameRecord parse_frame_record(std::string_view json_text, std::size_t line_no) {
  return frame_from_json(detail::parse_object(json_text, line_no), line_no, {});
}

std::string to_json_line(const FrameRecord& record) {
  nlohmann::ordered_json j;
  const auto& lm = record.landmarks;
  if (!lm.source_id().empty()) j["source_id"] = lm.source_id();
  auto pts = nlohmann::ordered_json::array();
  for (const auto& p : lm.points()) pts.push_back({p.x, p.y, p.z});
  j["landmarks"] = std::move(pts);
  j["handedness"] = std::string(to_string(lm.handedness()));
  if (record.timestamp_ms) j["timestamp_ms"] = *record.timestamp_ms;
  return j.dump();
}

std::vector<FrameRecord> load_frame_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(0, "cannot open landmark file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();
  const std::string stem = path.stem().string();

  std::vector<FrameRecord> out;
  // Whole-file parse first: a single (possibly pretty-printed) object.
  auto whole = nlohmann::json::parse(content, nullptr, /*allow_exceptions=*/false);
  if (whole.is_object()) {
    out.push_back(frame_from_json(whole, 1, stem + "#0"));
    return out;
  }

  std::istringstream lines(content);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(frame_from_json(detail::parse_object(line, line_no), line_no,
                                  stem + "#" + std::to_string(out.size())));
  }
  return out;
}

AnchorSet load_anchor_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(0, "cannot open anchor file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto j = detail::parse_object(buf.str(), 0);
  auto rows = j.find("anchors");
  if (rows == j.end() || !rows->is_array() || rows->size() != 4) {
    throw FormatError(0, "'anchors' must be an array of 4 points");
  }
  std::array<Point3, 4> pts;
  for (std::size_t i = 0; i < 4; ++i) pts[i] = detail::parse_point((*rows)[i], 0);
  return AnchorSet(pts);
}

std::string anchors_to_json(const AnchorSet& anchors) {
  nlohmann::json j;
  j["anchors"] = nlohmann::json::array();
  for (const auto& p : anchors.rows()) j["anchors"].push_back(detail::point_json(p));
  return j.dump();
}

}  // namespace handgest
