#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "handgest/errors.hpp"
#include "handgest/landmarks.hpp"
#include "json.hpp"

namespace handgest::detail {

inline Point3 parse_point(const nlohmann::json& j, std::size_t line_no) {
  if (!j.is_array() || j.size() != 3) {
    throw FormatError(line_no, "point must be an [x, y, z] array");
  }
  std::array<double, 3> v{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw FormatError(line_no, "point coordinate is not a number");
    v[i] = j[i].get<double>();
  }
  return {v[0], v[1], v[2]};
}

inline nlohmann::json point_json(const Point3& p) {
  return nlohmann::json::array({p.x, p.y, p.z});
}

inline nlohmann::json parse_object(std::string_view text, std::size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(line_no, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError(line_no, "expected a JSON object");
  return j;
}

// Parses the "landmarks"/"handedness" pair of an inline frame object.
HandLandmarks parse_inline_landmarks(const nlohmann::json& obj, std::string source_id,
                                     std::size_t line_no);

}  // namespace handgest::detail
