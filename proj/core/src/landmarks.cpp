#include "handgest/landmarks.hpp"

#include <cmath>

#include "handgest/errors.hpp"

namespace handgest {

namespace {

bool finite(const Point3& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

}  // namespace

std::string_view to_string(Handedness h) noexcept {
  switch (h) {
    case Handedness::kLeft:
      return "Left";
    case Handedness::kRight:
      return "Right";
    case Handedness::kUnknown:
      break;
  }
  return "Unknown";
}

Handedness parse_handedness(std::string_view text) {
  if (text == "Left") return Handedness::kLeft;
  if (text == "Right") return Handedness::kRight;
  if (text == "Unknown") return Handedness::kUnknown;
  throw InvalidLandmarks("unknown handedness '" + std::string(text) + "'");
}

HandLandmarks::HandLandmarks(const LandmarkArray& points, Handedness handedness,
                             std::string source_id)
    : points_(points), handedness_(handedness), source_id_(std::move(source_id)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!finite(points_[i])) {
      throw InvalidLandmarks("landmark " + std::to_string(i) +
                             " has a non-finite coordinate");
    }
  }
}

HandLandmarks HandLandmarks::from_points(std::span<const Point3> points,
                                         Handedness handedness,
                                         std::string source_id) {
  if (points.size() != kLandmarkCount) {
    throw InvalidLandmarks("expected 21 landmarks, got " +
                           std::to_string(points.size()));
  }
  LandmarkArray arr;
  std::copy(points.begin(), points.end(), arr.begin());
  return HandLandmarks(arr, handedness, std::move(source_id));
}

FeatureVector::FeatureVector(std::span<const double> values) {
  if (values.size() != kFeatureDim) {
    throw DimensionMismatch(kFeatureDim, values.size());
  }
  for (std::size_t i = 0; i < kFeatureDim; ++i) {
    if (!std::isfinite(values[i])) {
      throw Error("feature component " + std::to_string(i) + " is not finite");
    }
    values_[i] = values[i];
  }
}

FeatureVector FeatureVector::from_points(const LandmarkArray& points) {
  std::array<double, kFeatureDim> flat;
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    flat[3 * i] = points[i].x;
    flat[3 * i + 1] = points[i].y;
    flat[3 * i + 2] = points[i].z;
  }
  return FeatureVector(flat);
}

Point3 FeatureVector::point(std::size_t landmark) const {
  return {values_.at(3 * landmark), values_.at(3 * landmark + 1),
          values_.at(3 * landmark + 2)};
}

}  // namespace handgest
