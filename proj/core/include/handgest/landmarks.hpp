#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace handgest {

inline constexpr std::size_t kLandmarkCount = 21;
inline constexpr std::size_t kFeatureDim = kLandmarkCount * 3;

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

enum class Handedness { kLeft, kRight, kUnknown };

std::string_view to_string(Handedness h) noexcept;
// Throws InvalidLandmarks on anything other than Left/Right/Unknown.
Handedness parse_handedness(std::string_view text);

using LandmarkArray = std::array<Point3, kLandmarkCount>;

// One detected hand: 21 points in image coordinates, indexed per the
// standard hand-landmark topology (0 = wrist, 1 = thumb CMC, 5 = index MCP,
// 17 = pinky MCP, ...). All coordinates are finite.
class HandLandmarks {
 public:
  explicit HandLandmarks(const LandmarkArray& points,
                         Handedness handedness = Handedness::kUnknown,
                         std::string source_id = {});

  // Accepts any container size; throws InvalidLandmarks unless it is 21.
  static HandLandmarks from_points(std::span<const Point3> points,
                                   Handedness handedness = Handedness::kUnknown,
                                   std::string source_id = {});

  const LandmarkArray& points() const noexcept { return points_; }
  const Point3& operator[](std::size_t i) const { return points_[i]; }
  Handedness handedness() const noexcept { return handedness_; }
  const std::string& source_id() const noexcept { return source_id_; }

  friend bool operator==(const HandLandmarks&, const HandLandmarks&) = default;

 private:
  LandmarkArray points_;
  Handedness handedness_;
  std::string source_id_;
};

// 63 finite values: the row-major flattening of 21 normalized points.
class FeatureVector {
 public:
  explicit FeatureVector(std::span<const double> values);
  static FeatureVector from_points(const LandmarkArray& points);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  Point3 point(std::size_t landmark) const;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  std::array<double, kFeatureDim> values_{};
};

}  // namespace handgest
