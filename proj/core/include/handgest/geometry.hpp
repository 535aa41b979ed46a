#pragma once

#include <array>
#include <cstddef>

#include "handgest/landmarks.hpp"

namespace handgest {

// Landmark indices used as normalization anchors.
inline constexpr std::array<std::size_t, 4> kAnchorLandmarks = {0, 1, 5, 17};

// Minimum |det| of the homogenized 4x4 anchor matrix.
inline constexpr double kDegeneracyEpsilon = 1e-12;
// Offset added to every x-coordinate on the singular-source retry.
inline constexpr double kRetryOffset = 1e-4;
// Maximum per-component anchor error accepted from any solve path.
inline constexpr double kAnchorTolerance = 1e-6;

using Mat4 = std::array<std::array<double, 4>, 4>;

Mat4 identity4() noexcept;
Mat4 multiply(const Mat4& a, const Mat4& b) noexcept;
// Determinant by partial-pivot elimination.
double determinant(const Mat4& m) noexcept;

// Four anchor points (wrist, thumb base, index base, pinky base) that are
// affinely independent: the 4x4 matrix with rows [x y z 1] is invertible.
class AnchorSet {
 public:
  // Throws AnchorDegenerate when |det| of the homogenized rows < epsilon.
  explicit AnchorSet(const std::array<Point3, 4>& rows,
                     double epsilon = kDegeneracyEpsilon);

  const std::array<Point3, 4>& rows() const noexcept { return rows_; }
  const Point3& operator[](std::size_t i) const { return rows_[i]; }
  // Rows as [x y z 1].
  Mat4 homogeneous() const noexcept;

  friend bool operator==(const AnchorSet&, const AnchorSet&) = default;

 private:
  std::array<Point3, 4> rows_;
};

// 4x4 affine map acting on row vectors [x y z 1] from the right. The last
// column is exactly (0, 0, 0, 1).
class TransformMatrix {
 public:
  // Throws SingularAnchors if m is not affine (last column off by > 1e-9) or
  // not invertible (|det| <= 1e-12). The last column is snapped to exact.
  explicit TransformMatrix(const Mat4& m);

  const Mat4& matrix() const noexcept { return m_; }
  Point3 apply(const Point3& p) const noexcept;
  // Map that applies *this first, then `next`.
  TransformMatrix then(const TransformMatrix& next) const;
  double determinant() const noexcept;
  // Determinant of the upper-left 3x3 block; negative for reflections.
  double linear_determinant() const noexcept;

 private:
  Mat4 m_;
};

// The anchor positions every frame is mapped onto: wrist centered
// horizontally in the lower half, thumb to the left.
AnchorSet default_reference_anchors();

// Rows are frame points 0, 1, 5, 17. Throws AnchorDegenerate.
AnchorSet extract_anchors(const HandLandmarks& frame,
                          double epsilon = kDegeneracyEpsilon);

// T such that homogenize(source[i]) * T == homogenize(reference[i]).
// Solves source_h * T = reference_h by direct elimination. When the source is
// singular it retries with all x-coordinates offset, then falls back to a
// least-squares solve; throws SingularAnchors if the anchor residual of the
// final answer exceeds kAnchorTolerance.
TransformMatrix compute_transform(const AnchorSet& source,
                                  const AnchorSet& reference);

// Maps all 21 points into the reference frame.
LandmarkArray normalize_points(const HandLandmarks& frame,
                               const AnchorSet& reference);
FeatureVector normalize(const HandLandmarks& frame, const AnchorSet& reference);

namespace detail {

enum class SolvePath { kDirect, kOffsetRetry, kLeastSquares };

struct SolveResult {
  Mat4 transform;
  SolvePath path;
  double residual;  // max |source_h * T - reference_h|
};

// The raw fallback chain on homogenized matrices, with no AnchorSet
// validation on the source. Exposed for tests of the singular paths.
SolveResult solve_anchor_transform(const Mat4& source_h, const Mat4& reference_h);

}  // namespace detail

}  // namespace handgest
