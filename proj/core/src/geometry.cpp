#include "handgest/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include <Eigen/Dense>

#include "handgest/errors.hpp"

namespace handgest {

namespace {

constexpr double kAffineColumnTolerance = 1e-9;
constexpr double kInvertibleEpsilon = 1e-12;

// Solves a * x = b for x with Gaussian elimination and partial pivoting.
// Returns nullopt on an exactly zero pivot.
std::optional<Mat4> solve(Mat4 a, Mat4 b) {
  for (std::size_t col = 0; col < 4; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < 4; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (a[pivot][col] == 0.0) return std::nullopt;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < 4; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
      for (std::size_t c = 0; c < 4; ++c) b[r][c] -= f * b[col][c];
    }
  }
  Mat4 x{};
  for (std::size_t i = 4; i-- > 0;) {
    for (std::size_t c = 0; c < 4; ++c) {
      double acc = b[i][c];
      for (std::size_t k = i + 1; k < 4; ++k) acc -= a[i][k] * x[k][c];
      x[i][c] = acc / a[i][i];
    }
  }
  return x;
}

double residual(const Mat4& source_h, const Mat4& transform,
                const Mat4& reference_h) {
  const Mat4 mapped = multiply(source_h, transform);
  double worst = 0.0;
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      const double e = std::abs(mapped[r][c] - reference_h[r][c]);
      // NaN must not look like a small residual.
      if (!(e <= worst)) worst = std::isnan(e) ? INFINITY : e;
    }
  }
  return worst;
}

Mat4 least_squares(const Mat4& source_h, const Mat4& reference_h) {
  Eigen::Matrix4d a;
  Eigen::Matrix4d b;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      a(r, c) = source_h[r][c];
      b(r, c) = reference_h[r][c];
    }
  }
  const Eigen::Matrix4d x = a.completeOrthogonalDecomposition().solve(b);
  Mat4 out;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) out[r][c] = x(r, c);
  }
  return out;
}

Mat4 homogenize(const std::array<Point3, 4>& rows) {
  Mat4 m;
  for (std::size_t i = 0; i < 4; ++i) m[i] = {rows[i].x, rows[i].y, rows[i].z, 1.0};
  return m;
}

}  // namespace

Mat4 identity4() noexcept {
  Mat4 m{};
  for (std::size_t i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

Mat4 multiply(const Mat4& a, const Mat4& b) noexcept {
  Mat4 out{};
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      double acc = 0.0;
      for (std::size_t k = 0; k < 4; ++k) acc += a[r][k] * b[k][c];
      out[r][c] = acc;
    }
  }
  return out;
}

double determinant(const Mat4& m) noexcept {
  Mat4 a = m;
  double det = 1.0;
  for (std::size_t col = 0; col < 4; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < 4; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (a[pivot][col] == 0.0) return 0.0;
    if (pivot != col) {
      std::swap(a[col], a[pivot]);
      det = -det;
    }
    det *= a[col][col];
    for (std::size_t r = col + 1; r < 4; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return det;
}

AnchorSet::AnchorSet(const std::array<Point3, 4>& rows, double epsilon)
    : rows_(rows) {
  for (const auto& p : rows_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      throw AnchorDegenerate("anchor coordinate is not finite");
    }
  }
  const double det = determinant(homogeneous());
  if (!(std::abs(det) >= epsilon)) {
    throw AnchorDegenerate("anchor points are not affinely independent (|det| = " +
                           std::to_string(std::abs(det)) + ")");
  }
}

Mat4 AnchorSet::homogeneous() const noexcept { return homogenize(rows_); }

TransformMatrix::TransformMatrix(const Mat4& m) : m_(m) {
  for (std::size_t r = 0; r < 4; ++r) {
    const double expected = r == 3 ? 1.0 : 0.0;
    if (!(std::abs(m_[r][3] - expected) <= kAffineColumnTolerance)) {
      throw SingularAnchors("transform is not affine");
    }
    m_[r][3] = expected;
  }
  if (!(std::abs(handgest::determinant(m_)) > kInvertibleEpsilon)) {
    throw SingularAnchors("transform is not invertible");
  }
}

Point3 TransformMatrix::apply(const Point3& p) const noexcept {
  // Row vector [x y z 1] times m_, homogeneous coordinate dropped.
  return {p.x * m_[0][0] + p.y * m_[1][0] + p.z * m_[2][0] + m_[3][0],
          p.x * m_[0][1] + p.y * m_[1][1] + p.z * m_[2][1] + m_[3][1],
          p.x * m_[0][2] + p.y * m_[1][2] + p.z * m_[2][2] + m_[3][2]};
}

TransformMatrix TransformMatrix::then(const TransformMatrix& next) const {
  return TransformMatrix(multiply(m_, next.m_));
}

double TransformMatrix::determinant() const noexcept {
  return handgest::determinant(m_);
}

double TransformMatrix::linear_determinant() const noexcept {
  const auto& m = m_;
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

AnchorSet default_reference_anchors() {
  return AnchorSet({{{0.5, 0.75, 0.0},
                     {0.42, 0.7, -0.03},
                     {0.4, 0.45, -0.01},
                     {0.6, 0.5, -0.02}}});
}

AnchorSet extract_anchors(const HandLandmarks& frame, double epsilon) {
  std::array<Point3, 4> rows;
  for (std::size_t i = 0; i < kAnchorLandmarks.size(); ++i) {
    rows[i] = frame[kAnchorLandmarks[i]];
  }
  // A uniform x offset is a translation, which leaves the homogeneous
  // determinant unchanged up to rounding; AnchorSet's check therefore covers
  // the retry as well.
  return AnchorSet(rows, epsilon);
}

namespace detail {

SolveResult solve_anchor_transform(const Mat4& source_h, const Mat4& reference_h) {
  double best_residual = INFINITY;

  if (std::abs(determinant(source_h)) >= kDegeneracyEpsilon) {
    if (auto t = solve(source_h, reference_h)) {
      const double err = residual(source_h, *t, reference_h);
      if (err <= kAnchorTolerance) return {*t, SolvePath::kDirect, err};
      best_residual = std::min(best_residual, err);
    }
  }

  Mat4 shifted = source_h;
  for (auto& row : shifted) row[0] += kRetryOffset;
  if (std::abs(determinant(shifted)) >= kDegeneracyEpsilon) {
    if (auto t = solve(shifted, reference_h)) {
      // shifted = source_h * offset, so source_h * (offset * t) = reference_h.
      Mat4 offset = identity4();
      offset[3][0] = kRetryOffset;
      const Mat4 composed = multiply(offset, *t);
      const double err = residual(source_h, composed, reference_h);
      if (err <= kAnchorTolerance) return {composed, SolvePath::kOffsetRetry, err};
      best_residual = std::min(best_residual, err);
    }
  }

  const Mat4 ls = least_squares(source_h, reference_h);
  const double err = residual(source_h, ls, reference_h);
  if (err <= kAnchorTolerance) return {ls, SolvePath::kLeastSquares, err};
  best_residual = std::min(best_residual, err);

  throw SingularAnchors("no transform maps the anchors onto the reference (residual " +
                        std::to_string(best_residual) + ")");
}

}  // namespace detail

TransformMatrix compute_transform(const AnchorSet& source,
                                  const AnchorSet& reference) {
  return TransformMatrix(
      detail::solve_anchor_transform(source.homogeneous(), reference.homogeneous())
          .transform);
}

LandmarkArray normalize_points(const HandLandmarks& frame,
                               const AnchorSet& reference) {
  const TransformMatrix t = compute_transform(extract_anchors(frame), reference);
  LandmarkArray out;
  for (std::size_t i = 0; i < kLandmarkCount; ++i) out[i] = t.apply(frame[i]);
  return out;
}

FeatureVector normalize(const HandLandmarks& frame, const AnchorSet& reference) {
  return FeatureVector::from_points(normalize_points(frame, reference));
}

}  // namespace handgest
