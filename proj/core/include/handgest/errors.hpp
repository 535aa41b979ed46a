#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace handgest {

// Base of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidLandmarks : public Error {
 public:
  using Error::Error;
};

// Geometry failures. Callers that classify streams treat these as a rejected
// frame rather than a hard failure.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// The four anchor landmarks do not span 3D space.
class AnchorDegenerate : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

// No transform maps the source anchors onto the reference within tolerance.
class SingularAnchors : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t actual)
      : Error("dimension mismatch: expected " + std::to_string(expected) +
              ", got " + std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}

  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

class EmptyGallery : public Error {
 public:
  EmptyGallery() : Error("gallery is empty") {}
};

// Malformed input file. line() is 1-based; 0 when the error is not tied to a
// line (e.g. unreadable file).
class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class InsufficientSamples : public Error {
 public:
  InsufficientSamples(std::string label, const std::string& detail)
      : Error("insufficient samples for class '" + label + "': " + detail),
        label_(std::move(label)) {}

  const std::string& label() const noexcept { return label_; }

 private:
  std::string label_;
};

class EmptyTrain : public Error {
 public:
  EmptyTrain() : Error("training set is empty") {}
};

class EmptyTest : public Error {
 public:
  EmptyTest() : Error("test set is empty") {}
};

}  // namespace handgest
