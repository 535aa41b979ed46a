#pragma once

#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "handgest/gallery.hpp"
#include "handgest/geometry.hpp"

namespace handgest {

struct ClassifierConfig {
  std::size_t top_n = 1;
  // Matches farther than this are dropped. Infinity disables the cut.
  double threshold = std::numeric_limits<double>::infinity();
};

struct RankedMatch {
  std::string label;
  double distance = 0.0;
  EntryId id = 0;

  friend bool operator==(const RankedMatch&, const RankedMatch&) = default;
};

// Outcome is Match(label) exactly when `ranked` is nonempty, and `label` is
// then ranked[0].label. A frame the geometry could not normalize comes back
// as NoMatch with `rejection` holding the cause.
struct Prediction {
  std::vector<RankedMatch> ranked;
  std::optional<std::string> label;
  std::optional<std::string> rejection;

  bool is_match() const noexcept { return label.has_value(); }
  bool is_rejected() const noexcept { return rejection.has_value(); }
};

// Top-N post-threshold matches for an already normalized vector.
Prediction classify_vector(const VectorStore& gallery, std::span<const double> query,
                           const ClassifierConfig& config);

// Normalizes the frame against `reference`, then classify_vector. Throws
// EmptyGallery; never throws for a degenerate frame.
Prediction classify(const VectorStore& gallery, const HandLandmarks& frame,
                    const AnchorSet& reference, const ClassifierConfig& config);

struct Vote {
  std::string label;
  std::size_t count = 0;
  double best_distance = 0.0;

  friend bool operator==(const Vote&, const Vote&) = default;
};

struct SmoothedPrediction {
  // The current frame's own prediction.
  Prediction frame;
  // Mode label over the window; empty when the window holds no labels.
  std::optional<std::string> label;
  // Every windowed label, winner first, then by descending count, ascending
  // best distance, ascending label.
  std::vector<Vote> votes;

  bool is_match() const noexcept { return label.has_value(); }
};

// Last W frames' top-N matches. Rejected or empty frames occupy a slot with
// no labels so older matches still age out.
class StreamState {
 public:
  explicit StreamState(std::size_t window = 10, std::size_t top_n = 1);

  std::size_t window() const noexcept { return window_; }
  std::size_t top_n() const noexcept { return top_n_; }
  // Number of frame results currently held, at most window().
  std::size_t size() const noexcept { return frames_.size(); }
  const std::deque<std::vector<RankedMatch>>& frames() const noexcept {
    return frames_;
  }

  // Pushes the frame's matches (truncated to top_n), evicting the oldest
  // frame when full, and returns the smoothed vote.
  SmoothedPrediction observe(Prediction frame);

  // Vote over the current window without modifying it.
  std::vector<Vote> tally() const;

 private:
  std::size_t window_;
  std::size_t top_n_;
  std::deque<std::vector<RankedMatch>> frames_;
};

// Value-semantics step: classifies `frame` with state.top_n() matches and
// the config threshold, and returns the advanced state with its prediction.
// Throws std::invalid_argument if config.top_n differs from state.top_n().
std::pair<StreamState, SmoothedPrediction> stream_step(
    StreamState state, const VectorStore& gallery, const HandLandmarks& frame,
    const AnchorSet& reference, const ClassifierConfig& config);

}  // namespace handgest
