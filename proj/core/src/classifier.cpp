#include "handgest/classifier.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "handgest/errors.hpp"

namespace handgest {

Prediction classify_vector(const VectorStore& gallery, std::span<const double> query,
                           const ClassifierConfig& config) {
  if (config.top_n == 0) throw std::invalid_argument("top_n must be at least 1");
  Prediction p;
  for (auto& n : gallery.nearest(query, config.top_n)) {
    if (!(n.distance <= config.threshold)) break;
    p.ranked.push_back({std::move(n.label), n.distance, n.id});
  }
  if (!p.ranked.empty()) p.label = p.ranked.front().label;
  return p;
}

Prediction classify(const VectorStore& gallery, const HandLandmarks& frame,
                    const AnchorSet& reference, const ClassifierConfig& config) {
  if (gallery.empty()) throw EmptyGallery();
  std::optional<FeatureVector> query;
  try {
    query.emplace(normalize(frame, reference));
  } catch (const GeometryError& e) {
    Prediction p;
    p.rejection = e.what();
    return p;
  }
  return classify_vector(gallery, query->values(), config);
}

StreamState::StreamState(std::size_t window, std::size_t top_n)
    : window_(window), top_n_(top_n) {
  if (window == 0) throw std::invalid_argument("window must be at least 1");
  if (top_n == 0) throw std::invalid_argument("top_n must be at least 1");
}

std::vector<Vote> StreamState::tally() const {
  std::map<std::string, Vote> by_label;
  for (const auto& frame : frames_) {
    for (const auto& m : frame) {
      auto [it, inserted] = by_label.try_emplace(m.label, Vote{m.label, 0, m.distance});
      ++it->second.count;
      it->second.best_distance = std::min(it->second.best_distance, m.distance);
    }
  }
  std::vector<Vote> votes;
  votes.reserve(by_label.size());
  for (auto& [label, v] : by_label) votes.push_back(std::move(v));
  std::sort(votes.begin(), votes.end(), [](const Vote& a, const Vote& b) {
    if (a.count != b.count) return a.count > b.count;
    if (a.best_distance != b.best_distance) return a.best_distance < b.best_distance;
    return a.label < b.label;
  });
  return votes;
}

SmoothedPrediction StreamState::observe(Prediction frame) {
  std::vector<RankedMatch> kept(
      frame.ranked.begin(),
      frame.ranked.begin() + static_cast<std::ptrdiff_t>(
                                 std::min(top_n_, frame.ranked.size())));
  if (frames_.size() == window_) frames_.pop_front();
  frames_.push_back(std::move(kept));

  SmoothedPrediction out;
  out.votes = tally();
  if (!out.votes.empty()) out.label = out.votes.front().label;
  out.frame = std::move(frame);
  return out;
}

std::pair<StreamState, SmoothedPrediction> stream_step(
    StreamState state, const VectorStore& gallery, const HandLandmarks& frame,
    const AnchorSet& reference, const ClassifierConfig& config) {
  if (config.top_n != state.top_n()) {
    throw std::invalid_argument("config top_n does not match the stream state");
  }
  auto smoothed = state.observe(classify(gallery, frame, reference, config));
  return {std::move(state), std::move(smoothed)};
}

}  // namespace handgest
