#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "handgest/landmarks.hpp"

namespace handgest {

using EntryId = std::int64_t;

struct EntryMeta {
  std::optional<std::string> source_id;
  std::optional<std::string> subject;

  friend bool operator==(const EntryMeta&, const EntryMeta&) = default;
};

struct GalleryEntry {
  EntryId id = 0;
  std::string label;
  std::vector<double> vector;
  EntryMeta meta;

  friend bool operator==(const GalleryEntry&, const GalleryEntry&) = default;
};

struct Neighbor {
  EntryId id = 0;
  std::string label;
  double distance = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// sqrt(sum((a_i - b_i)^2)), accumulated left to right in double.
double euclidean_distance(std::span<const double> a, std::span<const double> b);

// Labeled reference vectors searchable by exact Euclidean k-NN. Queries may
// run concurrently; implementations serialize mutation against them.
class VectorStore {
 public:
  virtual ~VectorStore() = default;

  virtual std::size_t dim() const = 0;
  virtual std::size_t size() const = 0;
  bool empty() const { return size() == 0; }

  // Returns the new entry's id. Throws DimensionMismatch.
  virtual EntryId add(std::string label, std::span<const double> vector,
                      EntryMeta meta = {}) = 0;

  // The min(k, size()) nearest entries by ascending distance, ties broken by
  // ascending id. Throws EmptyGallery; k == 0 is std::invalid_argument.
  virtual std::vector<Neighbor> nearest(std::span<const double> query,
                                        std::size_t k) const = 0;
};

// In-memory flat index: linear scan over all entries.
class Gallery final : public VectorStore {
 public:
  explicit Gallery(std::size_t dim = kFeatureDim);
  Gallery(const Gallery& other);
  Gallery& operator=(const Gallery& other);
  Gallery(Gallery&& other) noexcept;
  Gallery& operator=(Gallery&& other) noexcept;

  std::size_t dim() const override { return dim_; }
  std::size_t size() const override;

  EntryId add(std::string label, std::span<const double> vector,
              EntryMeta meta = {}) override;
  EntryId add(std::string label, const FeatureVector& vector, EntryMeta meta = {}) {
    return add(std::move(label), vector.values(), std::move(meta));
  }

  std::vector<Neighbor> nearest(std::span<const double> query,
                                std::size_t k) const override;

  // Consistent copy of all entries in insertion order.
  std::vector<GalleryEntry> entries() const;

  // Inserts an entry with an explicit id, which must exceed every existing
  // id. Used by load().
  void insert(GalleryEntry entry);

  friend bool operator==(const Gallery& a, const Gallery& b);

 private:
  std::shared_lock<std::shared_mutex> read_lock() const;
  std::unique_lock<std::shared_mutex> write_lock() const;

  std::size_t dim_;
  std::vector<GalleryEntry> entries_;
  EntryId next_id_ = 0;
  mutable std::shared_mutex mutex_;
  mutable std::mutex turnstile_;
};

// JSON Lines: header {"format":"gesture-gallery","version":1,"dim":D}, then
// one {"id","label","vector","meta"} object per entry.
void save_gallery(const Gallery& gallery, std::ostream& out);
void save_gallery(const Gallery& gallery, const std::filesystem::path& path);
// Throws FormatError with the 1-based offending line.
Gallery load_gallery(std::istream& in);
Gallery load_gallery(const std::filesystem::path& path);

}  // namespace handgest
