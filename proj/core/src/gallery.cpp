#include "handgest/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "handgest/errors.hpp"
#include "json.hpp"

namespace handgest {

namespace {

constexpr std::string_view kFormatName = "gesture-gallery";
constexpr int kFormatVersion = 1;

struct Candidate {
  double distance;
  EntryId id;
  std::size_t index;

  bool operator<(const Candidate& o) const {
    return std::tie(distance, id) < std::tie(o.distance, o.id);
  }
};

}  // namespace

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

Gallery::Gallery(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw std::invalid_argument("gallery dimension must be positive");
}

// Both lock kinds pass through the turnstile, so a waiting writer holds it and
// new readers queue behind it instead of starving it.
std::shared_lock<std::shared_mutex> Gallery::read_lock() const {
  std::lock_guard gate(turnstile_);
  return std::shared_lock(mutex_);
}

std::unique_lock<std::shared_mutex> Gallery::write_lock() const {
  std::lock_guard gate(turnstile_);
  return std::unique_lock(mutex_);
}

Gallery::Gallery(const Gallery& other) {
  const auto lock = other.read_lock();
  dim_ = other.dim_;
  entries_ = other.entries_;
  next_id_ = other.next_id_;
}

Gallery& Gallery::operator=(const Gallery& other) {
  if (this == &other) return *this;
  Gallery copy(other);
  const auto lock = write_lock();
  dim_ = copy.dim_;
  entries_ = std::move(copy.entries_);
  next_id_ = copy.next_id_;
  return *this;
}

Gallery::Gallery(Gallery&& other) noexcept
    : dim_(other.dim_),
      entries_(std::move(other.entries_)),
      next_id_(other.next_id_) {}

Gallery& Gallery::operator=(Gallery&& other) noexcept {
  if (this == &other) return *this;
  std::scoped_lock lock(mutex_, other.mutex_);
  dim_ = other.dim_;
  entries_ = std::move(other.entries_);
  next_id_ = other.next_id_;
  return *this;
}

std::size_t Gallery::size() const {
  const auto lock = read_lock();
  return entries_.size();
}

EntryId Gallery::add(std::string label, std::span<const double> vector,
                     EntryMeta meta) {
  if (vector.size() != dim_) throw DimensionMismatch(dim_, vector.size());
  if (label.empty()) throw std::invalid_argument("gallery label must be nonempty");
  GalleryEntry entry{0, std::move(label), {vector.begin(), vector.end()},
                     std::move(meta)};
  const auto lock = write_lock();
  entry.id = next_id_++;
  entries_.push_back(std::move(entry));
  return entries_.back().id;
}

void Gallery::insert(GalleryEntry entry) {
  if (entry.vector.size() != dim_) throw DimensionMismatch(dim_, entry.vector.size());
  if (entry.label.empty()) throw std::invalid_argument("gallery label must be nonempty");
  const auto lock = write_lock();
  if (entry.id < next_id_) {
    throw std::invalid_argument("entry id " + std::to_string(entry.id) +
                                " is not greater than existing ids");
  }
  next_id_ = entry.id + 1;
  entries_.push_back(std::move(entry));
}

std::vector<Neighbor> Gallery::nearest(std::span<const double> query,
                                       std::size_t k) const {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  if (query.size() != dim_) throw DimensionMismatch(dim_, query.size());
  const auto lock = read_lock();
  if (entries_.empty()) throw EmptyGallery();

  // Max-heap of the best k seen so far; top is the worst kept candidate.
  std::priority_queue<Candidate> heap;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Candidate c{euclidean_distance(query, entries_[i].vector), entries_[i].id, i};
    if (heap.size() < k) {
      heap.push(c);
    } else if (c < heap.top()) {
      heap.pop();
      heap.push(c);
    }
  }

  std::vector<Neighbor> out(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    const Candidate& c = heap.top();
    out[i] = {c.id, entries_[c.index].label, c.distance};
    heap.pop();
  }
  return out;
}

std::vector<GalleryEntry> Gallery::entries() const {
  const auto lock = read_lock();
  return entries_;
}

bool operator==(const Gallery& a, const Gallery& b) {
  if (&a == &b) return true;
  std::shared_lock la(a.mutex_, std::defer_lock);
  std::shared_lock lb(b.mutex_, std::defer_lock);
  std::lock(la, lb);
  return a.dim_ == b.dim_ && a.entries_ == b.entries_;
}

void save_gallery(const Gallery& gallery, std::ostream& out) {
  nlohmann::ordered_json header;
  header["format"] = kFormatName;
  header["version"] = kFormatVersion;
  header["dim"] = gallery.dim();
  out << header.dump() << '\n';
  for (const auto& e : gallery.entries()) {
    nlohmann::ordered_json line;
    line["id"] = e.id;
    line["label"] = e.label;
    line["vector"] = e.vector;
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    if (e.meta.source_id) meta["source_id"] = *e.meta.source_id;
    if (e.meta.subject) meta["subject"] = *e.meta.subject;
    line["meta"] = std::move(meta);
    out << line.dump() << '\n';
  }
}

void save_gallery(const Gallery& gallery, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(0, "cannot open '" + path.string() + "' for writing");
  save_gallery(gallery, out);
  out.flush();
  if (!out) throw FormatError(0, "failed writing '" + path.string() + "'");
}

namespace {

nlohmann::json parse_line(const std::string& text, std::size_t line_no) {
  if (text.empty()) throw FormatError(line_no, "empty line");
  try {
    auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw FormatError(line_no, "expected a JSON object");
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(line_no, std::string("invalid JSON: ") + e.what());
  }
}

std::optional<std::string> optional_string(const nlohmann::json& obj,
                                           const char* key, std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw FormatError(line_no, std::string("meta.") + key + " must be a string");
  }
  return it->get<std::string>();
}

GalleryEntry parse_entry(const nlohmann::json& j, std::size_t dim,
                         std::size_t line_no) {
  GalleryEntry e;
  auto id = j.find("id");
  if (id == j.end() || !id->is_number_integer()) {
    throw FormatError(line_no, "missing integer 'id'");
  }
  e.id = id->get<EntryId>();
  auto label = j.find("label");
  if (label == j.end() || !label->is_string() || label->get<std::string>().empty()) {
    throw FormatError(line_no, "missing nonempty string 'label'");
  }
  e.label = label->get<std::string>();
  auto vec = j.find("vector");
  if (vec == j.end() || !vec->is_array()) {
    throw FormatError(line_no, "missing array 'vector'");
  }
  if (vec->size() != dim) {
    throw FormatError(line_no, "vector has " + std::to_string(vec->size()) +
                                   " values, expected " + std::to_string(dim));
  }
  e.vector.reserve(dim);
  for (const auto& v : *vec) {
    if (!v.is_number()) throw FormatError(line_no, "vector value is not a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw FormatError(line_no, "vector value is not finite");
    e.vector.push_back(d);
  }
  if (auto meta = j.find("meta"); meta != j.end() && !meta->is_null()) {
    if (!meta->is_object()) throw FormatError(line_no, "'meta' must be an object");
    e.meta.source_id = optional_string(*meta, "source_id", line_no);
    e.meta.subject = optional_string(*meta, "subject", line_no);
  }
  return e;
}

}  // namespace

Gallery load_gallery(std::istream& in) {
  std::string text;
  if (!std::getline(in, text)) throw FormatError(1, "missing header record");
  const auto header = parse_line(text, 1);
  if (header.value("format", std::string{}) != kFormatName) {
    throw FormatError(1, "header 'format' is not \"gesture-gallery\"");
  }
  auto version = header.find("version");
  if (version == header.end() || !version->is_number_integer() ||
      version->get<int>() != kFormatVersion) {
    throw FormatError(1, "unsupported gallery version");
  }
  auto dim = header.find("dim");
  if (dim == header.end() || !dim->is_number_unsigned() || dim->get<std::size_t>() == 0) {
    throw FormatError(1, "header 'dim' must be a positive integer");
  }

  Gallery gallery(dim->get<std::size_t>());
  std::size_t line_no = 1;
  while (std::getline(in, text)) {
    ++line_no;
    auto entry = parse_entry(parse_line(text, line_no), gallery.dim(), line_no);
    try {
      gallery.insert(std::move(entry));
    } catch (const std::invalid_argument& e) {
      throw FormatError(line_no, e.what());
    }
  }
  return gallery;
}

Gallery load_gallery(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(0, "cannot open gallery '" + path.string() + "'");
  return load_gallery(in);
}

}  // namespace handgest
