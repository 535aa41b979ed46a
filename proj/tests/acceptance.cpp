// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. Every oracle here is written independently of
// the code path it checks.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "handgest/handgest.hpp"
#include "synthetic.hpp"

using namespace handgest;
using handgest::testing::Rng;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(const char* name, const Outcome& o) {
  std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// --- geometry -------------------------------------------------------------

Outcome anchor_exactness() {
  constexpr int kFrames = 10000;
  constexpr double kTol = 1e-6;
  const auto ref = default_reference_anchors();
  Rng rng(101);
  std::vector<HandLandmarks> frames;
  frames.reserve(kFrames);
  for (int i = 0; i < kFrames; ++i) frames.push_back(handgest::testing::random_hand(rng));

  double worst = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& f : frames) {
    const auto v = normalize(f, ref);
    for (std::size_t k = 0; k < 4; ++k) {
      const Point3 got = v.point(kAnchorLandmarks[k]);
      worst = std::max({worst, std::abs(got.x - ref[k].x), std::abs(got.y - ref[k].y),
                        std::abs(got.z - ref[k].z)});
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst <= kTol && secs < 5.0,
          fmt("%d frames, max anchor error %.3g (tol 1e-6), %.3f s (limit 5 s)", kFrames,
              worst, secs)};
}

Outcome affine_invariance() {
  constexpr int kFrames = 1000;
  constexpr int kMaps = 10;
  constexpr double kTol = 1e-6;
  const auto ref = default_reference_anchors();
  Rng rng(202);
  double worst = 0.0;
  int reflections = 0;
  for (int i = 0; i < kFrames; ++i) {
    const auto f = handgest::testing::random_hand(rng);
    const auto base = normalize(f, ref);
    for (int m = 0; m < kMaps; ++m) {
      const auto a = handgest::testing::random_affine(rng, true);
      const double det = std::abs(a.linear_determinant());
      if (det < 1e-3 || det > 1e3) return {false, "generated map outside det range"};
      if (a.linear_determinant() < 0) ++reflections;
      const auto moved = normalize(a.apply(f), ref);
      for (std::size_t c = 0; c < kFeatureDim; ++c) {
        worst = std::max(worst, std::abs(base[c] - moved[c]));
      }
    }
  }
  return {worst <= kTol && reflections > 0,
          fmt("%d frames x %d maps (%d reflections), max deviation %.3g (tol 1e-6)", kFrames,
              kMaps, reflections, worst)};
}

Outcome transform_round_trip() {
  constexpr int kPairs = 1000;
  constexpr double kTol = 1e-8;
  Rng rng(303);
  double worst = 0.0;
  for (int i = 0; i < kPairs; ++i) {
    const auto s = extract_anchors(handgest::testing::random_hand(rng));
    const auto p = extract_anchors(handgest::testing::random_hand(rng));
    // Multiply the two matrices here rather than through then().
    Eigen::Matrix4d a, b;
    const auto& ma = compute_transform(s, p).matrix();
    const auto& mb = compute_transform(p, s).matrix();
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        a(r, c) = ma[r][c];
        b(r, c) = mb[r][c];
      }
    worst = std::max(worst, (a * b - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff());
  }
  return {worst <= kTol,
          fmt("%d anchor pairs, max |T(S,P)T(P,S) - I| = %.3g (tol 1e-8)", kPairs, worst)};
}

// --- gallery --------------------------------------------------------------

std::vector<double> random_vector(Rng& rng) {
  std::vector<double> v(kFeatureDim);
  for (auto& x : v) x = handgest::testing::uniform(rng, -1.0, 1.0);
  return v;
}

Outcome knn_oracle() {
  constexpr int kVectors = 1000;
  constexpr int kQueries = 200;
  Rng rng(404);
  Gallery g;
  struct Stored {
    EntryId id;
    std::string label;
    std::vector<double> v;
  };
  std::vector<Stored> stored;
  for (int i = 0; i < kVectors; ++i) {
    auto v = random_vector(rng);
    // Duplicates give exact distance ties.
    if (i % 97 == 5) v = stored[static_cast<std::size_t>(i / 2)].v;
    const std::string label = "class" + std::to_string(rng() % 24);
    const auto id = g.add(label, v);
    stored.push_back({id, label, std::move(v)});
  }
  std::size_t compared = 0;
  for (int q = 0; q < kQueries; ++q) {
    auto query = random_vector(rng);
    if (q % 10 == 0) query = stored[rng() % stored.size()].v;
    // Exhaustive scan: every distance, full stable sort by (distance, id).
    std::vector<Neighbor> all;
    for (const auto& s : stored) {
      double acc = 0.0;
      for (std::size_t c = 0; c < kFeatureDim; ++c) {
        const double d = query[c] - s.v[c];
        acc += d * d;
      }
      all.push_back({s.id, s.label, std::sqrt(acc)});
    }
    std::stable_sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
      return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
    });
    for (std::size_t k : {1u, 3u, 5u}) {
      const auto got = g.nearest(query, k);
      if (got.size() != k) return {false, "short result"};
      for (std::size_t i = 0; i < k; ++i) {
        if (got[i].id != all[i].id || got[i].label != all[i].label ||
            std::bit_cast<std::uint64_t>(got[i].distance) !=
                std::bit_cast<std::uint64_t>(all[i].distance)) {
          return {false, fmt("query %d k=%zu rank %zu differs", q, k, i)};
        }
      }
      ++compared;
    }
  }
  return {true, fmt("%d vectors x %d queries x k in {1,3,5}: %zu result lists identical "
                    "(ids, labels, bitwise distances)",
                    kVectors, kQueries, compared)};
}

double awkward_double(Rng& rng) {
  switch (rng() % 6) {
    case 0:
      return -0.0;
    case 1:
      return std::numeric_limits<double>::denorm_min() * static_cast<double>(rng() % 1000);
    case 2:
      return std::ldexp(handgest::testing::uniform(rng, -1, 1), static_cast<int>(rng() % 600) - 300);
    case 3:
      return std::nextafter(1.0, 2.0);
    default:
      return std::bit_cast<double>((rng() & 0x7FEFFFFFFFFFFFFFull) | (rng() & 0x8000000000000000ull));
  }
}

Outcome gallery_persistence() {
  Rng rng(505);
  const std::vector<std::size_t> sizes = {0, 1, 24, 120, 777, 2500, 5000};
  const std::vector<std::string> names = {"Pataka", "Mudrakhya", "Kartarimukha",
                                          "ക", "label, with \"quotes\"\n", "x"};
  for (std::size_t n : sizes) {
    Gallery g;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> v(kFeatureDim);
      for (auto& x : v) {
        x = awkward_double(rng);
        if (!std::isfinite(x)) x = 0.5;
      }
      EntryMeta meta;
      if (rng() % 2) meta.source_id = "img/" + std::to_string(i) + ".png";
      if (rng() % 3 == 0) meta.subject = "subject" + std::to_string(rng() % 8);
      g.add(names[rng() % names.size()], v, meta);
    }
    std::stringstream ss;
    save_gallery(g, ss);
    const auto back = load_gallery(ss);
    // Field-by-field, vectors compared on their bit patterns.
    const auto a = g.entries();
    const auto b = back.entries();
    if (a.size() != b.size() || back.dim() != g.dim()) {
      return {false, fmt("size mismatch at n=%zu", n)};
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].id != b[i].id || a[i].label != b[i].label || a[i].meta != b[i].meta) {
        return {false, fmt("entry %zu differs at n=%zu", i, n)};
      }
      for (std::size_t c = 0; c < kFeatureDim; ++c) {
        if (std::bit_cast<std::uint64_t>(a[i].vector[c]) !=
            std::bit_cast<std::uint64_t>(b[i].vector[c])) {
          return {false, fmt("entry %zu component %zu differs at n=%zu", i, c, n)};
        }
      }
    }
  }
  return {true, "galleries of 0..5000 entries round-trip bit-exactly"};
}

// --- classifier -----------------------------------------------------------

std::optional<std::string> brute_force_mode(
    const std::deque<std::vector<std::pair<std::string, double>>>& window) {
  std::map<std::string, std::pair<std::size_t, double>> stats;
  for (const auto& frame : window)
    for (const auto& [label, d] : frame) {
      auto& s = stats.try_emplace(label, 0, kInf).first->second;
      ++s.first;
      s.second = std::min(s.second, d);
    }
  std::optional<std::string> best;
  std::pair<std::size_t, double> best_s{0, kInf};
  for (const auto& [label, s] : stats) {
    if (s.first > best_s.first || (s.first == best_s.first && s.second < best_s.second)) {
      best = label;
      best_s = s;
    }
  }
  return best;
}

Outcome stream_smoothing() {
  Rng rng(606);
  const std::vector<std::string> labels = {"Pataka", "Mudrakhya", "Kataka", "Mushti", "Arala"};
  std::size_t windows = 0;
  for (std::size_t w : {1u, 5u, 10u}) {
    for (std::size_t n : {1u, 3u}) {
      StreamState state(w, n);
      std::deque<std::vector<std::pair<std::string, double>>> window;
      for (int step = 0; step < 1700; ++step) {
        Prediction p;
        std::vector<std::pair<std::string, double>> kept;
        const std::size_t count = rng() % (n + 2);  // 0 = rejected, > n gets truncated
        double d = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
          d += static_cast<double>(rng() % 3) * 0.5;
          const auto& label = labels[rng() % labels.size()];
          p.ranked.push_back({label, d, 0});
          if (i < n) kept.emplace_back(label, d);
        }
        if (!p.ranked.empty()) p.label = p.ranked[0].label;
        window.push_back(kept);
        if (window.size() > w) window.pop_front();
        const auto out = state.observe(p);
        if (out.label != brute_force_mode(window) || state.size() != window.size()) {
          return {false, fmt("mode disagreement at W=%zu N=%zu step %d", w, n, step)};
        }
        ++windows;
      }
    }
  }

  // W=1, N=1 streams against stateless classify on real frames.
  const auto ref = default_reference_anchors();
  Gallery g;
  std::vector<HandLandmarks> protos;
  for (int c = 0; c < 8; ++c) {
    protos.push_back(handgest::testing::random_hand(rng));
    g.add("c" + std::to_string(c), normalize(protos.back(), ref));
  }
  std::size_t frames = 0;
  for (int s = 0; s < 20; ++s) {
    StreamState state(1, 1);
    const ClassifierConfig cfg{1, s % 2 ? 0.3 : kInf};
    for (int i = 0; i < 100; ++i) {
      HandLandmarks f = handgest::testing::jitter(protos[rng() % protos.size()], 0.02, rng);
      if (i % 23 == 0) {
        LandmarkArray flat;
        flat.fill({0.4, 0.4, 0.0});
        f = HandLandmarks(flat);
      }
      const auto direct = classify(g, f, ref, cfg);
      auto [next, smoothed] = stream_step(std::move(state), g, f, ref, cfg);
      state = std::move(next);
      if (smoothed.label != direct.label) return {false, "W=1,N=1 disagrees with classify"};
      ++frames;
    }
  }
  return {windows >= 10000, fmt("%zu randomized windows match brute-force mode; %zu W=1,N=1 "
                                "frames match stateless classify",
                                windows, frames)};
}

// --- evaluation -----------------------------------------------------------

bool reconciles(const EvalReport& r, const DatasetManifest& test) {
  const auto counts = test.class_counts();
  std::size_t total = 0, trace = 0, rejected = 0;
  for (std::size_t t = 0; t < r.labels.size(); ++t) {
    std::size_t row = 0;
    for (auto c : r.confusion[t]) row += c;
    const auto it = counts.find(r.labels[t]);
    if (row != (it == counts.end() ? 0 : it->second)) return false;
    total += row;
    trace += r.confusion[t][t];
    rejected += r.confusion[t].back();
  }
  const std::size_t scored = total - rejected;
  return total == test.size() && r.scored == scored && r.rejected == rejected &&
         r.correct == trace && r.accuracy == static_cast<double>(trace) / scored;
}

Outcome synthetic_end_to_end() {
  const auto clean = handgest::testing::prototype_dataset(24, 30, 0.002, 707);
  if (!clean.separable) return {false, "generator failed to produce separable classes"};
  const SplitSpec spec{PerClassK{1}, 42, std::nullopt};
  const auto split = make_split(clean.manifest, spec);
  EvalConfig cfg;
  cfg.seed = 42;
  const auto r = evaluate(split.train, split.test, cfg);
  if (r.accuracy != 1.0 || !reconciles(r, split.test)) {
    return {false, fmt("separable accuracy %.4f", r.accuracy)};
  }

  const auto noisy = handgest::testing::prototype_dataset(24, 30, 0.04, 708);
  const auto s1 = make_split(noisy.manifest, spec);
  const auto s2 = make_split(noisy.manifest, spec);
  if (!(s1.train == s2.train && s1.test == s2.test)) return {false, "split not deterministic"};
  const auto r1 = evaluate(s1.train, s1.test, cfg);
  EvalConfig par = cfg;
  par.threads = 4;
  const auto r2 = evaluate(s2.train, s2.test, par);
  const bool ok = r1.accuracy < 1.0 && r1 == r2 && reconciles(r1, s1.test);
  return {ok, fmt("separable one-shot accuracy %.4f (%zu/%zu); overlapping noise accuracy "
                  "%.4f, deterministic split, reconciled report",
                  r.accuracy, r.correct, r.scored, r1.accuracy)};
}

Outcome split_sizes() {
  const auto manifest =
      handgest::testing::synthetic_manifest(handgest::testing::hasta_mudra_counts(), 808);
  if (manifest.size() != 928) return {false, "manifest does not match class counts"};
  struct Case {
    std::size_t k;
    bool ten;
    std::size_t train, test;
  };
  const Case cases[] = {{1, false, 24, 904},  {5, false, 120, 808}, {10, false, 240, 688},
                        {1, true, 10, 381},   {5, true, 50, 341},   {10, true, 100, 291}};
  std::string detail;
  for (const auto& c : cases) {
    std::optional<std::vector<std::string>> filter;
    if (c.ten) filter = handgest::testing::ten_class_subset();
    const auto s = make_split(manifest, {PerClassK{c.k}, 42, filter});
    if (s.train.size() != c.train || s.test.size() != c.test) {
      return {false, fmt("k=%zu %s: got %zu/%zu", c.k, c.ten ? "10-class" : "24-class",
                         s.train.size(), s.test.size())};
    }
    detail += fmt("%zu/%zu ", s.train.size(), s.test.size());
  }
  const auto frac = make_split(manifest, {TrainFraction{0.8}, 42, std::nullopt});
  const auto frac10 =
      make_split(manifest, {TrainFraction{0.8}, 42, handgest::testing::ten_class_subset()});
  const bool frac_ok = frac.train.size() + frac.test.size() == 928 &&
                       frac10.train.size() + frac10.test.size() == 391;
  detail += fmt("; 80:20 -> %zu/%zu and %zu/%zu", frac.train.size(), frac.test.size(),
                frac10.train.size(), frac10.test.size());
  return {frac_ok, "train/test " + detail};
}

}  // namespace

int main() {
  report("anchor exactness", anchor_exactness());
  report("affine invariance", affine_invariance());
  report("transform round-trip", transform_round_trip());
  report("knn oracle equivalence", knn_oracle());
  report("gallery persistence", gallery_persistence());
  report("stream smoothing", stream_smoothing());
  report("synthetic end-to-end", synthetic_end_to_end());
  report("split sizes", split_sizes());
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
