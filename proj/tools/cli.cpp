#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "handgest/handgest.hpp"
#include "json.hpp"

namespace handgest::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

// Raised for inconsistent flag combinations that CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string gallery;
  std::string reference;
  std::size_t n = 1;
  std::optional<double> threshold;
  std::size_t window = 10;
  std::string output = "text";
};

AnchorSet reference_anchors(const CommonOptions& o) {
  return o.reference.empty() ? default_reference_anchors() : load_anchor_file(o.reference);
}

ClassifierConfig classifier_config(const CommonOptions& o) {
  ClassifierConfig c;
  c.top_n = o.n;
  if (o.threshold) {
    if (!(*o.threshold > 0.0)) throw UsageError("--threshold must be positive");
    c.threshold = *o.threshold;
  }
  return c;
}

Gallery load_nonempty_gallery(const std::string& path) {
  auto g = load_gallery(std::filesystem::path(path));
  if (g.empty()) throw EmptyGallery();
  return g;
}

std::string fmt_distance(double d) {
  std::ostringstream os;
  os << std::setprecision(6) << d;
  return os.str();
}

ordered_json ranked_json(const std::vector<RankedMatch>& ranked) {
  auto arr = ordered_json::array();
  for (const auto& m : ranked) {
    arr.push_back({{"label", m.label}, {"distance", m.distance}, {"id", m.id}});
  }
  return arr;
}

std::string ranked_text(const std::vector<RankedMatch>& ranked, char sep) {
  std::string s;
  for (const auto& m : ranked) {
    if (!s.empty()) s += sep;
    s += m.label + ":" + fmt_distance(m.distance);
  }
  return s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

// One output line for a (possibly smoothed) prediction.
void write_prediction(std::ostream& out, ReportFormat fmt, const std::string& source_id,
                      const Prediction& frame, const std::optional<std::string>& label,
                      const std::vector<Vote>* votes,
                      std::optional<std::int64_t> timestamp_ms) {
  const std::string outcome = label ? "Match" : "NoMatch";
  switch (fmt) {
    case ReportFormat::kJson: {
      ordered_json j;
      j["source_id"] = source_id;
      if (timestamp_ms) j["timestamp_ms"] = *timestamp_ms;
      j["outcome"] = outcome;
      j["label"] = label ? ordered_json(*label) : ordered_json(nullptr);
      j["ranked"] = ranked_json(frame.ranked);
      if (votes) {
        auto arr = ordered_json::array();
        for (const auto& v : *votes) {
          arr.push_back(
              {{"label", v.label}, {"count", v.count}, {"best_distance", v.best_distance}});
        }
        j["votes"] = std::move(arr);
      }
      if (frame.rejection) j["rejection"] = *frame.rejection;
      out << j.dump() << '\n';
      break;
    }
    case ReportFormat::kCsv:
      out << csv_field(source_id) << ',' << outcome << ',' << csv_field(label.value_or(""))
          << ',' << csv_field(ranked_text(frame.ranked, ';')) << ','
          << csv_field(frame.rejection.value_or("")) << '\n';
      break;
    case ReportFormat::kText: {
      out << source_id << '\t' << (label ? "Match(" + *label + ")" : std::string("NoMatch"));
      if (!frame.ranked.empty()) out << '\t' << ranked_text(frame.ranked, ' ');
      if (frame.rejection) out << "\trejected: " << *frame.rejection;
      out << '\n';
      break;
    }
  }
}

void write_csv_header(std::ostream& out, ReportFormat fmt) {
  if (fmt == ReportFormat::kCsv) out << "source_id,outcome,label,ranked,rejection\n";
}

int cmd_enroll(const std::string& manifest_path, const CommonOptions& o, std::ostream& out) {
  const auto fmt = parse_report_format(o.output);
  const auto manifest = load_manifest(std::filesystem::path(manifest_path));
  if (manifest.empty()) throw Error("no records in manifest '" + manifest_path + "'");
  Gallery gallery;
  const auto summary = enroll(manifest, reference_anchors(o), gallery);
  save_gallery(gallery, std::filesystem::path(o.gallery));

  if (fmt == ReportFormat::kJson) {
    ordered_json j;
    j["gallery"] = o.gallery;
    j["enrolled"] = summary.enrolled_total();
    j["per_class"] = summary.enrolled;
    auto rej = ordered_json::array();
    for (const auto& [id, why] : summary.rejected) rej.push_back({{"source_id", id}, {"cause", why}});
    j["rejected"] = std::move(rej);
    out << j.dump(2) << '\n';
  } else if (fmt == ReportFormat::kCsv) {
    out << "class,enrolled\n";
    for (const auto& [label, n] : summary.enrolled) out << csv_field(label) << ',' << n << '\n';
  } else {
    out << "enrolled " << summary.enrolled_total() << " entries into " << o.gallery << '\n';
    for (const auto& [label, n] : summary.enrolled) out << "  " << label << ": " << n << '\n';
    out << "rejected " << summary.rejected.size() << '\n';
    for (const auto& [id, why] : summary.rejected) out << "  " << id << ": " << why << '\n';
  }
  return kOk;
}

int cmd_classify(const std::vector<std::string>& inputs, const CommonOptions& o,
                 std::ostream& out) {
  const auto fmt = parse_report_format(o.output);
  const auto config = classifier_config(o);
  const auto reference = reference_anchors(o);
  const auto gallery = load_nonempty_gallery(o.gallery);
  write_csv_header(out, fmt);
  for (const auto& input : inputs) {
    for (const auto& rec : load_frame_file(input)) {
      const auto p = classify(gallery, rec.landmarks, reference, config);
      write_prediction(out, fmt, rec.landmarks.source_id(), p, p.label, nullptr,
                       rec.timestamp_ms);
    }
  }
  return kOk;
}

int cmd_stream(const CommonOptions& o, std::istream& in, std::ostream& out,
               std::ostream& err) {
  const auto fmt = parse_report_format(o.output);
  const auto config = classifier_config(o);
  const auto reference = reference_anchors(o);
  const auto gallery = load_nonempty_gallery(o.gallery);
  StreamState state(o.window, o.n);
  write_csv_header(out, fmt);
  out.flush();

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::optional<FrameRecord> rec;
    try {
      rec.emplace(parse_frame_record(line, line_no));
    } catch (const FormatError& e) {
      err << "stream: skipping frame: " << e.what() << '\n';
      err.flush();
      continue;
    }
    auto [next, smoothed] = stream_step(std::move(state), gallery, rec->landmarks,
                                        reference, config);
    state = std::move(next);
    const std::string id = rec->landmarks.source_id().empty()
                               ? "frame#" + std::to_string(line_no)
                               : rec->landmarks.source_id();
    write_prediction(out, fmt, id, smoothed.frame, smoothed.label, &smoothed.votes,
                     rec->timestamp_ms);
    out.flush();
  }
  return kOk;
}

struct SplitOptions {
  std::string manifest;
  std::optional<std::size_t> k;
  std::optional<double> fraction;
  std::vector<std::string> classes;
  std::uint64_t seed = 42;
};

SplitSpec split_spec(const SplitOptions& s) {
  SplitSpec spec;
  if (s.k) {
    spec.mode = PerClassK{*s.k};
  } else if (s.fraction) {
    spec.mode = TrainFraction{*s.fraction};
  } else {
    throw UsageError("one of --k or --fraction is required");
  }
  spec.seed = s.seed;
  if (!s.classes.empty()) spec.class_filter = s.classes;
  return spec;
}

void write_ids(const DatasetManifest& m, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write '" + path + "'");
  write_id_list(m, f);
}

std::vector<std::string> read_ids(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read '" + path + "'");
  return read_id_list(f);
}

int cmd_split(const SplitOptions& s, const std::string& train_out,
              const std::string& test_out, const std::string& output, std::ostream& out) {
  const auto fmt = parse_report_format(output);
  const auto manifest = load_manifest(std::filesystem::path(s.manifest));
  const auto split = make_split(manifest, split_spec(s));
  if (!train_out.empty()) write_ids(split.train, train_out);
  if (!test_out.empty()) write_ids(split.test, test_out);

  const auto train_counts = split.train.class_counts();
  const auto test_counts = split.test.class_counts();
  if (fmt == ReportFormat::kJson) {
    ordered_json j;
    j["seed"] = s.seed;
    j["train_size"] = split.train.size();
    j["test_size"] = split.test.size();
    auto ids = [](const DatasetManifest& m) {
      std::vector<std::string> v;
      for (const auto& r : m.records()) v.push_back(r.source_id);
      return v;
    };
    j["train"] = ids(split.train);
    j["test"] = ids(split.test);
    out << j.dump(2) << '\n';
  } else if (fmt == ReportFormat::kCsv) {
    out << "class,train,test\n";
    for (const auto& [label, n] : test_counts) {
      out << csv_field(label) << ',' << train_counts.at(label) << ',' << n << '\n';
    }
  } else {
    out << "train " << split.train.size() << " / test " << split.test.size()
        << " (seed " << s.seed << ")\n";
    for (const auto& [label, n] : test_counts) {
      out << "  " << label << ": " << train_counts.at(label) << " / " << n << '\n';
    }
  }
  return kOk;
}

int cmd_eval(const SplitOptions& s, const std::string& train_ids,
             const std::string& test_ids, const CommonOptions& o, unsigned threads,
             std::ostream& out) {
  const auto fmt = parse_report_format(o.output);
  const auto manifest = load_manifest(std::filesystem::path(s.manifest));
  EvalConfig config{reference_anchors(o), threads, std::nullopt};
  Split split;
  if (!train_ids.empty() || !test_ids.empty()) {
    if (train_ids.empty() || test_ids.empty()) {
      throw UsageError("--train-ids and --test-ids go together");
    }
    if (s.k || s.fraction) throw UsageError("--train-ids cannot be combined with --k/--fraction");
    split = {manifest.select(read_ids(train_ids)), manifest.select(read_ids(test_ids))};
  } else {
    split = make_split(manifest, split_spec(s));
    config.seed = s.seed;
  }
  out << render_report(evaluate(split.train, split.test, config), fmt);
  return kOk;
}

void add_output(CLI::App* cmd, std::string& output) {
  cmd->add_option("--output", output, "Output format")
      ->check(CLI::IsMember({"text", "json", "csv"}));
}

void add_classify_options(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--gallery", o.gallery, "Gallery file (JSONL)")->required();
  cmd->add_option("--n", o.n, "Matches reported per frame")->check(CLI::PositiveNumber);
  cmd->add_option("--threshold", o.threshold,
                  "Maximum match distance (default: disabled)");
  cmd->add_option("--reference", o.reference, "Reference anchor file");
  add_output(cmd, o.output);
}

void add_split_options(CLI::App* cmd, SplitOptions& s, bool require_mode) {
  cmd->add_option("--manifest", s.manifest, "Dataset manifest (JSONL)")->required();
  auto* k = cmd->add_option("--k", s.k, "Training samples per class")
                ->check(CLI::PositiveNumber);
  auto* f = cmd->add_option("--fraction", s.fraction, "Training fraction in (0, 1)")
                ->check(CLI::Range(0.0, 1.0));
  k->excludes(f);
  if (require_mode) {
    // Enforced again in split_spec for eval, where split files are an alternative.
    cmd->callback([&s] {
      if (!s.k && !s.fraction) throw CLI::ValidationError("one of --k or --fraction is required");
    });
  }
  cmd->add_option("--classes", s.classes, "Comma-separated class filter")->delimiter(',');
  cmd->add_option("--seed", s.seed, "Split seed");
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Hand-gesture classification by normalized landmark nearest neighbor",
               "handgest"};
  app.require_subcommand(1);

  CommonOptions common;
  SplitOptions split;
  std::string manifest;
  std::vector<std::string> inputs;
  std::string train_out, test_out, train_ids, test_ids;
  unsigned threads = 1;

  auto* enroll_cmd = app.add_subcommand("enroll", "Normalize a manifest into a gallery");
  enroll_cmd->add_option("--manifest", manifest, "Dataset manifest (JSONL)")->required();
  enroll_cmd->add_option("--gallery", common.gallery, "Gallery file to write")->required();
  enroll_cmd->add_option("--reference", common.reference, "Reference anchor file");
  add_output(enroll_cmd, common.output);

  auto* classify_cmd = app.add_subcommand("classify", "Classify landmark files");
  classify_cmd->add_option("inputs", inputs, "Landmark files (JSON or JSONL)")->required();
  add_classify_options(classify_cmd, common);

  auto* stream_cmd = app.add_subcommand("stream", "Smooth predictions over a JSONL frame stream on stdin");
  add_classify_options(stream_cmd, common);
  stream_cmd->add_option("--window", common.window, "Frames in the voting window")
      ->check(CLI::PositiveNumber);

  auto* split_cmd = app.add_subcommand("split", "Generate a train/test split");
  add_split_options(split_cmd, split, true);
  split_cmd->add_option("--train-out", train_out, "Write train source_ids here");
  split_cmd->add_option("--test-out", test_out, "Write test source_ids here");
  add_output(split_cmd, common.output);

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate 1-NN accuracy on a split");
  add_split_options(eval_cmd, split, false);
  eval_cmd->add_option("--train-ids", train_ids, "Train split file (one source_id per line)");
  eval_cmd->add_option("--test-ids", test_ids, "Test split file (one source_id per line)");
  eval_cmd->add_option("--reference", common.reference, "Reference anchor file");
  eval_cmd->add_option("--threads", threads, "Worker threads (0 = hardware)");
  add_output(eval_cmd, common.output);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*enroll_cmd) return cmd_enroll(manifest, common, out);
    if (*classify_cmd) return cmd_classify(inputs, common, out);
    if (*stream_cmd) return cmd_stream(common, in, out, err);
    if (*split_cmd) return cmd_split(split, train_out, test_out, common.output, out);
    if (*eval_cmd) return cmd_eval(split, train_ids, test_ids, common, threads, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}

}  // namespace handgest::cli
