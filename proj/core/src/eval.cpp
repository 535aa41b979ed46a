#include "handgest/eval.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "handgest/classifier.hpp"
#include "handgest/errors.hpp"
#include "json_util.hpp"

namespace handgest {

namespace {

constexpr std::ptrdiff_t kRejected = -1;

std::size_t index_of(const std::vector<std::string>& labels, const std::string& label) {
  return static_cast<std::size_t>(
      std::lower_bound(labels.begin(), labels.end(), label) - labels.begin());
}

}  // namespace

void finalize_report(EvalReport& report) {
  const std::size_t n = report.labels.size();
  report.per_class.assign(n, ClassMetrics{});
  report.scored = report.correct = report.rejected = 0;
  for (std::size_t i = 0; i < n; ++i) report.per_class[i].label = report.labels[i];
  for (std::size_t t = 0; t < n; ++t) {
    auto& m = report.per_class[t];
    for (std::size_t p = 0; p < n; ++p) {
      m.scored += report.confusion[t][p];
      report.per_class[p].predicted += report.confusion[t][p];
    }
    m.support = m.scored + report.confusion[t][n];
    m.correct = report.confusion[t][t];
    report.scored += m.scored;
    report.correct += m.correct;
    report.rejected += report.confusion[t][n];
  }
  for (auto& m : report.per_class) {
    m.precision = m.predicted ? static_cast<double>(m.correct) / m.predicted : 0.0;
    m.recall = m.scored ? static_cast<double>(m.correct) / m.scored : 0.0;
  }
  report.accuracy =
      report.scored ? static_cast<double>(report.correct) / report.scored : 0.0;
}

EvalReport evaluate(const DatasetManifest& train, const DatasetManifest& test,
                    const EvalConfig& config) {
  if (train.empty()) throw EmptyTrain();
  if (test.empty()) throw EmptyTest();

  Gallery gallery;
  const auto enrolled = enroll(train, config.reference, gallery);
  if (gallery.empty()) throw EmptyTrain();

  EvalReport report;
  std::set<std::string> labels;
  for (const auto& r : train.records()) labels.insert(r.label);
  for (const auto& r : test.records()) labels.insert(r.label);
  report.labels.assign(labels.begin(), labels.end());
  report.train_size = train.size();
  report.train_rejected = enrolled.rejected.size();
  report.test_size = test.size();
  report.seed = config.seed;

  // Per-record predicted column; workers write disjoint slots, so the final
  // tally does not depend on scheduling.
  const auto& records = test.records();
  std::vector<std::ptrdiff_t> predicted(records.size(), kRejected);
  const ClassifierConfig classify_config{1, std::numeric_limits<double>::infinity()};
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto lm = resolve_landmarks(records[i]);
      if (!lm) continue;
      const auto p = classify(gallery, *lm, config.reference, classify_config);
      if (p.is_match()) {
        predicted[i] = static_cast<std::ptrdiff_t>(index_of(report.labels, *p.label));
      }
    }
  };

  unsigned threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(records.size()));
  if (threads == 1) {
    work(0, records.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (records.size() + threads - 1) / threads;
    for (std::size_t begin = 0; begin < records.size(); begin += chunk) {
      pool.emplace_back(work, begin, std::min(records.size(), begin + chunk));
    }
  }

  const std::size_t n = report.labels.size();
  report.confusion.assign(n, std::vector<std::size_t>(n + 1, 0));
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto t = index_of(report.labels, records[i].label);
    if (predicted[i] == kRejected) {
      ++report.confusion[t][n];
      report.rejected_ids.push_back(records[i].source_id);
    } else {
      ++report.confusion[t][static_cast<std::size_t>(predicted[i])];
    }
  }
  finalize_report(report);
  return report;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "text") return ReportFormat::kText;
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  throw std::invalid_argument("unknown output format '" + std::string(name) + "'");
}

namespace {

std::string percent(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v * 100.0 << '%';
  return os.str();
}

std::string render_text(const EvalReport& r) {
  std::ostringstream os;
  os << "accuracy: " << percent(r.accuracy) << " (" << r.correct << "/" << r.scored
     << " scored, " << r.rejected << " rejected)\n";
  os << "train: " << r.train_size << " (" << r.train_rejected << " rejected)  test: "
     << r.test_size;
  if (r.seed) os << "  seed: " << *r.seed;
  os << "\n\n";

  std::size_t label_w = std::string_view("rejected").size();
  for (const auto& l : r.labels) label_w = std::max(label_w, l.size());
  os << std::left << std::setw(static_cast<int>(label_w)) << "class" << std::right
     << std::setw(9) << "support" << std::setw(11) << "precision" << std::setw(9)
     << "recall" << '\n';
  for (const auto& m : r.per_class) {
    os << std::left << std::setw(static_cast<int>(label_w)) << m.label << std::right
       << std::setw(9) << m.support << std::setw(11) << percent(m.precision)
       << std::setw(9) << percent(m.recall) << '\n';
  }

  // Confusion matrix with column k labelled by index to keep rows narrow.
  os << "\nconfusion (rows = true, columns = predicted):\n";
  std::size_t cell_w = 4;
  for (const auto& row : r.confusion) {
    for (auto c : row) cell_w = std::max(cell_w, std::to_string(c).size() + 1);
  }
  os << std::setw(static_cast<int>(label_w + 5)) << "";
  for (std::size_t i = 0; i < r.labels.size(); ++i) {
    os << std::setw(static_cast<int>(cell_w)) << i;
  }
  os << std::setw(static_cast<int>(cell_w)) << "rej" << '\n';
  for (std::size_t t = 0; t < r.labels.size(); ++t) {
    os << std::setw(3) << t << "  " << std::left << std::setw(static_cast<int>(label_w))
       << r.labels[t] << std::right;
    for (auto c : r.confusion[t]) os << std::setw(static_cast<int>(cell_w)) << c;
    os << '\n';
  }
  return os.str();
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

std::string render_csv(const EvalReport& r) {
  std::ostringstream os;
  os << "true\\predicted";
  for (const auto& l : r.labels) os << ',' << csv_field(l);
  os << ",rejected\n";
  for (std::size_t t = 0; t < r.labels.size(); ++t) {
    os << csv_field(r.labels[t]);
    for (auto c : r.confusion[t]) os << ',' << c;
    os << '\n';
  }
  return os.str();
}

nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["accuracy"] = r.accuracy;
  j["scored"] = r.scored;
  j["correct"] = r.correct;
  j["rejected"] = r.rejected;
  j["train_size"] = r.train_size;
  j["train_rejected"] = r.train_rejected;
  j["test_size"] = r.test_size;
  j["seed"] = r.seed ? nlohmann::ordered_json(*r.seed) : nlohmann::ordered_json(nullptr);
  j["labels"] = r.labels;
  j["confusion"] = r.confusion;
  auto per = nlohmann::ordered_json::array();
  for (const auto& m : r.per_class) {
    per.push_back({{"label", m.label},
                   {"support", m.support},
                   {"scored", m.scored},
                   {"correct", m.correct},
                   {"predicted", m.predicted},
                   {"precision", m.precision},
                   {"recall", m.recall}});
  }
  j["per_class"] = std::move(per);
  j["rejected_ids"] = r.rejected_ids;
  return j;
}

}  // namespace

std::string render_report(const EvalReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::kText:
      return render_text(report);
    case ReportFormat::kCsv:
      return render_csv(report);
    case ReportFormat::kJson:
      break;
  }
  return to_json(report).dump(2) + "\n";
}

EvalReport report_from_json(std::string_view json_text) {
  const auto j = detail::parse_object(json_text, 0);
  EvalReport r;
  try {
    r.accuracy = j.at("accuracy").get<double>();
    r.scored = j.at("scored").get<std::size_t>();
    r.correct = j.at("correct").get<std::size_t>();
    r.rejected = j.at("rejected").get<std::size_t>();
    r.train_size = j.at("train_size").get<std::size_t>();
    r.train_rejected = j.at("train_rejected").get<std::size_t>();
    r.test_size = j.at("test_size").get<std::size_t>();
    if (!j.at("seed").is_null()) r.seed = j.at("seed").get<std::uint64_t>();
    r.labels = j.at("labels").get<std::vector<std::string>>();
    r.confusion = j.at("confusion").get<std::vector<std::vector<std::size_t>>>();
    for (const auto& m : j.at("per_class")) {
      r.per_class.push_back({m.at("label").get<std::string>(),
                             m.at("support").get<std::size_t>(),
                             m.at("scored").get<std::size_t>(),
                             m.at("correct").get<std::size_t>(),
                             m.at("predicted").get<std::size_t>(),
                             m.at("precision").get<double>(),
                             m.at("recall").get<double>()});
    }
    r.rejected_ids = j.at("rejected_ids").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(0, std::string("malformed report: ") + e.what());
  }
  return r;
}

}  // namespace handgest
