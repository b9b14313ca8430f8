#include "shoeprint/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "shoeprint/error.hpp"
#include "shoeprint/rng.hpp"

namespace shoeprint {

EvaluationBatch::EvaluationBatch(std::vector<double> a, std::vector<double> p)
    : actual(std::move(a)), predicted(std::move(p)) {
  if (actual.empty()) throw ConfigError("evaluation batch must not be empty");
  if (actual.size() != predicted.size()) {
    throw ShapeError("evaluation batch: " + std::to_string(actual.size()) + " actual vs " +
                     std::to_string(predicted.size()) + " predicted values");
  }
}

double EvaluationBatch::delta(size_t i) const { return std::abs(actual[i] - predicted[i]); }

double cs_score(const EvaluationBatch& batch, int j) {
  if (j < 0) throw ConfigError("cs_score: threshold must be >= 0");
  long long within = 0;
  for (size_t i = 0; i < batch.size(); ++i) {
    if (batch.delta(i) <= static_cast<double>(j)) ++within;
  }
  return 100.0 * static_cast<double>(within) / static_cast<double>(batch.size());
}

double mcs_score(const EvaluationBatch& batch, int max_j) {
  if (max_j < 0) throw ConfigError("mcs_score: max threshold must be >= 0");
  double sum = 0.0;
  for (int j = 0; j <= max_j; ++j) sum += cs_score(batch, j);
  return sum / static_cast<double>(max_j + 1);
}

double mcs_score(const std::vector<double>& cs_values) {
  if (cs_values.empty()) throw ConfigError("mcs_score: no CS values");
  double sum = 0.0;
  for (double v : cs_values) sum += v;
  return sum / static_cast<double>(cs_values.size());
}

double mse(const EvaluationBatch& batch) {
  double sum = 0.0;
  for (size_t i = 0; i < batch.size(); ++i) {
    const double d = batch.actual[i] - batch.predicted[i];
    sum += d * d;
  }
  return sum / static_cast<double>(batch.size());
}

double mae(const EvaluationBatch& batch) {
  double sum = 0.0;
  for (size_t i = 0; i < batch.size(); ++i) sum += batch.delta(i);
  return sum / static_cast<double>(batch.size());
}

double percent_accuracy(const EvaluationBatch& batch, double age_min, double age_max) {
  if (age_max <= age_min) throw ConfigError("percent_accuracy: age_max must exceed age_min");
  const double raw = 100.0 * (1.0 - mae(batch) / (age_max - age_min));
  return std::clamp(raw, 0.0, 100.0);
}

std::vector<double> random_baseline(int n, int age_min, int age_max, std::uint64_t seed) {
  if (n < 1) throw ConfigError("random_baseline: need at least one sample");
  if (age_max < age_min) throw ConfigError("random_baseline: empty age range");
  Rng rng(seed);
  std::vector<double> guesses(static_cast<size_t>(n));
  for (auto& g : guesses) g = static_cast<double>(rng.uniform_int(age_min, age_max));
  return guesses;
}

void ClassificationCounts::add(Gender actual, Gender predicted) {
  if (actual == Gender::male) {
    (predicted == Gender::male ? male_as_male : male_as_female) += 1;
  } else {
    (predicted == Gender::male ? female_as_male : female_as_female) += 1;
  }
}

long long ClassificationCounts::total() const {
  return male_as_male + male_as_female + female_as_male + female_as_female;
}

namespace {

ClassMetrics class_metrics(long long tp, long long fp, long long fn) {
  ClassMetrics m;
  if (tp + fp == 0) {
    m.degenerate = true;
  } else {
    m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  if (tp + fn == 0) {
    m.degenerate = true;
  } else {
    m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
  if (m.precision + m.recall > 0.0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  } else {
    m.degenerate = true;
  }
  return m;
}

}  // namespace

ClassificationReport classification_report(const ClassificationCounts& counts) {
  if (counts.total() == 0) throw ConfigError("classification_report: no samples");
  ClassificationReport report;
  report.male = class_metrics(counts.male_as_male, counts.female_as_male, counts.male_as_female);
  report.female =
      class_metrics(counts.female_as_female, counts.male_as_female, counts.female_as_male);
  report.accuracy = 100.0 * static_cast<double>(counts.male_as_male + counts.female_as_female) /
                    static_cast<double>(counts.total());
  return report;
}

std::string metrics_csv(const std::vector<std::pair<std::string, double>>& rows) {
  std::ostringstream out;
  out << "metric,value\n";
  out.setf(std::ios::fixed);
  out.precision(4);
  for (const auto& [name, value] : rows) out << name << ',' << value << '\n';
  return out.str();
}

void write_metrics_csv(const std::vector<std::pair<std::string, double>>& rows,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << metrics_csv(rows);
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace shoeprint
