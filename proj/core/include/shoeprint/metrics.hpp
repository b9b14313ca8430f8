#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "shoeprint/types.hpp"

namespace shoeprint {

// Paired ground-truth ages and predictions.
struct EvaluationBatch {
  std::vector<double> actual;
  std::vector<double> predicted;

  EvaluationBatch(std::vector<double> a, std::vector<double> p);

  size_t size() const { return actual.size(); }
  // absolute residual |y - y_hat|
  double delta(size_t i) const;
};

// Percentage of samples whose residual is at most j years (boundary counts).
double cs_score(const EvaluationBatch& batch, int j);

// Mean of cs_score over j = 0..J inclusive.
double mcs_score(const EvaluationBatch& batch, int max_j);
double mcs_score(const std::vector<double>& cs_values);

double mse(const EvaluationBatch& batch);
double mae(const EvaluationBatch& batch);

// 100 * (1 - MAE / (age_max - age_min)), clamped to [0, 100].
double percent_accuracy(const EvaluationBatch& batch, double age_min, double age_max);

// Uniform integer guesses over [age_min, age_max], both ends inclusive.
std::vector<double> random_baseline(int n, int age_min, int age_max, std::uint64_t seed);

// Binary gender confusion counts.
struct ClassificationCounts {
  long long male_as_male = 0;
  long long male_as_female = 0;
  long long female_as_male = 0;
  long long female_as_female = 0;

  void add(Gender actual, Gender predicted);
  long long total() const;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool degenerate = false;  // some denominator was zero
};

struct ClassificationReport {
  ClassMetrics male, female;
  double accuracy = 0.0;
};

ClassificationReport classification_report(const ClassificationCounts& counts);

// "metric,value" rows, fixed four decimals.
std::string metrics_csv(const std::vector<std::pair<std::string, double>>& rows);
void write_metrics_csv(const std::vector<std::pair<std::string, double>>& rows,
                       const std::filesystem::path& path);

}  // namespace shoeprint
