#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "eegprog/common.hpp"

namespace eegprog {

// Parallel arrays of patient scores and binary labels. Orientation: label 1
// is the positive (poor outcome) class and higher scores mean more likely
// poor outcome.
struct ScoredCohort {
  std::vector<std::string> patient_ids;
  std::vector<double> scores;
  std::vector<int> labels;

  std::size_t size() const { return scores.size(); }
  void validate() const;
  int positives() const;
  int negatives() const;
};

// Rank formulation: P(score_pos > score_neg) + 0.5 * P(tie).
double roc_auc(const ScoredCohort& cohort);

struct ConfusionMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;  // no predicted positives
};

// Predicted positive iff score >= threshold.
ConfusionMetrics confusion_metrics(const ScoredCohort& cohort, double threshold);

// Maximum sensitivity over thresholds whose specificity >= spec_min; the
// trivial all-negative threshold always qualifies with sensitivity 0.
double sensitivity_at_specificity(const ScoredCohort& cohort, double spec_min);

double balanced_accuracy(const ScoredCohort& cohort, double threshold);

// 2 * (BA - 0.5), clamped below at 0.
double correlation_score(double balanced_accuracy);

using MetricFn = std::function<double(const ScoredCohort&)>;

struct BootstrapCi {
  double lo = 0.0;
  double hi = 0.0;
  int redraws = 0;  // single-class resamples that were redrawn
};

// Percentile bootstrap over whole patients, 2.5/97.5. Resamples lacking a
// class are redrawn within a 10x draw budget.
BootstrapCi bootstrap_ci(const ScoredCohort& cohort, const MetricFn& metric,
                         int n_resamples, std::uint64_t seed);

struct MetricEntry {
  double point = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool flagged = false;  // degenerate value (e.g. precision with no positives)
};

struct MetricsReport {
  std::map<std::string, MetricEntry> metrics;
  int n_resamples = 0;
  std::uint64_t seed = 0;
  bool leaky = false;
  std::string positive_class = "poor_outcome";
};

// Point estimates + bootstrap CIs for the full metric suite: auc, accuracy,
// precision, recall, f1, sens_at_spec95, sens_at_spec99, balanced_accuracy,
// correlation_score.
MetricsReport compute_metrics_report(const ScoredCohort& cohort, double threshold,
                                     int n_resamples, std::uint64_t seed);

}  // namespace eegprog
