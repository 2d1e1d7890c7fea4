#include "eegprog/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "eegprog/normalize.hpp"  // percentile

namespace eegprog {

void ScoredCohort::validate() const {
  if (scores.size() != labels.size() ||
      (!patient_ids.empty() && patient_ids.size() != scores.size())) {
    throw ValidationError("ScoredCohort: parallel array length mismatch");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) throw ValidationError("ScoredCohort: non-finite score");
  }
  for (int l : labels) {
    if (l != 0 && l != 1) throw ValidationError("ScoredCohort: label must be 0/1");
  }
}

int ScoredCohort::positives() const {
  return static_cast<int>(std::count(labels.begin(), labels.end(), 1));
}

int ScoredCohort::negatives() const {
  return static_cast<int>(labels.size()) - positives();
}

double roc_auc(const ScoredCohort& cohort) {
  cohort.validate();
  const int n_pos = cohort.positives();
  const int n_neg = cohort.negatives();
  if (n_pos == 0 || n_neg == 0) {
    throw DegenerateCohortError("roc_auc: needs both classes present");
  }

  // Average ranks with ties, then the Mann-Whitney identity. Rank sums stay
  // exact in doubles (integers and halves), so this matches the pairwise
  // count bit for bit.
  const std::size_t n = cohort.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cohort.scores[a] < cohort.scores[b];
  });

  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && cohort.scores[order[j]] == cohort.scores[order[i]]) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k) {
      if (cohort.labels[order[k]] == 1) pos_rank_sum += avg_rank;
    }
    i = j;
  }
  const double u = pos_rank_sum - 0.5 * n_pos * (n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

ConfusionMetrics confusion_metrics(const ScoredCohort& cohort, double threshold) {
  cohort.validate();
  if (cohort.positives() == 0 || cohort.negatives() == 0) {
    throw DegenerateCohortError("confusion_metrics: needs both classes present");
  }
  int tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    const bool pred = cohort.scores[i] >= threshold;
    if (pred) {
      (cohort.labels[i] == 1 ? tp : fp)++;
    } else {
      (cohort.labels[i] == 1 ? fn : tn)++;
    }
  }
  ConfusionMetrics m;
  m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(cohort.size());
  if (tp + fp == 0) {
    m.precision = 0.0;
    m.precision_undefined = true;
  } else {
    m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  m.f1 = (m.precision + m.recall) == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

double sensitivity_at_specificity(const ScoredCohort& cohort, double spec_min) {
  cohort.validate();
  const int n_pos = cohort.positives();
  const int n_neg = cohort.negatives();
  if (n_neg == 0) {
    throw DegenerateCohortError(
        "sensitivity_at_specificity: undefined without negative patients");
  }
  if (n_pos == 0) {
    throw DegenerateCohortError(
        "sensitivity_at_specificity: undefined without positive patients");
  }

  // Sweep thresholds downward through the distinct scores; the implied
  // threshold set is the midpoints between consecutive distinct scores plus
  // +/- infinity sentinels. Start from the all-negative sentinel, which
  // always satisfies the constraint with sensitivity 0.
  std::vector<std::size_t> order(cohort.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cohort.scores[a] > cohort.scores[b];
  });

  double best = 0.0;
  int tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() &&
           cohort.scores[order[j]] == cohort.scores[order[i]]) {
      if (cohort.labels[order[j]] == 1) ++tp; else ++fp;
      ++j;
    }
    // Threshold just below scores[order[i]]: everything seen so far is
    // predicted positive.
    const double specificity =
        static_cast<double>(n_neg - fp) / static_cast<double>(n_neg);
    if (specificity >= spec_min) {
      best = std::max(best, static_cast<double>(tp) / static_cast<double>(n_pos));
    }
    i = j;
  }
  return best;
}

double balanced_accuracy(const ScoredCohort& cohort, double threshold) {
  cohort.validate();
  if (cohort.positives() == 0 || cohort.negatives() == 0) {
    throw DegenerateCohortError("balanced_accuracy: needs both classes present");
  }
  int tp = 0, fn = 0, tn = 0, fp = 0;
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    const bool pred = cohort.scores[i] >= threshold;
    if (cohort.labels[i] == 1) {
      (pred ? tp : fn)++;
    } else {
      (pred ? fp : tn)++;
    }
  }
  const double sens = static_cast<double>(tp) / static_cast<double>(tp + fn);
  const double spec = static_cast<double>(tn) / static_cast<double>(tn + fp);
  return 0.5 * (sens + spec);
}

double correlation_score(double balanced_accuracy) {
  if (!(balanced_accuracy >= 0.0 && balanced_accuracy <= 1.0)) {
    throw ConfigError("correlation_score: balanced accuracy must lie in [0,1]");
  }
  return std::max(0.0, 2.0 * (balanced_accuracy - 0.5));
}

BootstrapCi bootstrap_ci(const ScoredCohort& cohort, const MetricFn& metric,
                         int n_resamples, std::uint64_t seed) {
  cohort.validate();
  if (n_resamples < 100) {
    throw ConfigError("bootstrap_ci: n_resamples must be >= 100");
  }
  const std::size_t n = cohort.size();
  if (n == 0) throw DegenerateCohortError("bootstrap_ci: empty cohort");

  BootstrapCi ci;
  std::vector<double> stats;
  stats.reserve(static_cast<std::size_t>(n_resamples));
  const long budget = 10L * n_resamples;
  long draws = 0;
  std::uint64_t resample_index = 0;
  while (stats.size() < static_cast<std::size_t>(n_resamples)) {
    if (draws >= budget) {
      throw DegenerateCohortError(
          "bootstrap_ci: redraw budget exhausted; cohort too degenerate");
    }
    ++draws;
    std::mt19937_64 rng(derive_seed(seed, resample_index++));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    ScoredCohort resample;
    resample.scores.reserve(n);
    resample.labels.reserve(n);
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = pick(rng);
      resample.scores.push_back(cohort.scores[k]);
      resample.labels.push_back(cohort.labels[k]);
      (cohort.labels[k] == 1 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) {
      ++ci.redraws;
      continue;
    }
    stats.push_back(metric(resample));
  }
  ci.lo = percentile(stats, 2.5);
  ci.hi = percentile(std::move(stats), 97.5);
  return ci;
}

MetricsReport compute_metrics_report(const ScoredCohort& cohort, double threshold,
                                     int n_resamples, std::uint64_t seed) {
  MetricsReport report;
  report.n_resamples = n_resamples;
  report.seed = seed;

  struct Named {
    const char* name;
    MetricFn fn;
    bool flagged = false;
  };
  std::vector<Named> entries;
  entries.push_back({"auc", [](const ScoredCohort& c) { return roc_auc(c); }});
  const auto conf = confusion_metrics(cohort, threshold);
  entries.push_back({"accuracy", [threshold](const ScoredCohort& c) {
                       return confusion_metrics(c, threshold).accuracy;
                     }});
  entries.push_back({"precision",
                     [threshold](const ScoredCohort& c) {
                       return confusion_metrics(c, threshold).precision;
                     },
                     conf.precision_undefined});
  entries.push_back({"recall", [threshold](const ScoredCohort& c) {
                       return confusion_metrics(c, threshold).recall;
                     }});
  entries.push_back({"f1", [threshold](const ScoredCohort& c) {
                       return confusion_metrics(c, threshold).f1;
                     }});
  entries.push_back({"sens_at_spec95", [](const ScoredCohort& c) {
                       return sensitivity_at_specificity(c, 0.95);
                     }});
  entries.push_back({"sens_at_spec99", [](const ScoredCohort& c) {
                       return sensitivity_at_specificity(c, 0.99);
                     }});
  entries.push_back({"balanced_accuracy", [threshold](const ScoredCohort& c) {
                       return balanced_accuracy(c, threshold);
                     }});
  entries.push_back({"correlation_score", [threshold](const ScoredCohort& c) {
                       return correlation_score(balanced_accuracy(c, threshold));
                     }});

  std::uint64_t metric_index = 0;
  for (auto& e : entries) {
    MetricEntry entry;
    entry.point = e.fn(cohort);
    entry.flagged = e.flagged;
    const auto ci =
        bootstrap_ci(cohort, e.fn, n_resamples, derive_seed(seed, metric_index++));
    entry.ci_low = ci.lo;
    entry.ci_high = ci.hi;
    report.metrics[e.name] = entry;
  }
  return report;
}

}  // namespace eegprog
