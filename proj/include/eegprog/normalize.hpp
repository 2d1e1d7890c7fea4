#pragma once

#include <vector>

#include "eegprog/common.hpp"

namespace eegprog {

// One row of the normalization-strategy table: optional signed-log
// compression followed by percentile min-max scaling.
struct NormalizationSpec {
  bool log_transform = false;
  bool truncate = true;
  double p_low = 1.0;
  double p_high = 99.0;

  void validate() const;
};

// Scaling bounds fitted on training data only.
struct ChannelStats {
  double lo = 0.0;
  double hi = 0.0;
};

// Percentile p in [0,100] of the values, by sorting + linear interpolation
// between order statistics.
double percentile(std::vector<double> values, double p);

// y = sign(x) * log(1 + |x|), elementwise. Monotone and defined for all
// reals, so zeros and negative derived features are safe.
Arr log_compress(const Arr& values);
double log_compress(double x);

// Fit lo/hi for one channel group from training values only. Values are
// log-compressed first when the spec says so; bounds are the spec's
// percentiles, or plain min/max when truncate is off.
ChannelStats fit_stats(const std::vector<double>& training_values,
                       const NormalizationSpec& spec);

// clamp((f(x) - lo) / (hi - lo), 0, 1); degenerate lo == hi maps to 0.5.
Arr apply_normalization(const Arr& values, const ChannelStats& stats,
                        const NormalizationSpec& spec);
double apply_normalization(double x, const ChannelStats& stats,
                           const NormalizationSpec& spec);

// The six strategies in table order: (log off/on) x (no truncation, 1-99,
// 5-95).
std::vector<NormalizationSpec> enumerate_strategies();

}  // namespace eegprog
