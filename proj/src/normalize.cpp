#include "eegprog/normalize.hpp"

#include <algorithm>
#include <cmath>

namespace eegprog {

void NormalizationSpec::validate() const {
  if (!(p_low >= 0.0 && p_low <= 100.0)) {
    throw ConfigError("NormalizationSpec.p_low must lie in [0,100]");
  }
  if (!(p_high >= 0.0 && p_high <= 100.0)) {
    throw ConfigError("NormalizationSpec.p_high must lie in [0,100]");
  }
  if (!(p_low < p_high)) {
    throw ConfigError("NormalizationSpec.p_low must be < p_high");
  }
  if (!truncate && (p_low != 0.0 || p_high != 100.0)) {
    throw ConfigError(
        "NormalizationSpec: truncate=false requires (p_low,p_high)=(0,100)");
  }
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw ValidationError("percentile: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n == 1) return values[0];
  const double pos = p / 100.0 * static_cast<double>(n - 1);
  const auto lower = static_cast<std::size_t>(std::floor(pos));
  const auto upper = std::min(lower + 1, n - 1);
  const double frac = pos - static_cast<double>(lower);
  return values[lower] + frac * (values[upper] - values[lower]);
}

double log_compress(double x) {
  return x >= 0.0 ? std::log1p(x) : -std::log1p(-x);
}

Arr log_compress(const Arr& values) {
  return values.unaryExpr([](double x) { return log_compress(x); });
}

ChannelStats fit_stats(const std::vector<double>& training_values,
                       const NormalizationSpec& spec) {
  spec.validate();
  if (training_values.empty()) {
    throw ValidationError("fit_stats: empty training values");
  }
  std::vector<double> vals;
  vals.reserve(training_values.size());
  for (double v : training_values) {
    if (std::isnan(v)) continue;
    vals.push_back(spec.log_transform ? log_compress(v) : v);
  }
  if (vals.empty()) throw ValidationError("fit_stats: all-NaN training values");

  ChannelStats stats;
  if (spec.truncate) {
    stats.lo = percentile(vals, spec.p_low);
    stats.hi = percentile(vals, spec.p_high);
  } else {
    auto [mn, mx] = std::minmax_element(vals.begin(), vals.end());
    stats.lo = *mn;
    stats.hi = *mx;
  }
  return stats;
}

double apply_normalization(double x, const ChannelStats& stats,
                           const NormalizationSpec& spec) {
  if (stats.lo == stats.hi) return 0.5;
  const double f = spec.log_transform ? log_compress(x) : x;
  const double y = (f - stats.lo) / (stats.hi - stats.lo);
  return std::clamp(y, 0.0, 1.0);
}

Arr apply_normalization(const Arr& values, const ChannelStats& stats,
                        const NormalizationSpec& spec) {
  return values.unaryExpr(
      [&](double x) { return apply_normalization(x, stats, spec); });
}

std::vector<NormalizationSpec> enumerate_strategies() {
  std::vector<NormalizationSpec> out;
  out.push_back({false, false, 0.0, 100.0});
  out.push_back({true, false, 0.0, 100.0});
  out.push_back({false, true, 1.0, 99.0});
  out.push_back({true, true, 1.0, 99.0});
  out.push_back({false, true, 5.0, 95.0});
  out.push_back({true, true, 5.0, 95.0});
  return out;
}

}  // namespace eegprog
