#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "eegprog/common.hpp"

namespace eegprog {

enum class FeatureFamily : std::uint8_t {
  FFTSpectrogram = 0,
  AEEG = 1,
  RhythmicitySpectrogram = 2,
  SuppressionRatio = 3,
};

std::string to_string(FeatureFamily f);
FeatureFamily feature_family_from_string(const std::string& s);

// One derived-EEG feature trace: family + band + electrode derivation tags
// and the sample values.
struct FeatureChannel {
  FeatureFamily family = FeatureFamily::FFTSpectrogram;
  std::string band;        // e.g. "0-4Hz"
  std::string derivation;  // e.g. "adjacent-differences", "AV17"
  Vec values;
};

// Labeled multichannel feature time series for one patient. All channels
// share the same duration.
struct PatientRecord {
  std::string patient_id;
  int label = 0;  // 1 = woke up, 0 = poor outcome
  double sample_period = 1.0;
  std::vector<FeatureChannel> channels;

  Eigen::Index duration() const {
    return channels.empty() ? 0 : channels.front().values.size();
  }
  void validate() const;
};

struct SynthConfig {
  int n_patients = 300;
  double survivor_fraction = 0.25;
  int min_duration = 3600;   // samples
  int max_duration = 21600;  // samples
  double sample_period = 1.0;
  double artifact_rate = 0.001;
  double artifact_magnitude = 250.0;  // multiple of the channel mean
  double fingerprint_strength = 1.0;
  double signal_strength = 1.0;
  int noise_channels = 0;  // label-independent extra channels
  std::uint64_t seed = 42;

  void validate() const;
};

// Generates a reproducible synthetic cohort: exact survivor count
// round(n * survivor_fraction); survivors carry higher within-channel
// variability; every patient gets a label-independent fingerprint offset
// plus slow drift; heavy-tail artifact spikes at artifact_rate.
std::vector<PatientRecord> generate_cohort(const SynthConfig& config);

// Channel registry used by the generator: the four retained feature groups,
// followed by `noise_channels` pure-noise channels.
struct ChannelSpec {
  FeatureFamily family;
  std::string band;
  std::string derivation;
  double base_mean;
  double base_sigma;
  bool informative;
};
std::vector<ChannelSpec> channel_registry(int noise_channels);

// Cohort persistence: CSV manifest `patient_id,label,duration,sample_period,
// n_channels` plus a little-endian binary sidecar with channel tags and
// values. save_cohort returns the manifest path.
std::filesystem::path save_cohort(const std::vector<PatientRecord>& records,
                                  const std::filesystem::path& dir);
std::vector<PatientRecord> load_cohort(const std::filesystem::path& manifest);

bool cohort_equal(const std::vector<PatientRecord>& a,
                  const std::vector<PatientRecord>& b);

}  // namespace eegprog
