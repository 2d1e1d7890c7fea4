#include "eegprog/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace eegprog {

namespace {

// Block length (seconds) of the variance-modulation signal; matches the
// 5-minute analysis scale.
constexpr double kSignalBlockSeconds = 300.0;
constexpr double kSurvivorActiveProb = 0.65;
constexpr double kNonsurvivorActiveProb = 0.15;
constexpr double kDriftScale = 0.4;
constexpr double kDriftRho = 0.999;

}  // namespace

std::string to_string(FeatureFamily f) {
  switch (f) {
    case FeatureFamily::FFTSpectrogram: return "fft_spectrogram";
    case FeatureFamily::AEEG: return "aeeg";
    case FeatureFamily::RhythmicitySpectrogram: return "rhythmicity_spectrogram";
    case FeatureFamily::SuppressionRatio: return "suppression_ratio";
  }
  throw ValidationError("unknown FeatureFamily");
}

FeatureFamily feature_family_from_string(const std::string& s) {
  if (s == "fft_spectrogram") return FeatureFamily::FFTSpectrogram;
  if (s == "aeeg") return FeatureFamily::AEEG;
  if (s == "rhythmicity_spectrogram") return FeatureFamily::RhythmicitySpectrogram;
  if (s == "suppression_ratio") return FeatureFamily::SuppressionRatio;
  throw ValidationError("unknown feature family: " + s);
}

void PatientRecord::validate() const {
  if (patient_id.empty()) throw ValidationError("patient_id empty");
  if (label != 0 && label != 1) {
    throw ValidationError("label must be 0 or 1 for " + patient_id);
  }
  if (sample_period <= 0.0) {
    throw ValidationError("sample_period must be positive for " + patient_id);
  }
  if (channels.empty()) {
    throw ValidationError("record has no channels: " + patient_id);
  }
  const Eigen::Index d = channels.front().values.size();
  if (d <= 0) throw ValidationError("record has zero duration: " + patient_id);
  for (const auto& c : channels) {
    if (c.values.size() != d) {
      throw ValidationError("channel length mismatch in " + patient_id);
    }
  }
}

void SynthConfig::validate() const {
  if (n_patients <= 0) throw ConfigError("SynthConfig.n_patients must be positive");
  if (!(survivor_fraction > 0.0 && survivor_fraction < 1.0)) {
    throw ConfigError("SynthConfig.survivor_fraction must lie in (0,1)");
  }
  if (min_duration <= 0) throw ConfigError("SynthConfig.min_duration must be positive");
  if (min_duration > max_duration) {
    throw ConfigError("SynthConfig.min_duration must be <= max_duration");
  }
  if (sample_period <= 0.0) throw ConfigError("SynthConfig.sample_period must be positive");
  if (!(artifact_rate >= 0.0 && artifact_rate <= 1.0)) {
    throw ConfigError("SynthConfig.artifact_rate must lie in [0,1]");
  }
  if (artifact_magnitude < 0.0) {
    throw ConfigError("SynthConfig.artifact_magnitude must be non-negative");
  }
  if (fingerprint_strength < 0.0) {
    throw ConfigError("SynthConfig.fingerprint_strength must be non-negative");
  }
  if (signal_strength < 0.0) {
    throw ConfigError("SynthConfig.signal_strength must be non-negative");
  }
  if (noise_channels < 0) {
    throw ConfigError("SynthConfig.noise_channels must be non-negative");
  }
}

std::vector<ChannelSpec> channel_registry(int noise_channels) {
  std::vector<ChannelSpec> regs = {
      {FeatureFamily::FFTSpectrogram, "0-4Hz", "adjacent-differences", 12.0, 2.0, true},
      {FeatureFamily::AEEG, "broadband", "AV17", 25.0, 4.0, true},
      {FeatureFamily::RhythmicitySpectrogram, "0-4Hz", "adjacent-differences", 8.0, 1.5, true},
      {FeatureFamily::SuppressionRatio, "broadband", "adjacent-differences", 40.0, 6.0, true},
  };
  for (int i = 0; i < noise_channels; ++i) {
    regs.push_back({FeatureFamily::FFTSpectrogram,
                    "4-8Hz", "noise-" + std::to_string(i), 10.0, 2.0, false});
  }
  return regs;
}

std::vector<PatientRecord> generate_cohort(const SynthConfig& config) {
  config.validate();
  const int n = config.n_patients;
  const auto registry = channel_registry(config.noise_channels);

  // Exact survivor count, placement shuffled by seed.
  const int n_survivors =
      static_cast<int>(std::lround(n * config.survivor_fraction));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 label_rng(derive_seed(config.seed, 0xabe1));
  std::shuffle(order.begin(), order.end(), label_rng);
  std::vector<int> labels(n, 0);
  for (int i = 0; i < n_survivors; ++i) labels[order[i]] = 1;

  const int block_samples = std::max(
      1, static_cast<int>(std::lround(kSignalBlockSeconds / config.sample_period)));

  int id_width = 1;
  for (int v = n; v >= 10; v /= 10) ++id_width;

  std::vector<PatientRecord> records;
  records.reserve(n);
  for (int i = 0; i < n; ++i) {
    std::mt19937_64 rng(derive_seed(config.seed, static_cast<std::uint64_t>(i)));
    std::uniform_int_distribution<int> dur_dist(config.min_duration,
                                                config.max_duration);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    PatientRecord rec;
    {
      std::ostringstream oss;
      oss << 'p';
      std::string num = std::to_string(i);
      oss << std::string(id_width - num.size(), '0') << num;
      rec.patient_id = oss.str();
    }
    rec.label = labels[i];
    rec.sample_period = config.sample_period;
    const int duration = dur_dist(rng);

    const double active_prob =
        rec.label == 1 ? kSurvivorActiveProb : kNonsurvivorActiveProb;

    for (const auto& spec : registry) {
      FeatureChannel ch;
      ch.family = spec.family;
      ch.band = spec.band;
      ch.derivation = spec.derivation;
      ch.values.resize(duration);

      const double offset =
          config.fingerprint_strength * spec.base_sigma * gauss(rng);
      const double drift_sigma =
          kDriftScale * config.fingerprint_strength * spec.base_sigma;
      double drift = drift_sigma * gauss(rng);
      const double innov = drift_sigma * std::sqrt(1.0 - kDriftRho * kDriftRho);

      double sigma_block = spec.base_sigma;
      for (int t = 0; t < duration; ++t) {
        if (t % block_samples == 0) {
          const bool active = spec.informative && unif(rng) < active_prob;
          sigma_block =
              spec.base_sigma * (active ? 1.0 + config.signal_strength : 1.0);
        }
        drift = kDriftRho * drift + innov * gauss(rng);
        double x = spec.base_mean + offset + drift + sigma_block * gauss(rng);
        if (config.artifact_rate > 0.0 && unif(rng) < config.artifact_rate) {
          x *= config.artifact_magnitude;
        }
        ch.values[t] = x;
      }
      rec.channels.push_back(std::move(ch));
    }
    rec.validate();
    records.push_back(std::move(rec));
  }
  return records;
}

namespace {

template <typename T>
void write_raw(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw IoError("cohort sidecar truncated");
  return v;
}

void write_tag(std::ostream& os, const std::string& s) {
  write_raw<std::uint16_t>(os, static_cast<std::uint16_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_tag(std::istream& is) {
  const auto len = read_raw<std::uint16_t>(is);
  std::string s(len, '\0');
  is.read(s.data(), len);
  if (!is) throw IoError("cohort sidecar truncated");
  return s;
}

}  // namespace

std::filesystem::path save_cohort(const std::vector<PatientRecord>& records,
                                  const std::filesystem::path& dir) {
  if (records.empty()) throw ValidationError("save_cohort: empty cohort");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto manifest_path = dir / "cohort.csv";
  const auto sidecar_path = dir / "cohort.bin";

  std::ofstream manifest(manifest_path);
  if (!manifest) throw IoError("cannot write " + manifest_path.string());
  std::ofstream sidecar(sidecar_path, std::ios::binary);
  if (!sidecar) throw IoError("cannot write " + sidecar_path.string());

  manifest << "patient_id,label,duration,sample_period,n_channels\n";
  sidecar.write("COH1", 4);
  write_raw<std::uint32_t>(sidecar, static_cast<std::uint32_t>(records.size()));

  manifest.precision(17);
  for (const auto& rec : records) {
    rec.validate();
    manifest << rec.patient_id << ',' << rec.label << ',' << rec.duration()
             << ',' << rec.sample_period << ',' << rec.channels.size() << '\n';
    for (const auto& ch : rec.channels) {
      write_raw<std::uint8_t>(sidecar, static_cast<std::uint8_t>(ch.family));
      write_tag(sidecar, ch.band);
      write_tag(sidecar, ch.derivation);
      write_raw<std::uint64_t>(sidecar,
                               static_cast<std::uint64_t>(ch.values.size()));
      sidecar.write(reinterpret_cast<const char*>(ch.values.data()),
                    static_cast<std::streamsize>(ch.values.size() * sizeof(double)));
    }
  }
  if (!manifest || !sidecar) throw IoError("failed writing cohort files");
  return manifest_path;
}

std::vector<PatientRecord> load_cohort(const std::filesystem::path& manifest_path) {
  std::ifstream manifest(manifest_path);
  if (!manifest) {
    throw IoError("missing cohort manifest: " + manifest_path.string());
  }
  const auto sidecar_path = manifest_path.parent_path() / "cohort.bin";
  std::ifstream sidecar(sidecar_path, std::ios::binary);
  if (!sidecar) {
    throw IoError("missing cohort sidecar: " + sidecar_path.string());
  }
  char magic[4];
  sidecar.read(magic, 4);
  if (!sidecar || std::memcmp(magic, "COH1", 4) != 0) {
    throw IoError("bad cohort sidecar magic in " + sidecar_path.string());
  }
  const auto n = read_raw<std::uint32_t>(sidecar);

  std::string line;
  std::getline(manifest, line);
  if (line != "patient_id,label,duration,sample_period,n_channels") {
    throw IoError("malformed cohort manifest header: " + line);
  }

  std::vector<PatientRecord> records;
  std::vector<std::string> seen_ids;
  while (std::getline(manifest, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) throw IoError("malformed manifest row: " + line);

    PatientRecord rec;
    rec.patient_id = cells[0];
    Eigen::Index duration = 0;
    std::size_t n_channels = 0;
    try {
      rec.label = std::stoi(cells[1]);
      duration = std::stoll(cells[2]);
      rec.sample_period = std::stod(cells[3]);
      n_channels = std::stoul(cells[4]);
    } catch (const std::exception&) {
      throw IoError("malformed manifest row: " + line);
    }
    if (std::find(seen_ids.begin(), seen_ids.end(), rec.patient_id) !=
        seen_ids.end()) {
      throw ValidationError("duplicate patient_id in manifest: " + rec.patient_id);
    }
    seen_ids.push_back(rec.patient_id);

    for (std::size_t c = 0; c < n_channels; ++c) {
      FeatureChannel ch;
      ch.family = static_cast<FeatureFamily>(read_raw<std::uint8_t>(sidecar));
      ch.band = read_tag(sidecar);
      ch.derivation = read_tag(sidecar);
      const auto len = read_raw<std::uint64_t>(sidecar);
      if (static_cast<Eigen::Index>(len) != duration) {
        throw ValidationError("channel length mismatch for " + rec.patient_id);
      }
      ch.values.resize(static_cast<Eigen::Index>(len));
      sidecar.read(reinterpret_cast<char*>(ch.values.data()),
                   static_cast<std::streamsize>(len * sizeof(double)));
      if (!sidecar) throw IoError("cohort sidecar truncated");
      rec.channels.push_back(std::move(ch));
    }
    rec.validate();
    records.push_back(std::move(rec));
  }
  if (records.size() != n) {
    throw IoError("manifest row count disagrees with sidecar patient count");
  }
  return records;
}

bool cohort_equal(const std::vector<PatientRecord>& a,
                  const std::vector<PatientRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    if (x.patient_id != y.patient_id || x.label != y.label ||
        x.sample_period != y.sample_period ||
        x.channels.size() != y.channels.size()) {
      return false;
    }
    for (std::size_t c = 0; c < x.channels.size(); ++c) {
      const auto& cx = x.channels[c];
      const auto& cy = y.channels[c];
      if (cx.family != cy.family || cx.band != cy.band ||
          cx.derivation != cy.derivation ||
          cx.values.size() != cy.values.size()) {
        return false;
      }
      if ((cx.values.array() != cy.values.array()).any()) return false;
    }
  }
  return true;
}

}  // namespace eegprog
