#include "eegprog/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace eegprog {

namespace {

Eigen::Index samples_from_seconds(double seconds, double sample_period,
                                  const char* what) {
  if (seconds <= 0.0) {
    throw ConfigError(std::string(what) + " must be positive");
  }
  const double ratio = seconds / sample_period;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9) {
    throw ConfigError(std::string(what) +
                      " must be a positive multiple of sample_period");
  }
  return static_cast<Eigen::Index>(rounded);
}

}  // namespace

int count_windows(Eigen::Index duration_samples, Eigen::Index window_samples,
                  Eigen::Index stride_samples) {
  if (duration_samples < window_samples) return 0;
  return static_cast<int>((duration_samples - window_samples) / stride_samples + 1);
}

SliceResult slice_windows(const PatientRecord& record, double window_seconds,
                          double stride_seconds) {
  const Eigen::Index w =
      samples_from_seconds(window_seconds, record.sample_period, "window_seconds");
  const Eigen::Index s =
      samples_from_seconds(stride_seconds, record.sample_period, "stride_seconds");
  const Eigen::Index duration = record.duration();
  const auto n_channels = static_cast<Eigen::Index>(record.channels.size());

  SliceResult result;
  const int count = count_windows(duration, w, s);
  if (count == 0) {
    result.short_record = true;
    return result;
  }
  result.windows.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    WindowSlice slice;
    slice.patient_id = record.patient_id;
    slice.window_index = k;
    slice.start_sample = static_cast<Eigen::Index>(k) * s;
    slice.features.resize(n_channels, w);
    for (Eigen::Index c = 0; c < n_channels; ++c) {
      slice.features.row(c) =
          record.channels[static_cast<std::size_t>(c)].values.segment(
              slice.start_sample, w);
    }
    result.windows.push_back(std::move(slice));
  }
  return result;
}

std::string to_string(Role r) {
  switch (r) {
    case Role::Stage1Train: return "stage1_train";
    case Role::Stage2Train: return "stage2_train";
    case Role::Stage2Val: return "stage2_val";
    case Role::Test: return "test";
  }
  throw ValidationError("unknown Role");
}

Role role_from_string(const std::string& s) {
  if (s == "stage1_train") return Role::Stage1Train;
  if (s == "stage2_train") return Role::Stage2Train;
  if (s == "stage2_val") return Role::Stage2Val;
  if (s == "test") return Role::Test;
  throw ValidationError("unknown role: " + s);
}

std::vector<std::string> CohortSplit::ids_with_role(Role r) const {
  std::vector<std::string> out;
  for (const auto& [pid, role] : assignments) {
    if (role == r) out.push_back(pid);
  }
  return out;
}

bool CohortSplit::has_role(const std::string& patient_id, Role r) const {
  for (const auto& [pid, role] : assignments) {
    if (pid == patient_id && role == r) return true;
  }
  return false;
}

bool CohortSplit::is_partition_of(const std::vector<std::string>& ids) const {
  if (assignments.size() != ids.size()) return false;
  std::set<std::string> assigned;
  for (const auto& [pid, role] : assignments) {
    (void)role;
    if (!assigned.insert(pid).second) return false;
  }
  for (const auto& id : ids) {
    if (assigned.count(id) == 0) return false;
  }
  return true;
}

std::uint64_t CohortSplit::digest() const {
  auto sorted = assignments;
  std::sort(sorted.begin(), sorted.end());
  std::ostringstream oss;
  for (const auto& [pid, role] : sorted) {
    oss << pid << ':' << to_string(role) << '\n';
  }
  return fnv1a64(oss.str());
}

namespace {

// round(n*f1), round(n*f2), remainder — reproduces the 581/150/500 and
// 142/37/121 arithmetic exactly.
std::array<int, 3> role_counts(int n, const std::array<double, 3>& fractions) {
  int k1 = static_cast<int>(std::lround(n * fractions[0]));
  int k2 = static_cast<int>(std::lround(n * fractions[1]));
  k1 = std::clamp(k1, 0, n);
  k2 = std::clamp(k2, 0, n - k1);
  return {k1, k2, n - k1 - k2};
}

}  // namespace

CohortSplit split_patients(const std::vector<std::string>& patient_ids,
                           const std::vector<int>& labels,
                           const std::array<double, 3>& fractions,
                           std::uint64_t seed, bool stratified) {
  if (patient_ids.size() != labels.size()) {
    throw ValidationError("split_patients: ids/labels length mismatch");
  }
  if (patient_ids.size() < 3) {
    throw ValidationError("split_patients: cohort smaller than 3 patients");
  }
  const double sum = fractions[0] + fractions[1] + fractions[2];
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("split fractions must sum to 1");
  }

  CohortSplit split;
  split.seed = seed;
  split.fractions = fractions;

  auto assign_group = [&](std::vector<std::size_t> idx, std::uint64_t stream) {
    std::mt19937_64 rng(derive_seed(seed, stream));
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto counts = role_counts(static_cast<int>(idx.size()), fractions);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      Role role = Role::Test;
      if (static_cast<int>(i) < counts[0]) {
        role = Role::Stage1Train;
      } else if (static_cast<int>(i) < counts[0] + counts[1]) {
        // Stage-1 validation cohort; Stage-2 sub-split pending.
        role = Role::Stage2Val;
      }
      split.assignments.emplace_back(patient_ids[idx[i]], role);
    }
  };

  if (stratified) {
    std::vector<std::size_t> neg, pos;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      (labels[i] == 1 ? pos : neg).push_back(i);
    }
    assign_group(std::move(neg), 0);
    assign_group(std::move(pos), 1);
  } else {
    std::vector<std::size_t> idx(patient_ids.size());
    std::iota(idx.begin(), idx.end(), 0);
    assign_group(std::move(idx), 0);
  }
  std::sort(split.assignments.begin(), split.assignments.end());
  return split;
}

std::pair<std::vector<std::string>, std::vector<std::string>> split_stage2(
    const std::vector<std::string>& stage1_val_ids, double train_fraction,
    std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("stage2 train_fraction must lie in (0,1)");
  }
  auto ids = stage1_val_ids;
  std::mt19937_64 rng(derive_seed(seed, 0x57a6e2));
  std::shuffle(ids.begin(), ids.end(), rng);
  const auto k = static_cast<std::size_t>(
      std::lround(train_fraction * static_cast<double>(ids.size())));
  std::vector<std::string> train(ids.begin(), ids.begin() + static_cast<long>(k));
  std::vector<std::string> val(ids.begin() + static_cast<long>(k), ids.end());
  std::sort(train.begin(), train.end());
  std::sort(val.begin(), val.end());
  return {train, val};
}

void apply_stage2_split(CohortSplit& split, double train_fraction,
                        std::uint64_t seed) {
  const auto pending = split.ids_with_role(Role::Stage2Val);
  const auto [train_ids, val_ids] = split_stage2(pending, train_fraction, seed);
  const std::set<std::string> train_set(train_ids.begin(), train_ids.end());
  for (auto& [pid, role] : split.assignments) {
    if (role == Role::Stage2Val && train_set.count(pid) > 0) {
      role = Role::Stage2Train;
    }
  }
  split.stage2_train_fraction = train_fraction;
}

std::string to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::PatientOverlap: return "patient_overlap";
    case ViolationKind::WindowReuse: return "window_reuse";
    case ViolationKind::StatsContamination: return "stats_contamination";
  }
  throw ValidationError("unknown ViolationKind");
}

std::string LeakageReport::summary(std::size_t max_lines) const {
  std::ostringstream oss;
  oss << violations.size() << " leakage violation(s)";
  for (std::size_t i = 0; i < violations.size() && i < max_lines; ++i) {
    const auto& v = violations[i];
    oss << "\n  " << to_string(v.kind) << ' ' << v.patient_id;
    if (v.window_index >= 0) oss << " window " << v.window_index;
    if (!v.detail.empty()) oss << " (" << v.detail << ')';
  }
  if (violations.size() > max_lines) {
    oss << "\n  ... " << (violations.size() - max_lines) << " more";
  }
  return oss.str();
}

LeakageReport audit_leakage(const CohortSplit& split, const WindowWiring& wiring) {
  LeakageReport report;

  // Two roles for one patient.
  std::map<std::string, std::set<Role>> roles;
  for (const auto& [pid, role] : split.assignments) roles[pid].insert(role);
  std::set<std::string> overlap_flagged;
  for (const auto& [pid, rs] : roles) {
    if (rs.size() >= 2) {
      std::ostringstream detail;
      detail << "roles:";
      for (Role r : rs) detail << ' ' << to_string(r);
      report.violations.push_back(
          {ViolationKind::PatientOverlap, pid, -1, detail.str()});
      overlap_flagged.insert(pid);
    }
  }

  // Pool crossings per patient.
  std::map<std::string, std::set<int>> s1, s2;
  for (const auto& k : wiring.stage1_train) s1[k.patient_id].insert(k.window_index);
  for (const auto& k : wiring.stage2_train) s2[k.patient_id].insert(k.window_index);
  for (const auto& [pid, w1] : s1) {
    auto it = s2.find(pid);
    if (it == s2.end()) continue;
    const auto& w2 = it->second;
    std::vector<int> reused;
    std::set_intersection(w1.begin(), w1.end(), w2.begin(), w2.end(),
                          std::back_inserter(reused));
    for (int widx : reused) {
      report.violations.push_back({ViolationKind::WindowReuse, pid, widx,
                                   "window in both training pools"});
    }
    // Distinct windows on both sides means the patient itself crossed
    // stages; pure identical-key reuse is reported above only.
    const bool s1_extra = w1.size() > reused.size();
    const bool s2_extra = w2.size() > reused.size();
    if (s1_extra && s2_extra && overlap_flagged.count(pid) == 0) {
      report.violations.push_back({ViolationKind::PatientOverlap, pid, -1,
                                   "windows in both stages' training pools"});
    }
  }

  // Stats provenance outside Stage-1 training.
  for (const auto& pid : wiring.stats_patients) {
    if (!split.has_role(pid, Role::Stage1Train)) {
      report.violations.push_back({ViolationKind::StatsContamination, pid, -1,
                                   "normalization stats cite non-Stage1Train patient"});
    }
  }

  std::sort(report.violations.begin(), report.violations.end());
  return report;
}

LeakySplit make_leaky_split(const std::vector<PatientRecord>& cohort,
                            const CohortSplit& clean_split,
                            const std::map<std::string, int>& window_counts,
                            std::uint64_t seed) {
  if (cohort.size() < 20) {
    throw ValidationError("make_leaky_split: cohort smaller than 20 patients");
  }
  LeakySplit leaky;
  leaky.split = clean_split;

  // 50/30/20 scatter across stage-1 train, stage-2 train, stage-2 val.
  const double cum1 = 0.5, cum2 = 0.8;
  for (const auto& rec : cohort) {
    if (clean_split.has_role(rec.patient_id, Role::Test)) continue;
    auto it = window_counts.find(rec.patient_id);
    const int n = it == window_counts.end() ? 0 : it->second;
    if (n == 0) continue;
    std::mt19937_64 rng(derive_seed(seed, fnv1a64(rec.patient_id)));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<int> pools(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w) {
      const double u = unif(rng);
      pools[static_cast<std::size_t>(w)] = u < cum1 ? 0 : (u < cum2 ? 1 : 2);
    }
    // Guarantee every pool is hit when the record is long enough.
    if (n >= 3) {
      for (int p = 0; p < 3; ++p) {
        if (std::find(pools.begin(), pools.end(), p) == pools.end()) {
          pools[static_cast<std::size_t>(p)] = p;
        }
      }
    }
    leaky.window_pool[rec.patient_id] = std::move(pools);
  }
  return leaky;
}

}  // namespace eegprog
