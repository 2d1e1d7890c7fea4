#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "eegprog/cohort.hpp"
#include "eegprog/common.hpp"

namespace eegprog {

// One 5-minute segment of one patient's features, channels x window length.
struct WindowSlice {
  std::string patient_id;
  int window_index = 0;
  Eigen::Index start_sample = 0;
  Mat features;
};

struct SliceResult {
  std::vector<WindowSlice> windows;
  bool short_record = false;  // record shorter than one window
};

// Non-overlapping tiling at stride = window; incomplete tail dropped.
SliceResult slice_windows(const PatientRecord& record, double window_seconds,
                          double stride_seconds);

// Window count without materializing features.
int count_windows(Eigen::Index duration_samples, Eigen::Index window_samples,
                  Eigen::Index stride_samples);

enum class Role { Stage1Train, Stage2Train, Stage2Val, Test };

std::string to_string(Role r);
Role role_from_string(const std::string& s);

// Patient -> role assignment across both stages plus test. Stored as an
// ordered list so that constructed (intentionally broken) splits can place a
// patient in two roles for audit tests; clean splits assign each patient
// exactly once.
struct CohortSplit {
  std::vector<std::pair<std::string, Role>> assignments;
  std::uint64_t seed = 0;
  std::array<double, 3> fractions{};  // stage1_train, stage1_val, test
  double stage2_train_fraction = 0.6;

  std::vector<std::string> ids_with_role(Role r) const;
  bool has_role(const std::string& patient_id, Role r) const;
  // Partition check against a cohort id list: every id exactly one role.
  bool is_partition_of(const std::vector<std::string>& ids) const;
  std::uint64_t digest() const;
};

// Patient-level split into (stage1_train, stage1_val, test); the stage-1
// validation cohort is returned with role Stage2Val pending the 60/40
// sub-split. Counts: round(n*f1), round(n*f2), remainder. Stratified mode
// applies the same arithmetic per label class.
CohortSplit split_patients(const std::vector<std::string>& patient_ids,
                           const std::vector<int>& labels,
                           const std::array<double, 3>& fractions,
                           std::uint64_t seed, bool stratified);

// 60/40 partition of the stage-1 validation cohort; |train| = round(f*n).
std::pair<std::vector<std::string>, std::vector<std::string>> split_stage2(
    const std::vector<std::string>& stage1_val_ids, double train_fraction,
    std::uint64_t seed);

// Applies split_stage2 in place: Stage2Val-pending ids get their final roles.
void apply_stage2_split(CohortSplit& split, double train_fraction,
                        std::uint64_t seed);

struct WindowKey {
  std::string patient_id;
  int window_index = 0;
  auto operator<=>(const WindowKey&) const = default;
};

// Window-level training pools plus normalization-stats provenance; the
// surface audited for leakage.
struct WindowWiring {
  std::vector<WindowKey> stage1_train;
  std::vector<WindowKey> stage2_train;
  std::vector<WindowKey> stage2_val;
  std::vector<std::string> stats_patients;  // patients whose values fit stats
};

enum class ViolationKind { PatientOverlap, WindowReuse, StatsContamination };

std::string to_string(ViolationKind k);

struct LeakageViolation {
  ViolationKind kind;
  std::string patient_id;
  int window_index = -1;  // set for WindowReuse
  std::string detail;

  bool operator==(const LeakageViolation& o) const {
    return kind == o.kind && patient_id == o.patient_id &&
           window_index == o.window_index;
  }
  bool operator<(const LeakageViolation& o) const {
    return std::tie(kind, patient_id, window_index) <
           std::tie(o.kind, o.patient_id, o.window_index);
  }
};

struct LeakageReport {
  std::vector<LeakageViolation> violations;
  bool empty() const { return violations.empty(); }
  std::string summary(std::size_t max_lines = 8) const;
};

// Audits the three leakage pathways:
//  - PatientOverlap: a patient holds two roles, or contributes distinct
//    windows to both stages' training pools,
//  - WindowReuse: an identical window key sits in both training pools,
//  - StatsContamination: normalization stats cite a non-Stage1Train patient.
LeakageReport audit_leakage(const CohortSplit& split, const WindowWiring& wiring);

// Same patient-level roles as the clean split, but every non-test patient's
// windows are scattered across the stage-1 training, stage-2 training, and
// stage-2 validation pools.
struct LeakySplit {
  CohortSplit split;
  // patient_id -> pool index (0 = stage1_train, 1 = stage2_train,
  // 2 = stage2_val) per window_index.
  std::map<std::string, std::vector<int>> window_pool;
};

LeakySplit make_leaky_split(const std::vector<PatientRecord>& cohort,
                            const CohortSplit& clean_split,
                            const std::map<std::string, int>& window_counts,
                            std::uint64_t seed);

}  // namespace eegprog
