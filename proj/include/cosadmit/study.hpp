#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cosadmit/bounds.hpp"
#include "cosadmit/cos_expansion.hpp"
#include "cosadmit/rate_fit.hpp"
#include "cosadmit/tail_energy.hpp"

namespace cosadmit {

/// Sweep configuration. JSON field names match the member names.
///
/// Recognised `tolerances` keys:
///   quad_tol      moment quadrature target (default 1e-11)
///   slack_factor  multiplier on quad_error + k_tail_estimate (default 10)
///   chain_rel     relative slack for bound-to-bound comparisons (default 1e-10)
struct StudyConfig {
  std::string density;
  std::vector<double> L_values;
  std::vector<int> N_values;
  std::vector<double> p_values;
  int k_max = 4096;
  int grid_points = 401;
  std::map<std::string, double> tolerances;
  std::string output_path;
  int parallelism = 1;
  /// Subset of {"convergence", "admissibility"}; empty means both.
  std::vector<std::string> studies;
  /// Product dimension for the B_d part of the admissibility sweep (1 = off).
  int dimension = 1;
  int k_max_per_axis = 256;
  /// Wall-clock timings make reports differ run to run, so they are opt-in.
  bool record_timings = false;

  double tolerance(const std::string& key) const;
  bool wants(const std::string& study) const;
};

/// Checks every field and the p range against the density; throws
/// ValidationError naming the offending field.
void validate(const StudyConfig& cfg);

/// One recorded comparison lhs <= rhs + slack.
struct Assertion {
  std::string name;
  bool passed = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
};

struct ConvergenceCell {
  double L = 0.0;
  int N = 0;
  std::optional<ErrorReport> error;
  std::string failure;  // empty when the cell succeeded
  double seconds = 0.0;
};

struct ConvergenceFloor {
  double L = 0.0;
  std::optional<double> floor;  // min over N of l2_error
  int argmin_N = 0;
};

struct BoundCell {
  double p = 0.0;
  std::optional<BoundReport> report;
  std::string failure;
  std::vector<Assertion> checks;
};

struct AdmissibilityCell {
  double L = 0.0;
  std::optional<TailEnergyResult> tail;
  std::string failure;
  std::vector<BoundCell> bounds;
  double seconds = 0.0;
};

struct DimCell {
  double L = 0.0;
  std::optional<TailEnergyResult> tail;
  std::string failure;
  std::vector<std::pair<double, DimBoundReport>> bounds;  // (p, report)
  std::vector<Assertion> checks;
};

struct RateEntry {
  double p = 0.0;
  std::optional<RateFit> fit;
  std::string failure;
  std::string note;  // why no fit was attempted
  std::optional<double> theoretical_slope;  // 1 - 2 beta for power tails
  std::vector<Assertion> checks;
};

struct StudyReport {
  StudyConfig config;
  std::vector<ConvergenceCell> convergence;
  std::vector<ConvergenceFloor> floors;
  std::vector<AdmissibilityCell> admissibility;
  std::vector<DimCell> dimensional;
  std::vector<RateEntry> rates;
  /// Trend assertions across L (floor decrease, B decrease).
  std::vector<Assertion> trends;

  /// True when no assertion failed and no cell failed.
  bool all_passed() const;
};

StudyReport run_convergence_study(const StudyConfig& cfg);
StudyReport run_admissibility_study(const StudyConfig& cfg);
/// Runs the studies selected by cfg.studies into one report.
StudyReport run_study(const StudyConfig& cfg);

}  // namespace cosadmit
