#ifndef NEWTONBO_RUN_RECORD_HPP
#define NEWTONBO_RUN_RECORD_HPP

#include "newtonbo/types.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace newtonbo {

/// One objective evaluation. Fields that do not apply to a row (trust-region
/// data for design points and baselines) are NaN; tr_id is -1 then.
struct EvalRow {
  long eval_index = 0;
  int iteration = 0;
  int tr_id = -1;
  Vector point;
  double value = 0.0;
  double best_so_far = 0.0;
  double delta = std::numeric_limits<double>::quiet_NaN();
  double grad_norm = std::numeric_limits<double>::quiet_NaN();
  double lambda = std::numeric_limits<double>::quiet_NaN();
  bool restart_flag = false;
};

/// Diagnostic copy of the uniform-bound quantities for the final GP fit.
struct BoundDiagnostic {
  double tau;
  double delta;
  double log_covering_count;
  double beta;
  double L_k;
  double L_mu;
  double omega_sigma;
  double L_f_hat;
  double gamma;
};

struct RunSummary {
  std::string method;
  std::uint64_t seed = 0;
  double best_value = std::numeric_limits<double>::infinity();
  Vector best_point;
  double wall_time_s = 0.0;
  int iterations = 0;
  int restarts = 0;
  int restart_fallbacks = 0;
  int fit_recoveries = 0;
  bool aborted = false;
  std::string abort_reason;
  std::map<std::string, std::string> config;
  std::optional<BoundDiagnostic> diagnostics;
};

/// Full history of one seeded run. best_so_far is the running minimum of
/// value, and rows.size() equals the number of evaluations.
struct RunRecord {
  std::vector<EvalRow> rows;
  RunSummary summary;

  /// Appends a row, assigning eval_index and best_so_far, and keeps the
  /// summary's best value/point in sync.
  EvalRow& push(EvalRow row) {
    row.eval_index = static_cast<long>(rows.size());
    const double prev = rows.empty() ? std::numeric_limits<double>::infinity() : rows.back().best_so_far;
    row.best_so_far = std::min(prev, row.value);
    if (row.value < summary.best_value) {
      summary.best_value = row.value;
      summary.best_point = row.point;
    }
    rows.push_back(std::move(row));
    return rows.back();
  }

  double final_best() const {
    return rows.empty() ? std::numeric_limits<double>::infinity() : rows.back().best_so_far;
  }
};

}  // namespace newtonbo

#endif  // NEWTONBO_RUN_RECORD_HPP
