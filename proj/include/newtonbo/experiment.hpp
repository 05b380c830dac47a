#ifndef NEWTONBO_EXPERIMENT_HPP
#define NEWTONBO_EXPERIMENT_HPP

#include "newtonbo/baselines.hpp"
#include "newtonbo/optimizer.hpp"
#include "newtonbo/run_record.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace newtonbo {

/// A multi-seed, multi-method benchmark sweep.
struct ExperimentSpec {
  std::string function = "ackley";
  int dim = 10;
  std::vector<std::string> modes{"newton-bo"};  // newton-bo, sobol, cmaes
  long max_evals = 300;
  int n_init = 50;
  int batch = 5;
  int num_tr = 5;
  std::string tr_update = "turbo";
  double delta_min = 0.05;
  std::string restart_strategy = "thompson";
  std::vector<std::uint64_t> seeds{0};
  std::string out_dir = "results";
  bool diagnostics = false;
  int threads = 0;  // <= 0: available parallelism, capped by NEWTONBO_THREADS

  /// Throws ConfigError on any invalid or inconsistent value.
  void validate() const;
};

/// Thrown by parse_args for --help; what() holds the usage text.
struct HelpRequested : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses command-line arguments (without the program name). Keys from
/// --config FILE (flat JSON) are applied first and explicit flags override
/// them. --seeds takes a count N (seeds 0..N-1) or a comma-separated list.
/// Throws ConfigError for unknown flags/keys and invalid values.
ExperimentSpec parse_args(const std::vector<std::string>& args);

/// Applies the keys of a flat JSON object to spec.
void apply_config_json(ExperimentSpec& spec, const std::string& json_text);

OptimizerConfig optimizer_config(const ExperimentSpec& spec, std::uint64_t seed);
BaselineConfig baseline_config(const ExperimentSpec& spec, std::uint64_t seed);

/// Runs one (mode, seed) arm.
RunRecord run_arm(const ExperimentSpec& spec, const std::string& mode, std::uint64_t seed);

/// CSV with header eval_index,iteration,tr_id,value,best_so_far,delta,
/// grad_norm,lambda,restart_flag,x0..x{D-1}. Reals use 17 significant
/// digits; NaN fields are left empty.
void write_csv(std::ostream& os, const RunRecord& record, int dim);

/// Runs every (mode, seed) arm on a bounded worker pool, writes
/// {out_dir}/{mode}_{seed}.csv per arm and one summary.json.
/// Returns 0 on success, 1 if any run aborted, 2 on I/O errors.
int execute(const ExperimentSpec& spec, std::ostream& log);

/// Median/quartiles with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

}  // namespace newtonbo

#endif  // NEWTONBO_EXPERIMENT_HPP
