#ifndef NEWTONBO_OPTIMIZER_HPP
#define NEWTONBO_OPTIMIZER_HPP

#include "newtonbo/cmaes.hpp"
#include "newtonbo/gp.hpp"
#include "newtonbo/objective.hpp"
#include "newtonbo/restart.hpp"
#include "newtonbo/run_record.hpp"
#include "newtonbo/trust_region.hpp"

#include <cstdint>
#include <vector>

namespace newtonbo {

struct OptimizerConfig {
  int n_init = 50;
  int batch = 5;
  int num_tr = 5;
  long max_evals = 300;
  TrustRegionConfig tr;
  RestartStrategy restart;
  CmaConfig cma;
  GpFitConfig gp;
  // Multi-start hyperparameter fit on the first iteration and every
  // full_refit_every iterations; in between, a single start warm-started
  // from the previous fit.
  int full_refit_every = 10;
  double recovery_noise_floor = 1e-4;
  std::uint64_t seed = 0;
  bool diagnostics = false;

  /// Throws ConfigError on batch != num_tr, max_evals < n_init, etc.
  void validate() const;
};

/// The q lowest-value points of data with pairwise infinity-distance at least
/// min_distance; the distance is halved until q centers exist.
std::vector<Eigen::Index> init_centers(const Dataset& data, int q, double min_distance = 0.1);

/// Newton-BO: n_init Sobol points, then per iteration one global GP fit and,
/// per trust region, a reparameterized quadratic model at the center, a
/// bound-constrained QP solve and one evaluation. Regions are updated,
/// recentered on improvement and restarted once terminated. A restarted
/// region first evaluates its new center (restart_flag rows).
RunRecord run_newton_bo(const Objective& obj, const OptimizerConfig& cfg);

}  // namespace newtonbo

#endif  // NEWTONBO_OPTIMIZER_HPP
