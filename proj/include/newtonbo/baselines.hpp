#ifndef NEWTONBO_BASELINES_HPP
#define NEWTONBO_BASELINES_HPP

#include "newtonbo/objective.hpp"
#include "newtonbo/run_record.hpp"

#include <cstdint>

namespace newtonbo {

struct BaselineConfig {
  long max_evals = 300;
  std::uint64_t seed = 0;
  int population = 0;      // CMA-ES; <= 0 uses 4 + floor(3 ln D)
  double init_step = 0.3;  // CMA-ES step size in unit-box coordinates
};

/// Evaluates the first max_evals points of a scrambled Sobol sequence.
RunRecord run_sobol(const Objective& obj, const BaselineConfig& cfg);

/// CMA-ES on the unit box started at its center. When the search converges
/// before the budget is spent it restarts from a uniform point, so exactly
/// max_evals evaluations are recorded.
RunRecord run_cmaes(const Objective& obj, const BaselineConfig& cfg);

}  // namespace newtonbo

#endif  // NEWTONBO_BASELINES_HPP
