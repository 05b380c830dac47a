#ifndef NEWTONBO_CMAES_HPP
#define NEWTONBO_CMAES_HPP

#include "newtonbo/types.hpp"

#include <functional>

namespace newtonbo {

/// Settings for one CMA-ES run. Non-positive population / max_evals /
/// init_step mean "use the default" (4 + floor(3 ln D), 100 D, 0.3 of the
/// box scale supplied by the caller).
struct CmaConfig {
  int population = 0;
  long max_evals = 0;
  double init_step = 0.0;
  double tol_fun = 1e-10;

  int resolved_population(Eigen::Index dim) const;
  long resolved_max_evals(Eigen::Index dim) const;
};

enum class CmaStop { budget, tol_fun, tol_x, condition };

struct CmaResult {
  Vector x;
  double f;
  long evals;
  CmaStop reason;
};

/// (mu/mu_w, lambda)-CMA-ES with rank-one and rank-mu covariance updates.
/// Candidates are projected onto [lower, upper] before evaluation and the
/// projected points drive the update, so every evaluated point is feasible.
/// Stops after exactly max_evals evaluations at most.
CmaResult cmaes_minimize(const std::function<double(const Vector&)>& f, const Vector& lower,
                         const Vector& upper, const Vector& x0, double sigma0, int population,
                         long max_evals, double tol_fun, Rng& rng);

}  // namespace newtonbo

#endif  // NEWTONBO_CMAES_HPP
