#ifndef NEWTONBO_QP_SOLVER_HPP
#define NEWTONBO_QP_SOLVER_HPP

#include "newtonbo/cmaes.hpp"
#include "newtonbo/local_model.hpp"
#include "newtonbo/types.hpp"

namespace newtonbo {

/// Feasible steps s with center + s inside both the infinity-norm trust
/// region of radius delta and the unit box: lo <= s <= hi, lo <= 0 <= hi.
struct StepBox {
  Vector lo;
  Vector hi;

  StepBox(const Eigen::Ref<const Vector>& center, double delta);

  bool contains(const Eigen::Ref<const Vector>& s) const {
    return (s.array() >= lo.array()).all() && (s.array() <= hi.array()).all();
  }
  Vector project(const Eigen::Ref<const Vector>& s) const { return s.cwiseMax(lo).cwiseMin(hi); }
};

struct CauchyPoint {
  Vector step;
  double decrease;
};

/// Minimizer of the model along the steepest-descent path -t g/||g||
/// projected onto the step box. Returns the zero step when ||g|| < 1e-12.
CauchyPoint cauchy_point(const QuadraticModel& q, double delta);

struct QpSolution {
  Vector step;
  double model_value;
  bool used_cauchy;
  long model_evals;
};

/// Minimizes the model over the step box with CMA-ES started at the center
/// (init_step defaults to 0.3 delta) and returns whichever of the CMA-ES
/// incumbent and the Cauchy point has the lower model value.
QpSolution solve_qp(const QuadraticModel& q, double delta, const CmaConfig& cfg, Rng& rng);

}  // namespace newtonbo

#endif  // NEWTONBO_QP_SOLVER_HPP
