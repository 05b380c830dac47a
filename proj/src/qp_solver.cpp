#include "newtonbo/qp_solver.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace newtonbo {

namespace {
constexpr Eigen::Index kNegativeDirections = 3;

// Projected gradient descent with step 1/L, L the spectral radius of B.
// Monotone, so it only refines the point CMA-ES settled on.
Vector polish(const QuadraticModel& q, const StepBox& box, Vector s, double lipschitz) {
  if (!(lipschitz > 0.0)) return s;
  for (int it = 0; it < 500; ++it) {
    const Vector next = box.project(s - (q.g + q.B * s) / lipschitz);
    const double moved = (next - s).cwiseAbs().maxCoeff();
    s = next;
    if (moved < 1e-13) break;
  }
  return s;
}
}  // namespace

StepBox::StepBox(const Eigen::Ref<const Vector>& center, double delta) {
  if (!(delta > 0.0)) throw DomainError("step box: delta must be positive");
  if (!in_unit_box(center)) throw DomainError("step box: center outside the unit box");
  lo = (-center).cwiseMax(-delta);
  hi = (Vector::Ones(center.size()) - center).cwiseMin(delta);
}

CauchyPoint cauchy_point(const QuadraticModel& q, double delta) {
  const Eigen::Index n = q.dim();
  const StepBox box(q.center, delta);
  const double gnorm = q.g.norm();
  if (gnorm < 1e-12) return {Vector::Zero(n), 0.0};

  const Vector dir = -q.g / gnorm;
  constexpr double inf = std::numeric_limits<double>::infinity();
  // Breakpoint of each coordinate: the path parameter at which it hits its bound.
  std::vector<double> brk(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (dir(i) > 0.0) brk[i] = box.hi(i) / dir(i);
    else if (dir(i) < 0.0) brk[i] = box.lo(i) / dir(i);
    else brk[i] = inf;
  }
  std::vector<double> ts(brk.begin(), brk.end());
  ts.push_back(0.0);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  double best_t = 0.0;
  double best_m = 0.0;  // model value relative to f0
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    const double ta = ts[k];
    const double tb = ts[k + 1];
    if (!std::isfinite(ta)) break;
    // On [ta, tb] the path is c + t dF, with coordinates whose breakpoint is
    // <= ta frozen at their bound.
    Vector c = Vector::Zero(n);
    Vector dF = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (brk[i] <= ta) c(i) = brk[i] * dir(i);
      else dF(i) = dir(i);
    }
    if (dF.squaredNorm() == 0.0) break;
    const Vector Bc = q.B * c;
    const Vector BdF = q.B * dF;
    const double lin = q.g.dot(dF) + dF.dot(Bc);
    const double curv = dF.dot(BdF);
    auto phi = [&](double t) {
      const Vector s = c + t * dF;
      return q.g.dot(s) + 0.5 * s.dot(q.B * s);
    };
    std::vector<double> cand{ta};
    if (std::isfinite(tb)) cand.push_back(tb);
    if (curv > 0.0) {
      const double t_star = -lin / curv;
      if (t_star > ta && t_star < tb) cand.push_back(t_star);
    }
    for (double t : cand) {
      const double m = phi(t);
      if (m < best_m) {
        best_m = m;
        best_t = t;
      }
    }
  }

  Vector step(n);
  for (Eigen::Index i = 0; i < n; ++i) step(i) = std::min(best_t, brk[i]) * dir(i);
  step = box.project(step);
  const double decrease = q.f0 - eval_model(q, step);
  return {step, std::max(decrease, 0.0)};
}

QpSolution solve_qp(const QuadraticModel& q, double delta, const CmaConfig& cfg, Rng& rng) {
  const Eigen::Index n = q.dim();
  const StepBox box(q.center, delta);
  const CauchyPoint cp = cauchy_point(q, delta);
  QpSolution best{cp.step, eval_model(q, cp.step), true, 0};

  // CMA-ES is a local search here. With negative curvature the box minimum
  // can sit on the side the gradient points away from, so the search is
  // repeated from the Cauchy point and from both ends of the most negative
  // curvature directions.
  std::vector<Vector> starts{Vector::Zero(n)};
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (q.B + q.B.transpose()));
  const double lipschitz = eig.info() == Eigen::Success ? eig.eigenvalues().cwiseAbs().maxCoeff() : 0.0;
  if (eig.info() == Eigen::Success && eig.eigenvalues()(0) < 0.0) {
    if (cp.step.squaredNorm() > 0.0) starts.push_back(cp.step);
    for (Eigen::Index k = 0; k < std::min<Eigen::Index>(n, kNegativeDirections); ++k) {
      if (eig.eigenvalues()(k) >= 0.0) break;
      const Vector v = eig.eigenvectors().col(k);
      starts.push_back(box.project(delta * v));
      starts.push_back(box.project(-delta * v));
    }
  }

  const double sigma0 = cfg.init_step > 0.0 ? cfg.init_step : 0.3 * delta;
  auto consider = [&](const Vector& step) {
    const double m = eval_model(q, step);
    if (m < best.model_value) {
      best.step = step;
      best.model_value = m;
      best.used_cauchy = false;
    }
  };
  for (const Vector& x0 : starts) {
    const CmaResult r = cmaes_minimize([&](const Vector& s) { return eval_model(q, s); }, box.lo, box.hi, x0,
                                       sigma0, cfg.resolved_population(n), cfg.resolved_max_evals(n),
                                       cfg.tol_fun, rng);
    best.model_evals += r.evals;
    consider(polish(q, box, box.project(r.x), lipschitz));
    // A wide first generation can carry CMA-ES out of the start's basin.
    consider(polish(q, box, x0, lipschitz));
  }
  return best;
}

}  // namespace newtonbo
