#ifndef NEWTONBO_LBFGS_HPP
#define NEWTONBO_LBFGS_HPP

#include "newtonbo/types.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace newtonbo::detail {

struct LbfgsResult {
  Vector x;
  double value;
  int iterations;
  bool converged;
};

/// Minimizes f with limited-memory BFGS and a backtracking Armijo search.
/// f(x, grad) returns the value and fills grad; non-finite values are
/// treated as infeasible and shrink the step.
template <typename F>
LbfgsResult lbfgs_minimize(F&& f, Vector x, int max_iters, double grad_tol, int memory = 8) {
  Vector g(x.size());
  double fx = f(x, g);
  if (!std::isfinite(fx)) return {x, fx, 0, false};

  std::deque<Vector> s_hist, y_hist;
  std::deque<double> rho_hist;
  int it = 0;
  for (; it < max_iters; ++it) {
    if (g.norm() < grad_tol) return {x, fx, it, true};

    // Two-loop recursion.
    Vector q = g;
    std::vector<double> a(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      a[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= a[i] * y_hist[i];
    }
    if (!s_hist.empty()) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    else q /= std::max(1.0, g.norm());
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double b = rho_hist[i] * y_hist[i].dot(q);
      q += (a[i] - b) * s_hist[i];
    }
    Vector dir = -q;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      dir = -g;
      slope = -g.squaredNorm();
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    double step = 1.0;
    Vector x_new, g_new(x.size());
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      x_new = x + step * dir;
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return {x, fx, it, false};

    Vector s = x_new - x;
    Vector y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    const double improvement = fx - f_new;
    x = std::move(x_new);
    g = g_new;
    fx = f_new;
    if (improvement <= 1e-12 * std::max(1.0, std::abs(fx))) return {x, fx, it + 1, true};
  }
  return {x, fx, it, g.norm() < grad_tol};
}

}  // namespace newtonbo::detail

#endif  // NEWTONBO_LBFGS_HPP
