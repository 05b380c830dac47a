#ifndef NEWTONBO_OBJECTIVE_HPP
#define NEWTONBO_OBJECTIVE_HPP

#include "newtonbo/types.hpp"

#include <string>

namespace newtonbo {

/// Axis-aligned box, lower[d] < upper[d] for every d.
struct Box {
  Vector lower;
  Vector upper;

  Box(Vector lo, Vector hi);

  Eigen::Index dim() const { return lower.size(); }

  /// Native point -> unit box.
  Vector to_unit(const Eigen::Ref<const Vector>& x) const;
  /// Unit box -> native point.
  Vector from_unit(const Eigen::Ref<const Vector>& u) const;
};

enum class FunctionKind { ackley, griewank };

/// Synthetic benchmark objective defined on a native box. All optimizer code
/// talks to it through unit-box coordinates.
class Objective {
 public:
  Objective(FunctionKind kind, int dim, double noise_sd = 0.0);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  const Box& box() const { return box_; }
  double noise_sd() const { return noise_sd_; }

  /// f at the native point x (noise-free).
  double value_native(const Eigen::Ref<const Vector>& x) const;

  /// f(from_unit(u)) plus Gaussian noise drawn from noise_rng when
  /// noise_sd > 0. Throws DomainError if u leaves [0,1]^D.
  double evaluate(const Eigen::Ref<const Vector>& u, Rng& noise_rng) const;

 private:
  FunctionKind kind_;
  std::string name_;
  int dim_;
  Box box_;
  double noise_sd_;
};

/// Accepts "ackley" or "griewank"; anything else is a ConfigError.
Objective make_objective(const std::string& name, int dim);

double ackley(const Eigen::Ref<const Vector>& x);
double griewank(const Eigen::Ref<const Vector>& x);

}  // namespace newtonbo

#endif  // NEWTONBO_OBJECTIVE_HPP
