#include "newtonbo/objective.hpp"

#include <cmath>
#include <numbers>

namespace newtonbo {

Box::Box(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() < 1 || lower.size() != upper.size())
    throw DomainError("box: bounds must have equal, positive dimension");
  if (!(lower.array() < upper.array()).all())
    throw DomainError("box: lower must be strictly below upper");
}

Vector Box::to_unit(const Eigen::Ref<const Vector>& x) const {
  return ((x - lower).array() / (upper - lower).array()).matrix();
}

Vector Box::from_unit(const Eigen::Ref<const Vector>& u) const {
  return lower + u.cwiseProduct(upper - lower);
}

double ackley(const Eigen::Ref<const Vector>& x) {
  const double n = static_cast<double>(x.size());
  const double sq = x.squaredNorm() / n;
  const double cs = (2.0 * std::numbers::pi * x.array()).cos().sum() / n;
  return -20.0 * std::exp(-0.2 * std::sqrt(sq)) - std::exp(cs) + 20.0 + std::numbers::e;
}

double griewank(const Eigen::Ref<const Vector>& x) {
  double sum = 0.0;
  double prod = 1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    sum += x(i) * x(i) / 4000.0;
    prod *= std::cos(x(i) / std::sqrt(static_cast<double>(i + 1)));
  }
  return sum - prod + 1.0;
}

namespace {

Box native_box(FunctionKind kind, int dim) {
  switch (kind) {
    case FunctionKind::ackley:
      return {Vector::Constant(dim, -5.0), Vector::Constant(dim, 10.0)};
    case FunctionKind::griewank:
      return {Vector::Constant(dim, -300.0), Vector::Constant(dim, 600.0)};
  }
  throw ConfigError("unhandled function kind");
}

}  // namespace

Objective::Objective(FunctionKind kind, int dim, double noise_sd)
    : kind_(kind),
      name_(kind == FunctionKind::ackley ? "ackley" : "griewank"),
      dim_(dim),
      box_(dim >= 1 ? native_box(kind, dim) : throw ConfigError("objective: dim must be >= 1")),
      noise_sd_(noise_sd) {
  if (!(noise_sd >= 0.0)) throw ConfigError("objective: noise_sd must be nonnegative");
}

double Objective::value_native(const Eigen::Ref<const Vector>& x) const {
  return kind_ == FunctionKind::ackley ? ackley(x) : griewank(x);
}

double Objective::evaluate(const Eigen::Ref<const Vector>& u, Rng& noise_rng) const {
  if (u.size() != dim_) throw DomainError("evaluate: dimension mismatch");
  if (!in_unit_box(u)) throw DomainError("evaluate: point outside the unit box");
  double y = value_native(box_.from_unit(u));
  if (noise_sd_ > 0.0) y += noise_sd_ * std::normal_distribution<double>(0.0, 1.0)(noise_rng);
  return y;
}

Objective make_objective(const std::string& name, int dim) {
  if (dim < 1) throw ConfigError("objective: dim must be >= 1");
  if (name == "ackley") return {FunctionKind::ackley, dim};
  if (name == "griewank") return {FunctionKind::griewank, dim};
  throw ConfigError("unknown objective '" + name + "' (expected ackley or griewank)");
}

}  // namespace newtonbo
