#include "newtonbo/local_model.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>

namespace newtonbo {

QuadraticModel build_model(const GPModel& model, const Eigen::Ref<const Vector>& center, double lambda) {
  if (!(lambda > -1.0 && lambda < 1.0)) throw DomainError("build_model: lambda must lie in (-1, 1)");
  if (center.size() != model.dim()) throw DomainError("build_model: dimension mismatch");
  if (!in_unit_box(center)) throw DomainError("build_model: center outside the unit box");

  const PosteriorDerivatives d = model.derivatives(center);
  QuadraticModel q;
  q.center = center;
  q.f0 = model.posterior(center).mu;
  q.lambda = lambda;
  q.g = d.grad_mu + lambda * d.grad_sigma;
  const Matrix B = d.hess_mu + lambda * d.hess_sigma;
  q.B = 0.5 * (B + B.transpose());
  return q;
}

double sample_lambda(Rng& rng) {
  static const boost::math::normal_distribution<double> std_normal;
  static const double lo = boost::math::cdf(std_normal, -1.0);
  static const double hi = boost::math::cdf(std_normal, 1.0);
  std::uniform_real_distribution<double> unif(lo, hi);
  for (;;) {
    const double u = unif(rng);
    if (u <= lo || u >= hi) continue;
    const double x = boost::math::quantile(std_normal, u);
    if (x > -1.0 && x < 1.0) return x;
  }
}

double truncated_lambda_sd() {
  const boost::math::normal_distribution<double> std_normal;
  const double z = 2.0 * boost::math::cdf(std_normal, 1.0) - 1.0;
  return std::sqrt(1.0 - 2.0 * boost::math::pdf(std_normal, 1.0) / z);
}

}  // namespace newtonbo
