#include "newtonbo/local_model.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace newtonbo;

namespace {

GPModel small_model(Rng& rng) {
  Matrix X(12, 3);
  for (int i = 0; i < 12; ++i) X.row(i) = uniform_point(3, rng).transpose();
  Vector y(12);
  for (int i = 0; i < 12; ++i) y(i) = std::sin(3 * X(i, 0)) + X(i, 1) * X(i, 2);
  GpHyperparameters h;
  h.kernel.lengthscales = Vector::Constant(3, 0.4);
  h.noise_var = 1e-4;
  return GPModel(Dataset(X, y), h);
}

// Var of N(0,1) truncated to (-1,1) by Simpson integration of x^2 phi(x).
double truncated_variance_by_quadrature() {
  const int n = 20000;
  const double h = 2.0 / n;
  auto phi = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi); };
  double num = 0.0, den = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = -1.0 + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    num += w * x * x * phi(x);
    den += w * phi(x);
  }
  return num / den;
}

}  // namespace

TEST_CASE("build_model reparameterization") {
  Rng rng(8);
  const GPModel m = small_model(rng);
  const Vector c = Vector::Constant(3, 0.45);
  const PosteriorDerivatives pd = m.derivatives(c);

  const QuadraticModel q0 = build_model(m, c, 0.0);
  CHECK((q0.g - pd.grad_mu).norm() == 0.0);
  CHECK((q0.B - pd.hess_mu).norm() < 1e-12 * (1 + pd.hess_mu.norm()));
  CHECK(q0.f0 == doctest::Approx(m.posterior(c).mu).epsilon(1e-14));

  const QuadraticModel q5 = build_model(m, c, 0.5);
  CHECK(((q5.g - pd.grad_mu) - 0.5 * pd.grad_sigma).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((q5.B - q5.B.transpose()).norm() == 0.0);
  CHECK(eval_model(q5, Vector::Zero(3)) == q5.f0);

  CHECK_THROWS_AS(build_model(m, c, 1.0), DomainError);
  CHECK_THROWS_AS(build_model(m, c, -1.2), DomainError);
  CHECK_THROWS_AS(build_model(m, Vector::Constant(3, 1.5), 0.0), DomainError);
}

TEST_CASE("eval_model arithmetic") {
  QuadraticModel q;
  q.f0 = 2.0;
  q.g = Vector::Zero(2);
  q.g(0) = 1.0;
  q.B = Matrix::Zero(2, 2);
  Vector s = Vector::Zero(2);
  CHECK(eval_model(q, s) == 2.0);
  s(0) = -0.3;
  CHECK(eval_model(q, s) == doctest::Approx(1.7));
  q.g.setZero();
  q.B = Matrix::Identity(2, 2);
  s << 0.2, 0.2;  // squared norm 0.08
  CHECK(eval_model(q, s) == doctest::Approx(2.04));
  CHECK_THROWS_AS(eval_model(q, Vector::Zero(3)), DomainError);
}

TEST_CASE("lambda distribution") {
  const double expected_sd = std::sqrt(truncated_variance_by_quadrature());
  CHECK(truncated_lambda_sd() == doctest::Approx(expected_sd).epsilon(1e-8));
  CHECK(std::abs(expected_sd - 0.5378) < 0.01);

  Rng rng(99);
  const int n = 20000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double l = sample_lambda(rng);
    REQUIRE(l > -1.0);
    REQUIRE(l < 1.0);
    sum += l;
    sum2 += l * l;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sum2 / n - mean * mean);
  CHECK(std::abs(mean) < 3.0 * expected_sd / std::sqrt(double(n)));
  CHECK(std::abs(sd - expected_sd) < 0.01);
}
