#include "newtonbo/gp.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace newtonbo;

namespace {

Matrix random_points(int n, int D, Rng& rng) {
  Matrix X(n, D);
  for (int i = 0; i < n; ++i) X.row(i) = uniform_point(D, rng).transpose();
  return X;
}

/// One joint draw of a zero-mean GP with parameters p at the rows of X.
Vector prior_draw(const KernelParams& p, const Matrix& X, Rng& rng) {
  Matrix K = kernel::cross(p, X, X);
  K.diagonal().array() += 1e-8;
  const Matrix L = K.llt().matrixL();
  std::normal_distribution<double> z;
  Vector e(X.rows());
  for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = z(rng);
  return L * e;
}

GpHyperparameters hyper(const Vector& ell, double sf2, double noise) {
  GpHyperparameters h;
  h.kernel.lengthscales = ell;
  h.kernel.signal_variance = sf2;
  h.noise_var = noise;
  return h;
}

}  // namespace

TEST_CASE("dataset standardization") {
  Matrix X(3, 1);
  X << 0.1, 0.5, 0.9;
  Vector y(3);
  y << 1.0, 2.0, 6.0;
  Dataset d(X, y);
  CHECK(d.y_mean == doctest::Approx(3.0));
  CHECK(d.y_scale == doctest::Approx(std::sqrt(7.0)));  // sample std
  CHECK(d.best_index == 0);
  CHECK(d.y_std.mean() == doctest::Approx(0.0).epsilon(1e-15));
  d.append(Vector::Constant(1, 0.3), -1.0);
  CHECK(d.size() == 4);
  CHECK(d.best_value() == -1.0);
  CHECK(d.best_point()(0) == 0.3);

  Dataset c(Matrix::Zero(2, 2), Vector::Constant(2, 4.0));
  CHECK(c.y_scale == 1.0);
  CHECK(c.y_std.norm() == 0.0);
}

TEST_CASE("prior median lengthscale") {
  CHECK(lengthscale_prior_median(100) == doctest::Approx(0.18316).epsilon(1e-4));
  CHECK(lengthscale_prior_median(1) == doctest::Approx(std::exp(-4.0)).epsilon(1e-12));
  CHECK(lengthscale_prior_median(1) == doctest::Approx(0.018316).epsilon(1e-4));
  CHECK(lengthscale_prior_mean(10) == doctest::Approx(-4.0 + 0.5 * std::log(10.0)));
}

TEST_CASE("posterior closed forms") {
  SUBCASE("interpolation at a single noiseless datum") {
    Matrix X = Matrix::Constant(1, 2, 0.4);
    Dataset d(X, Vector::Constant(1, 3.5));
    GPModel m(d, hyper(Vector::Constant(2, 0.3), 1.0, 0.0));
    const Posterior p = m.posterior(X.row(0).transpose());
    CHECK(std::abs(p.mu - 3.5) < 1e-6);
    // sigma^2 = jitter / (1 + jitter) with the minimum jitter 1e-8.
    CHECK(p.sigma <= 1e-4);
  }
  SUBCASE("unit noise halves the standardized observation") {
    Matrix X(2, 1);
    X << 0.0, 1.0;
    Vector y(2);
    y << 1.0, -1.0;
    Dataset d(X, y);
    GPModel m(d, hyper(Vector::Constant(1, 0.01), 1.0, 1.0));  // points independent
    const double mu_std = (m.posterior(X.row(0).transpose()).mu - d.y_mean) / d.y_scale;
    CHECK(mu_std == doctest::Approx(d.y_std(0) / 2.0).epsilon(1e-6));
  }
  SUBCASE("reversion to the prior far from data") {
    Rng rng(2);
    Matrix X = random_points(5, 3, rng) * 0.1;
    Vector y(5);
    y << 1, 4, 2, 8, 5;
    Dataset d(X, y);
    GPModel m(d, hyper(Vector::Constant(3, 0.05), 2.0, 1e-6));
    const Posterior p = m.posterior(Vector::Ones(3));
    CHECK(p.mu == doctest::Approx(d.y_mean).epsilon(1e-9));
    CHECK(p.sigma == doctest::Approx(d.y_scale * std::sqrt(2.0)).epsilon(1e-9));
  }
}

TEST_CASE("batch and joint posterior agree with pointwise queries") {
  Rng rng(4);
  const Matrix X = random_points(12, 3, rng);
  Vector y = X.rowwise().squaredNorm();
  Dataset d(X, y);
  GPModel m(d, hyper(Vector::Constant(3, 0.4), 1.2, 1e-4));
  const Matrix P = random_points(7, 3, rng);
  Vector mu, sigma;
  m.posterior_batch(P, mu, sigma);
  const Matrix C = m.posterior_covariance(P);
  for (int i = 0; i < 7; ++i) {
    const Posterior p = m.posterior(P.row(i).transpose());
    CHECK(mu(i) == doctest::Approx(p.mu).epsilon(1e-10));
    CHECK(sigma(i) == doctest::Approx(p.sigma).epsilon(1e-8));
    CHECK(std::sqrt(C(i, i)) == doctest::Approx(p.sigma).epsilon(1e-8));
  }
  CHECK((C - C.transpose()).norm() < 1e-12);
}

TEST_CASE("interpolation at training points") {
  Rng rng(9);
  const Matrix X = random_points(8, 2, rng);
  Vector y(8);
  for (int i = 0; i < 8; ++i) y(i) = std::sin(5 * X(i, 0)) + X(i, 1);
  Dataset d(X, y);
  GPModel m(d, hyper(Vector::Constant(2, 0.3), 1.0, 0.0));
  for (int i = 0; i < 8; ++i) {
    const Posterior p = m.posterior(X.row(i).transpose());
    CHECK(std::abs(p.mu - y(i)) < 1e-6);
    CHECK(p.sigma < 1e-4 * d.y_scale);
  }
}

TEST_CASE("posterior derivatives") {
  SUBCASE("zero mean gradient at a single datum") {
    Matrix X = Matrix::Constant(1, 3, 0.5);
    Dataset d(X, Vector::Constant(1, 2.0));
    GPModel m(d, hyper(Vector::Constant(3, 0.2), 1.0, 1e-6));
    CHECK(m.derivatives(X.row(0).transpose()).grad_mu.norm() < 1e-14);
  }
  SUBCASE("finite differences on a random 10-point dataset in 5-D") {
    Rng rng(21);
    const double h = 1e-5;
    int sigma_checked = 0;
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix X = random_points(10, 5, rng);
      Vector y(10);
      for (int i = 0; i < 10; ++i) y(i) = std::cos(3 * X(i, 0)) + X.row(i).squaredNorm();
      Dataset d(X, y);
      GPModel m(d, hyper(Vector::Constant(5, 0.6), 1.0, 1e-6));
      const Vector x = uniform_point(5, rng);
      const PosteriorDerivatives pd = m.derivatives(x);
      CHECK((pd.grad_mu - m.mean_gradient(x)).norm() < 1e-12);
      const bool check_sigma = m.posterior(x).sigma / d.y_scale > 0.1;
      sigma_checked += check_sigma;
      const double gscale = pd.grad_mu.norm(), hscale = pd.hess_mu.norm();
      const double gs_scale = pd.grad_sigma.norm();
      for (int i = 0; i < 5; ++i) {
        Vector xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        const Posterior pp = m.posterior(xp), pm = m.posterior(xm);
        CHECK(std::abs(pd.grad_mu(i) - (pp.mu - pm.mu) / (2 * h)) <= 1e-3 * gscale);
        const Vector col = (m.mean_gradient(xp) - m.mean_gradient(xm)) / (2 * h);
        CHECK((pd.hess_mu.col(i) - col).norm() <= 1e-3 * hscale);
        if (check_sigma)
          CHECK(std::abs(pd.grad_sigma(i) - (pp.sigma - pm.sigma) / (2 * h)) <= 1e-3 * gs_scale);
      }
    }
    CHECK(sigma_checked > 0);
  }
}

TEST_CASE("MAP fit ascends the log posterior") {
  Rng rng(13);
  const int D = 2;
  KernelParams truth{Vector::Constant(D, 0.3), 1.0};
  const Matrix X = random_points(20, D, rng);
  const Vector y = prior_draw(truth, X, rng);
  Dataset d(X, y);
  GpFitConfig cfg;
  const GpHyperparameters init = hyper(Vector::Constant(D, lengthscale_prior_median(D)), 1.0,
                                       cfg.noise_floor + std::exp(cfg.noise_prior_mean));
  const double nlp_init = negative_log_posterior(d, pack_hyperparameters(init, cfg), cfg).value;
  Rng fit_rng(1);
  const GPModel m = fit(d, D, fit_rng, cfg, init);
  const double nlp_fit = negative_log_posterior(d, pack_hyperparameters(m.hyperparameters(), cfg), cfg).value;
  CHECK(nlp_fit <= nlp_init);
  CHECK(m.noise_var() >= cfg.noise_floor);
  CHECK(m.params().valid());
}

TEST_CASE("hyperparameter objective gradient matches finite differences") {
  Rng rng(17);
  const Matrix X = random_points(15, 3, rng);
  Vector y(15);
  for (int i = 0; i < 15; ++i) y(i) = std::sin(4 * X(i, 0)) * X(i, 2);
  Dataset d(X, y);
  Vector theta(5);
  theta << -1.0, -0.5, 0.2, 0.3, -4.0;
  const HyperObjective h = negative_log_posterior(d, theta);
  for (int i = 0; i < 5; ++i) {
    Vector tp = theta, tm = theta;
    tp(i) += 1e-6;
    tm(i) -= 1e-6;
    const double fd = (negative_log_posterior(d, tp).value - negative_log_posterior(d, tm).value) / 2e-6;
    CHECK(h.grad(i) == doctest::Approx(fd).epsilon(1e-5));
  }
  const GpHyperparameters u = unpack_hyperparameters(theta);
  CHECK((pack_hyperparameters(u) - theta).norm() < 1e-12);
}

TEST_CASE("fit rejects tiny datasets and handles constant observations") {
  Rng rng(1);
  CHECK_THROWS(fit(Dataset(Matrix::Zero(1, 2), Vector::Zero(1)), 2, rng));
  Matrix X(3, 2);
  X << 0.1, 0.1, 0.5, 0.5, 0.9, 0.2;
  const GPModel m = fit(Dataset(X, Vector::Constant(3, 1.0)), 2, rng);
  CHECK(m.params().lengthscales(0) == doctest::Approx(lengthscale_prior_median(2)));
}

TEST_CASE("uniform bound report") {
  Rng rng(3);
  SUBCASE("one ball covers the unit interval") {
    const Matrix X = random_points(6, 1, rng);
    Dataset d(X, X.col(0).array().square().matrix());
    GPModel m(d, hyper(Vector::Constant(1, 0.3), 1.0, 1e-4));
    const UniformBoundReport r = uniform_bound(m, d, 0.5, 0.2);
    CHECK(r.covering_count == 1.0);
    CHECK(r.beta == doctest::Approx(2.0 * std::log(1.0 / 0.2)));
  }
  SUBCASE("D = 2, tau = 0.25") {
    const Matrix X = random_points(6, 2, rng);
    Dataset d(X, X.rowwise().sum());
    GPModel m(d, hyper(Vector::Constant(2, 0.3), 1.0, 1e-4));
    const UniformBoundReport r = uniform_bound(m, d, 0.25, 0.1);
    CHECK(r.covering_count == 4.0);
    CHECK(r.beta == doctest::Approx(2.0 * std::log(40.0)));
    CHECK(r.beta == doctest::Approx(7.3778).epsilon(1e-4));
    CHECK(r.L_f_is_proxy);
  }
  SUBCASE("gamma shrinks with tau") {
    const Matrix X = random_points(20, 3, rng);
    Dataset d(X, X.rowwise().squaredNorm());
    GPModel m(d, hyper(Vector::Constant(3, 0.5), 1.0, 1e-4));
    const double g1 = uniform_bound(m, d, 0.1, 0.1).gamma;
    const double g2 = uniform_bound(m, d, 0.01, 0.1).gamma;
    const double g3 = uniform_bound(m, d, 0.001, 0.1).gamma;
    CHECK(g3 < g2);
    CHECK(g2 < g1);
  }
  SUBCASE("huge dimension keeps the log count finite") {
    const Matrix X = random_points(4, 200, rng);
    Dataset d(X, X.rowwise().sum());
    GPModel m(d, hyper(Vector::Constant(200, 2.0), 1.0, 1e-4));
    const UniformBoundReport r = uniform_bound(m, d, 0.001, 0.1);
    CHECK(std::isfinite(r.log_covering_count));
    CHECK(r.log_covering_count == doctest::Approx(200 * std::log(500.0)));
  }
  SUBCASE("invalid arguments") {
    const Matrix X = random_points(4, 2, rng);
    Dataset d(X, X.rowwise().sum());
    GPModel m(d, hyper(Vector::Constant(2, 0.3), 1.0, 1e-4));
    CHECK_THROWS_AS(uniform_bound(m, d, 0.6, 0.1), DomainError);
    CHECK_THROWS_AS(uniform_bound(m, d, 0.0, 0.1), DomainError);
    CHECK_THROWS_AS(uniform_bound(m, d, 0.1, 1.0), DomainError);
  }
}
