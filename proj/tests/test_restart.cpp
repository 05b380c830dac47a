#include "newtonbo/restart.hpp"

#include "newtonbo/sobol.hpp"

#include <doctest.h>

#include <cmath>

using namespace newtonbo;

namespace {

GpHyperparameters hyper(int D, double ell, double noise = 1e-6) {
  GpHyperparameters h;
  h.kernel.lengthscales = Vector::Constant(D, ell);
  h.noise_var = noise;
  return h;
}

}  // namespace

TEST_CASE("unscrambled sobol prefix") {
  SobolSequence s(2);
  const Matrix P = s.draw(4);
  CHECK(P.row(0).norm() == 0.0);
  CHECK(P(1, 0) == 0.5);
  CHECK(P(1, 1) == 0.5);
  CHECK(P(2, 0) == 0.75);
  CHECK(P(2, 1) == 0.25);
  CHECK(P(3, 0) == 0.25);
  CHECK(P(3, 1) == 0.75);
}

TEST_CASE("initial design") {
  Rng a(5), b(5);
  const Matrix X = initial_design(64, 7, a);
  CHECK(X.rows() == 64);
  CHECK(X.cols() == 7);
  CHECK((X.array() >= 0.0).all());
  CHECK((X.array() < 1.0).all());
  CHECK(X == initial_design(64, 7, b));
  CHECK_THROWS_AS(initial_design(0, 2, a), DomainError);

  SUBCASE("4x4 cells are evenly occupied") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Rng rng(seed);
      const Matrix P = initial_design(256, 2, rng);
      int counts[4][4] = {};
      for (int i = 0; i < 256; ++i) ++counts[int(P(i, 0) * 4)][int(P(i, 1) * 4)];
      for (auto& row : counts)
        for (int c : row) CHECK(c >= 8);
    }
  }
  SUBCASE("high dimensions") {
    Rng rng(1);
    const Matrix P = initial_design(8, 1024, rng);
    CHECK((P.array() < 1.0).all());
    CHECK_THROWS(initial_design(8, 1025, rng));
  }
}

TEST_CASE("strategy parsing and validation") {
  CHECK(parse_restart_kind("max-variance") == RestartKind::max_variance);
  CHECK(parse_restart_kind("max_variance") == RestartKind::max_variance);
  CHECK(parse_restart_kind("thompson") == RestartKind::thompson);
  CHECK(to_string(RestartKind::random) == "random");
  CHECK_THROWS_AS(parse_restart_kind("pes"), ConfigError);
  RestartStrategy s;
  CHECK(s.resolved_pool_size(3) == 1536);
  CHECK(s.resolved_pool_size(100) == 5120);
  s.num_samples = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("max variance picks the pool argmax outside exclusions") {
  Rng gen(3);
  Matrix X(10, 2);
  for (int i = 0; i < 10; ++i) X.row(i) = (0.2 * uniform_point(2, gen)).transpose();
  Dataset d(X, X.rowwise().sum());
  const GPModel m(d, hyper(2, 0.2));
  RestartStrategy strat;
  strat.kind = RestartKind::max_variance;
  strat.pool_size = 256;
  const std::vector<Vector> centers{Vector::Constant(2, 0.97), Vector::Constant(2, 0.03)};

  Rng rng(17), replay(17);
  const RestartChoice c = restart_point(m, d, strat, centers, rng);
  const Matrix pool = sobol_points(256, 2, replay);
  double best = -1.0;
  Vector arg;
  for (int i = 0; i < pool.rows(); ++i) {
    bool ex = false;
    for (const Vector& ctr : centers) ex = ex || (pool.row(i).transpose() - ctr).cwiseAbs().maxCoeff() < 0.05;
    const double s = m.posterior(pool.row(i).transpose()).sigma;
    if (!ex && s > best) {
      best = s;
      arg = pool.row(i).transpose();
    }
  }
  CHECK_FALSE(c.fallback);
  CHECK(c.point == arg);
  CHECK(m.posterior(c.point).sigma >= best);
}

TEST_CASE("thompson restarts concentrate in a deep observed basin") {
  const int n = 25;
  Matrix X(n, 1);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = (i + 0.5) / n;
    const double t = (X(i, 0) - 0.3) / 0.08;
    y(i) = 1.0 - 4.0 * std::exp(-t * t);
  }
  Dataset d(X, y);
  const GPModel m(d, hyper(1, 0.08, 1e-6));
  RestartStrategy strat;
  int near = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const RestartChoice c = restart_point(m, d, strat, {}, rng);
    near += std::abs(c.point(0) - 0.3) < 0.2;
  }
  CHECK(near >= 15);
}

TEST_CASE("exclusion, fallback and reproducibility") {
  Rng gen(2);
  Matrix X(6, 1);
  for (int i = 0; i < 6; ++i) X(i, 0) = uniform_point(1, gen)(0);
  Dataset d(X, X.col(0));
  const GPModel m(d, hyper(1, 0.2));

  RestartStrategy strat;
  strat.exclusion_radius = 0.6;  // any center at 0.5 excludes the whole interval
  const std::vector<Vector> centers{Vector::Constant(1, 0.5)};
  for (RestartKind k : {RestartKind::thompson, RestartKind::max_variance, RestartKind::random}) {
    strat.kind = k;
    Rng rng(1);
    const RestartChoice c = restart_point(m, d, strat, centers, rng);
    CHECK(c.fallback);
    CHECK(in_unit_box(c.point));
  }

  strat = RestartStrategy{};
  strat.kind = RestartKind::random;
  Rng r1(8), r2(8);
  CHECK(restart_point(m, d, strat, {}, r1).point == restart_point(m, d, strat, {}, r2).point);

  strat.kind = RestartKind::thompson;
  strat.exclusion_radius = 0.05;
  Rng r3(4);
  const auto picks = restart_points(m, d, strat, centers, 3, r3);
  REQUIRE(picks.size() == 3);
  for (std::size_t i = 0; i < picks.size(); ++i) {
    CHECK(std::abs(picks[i].point(0) - 0.5) >= 0.05);
    for (std::size_t j = 0; j < i; ++j) CHECK(std::abs(picks[i].point(0) - picks[j].point(0)) >= 0.05);
  }
}
