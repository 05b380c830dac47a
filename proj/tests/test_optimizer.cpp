#include "newtonbo/optimizer.hpp"

#include <doctest.h>

#include <cmath>

using namespace newtonbo;

namespace {

OptimizerConfig small_config(long max_evals, std::uint64_t seed = 0) {
  OptimizerConfig cfg;
  cfg.n_init = 12;
  cfg.batch = 3;
  cfg.num_tr = 3;
  cfg.max_evals = max_evals;
  cfg.seed = seed;
  cfg.gp.num_starts = 2;
  cfg.restart.pool_size = 256;
  return cfg;
}

}  // namespace

TEST_CASE("init_centers") {
  SUBCASE("q = 1 is the best point") {
    Matrix X(4, 1);
    X << 0.1, 0.4, 0.7, 0.9;
    Vector y(4);
    y << 3, 1, 2, 5;
    const auto c = init_centers(Dataset(X, y), 1);
    REQUIRE(c.size() == 1);
    CHECK(c[0] == 1);
  }
  SUBCASE("clustered minima") {
    // Points 0..4 are the five best and lie within 0.01 of each other;
    // the second center must be the best point outside that cluster.
    Matrix X(20, 2);
    Vector y(20);
    for (int i = 0; i < 5; ++i) {
      X.row(i) << 0.5 + 0.002 * i, 0.5 - 0.002 * i;
      y(i) = i;
    }
    for (int i = 5; i < 20; ++i) {
      X.row(i) << 0.05 * (i - 5) / 15.0 + 0.02 * (i % 3), 0.9 - 0.04 * (i - 5);
      y(i) = 10 + (20 - i);
    }
    const Dataset d(X, y);
    std::vector<Eigen::Index> expected{0};
    for (Eigen::Index k = 5; k < 20; ++k) {
      // Oracle: best-valued point at infinity-distance >= 0.1 from point 0.
      if ((X.row(k) - X.row(0)).cwiseAbs().maxCoeff() >= 0.1 &&
          (expected.size() == 1 || y(k) < y(expected[1])))
        expected.resize(1), expected.push_back(k);
    }
    const auto c = init_centers(d, 2);
    REQUIRE(c.size() == 2);
    CHECK(c[0] == 0);
    CHECK(c[1] == expected[1]);
  }
  SUBCASE("q = dataset size") {
    Matrix X(5, 1);
    X << 0.0, 0.25, 0.5, 0.75, 1.0;
    const auto c = init_centers(Dataset(X, Vector::LinSpaced(5, 5, 1)), 5);
    CHECK(c.size() == 5);
    std::vector<Eigen::Index> sorted(c.begin(), c.end());
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<Eigen::Index>{0, 1, 2, 3, 4});
  }
  SUBCASE("exact duplicates") {
    const auto c = init_centers(Dataset(Matrix::Constant(3, 2, 0.3), Vector::Zero(3)), 3);
    CHECK(c.size() == 3);
  }
}

TEST_CASE("config validation") {
  OptimizerConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.batch = 3;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = OptimizerConfig{};
  cfg.max_evals = 10;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("budget equal to the initial design") {
  const Objective obj = make_objective("ackley", 3);
  OptimizerConfig cfg = small_config(12);
  const RunRecord r = run_newton_bo(obj, cfg);
  CHECK(r.rows.size() == 12);
  CHECK(r.summary.iterations == 0);
  for (const EvalRow& row : r.rows) CHECK(row.iteration == 0);
}

TEST_CASE("run record invariants and determinism") {
  const Objective obj = make_objective("griewank", 3);
  const OptimizerConfig cfg = small_config(40, 7);
  const RunRecord a = run_newton_bo(obj, cfg);
  const RunRecord b = run_newton_bo(obj, cfg);
  REQUIRE(a.rows.size() == 40);
  REQUIRE(b.rows.size() == 40);
  CHECK_FALSE(a.summary.aborted);
  double best = INFINITY;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const EvalRow& r = a.rows[i];
    CHECK(r.eval_index == static_cast<long>(i));
    CHECK(in_unit_box(r.point));
    best = std::min(best, r.value);
    CHECK(r.best_so_far == best);
    CHECK(r.value == b.rows[i].value);
    CHECK(r.point == b.rows[i].point);
    if (i >= 12) {
      CHECK(r.tr_id >= 0);
      CHECK(r.delta > 0.0);
      if (!r.restart_flag) CHECK(std::abs(r.lambda) < 1.0);
    } else {
      CHECK(r.tr_id == -1);
      CHECK(std::isnan(r.delta));
    }
  }
  CHECK(a.summary.best_value == a.final_best());
  CHECK(obj.value_native(obj.box().from_unit(a.summary.best_point)) == a.final_best());
}

TEST_CASE("ratio mode and alternative restart strategies complete") {
  const Objective obj = make_objective("ackley", 2);
  for (RestartKind k : {RestartKind::thompson, RestartKind::max_variance, RestartKind::random}) {
    OptimizerConfig cfg = small_config(36, 3);
    cfg.tr.mode = RadiusUpdate::ratio;
    cfg.restart.kind = k;
    const RunRecord r = run_newton_bo(obj, cfg);
    CHECK(r.rows.size() == 36);
    CHECK_FALSE(r.summary.aborted);
  }
}

TEST_CASE("diagnostics are recorded on request") {
  const Objective obj = make_objective("ackley", 2);
  OptimizerConfig cfg = small_config(18, 1);
  cfg.diagnostics = true;
  const RunRecord r = run_newton_bo(obj, cfg);
  REQUIRE(r.summary.diagnostics.has_value());
  CHECK(r.summary.diagnostics->tau == 0.01);
  CHECK(r.summary.diagnostics->gamma > 0.0);
}
