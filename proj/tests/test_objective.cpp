#include "newtonbo/objective.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace newtonbo;

namespace {

// Scalar reference implementations written directly from the textbook
// definitions, independent of the library code.
double ackley_ref(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double sq = 0.0, cs = 0.0;
  for (double v : x) {
    sq += v * v;
    cs += std::cos(2.0 * std::numbers::pi * v);
  }
  return -20.0 * std::exp(-0.2 * std::sqrt(sq / n)) - std::exp(cs / n) + 20.0 + std::exp(1.0);
}

double griewank_ref(const std::vector<double>& x) {
  double sum = 0.0, prod = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += x[i] * x[i] / 4000.0;
    prod *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
  }
  return sum - prod + 1.0;
}

}  // namespace

TEST_CASE("native boxes") {
  const Objective a = make_objective("ackley", 50);
  CHECK(a.dim() == 50);
  CHECK((a.box().lower.array() == -5.0).all());
  CHECK((a.box().upper.array() == 10.0).all());
  const Objective g = make_objective("griewank", 100);
  CHECK((g.box().lower.array() == -300.0).all());
  CHECK((g.box().upper.array() == 600.0).all());
  CHECK_THROWS_AS(make_objective("sphere", 10), ConfigError);
  CHECK_THROWS_AS(make_objective("ackley", 0), ConfigError);
}

TEST_CASE("ackley values") {
  Rng rng(1);
  const Objective a = make_objective("ackley", 7);
  const Vector u0 = a.box().to_unit(Vector::Zero(7));
  CHECK(std::abs(a.evaluate(u0, rng)) < 1e-12);
  for (int D : {1, 2, 10, 50}) {
    const double expected = ackley_ref(std::vector<double>(D, 1.0));
    CHECK(expected == doctest::Approx(3.62538).epsilon(1e-5));
    CHECK(ackley(Vector::Ones(D)) == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("griewank values") {
  Rng rng(1);
  const Objective g = make_objective("griewank", 2);
  CHECK(std::abs(g.evaluate(g.box().to_unit(Vector::Zero(2)), rng)) < 1e-15);
  Vector x(2);
  x << 100.0, 0.0;
  const double expected = griewank_ref({100.0, 0.0});
  CHECK(expected == doctest::Approx(2.6377).epsilon(1e-4));
  CHECK(griewank(x) == doctest::Approx(expected).epsilon(1e-13));
  CHECK(g.evaluate(g.box().to_unit(x), rng) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("random points agree with the reference formulas") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector u = uniform_point(5, rng);
    const Objective a = make_objective("ackley", 5);
    const Objective g = make_objective("griewank", 5);
    const Vector xa = a.box().from_unit(u);
    const Vector xg = g.box().from_unit(u);
    CHECK(a.value_native(xa) == doctest::Approx(ackley_ref({xa.data(), xa.data() + 5})).epsilon(1e-12));
    CHECK(g.value_native(xg) == doctest::Approx(griewank_ref({xg.data(), xg.data() + 5})).epsilon(1e-12));
  }
}

TEST_CASE("unit-box mapping round trip and domain checks") {
  const Objective a = make_objective("ackley", 3);
  Vector u(3);
  u << 0.0, 0.25, 1.0;
  CHECK((a.box().to_unit(a.box().from_unit(u)) - u).norm() < 1e-15);
  CHECK(a.box().from_unit(u)(1) == doctest::Approx(-1.25));
  Rng rng(0);
  Vector bad = u;
  bad(0) = -1e-9;
  CHECK_THROWS_AS(a.evaluate(bad, rng), DomainError);
  bad(0) = 1.5;
  CHECK_THROWS_AS(a.evaluate(bad, rng), DomainError);
  CHECK_THROWS_AS(a.evaluate(Vector::Zero(2), rng), DomainError);
}

TEST_CASE("observation noise is reproducible") {
  const Objective a(FunctionKind::ackley, 4, 0.1);
  const Vector u = Vector::Constant(4, 0.4);
  Rng r1(3), r2(3);
  const double y1 = a.evaluate(u, r1);
  CHECK(y1 == a.evaluate(u, r2));
  CHECK(y1 != a.value_native(a.box().from_unit(u)));
}
