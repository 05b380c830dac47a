#include "newtonbo/baselines.hpp"

#include "newtonbo/cmaes.hpp"
#include "newtonbo/sobol.hpp"

#include <chrono>
#include <string>

namespace newtonbo {

namespace {

std::map<std::string, std::string> echo(const Objective& obj, const BaselineConfig& cfg, const std::string& method) {
  return {{"function", obj.name()},
          {"dim", std::to_string(obj.dim())},
          {"mode", method},
          {"max_evals", std::to_string(cfg.max_evals)},
          {"seed", std::to_string(cfg.seed)}};
}

void check(const BaselineConfig& cfg) {
  if (cfg.max_evals < 1) throw ConfigError("baseline: max_evals must be >= 1");
  if (!(cfg.init_step > 0.0)) throw ConfigError("baseline: init_step must be positive");
}

}  // namespace

RunRecord run_sobol(const Objective& obj, const BaselineConfig& cfg) {
  check(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord record;
  record.summary.method = "sobol";
  record.summary.seed = cfg.seed;
  record.summary.config = echo(obj, cfg, "sobol");

  Rng design_rng(derive_seed(cfg.seed, 4));
  Rng noise_rng(derive_seed(cfg.seed, 1));
  SobolSequence seq(obj.dim(), design_rng);
  for (long i = 0; i < cfg.max_evals; ++i) {
    EvalRow row;
    row.iteration = static_cast<int>(i);
    row.point = seq.next();
    row.value = obj.evaluate(row.point, noise_rng);
    record.push(std::move(row));
  }
  record.summary.iterations = static_cast<int>(cfg.max_evals);
  record.summary.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return record;
}

RunRecord run_cmaes(const Objective& obj, const BaselineConfig& cfg) {
  check(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const int D = obj.dim();
  RunRecord record;
  record.summary.method = "cmaes";
  record.summary.seed = cfg.seed;
  record.summary.config = echo(obj, cfg, "cmaes");

  Rng rng(derive_seed(cfg.seed, 5));
  Rng noise_rng(derive_seed(cfg.seed, 1));
  CmaConfig cc;
  cc.population = cfg.population;
  const int pop = cc.resolved_population(D);

  const Vector lower = Vector::Zero(D);
  const Vector upper = Vector::Ones(D);
  Vector x0 = Vector::Constant(D, 0.5);
  long generation_base = 0;
  while (static_cast<long>(record.rows.size()) < cfg.max_evals) {
    const long start = static_cast<long>(record.rows.size());
    auto f = [&](const Vector& u) {
      EvalRow row;
      const long local = static_cast<long>(record.rows.size()) - start;
      row.iteration = static_cast<int>(generation_base + local / pop);
      row.point = u;
      row.value = obj.evaluate(u, noise_rng);
      return record.push(std::move(row)).value;
    };
    const CmaResult res =
        cmaes_minimize(f, lower, upper, x0, cfg.init_step, pop, cfg.max_evals - start, cc.tol_fun, rng);
    generation_base += (res.evals + pop - 1) / pop;
    if (res.evals == 0) break;
    if (static_cast<long>(record.rows.size()) < cfg.max_evals) {
      ++record.summary.restarts;
      x0 = uniform_point(D, rng);
    }
  }
  record.summary.iterations = static_cast<int>(generation_base);
  record.summary.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return record;
}

}  // namespace newtonbo
