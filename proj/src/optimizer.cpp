#include "newtonbo/optimizer.hpp"

#include "newtonbo/local_model.hpp"
#include "newtonbo/qp_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

namespace newtonbo {

void OptimizerConfig::validate() const {
  if (n_init < 1) throw ConfigError("optimizer: n_init must be >= 1");
  if (batch < 1 || num_tr < 1) throw ConfigError("optimizer: batch and num_tr must be >= 1");
  if (batch != num_tr) throw ConfigError("optimizer: batch must equal num_tr (one candidate per region)");
  if (num_tr > n_init) throw ConfigError("optimizer: num_tr must not exceed n_init");
  if (max_evals < n_init) throw ConfigError("optimizer: max_evals must be >= n_init");
  if (full_refit_every < 1) throw ConfigError("optimizer: full_refit_every must be >= 1");
  tr.validate();
  restart.validate();
}

std::vector<Eigen::Index> init_centers(const Dataset& data, int q, double min_distance) {
  if (q < 1 || q > data.size()) throw DomainError("init_centers: need 1 <= q <= dataset size");
  std::vector<Eigen::Index> order(data.size());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return data.y_raw(a) < data.y_raw(b); });

  for (double dist = min_distance; dist > 1e-12; dist *= 0.5) {
    std::vector<Eigen::Index> chosen;
    for (Eigen::Index idx : order) {
      const bool far = std::all_of(chosen.begin(), chosen.end(), [&](Eigen::Index c) {
        return (data.X.row(idx) - data.X.row(c)).cwiseAbs().maxCoeff() >= dist;
      });
      if (far) chosen.push_back(idx);
      if (static_cast<int>(chosen.size()) == q) return chosen;
    }
  }
  // Only exact duplicates remain indistinguishable: take the q best.
  return {order.begin(), order.begin() + q};
}

namespace {

struct RegionSlot {
  TrustRegionState state;
  bool pending_center = false;  // center chosen by a restart, not yet evaluated
};

struct Candidate {
  Vector point;
  double delta = 0.0;
  double grad_norm = std::numeric_limits<double>::quiet_NaN();
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double f0 = 0.0;
  double m_star = 0.0;
  bool restart_eval = false;
};

std::map<std::string, std::string> config_echo(const Objective& obj, const OptimizerConfig& cfg) {
  auto num = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  return {
      {"function", obj.name()},
      {"dim", std::to_string(obj.dim())},
      {"n_init", std::to_string(cfg.n_init)},
      {"batch", std::to_string(cfg.batch)},
      {"num_tr", std::to_string(cfg.num_tr)},
      {"max_evals", std::to_string(cfg.max_evals)},
      {"tr_update", to_string(cfg.tr.mode)},
      {"delta_init", num(cfg.tr.delta_init)},
      {"delta_max", num(cfg.tr.delta_max)},
      {"delta_min", num(cfg.tr.delta_min)},
      {"tau_succ", std::to_string(cfg.tr.tau_succ)},
      {"tau_fail", std::to_string(cfg.tr.tau_fail)},
      {"restart_strategy", to_string(cfg.restart.kind)},
      {"seed", std::to_string(cfg.seed)},
  };
}

/// Distance-to-data check against the dataset and earlier candidates of the
/// same iteration.
bool near_existing(const Vector& x, const Dataset& data, const std::vector<Candidate>& cands, double tol) {
  for (Eigen::Index i = 0; i < data.size(); ++i)
    if ((data.X.row(i).transpose() - x).cwiseAbs().maxCoeff() < tol) return true;
  for (const Candidate& c : cands)
    if ((c.point - x).cwiseAbs().maxCoeff() < tol) return true;
  return false;
}

}  // namespace

RunRecord run_newton_bo(const Objective& obj, const OptimizerConfig& cfg) {
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const int D = obj.dim();

  RunRecord record;
  record.summary.method = "newton-bo";
  record.summary.seed = cfg.seed;
  record.summary.config = config_echo(obj, cfg);

  Rng noise_rng(derive_seed(cfg.seed, 1));
  Rng fit_rng(derive_seed(cfg.seed, 2));
  Rng restart_rng(derive_seed(cfg.seed, 3));
  Rng design_rng(derive_seed(cfg.seed, 4));

  auto finish = [&]() {
    record.summary.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return record;
  };

  // Initial design.
  const Matrix X0 = initial_design(cfg.n_init, D, design_rng);
  Vector y0(cfg.n_init);
  for (int i = 0; i < cfg.n_init; ++i) {
    try {
      y0(i) = obj.evaluate(X0.row(i).transpose(), noise_rng);
    } catch (const std::exception& e) {
      record.summary.aborted = true;
      record.summary.abort_reason = e.what();
      return finish();
    }
    EvalRow row;
    row.iteration = 0;
    row.point = X0.row(i).transpose();
    row.value = y0(i);
    record.push(std::move(row));
  }
  Dataset data(X0, y0);
  if (static_cast<long>(record.rows.size()) >= cfg.max_evals) return finish();

  std::vector<RegionSlot> regions;
  for (Eigen::Index idx : init_centers(data, cfg.num_tr)) {
    regions.push_back({TrustRegionState::start(data.X.row(idx).transpose(), data.y_raw(idx), cfg.tr), false});
  }

  std::optional<GpHyperparameters> warm;
  bool flat_surrogate = false;  // a region stopped on the gradient test last iteration
  for (int iteration = 1; static_cast<long>(record.rows.size()) < cfg.max_evals; ++iteration) {
    record.summary.iterations = iteration;

    // Global GP on all data.
    GpFitConfig fit_cfg = cfg.gp;
    const bool full = !warm || flat_surrogate || (iteration - 1) % cfg.full_refit_every == 0;
    if (!full) {
      fit_cfg.num_starts = 1;
      fit_cfg.data_scale_start = false;
    }
    std::optional<GPModel> model;
    try {
      model.emplace(fit(data, D, fit_rng, fit_cfg, warm));
    } catch (const NumericalError&) {
      ++record.summary.fit_recoveries;
      fit_cfg.noise_floor = std::max(fit_cfg.noise_floor, cfg.recovery_noise_floor);
      try {
        model.emplace(fit(data, D, fit_rng, fit_cfg, std::nullopt));
      } catch (const NumericalError& e) {
        record.summary.aborted = true;
        record.summary.abort_reason = std::string("GP fit failed: ") + e.what();
        return finish();
      }
    }
    warm = model->hyperparameters();

    // One candidate per region. The GP is fixed for the whole iteration; the
    // last iteration is truncated to the remaining budget.
    const int active_regions =
        static_cast<int>(std::min<long>(cfg.num_tr, cfg.max_evals - static_cast<long>(record.rows.size())));
    std::vector<Candidate> cands;
    for (int l = 0; l < active_regions; ++l) {
      RegionSlot& slot = regions[l];
      Candidate c;
      c.delta = slot.state.delta;
      if (slot.pending_center) {
        c.point = slot.state.center;
        c.restart_eval = true;
      } else {
        Rng region_rng(derive_seed(derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(iteration)), l));
        c.lambda = sample_lambda(region_rng);
        const QuadraticModel qm = build_model(*model, slot.state.center, c.lambda);
        const QpSolution sol = solve_qp(qm, slot.state.delta, cfg.cma, region_rng);
        c.grad_norm = qm.g.norm();
        c.f0 = qm.f0;
        c.m_star = sol.model_value;
        const StepBox box(slot.state.center, slot.state.delta);
        c.point = slot.state.center + sol.step;
        for (int attempt = 0; attempt < 16 && near_existing(c.point, data, cands, 1e-9); ++attempt) {
          std::uniform_real_distribution<double> off(-1e-6, 1e-6);
          Vector s = sol.step;
          for (int d = 0; d < D; ++d) s(d) += off(region_rng);
          c.point = slot.state.center + box.project(s);
        }
        c.point = c.point.cwiseMax(0.0).cwiseMin(1.0);
      }
      cands.push_back(std::move(c));
    }

    // Evaluate.
    std::vector<double> values(cands.size());
    for (std::size_t l = 0; l < cands.size(); ++l) {
      try {
        values[l] = obj.evaluate(cands[l].point, noise_rng);
      } catch (const std::exception& e) {
        record.summary.aborted = true;
        record.summary.abort_reason = e.what();
        return finish();
      }
      EvalRow row;
      row.iteration = iteration;
      row.tr_id = static_cast<int>(l);
      row.point = cands[l].point;
      row.value = values[l];
      row.delta = cands[l].delta;
      row.grad_norm = cands[l].grad_norm;
      row.lambda = cands[l].lambda;
      row.restart_flag = cands[l].restart_eval;
      record.push(std::move(row));
    }

    // Synchronization point: data append and region updates.
    for (std::size_t l = 0; l < cands.size(); ++l) data.append(cands[l].point, values[l]);

    std::vector<int> terminated;
    flat_surrogate = false;
    for (int l = 0; l < active_regions; ++l) {
      RegionSlot& slot = regions[l];
      const Candidate& c = cands[l];
      if (c.restart_eval) {
        slot.state = TrustRegionState::start(c.point, values[l], cfg.tr);
        slot.pending_center = false;
        continue;
      }
      const double f_old = slot.state.best_value;
      const bool improved = values[l] < f_old;
      if (cfg.tr.mode == RadiusUpdate::turbo) {
        slot.state = update_turbo(slot.state, improved, cfg.tr);
      } else {
        slot.state = update_ratio(slot.state, rho(f_old, values[l], c.f0, c.m_star), c.grad_norm, cfg.tr);
      }
      recenter(slot.state, c.point, values[l]);
      if (should_restart(slot.state, c.grad_norm, cfg.tr)) {
        slot.state.status = RegionStatus::terminated;
        flat_surrogate = flat_surrogate || c.grad_norm < cfg.tr.grad_tol;
        terminated.push_back(l);
      }
    }

    if (!terminated.empty()) {
      std::vector<Vector> active;
      for (const RegionSlot& s : regions)
        if (s.state.active()) active.push_back(s.state.center);
      const std::vector<RestartChoice> picks =
          restart_points(*model, data, cfg.restart, active, static_cast<int>(terminated.size()), restart_rng);
      for (std::size_t k = 0; k < terminated.size(); ++k) {
        RegionSlot& slot = regions[terminated[k]];
        slot.state = TrustRegionState::start(picks[k].point, std::numeric_limits<double>::infinity(), cfg.tr);
        slot.pending_center = true;
        ++record.summary.restarts;
        if (picks[k].fallback) ++record.summary.restart_fallbacks;
      }
    }

    if (cfg.diagnostics && static_cast<long>(record.rows.size()) >= cfg.max_evals) {
      const UniformBoundReport r = uniform_bound(*model, data, 0.01, 0.1);
      record.summary.diagnostics =
          BoundDiagnostic{r.tau, r.delta, r.log_covering_count, r.beta, r.L_k, r.L_mu, r.omega_sigma, r.L_f_hat, r.gamma};
    }
  }
  return finish();
}

}  // namespace newtonbo
