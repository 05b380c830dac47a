#include "newtonbo/experiment.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace newtonbo {

namespace {

using json = nlohmann::json;

const std::vector<std::string> kModes{"newton-bo", "sobol", "cmaes"};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("invalid seed '" + s + "'");
  return v;
}

/// "N" -> 0..N-1, "a,b,c" -> {a,b,c}.
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  if (text.find(',') == std::string::npos) {
    const std::uint64_t n = parse_u64(text);
    for (std::uint64_t i = 0; i < n; ++i) seeds.push_back(i);
  } else {
    for (const std::string& s : split(text, ',')) seeds.push_back(parse_u64(s));
  }
  return seeds;
}

std::string normalize_key(std::string k) {
  std::replace(k.begin(), k.end(), '-', '_');
  return k;
}

std::string fmt_real(double v) {
  if (std::isnan(v)) return {};
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

json spec_json(const ExperimentSpec& s) {
  return json{{"function", s.function},       {"dim", s.dim},
              {"modes", s.modes},             {"max_evals", s.max_evals},
              {"n_init", s.n_init},           {"batch", s.batch},
              {"num_tr", s.num_tr},           {"tr_update", s.tr_update},
              {"delta_min", s.delta_min},     {"restart_strategy", s.restart_strategy},
              {"seeds", s.seeds},             {"out", s.out_dir},
              {"diagnostics", s.diagnostics}};
}

int worker_count(const ExperimentSpec& spec, std::size_t arms) {
  long n = spec.threads > 0 ? spec.threads : static_cast<long>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  if (const char* env = std::getenv("NEWTONBO_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) n = std::min(n, cap);
  }
  return static_cast<int>(std::clamp<long>(n, 1, static_cast<long>(std::max<std::size_t>(arms, 1))));
}

}  // namespace

void ExperimentSpec::validate() const {
  make_objective(function, dim);  // function name and dim
  if (modes.empty()) throw ConfigError("no mode given");
  for (const std::string& m : modes)
    if (std::find(kModes.begin(), kModes.end(), m) == kModes.end())
      throw ConfigError("unknown mode '" + m + "' (expected newton-bo, sobol or cmaes)");
  if (seeds.empty()) throw ConfigError("seeds must be non-empty");
  if (out_dir.empty()) throw ConfigError("out directory must be non-empty");
  parse_radius_update(tr_update);
  parse_restart_kind(restart_strategy);
  if (max_evals < 1) throw ConfigError("max_evals must be >= 1");
  if (std::find(modes.begin(), modes.end(), "newton-bo") != modes.end())
    optimizer_config(*this, 0).validate();
  else if (batch != num_tr)
    throw ConfigError("batch must equal num_tr");
}

void apply_config_json(ExperimentSpec& spec, const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  try {
    for (const auto& [raw_key, v] : j.items()) {
      const std::string key = normalize_key(raw_key);
      if (key == "function") spec.function = v.get<std::string>();
      else if (key == "dim") spec.dim = v.get<int>();
      else if (key == "mode" || key == "modes") {
        spec.modes = v.is_array() ? v.get<std::vector<std::string>>() : split(v.get<std::string>(), ',');
      } else if (key == "max_evals") spec.max_evals = v.get<long>();
      else if (key == "n_init") spec.n_init = v.get<int>();
      else if (key == "batch") spec.batch = v.get<int>();
      else if (key == "num_tr") spec.num_tr = v.get<int>();
      else if (key == "tr_update") spec.tr_update = v.get<std::string>();
      else if (key == "delta_min") spec.delta_min = v.get<double>();
      else if (key == "restart_strategy") spec.restart_strategy = v.get<std::string>();
      else if (key == "seeds") {
        if (v.is_array()) spec.seeds = v.get<std::vector<std::uint64_t>>();
        else if (v.is_number_unsigned()) spec.seeds = parse_seeds(std::to_string(v.get<std::uint64_t>()));
        else spec.seeds = parse_seeds(v.get<std::string>());
      } else if (key == "out" || key == "out_dir") spec.out_dir = v.get<std::string>();
      else if (key == "diagnostics") spec.diagnostics = v.get<bool>();
      else if (key == "threads") spec.threads = v.get<int>();
      else throw ConfigError("config: unknown key '" + raw_key + "'");
    }
  } catch (const json::type_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentSpec parse_args(const std::vector<std::string>& args) {
  CLI::App app{"Newton-BO benchmark runner"};
  std::string function, mode, tr_update, restart, seeds, out, config;
  int dim = 0, n_init = 0, batch = 0, num_tr = 0, threads = 0;
  long max_evals = 0;
  double delta_min = 0.0;
  bool diagnostics = false;
  app.add_option("--function", function, "ackley or griewank");
  app.add_option("--dim", dim, "problem dimension");
  app.add_option("--mode", mode, "newton-bo, sobol, cmaes (comma-separated for several)");
  app.add_option("--max-evals", max_evals, "evaluation budget per run");
  app.add_option("--n-init", n_init, "initial Sobol design size");
  app.add_option("--batch", batch, "evaluations per iteration (must equal --num-tr)");
  app.add_option("--num-tr", num_tr, "number of trust regions");
  app.add_option("--tr-update", tr_update, "turbo or ratio");
  app.add_option("--delta-min", delta_min, "restart threshold on the radius");
  app.add_option("--restart-strategy", restart, "thompson, max-variance or random");
  app.add_option("--seeds", seeds, "seed count N (0..N-1) or comma-separated list");
  app.add_option("--out", out, "output directory");
  app.add_option("--config", config, "flat JSON file; flags override its keys");
  app.add_option("--threads", threads, "worker pool size");
  app.add_flag("--diagnostics", diagnostics, "record uniform-bound quantities of the final fit");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  ExperimentSpec spec;
  if (app.count("--config")) {
    std::ifstream in(config);
    if (!in) throw ConfigError("cannot read config file '" + config + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    apply_config_json(spec, buf.str());
  }
  if (app.count("--function")) spec.function = function;
  if (app.count("--dim")) spec.dim = dim;
  if (app.count("--mode")) spec.modes = split(mode, ',');
  if (app.count("--max-evals")) spec.max_evals = max_evals;
  if (app.count("--n-init")) spec.n_init = n_init;
  if (app.count("--batch")) spec.batch = batch;
  if (app.count("--num-tr")) spec.num_tr = num_tr;
  if (app.count("--tr-update")) spec.tr_update = tr_update;
  if (app.count("--delta-min")) spec.delta_min = delta_min;
  if (app.count("--restart-strategy")) spec.restart_strategy = restart;
  if (app.count("--seeds")) spec.seeds = parse_seeds(seeds);
  if (app.count("--out")) spec.out_dir = out;
  if (app.count("--threads")) spec.threads = threads;
  if (app.count("--diagnostics")) spec.diagnostics = diagnostics;
  spec.validate();
  return spec;
}

OptimizerConfig optimizer_config(const ExperimentSpec& spec, std::uint64_t seed) {
  OptimizerConfig cfg;
  cfg.n_init = spec.n_init;
  cfg.batch = spec.batch;
  cfg.num_tr = spec.num_tr;
  cfg.max_evals = spec.max_evals;
  cfg.tr.mode = parse_radius_update(spec.tr_update);
  cfg.tr.delta_min = spec.delta_min;
  cfg.restart.kind = parse_restart_kind(spec.restart_strategy);
  cfg.seed = seed;
  cfg.diagnostics = spec.diagnostics;
  return cfg;
}

BaselineConfig baseline_config(const ExperimentSpec& spec, std::uint64_t seed) {
  BaselineConfig cfg;
  cfg.max_evals = spec.max_evals;
  cfg.seed = seed;
  return cfg;
}

RunRecord run_arm(const ExperimentSpec& spec, const std::string& mode, std::uint64_t seed) {
  const Objective obj = make_objective(spec.function, spec.dim);
  if (mode == "newton-bo") return run_newton_bo(obj, optimizer_config(spec, seed));
  if (mode == "sobol") return run_sobol(obj, baseline_config(spec, seed));
  if (mode == "cmaes") return run_cmaes(obj, baseline_config(spec, seed));
  throw ConfigError("unknown mode '" + mode + "'");
}

void write_csv(std::ostream& os, const RunRecord& record, int dim) {
  os << "eval_index,iteration,tr_id,value,best_so_far,delta,grad_norm,lambda,restart_flag";
  for (int d = 0; d < dim; ++d) os << ",x" << d;
  os << '\n';
  for (const EvalRow& r : record.rows) {
    os << r.eval_index << ',' << r.iteration << ',' << r.tr_id << ',' << fmt_real(r.value) << ','
       << fmt_real(r.best_so_far) << ',' << fmt_real(r.delta) << ',' << fmt_real(r.grad_norm) << ','
       << fmt_real(r.lambda) << ',' << (r.restart_flag ? 1 : 0);
    for (Eigen::Index d = 0; d < r.point.size(); ++d) os << ',' << fmt_real(r.point(d));
    os << '\n';
  }
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

int execute(const ExperimentSpec& spec, std::ostream& log) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(spec.out_dir, ec);
  if (ec || !fs::is_directory(spec.out_dir)) {
    log << "error: cannot create output directory '" << spec.out_dir << "'\n";
    return 2;
  }

  struct Arm {
    std::string mode;
    std::uint64_t seed;
    RunRecord record;
    std::string error;
    bool io_error = false;
  };
  std::vector<Arm> arms;
  for (const std::string& m : spec.modes)
    for (std::uint64_t s : spec.seeds) arms.push_back({m, s, {}, {}, false});

  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&]() {
    for (std::size_t i = next++; i < arms.size(); i = next++) {
      Arm& arm = arms[i];
      try {
        arm.record = run_arm(spec, arm.mode, arm.seed);
      } catch (const std::exception& e) {
        arm.error = e.what();
        arm.record.summary.aborted = true;
        arm.record.summary.abort_reason = e.what();
      }
      const fs::path path = fs::path(spec.out_dir) / (arm.mode + "_" + std::to_string(arm.seed) + ".csv");
      std::ofstream out(path, std::ios::binary);
      if (out) {
        write_csv(out, arm.record, spec.dim);
        out.close();
      }
      if (!out) arm.io_error = true;
      std::lock_guard<std::mutex> lock(log_mutex);
      log << arm.mode << " seed " << arm.seed << ": best " << fmt_real(arm.record.final_best()) << " ("
          << arm.record.rows.size() << " evals, " << fmt_real(arm.record.summary.wall_time_s) << " s)"
          << (arm.record.summary.aborted ? " ABORTED: " + arm.record.summary.abort_reason : "") << '\n';
    }
  };
  const int n_workers = worker_count(spec, arms.size());
  std::vector<std::thread> pool;
  for (int t = 1; t < n_workers; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  json summary;
  summary["config"] = spec_json(spec);
  summary["arms"] = json::object();
  bool any_abort = false, any_io = false;
  for (const std::string& m : spec.modes) {
    json arm_json;
    std::vector<double> finals;
    std::vector<const RunRecord*> recs;
    json runs = json::array();
    json aborts = json::array();
    for (const Arm& a : arms) {
      if (a.mode != m) continue;
      any_io = any_io || a.io_error;
      const RunSummary& s = a.record.summary;
      json run{{"seed", a.seed},
               {"final_best", a.record.final_best()},
               {"evaluations", a.record.rows.size()},
               {"iterations", s.iterations},
               {"restarts", s.restarts},
               {"restart_fallbacks", s.restart_fallbacks},
               {"fit_recoveries", s.fit_recoveries},
               {"wall_time_s", s.wall_time_s},
               {"aborted", s.aborted},
               {"config", s.config}};
      if (s.diagnostics) {
        const BoundDiagnostic& d = *s.diagnostics;
        run["diagnostics"] = json{{"tau", d.tau},     {"delta", d.delta},
                                  {"log_covering_count", d.log_covering_count},
                                  {"beta", d.beta},   {"L_k", d.L_k},
                                  {"L_mu", d.L_mu},   {"omega_sigma", d.omega_sigma},
                                  {"L_f_hat", d.L_f_hat}, {"gamma", d.gamma}};
      }
      runs.push_back(run);
      if (s.aborted) {
        any_abort = true;
        aborts.push_back(json{{"seed", a.seed}, {"reason", s.abort_reason}});
      }
      if (!a.record.rows.empty()) {
        finals.push_back(a.record.final_best());
        recs.push_back(&a.record);
      }
    }
    arm_json["runs"] = runs;
    arm_json["aborts"] = aborts;
    arm_json["final_best_median"] = quantile(finals, 0.5);
    arm_json["final_best_q25"] = quantile(finals, 0.25);
    arm_json["final_best_q75"] = quantile(finals, 0.75);
    // Median best-so-far per evaluation index across seeds.
    std::size_t len = recs.empty() ? 0 : recs.front()->rows.size();
    for (const RunRecord* r : recs) len = std::min(len, r->rows.size());
    json traj = json::array(), traj_q25 = json::array(), traj_q75 = json::array();
    for (std::size_t i = 0; i < len; ++i) {
      std::vector<double> col;
      for (const RunRecord* r : recs) col.push_back(r->rows[i].best_so_far);
      traj.push_back(quantile(col, 0.5));
      traj_q25.push_back(quantile(col, 0.25));
      traj_q75.push_back(quantile(col, 0.75));
    }
    arm_json["best_trajectory_median"] = traj;
    arm_json["best_trajectory_q25"] = traj_q25;
    arm_json["best_trajectory_q75"] = traj_q75;
    summary["arms"][m] = arm_json;
  }

  std::ofstream out(std::filesystem::path(spec.out_dir) / "summary.json");
  if (out) {
    out << summary.dump(2) << '\n';
    out.close();
  }
  if (!out || any_io) {
    log << "error: failed to write results to '" << spec.out_dir << "'\n";
    return 2;
  }
  return any_abort ? 1 : 0;
}

}  // namespace newtonbo
