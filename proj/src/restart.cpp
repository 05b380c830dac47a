#include "newtonbo/restart.hpp"

#include "newtonbo/sobol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace newtonbo {

RestartKind parse_restart_kind(const std::string& name) {
  if (name == "thompson") return RestartKind::thompson;
  if (name == "max-variance" || name == "max_variance") return RestartKind::max_variance;
  if (name == "random") return RestartKind::random;
  throw ConfigError("unknown restart strategy '" + name + "' (expected thompson, max-variance or random)");
}

std::string to_string(RestartKind kind) {
  switch (kind) {
    case RestartKind::thompson: return "thompson";
    case RestartKind::max_variance: return "max-variance";
    case RestartKind::random: return "random";
  }
  return "unknown";
}

int RestartStrategy::resolved_pool_size(Eigen::Index dim) const {
  if (pool_size > 0) return pool_size;
  return 512 * static_cast<int>(std::min<Eigen::Index>(dim, 10));
}

void RestartStrategy::validate() const {
  if (pool_size != 0 && pool_size < 2) throw ConfigError("restart: pool_size must be >= 2");
  if (num_samples < 1) throw ConfigError("restart: num_samples must be >= 1");
  if (max_joint_size < 2) throw ConfigError("restart: max_joint_size must be >= 2");
  if (!(exclusion_radius >= 0.0)) throw ConfigError("restart: exclusion radius must be nonnegative");
}

Matrix initial_design(Eigen::Index n, int dim, Rng& rng) {
  if (n < 1) throw DomainError("initial_design: n must be >= 1");
  return sobol_points(n, dim, rng);
}

namespace {

bool excluded(const Eigen::Ref<const Vector>& x, const std::vector<Vector>& centers, double radius) {
  for (const Vector& c : centers)
    if ((x - c).cwiseAbs().maxCoeff() < radius) return true;
  return false;
}

/// Draws num_samples joint posterior samples over the pool rows (one per
/// column of the result).
Matrix joint_samples(const GPModel& model, const Matrix& pool, int num_samples, Rng& rng) {
  const double s2 = model.y_scale() * model.y_scale();
  Matrix cov = model.posterior_covariance(pool) / s2;
  Vector mu, sigma;
  model.posterior_batch(pool, mu, sigma);
  const double sf2 = model.params().signal_variance;
  Eigen::LLT<Matrix> llt;
  for (double jitter = 1e-8 * sf2;; jitter *= 10.0) {
    if (jitter > 1e-2 * sf2 * (1 + 1e-9)) throw NumericalError("restart: pool covariance not factorizable");
    cov.diagonal().array() += jitter;
    llt.compute(cov);
    if (llt.info() == Eigen::Success) break;
    cov.diagonal().array() -= jitter;
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix Z(pool.rows(), num_samples);
  for (Eigen::Index j = 0; j < Z.cols(); ++j)
    for (Eigen::Index i = 0; i < Z.rows(); ++i) Z(i, j) = normal(rng);
  Matrix F = llt.matrixL() * Z;
  F *= model.y_scale();
  F.colwise() += mu;
  return F;
}

Vector uniform_outside(Eigen::Index dim, const std::vector<Vector>& centers, double radius, Rng& rng,
                       bool& fallback) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Vector u = uniform_point(dim, rng);
    if (!excluded(u, centers, radius)) {
      fallback = false;
      return u;
    }
  }
  fallback = true;
  return uniform_point(dim, rng);
}

}  // namespace

std::vector<RestartChoice> restart_points(const GPModel& model, const Dataset& data,
                                          const RestartStrategy& strat,
                                          const std::vector<Vector>& active_centers, int count, Rng& rng) {
  (void)data;
  const Eigen::Index D = model.dim();
  std::vector<Vector> centers = active_centers;
  std::vector<RestartChoice> out;
  if (count <= 0) return out;

  if (strat.kind == RestartKind::random) {
    for (int k = 0; k < count; ++k) {
      RestartChoice c;
      c.point = uniform_outside(D, centers, strat.exclusion_radius, rng, c.fallback);
      centers.push_back(c.point);
      out.push_back(std::move(c));
    }
    return out;
  }

  const Matrix pool = sobol_points(strat.resolved_pool_size(D), static_cast<int>(D), rng);
  std::vector<char> allowed(pool.rows());
  auto refresh_allowed = [&] {
    for (Eigen::Index i = 0; i < pool.rows(); ++i)
      allowed[i] = !excluded(pool.row(i).transpose(), centers, strat.exclusion_radius);
  };

  Matrix scores;  // lower is better, one column per pick source
  if (strat.kind == RestartKind::max_variance) {
    Vector mu, sigma;
    model.posterior_batch(pool, mu, sigma);
    scores = -sigma;
  } else if (pool.rows() <= strat.max_joint_size) {
    scores = joint_samples(model, pool, strat.num_samples, rng);
  } else {
    // Joint sampling over the max_joint_size pool points with the lowest
    // lower confidence bound; the rest never win a draw.
    Vector mu, sigma;
    model.posterior_batch(pool, mu, sigma);
    const Vector lcb = mu - strat.prescreen_width * sigma;
    std::vector<Eigen::Index> idx(pool.rows());
    for (Eigen::Index i = 0; i < pool.rows(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return lcb(a) < lcb(b); });
    Matrix sub(strat.max_joint_size, D);
    for (int i = 0; i < strat.max_joint_size; ++i) sub.row(i) = pool.row(idx[i]);
    const Matrix sub_scores = joint_samples(model, sub, strat.num_samples, rng);
    scores = Matrix::Constant(pool.rows(), strat.num_samples, std::numeric_limits<double>::infinity());
    for (int i = 0; i < strat.max_joint_size; ++i) scores.row(idx[i]) = sub_scores.row(i);
  }

  std::vector<int> sample_order(scores.cols());
  for (int j = 0; j < static_cast<int>(sample_order.size()); ++j) sample_order[j] = j;
  std::shuffle(sample_order.begin(), sample_order.end(), rng);

  for (int k = 0; k < count; ++k) {
    refresh_allowed();
    const Eigen::Index col = sample_order[k % sample_order.size()];
    Eigen::Index best = -1;
    double best_score = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < pool.rows(); ++i) {
      if (allowed[i] && scores(i, col) < best_score && std::isfinite(scores(i, col))) {
        best_score = scores(i, col);
        best = i;
      }
    }
    RestartChoice c;
    if (best < 0) {
      c.point = uniform_outside(D, centers, strat.exclusion_radius, rng, c.fallback);
      c.fallback = true;
    } else {
      c.point = pool.row(best).transpose();
    }
    centers.push_back(c.point);
    out.push_back(std::move(c));
  }
  return out;
}

RestartChoice restart_point(const GPModel& model, const Dataset& data, const RestartStrategy& strat,
                            const std::vector<Vector>& active_centers, Rng& rng) {
  return restart_points(model, data, strat, active_centers, 1, rng).front();
}

}  // namespace newtonbo
