#include "newtonbo/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace newtonbo {

int CmaConfig::resolved_population(Eigen::Index dim) const {
  if (population > 0) return std::max(population, 4);
  return 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(dim))));
}

long CmaConfig::resolved_max_evals(Eigen::Index dim) const {
  return max_evals > 0 ? max_evals : 100 * static_cast<long>(dim);
}

CmaResult cmaes_minimize(const std::function<double(const Vector&)>& f, const Vector& lower,
                         const Vector& upper, const Vector& x0, double sigma0, int population,
                         long max_evals, double tol_fun, Rng& rng) {
  const Eigen::Index n = x0.size();
  const double nd = static_cast<double>(n);
  if (lower.size() != n || upper.size() != n) throw DomainError("cmaes: bound dimension mismatch");
  if (!(sigma0 > 0.0)) throw DomainError("cmaes: initial step must be positive");
  const int lambda = std::max(population, 4);
  const int mu = lambda / 2;

  Vector weights(mu);
  for (int i = 0; i < mu; ++i) weights(i) = std::log(mu + 0.5) - std::log(i + 1.0);
  weights /= weights.sum();
  const double mu_eff = 1.0 / weights.squaredNorm();

  const double c_sigma = (mu_eff + 2.0) / (nd + mu_eff + 5.0);
  const double d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (nd + 1.0)) - 1.0) + c_sigma;
  const double c_c = (4.0 + mu_eff / nd) / (nd + 4.0 + 2.0 * mu_eff / nd);
  const double c_1 = 2.0 / ((nd + 1.3) * (nd + 1.3) + mu_eff);
  const double c_mu = std::min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((nd + 2.0) * (nd + 2.0) + mu_eff));
  const double chi_n = std::sqrt(nd) * (1.0 - 1.0 / (4.0 * nd) + 1.0 / (21.0 * nd * nd));
  const std::size_t hist_len = 10 + static_cast<std::size_t>(std::ceil(30.0 * nd / lambda));

  Vector mean = x0.cwiseMax(lower).cwiseMin(upper);
  double sigma = sigma0;
  Matrix C = Matrix::Identity(n, n);
  Matrix B = Matrix::Identity(n, n);
  Vector Dg = Vector::Ones(n);
  Vector p_sigma = Vector::Zero(n);
  Vector p_c = Vector::Zero(n);

  CmaResult best{mean, std::numeric_limits<double>::infinity(), 0, CmaStop::budget};
  std::normal_distribution<double> normal(0.0, 1.0);
  std::deque<double> best_history;
  Matrix Y(n, lambda);
  Matrix Xc(n, lambda);
  std::vector<double> fit(lambda);
  std::vector<int> order(lambda);

  for (long generation = 0;; ++generation) {
    const long remaining = max_evals - best.evals;
    if (remaining <= 0) {
      best.reason = CmaStop::budget;
      return best;
    }
    const int batch = static_cast<int>(std::min<long>(lambda, remaining));
    for (int k = 0; k < lambda; ++k) {
      Vector z(n);
      for (Eigen::Index j = 0; j < n; ++j) z(j) = normal(rng);
      Vector x = mean + sigma * (B * Dg.cwiseProduct(z));
      x = x.cwiseMax(lower).cwiseMin(upper);
      Xc.col(k) = x;
      Y.col(k) = (x - mean) / sigma;
    }
    for (int k = 0; k < batch; ++k) {
      fit[k] = f(Xc.col(k));
      ++best.evals;
      if (fit[k] < best.f) {
        best.f = fit[k];
        best.x = Xc.col(k);
      }
    }
    if (batch < lambda) {
      best.reason = CmaStop::budget;
      return best;
    }

    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fit[a] < fit[b]; });

    Vector y_w = Vector::Zero(n);
    for (int i = 0; i < mu; ++i) y_w += weights(i) * Y.col(order[i]);
    mean += sigma * y_w;
    mean = mean.cwiseMax(lower).cwiseMin(upper);

    // C^{-1/2} y_w = B D^{-1} B' y_w
    const Vector c_inv_sqrt_yw = B * (B.transpose() * y_w).cwiseQuotient(Dg);
    p_sigma = (1.0 - c_sigma) * p_sigma + std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * c_inv_sqrt_yw;
    const double ps_norm = p_sigma.norm();
    const double h_denom = std::sqrt(1.0 - std::pow(1.0 - c_sigma, 2.0 * (generation + 1)));
    const bool h_sigma = ps_norm / h_denom / chi_n < 1.4 + 2.0 / (nd + 1.0);
    p_c = (1.0 - c_c) * p_c + (h_sigma ? std::sqrt(c_c * (2.0 - c_c) * mu_eff) : 0.0) * y_w;

    Matrix rank_mu = Matrix::Zero(n, n);
    for (int i = 0; i < mu; ++i) rank_mu += weights(i) * Y.col(order[i]) * Y.col(order[i]).transpose();
    const double delta_h = h_sigma ? 0.0 : c_c * (2.0 - c_c);
    C = (1.0 - c_1 - c_mu) * C + c_1 * (p_c * p_c.transpose() + delta_h * C) + c_mu * rank_mu;
    C = 0.5 * (C + C.transpose());
    sigma *= std::exp((c_sigma / d_sigma) * (ps_norm / chi_n - 1.0));

    const Eigen::SelfAdjointEigenSolver<Matrix> eig(C);
    const Vector ev = eig.eigenvalues().cwiseMax(1e-300);
    B = eig.eigenvectors();
    Dg = ev.cwiseSqrt();

    best_history.push_back(fit[order[0]]);
    if (best_history.size() > hist_len) best_history.pop_front();
    const auto [lo_it, hi_it] = std::minmax_element(fit.begin(), fit.end());
    const auto [hlo, hhi] = std::minmax_element(best_history.begin(), best_history.end());
    const double f_range = std::max(*hi_it, *hhi) - std::min(*lo_it, *hlo);
    if (best_history.size() >= hist_len && f_range < tol_fun) {
      best.reason = CmaStop::tol_fun;
      return best;
    }
    const double scale = (upper - lower).cwiseAbs().maxCoeff();
    if (sigma * Dg.maxCoeff() < 1e-12 * std::max(scale, 1e-300)) {
      best.reason = CmaStop::tol_x;
      return best;
    }
    if (ev.maxCoeff() > 1e14 * ev.minCoeff() || !std::isfinite(sigma)) {
      best.reason = CmaStop::condition;
      return best;
    }
  }
}

}  // namespace newtonbo
