#include "newtonbo/gp.hpp"

#include "lbfgs.hpp"
#include "newtonbo/sobol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace newtonbo {

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(Matrix X_in, Vector y) : X(std::move(X_in)), y_raw(std::move(y)) {
  if (X.rows() != y_raw.size()) throw DomainError("dataset: X rows and y size differ");
  restandardize();
}

void Dataset::append(const Eigen::Ref<const Vector>& x, double y) {
  if (X.rows() > 0 && x.size() != X.cols()) throw DomainError("dataset: dimension mismatch");
  X.conservativeResize(X.rows() + 1, x.size());
  X.row(X.rows() - 1) = x.transpose();
  y_raw.conservativeResize(y_raw.size() + 1);
  y_raw(y_raw.size() - 1) = y;
  restandardize();
}

void Dataset::append(const Matrix& Xnew, const Vector& ynew) {
  if (Xnew.rows() != ynew.size()) throw DomainError("dataset: X rows and y size differ");
  const Eigen::Index n0 = X.rows();
  X.conservativeResize(n0 + Xnew.rows(), Xnew.cols());
  X.bottomRows(Xnew.rows()) = Xnew;
  y_raw.conservativeResize(n0 + ynew.size());
  y_raw.tail(ynew.size()) = ynew;
  restandardize();
}

void Dataset::restandardize() {
  const Eigen::Index n = y_raw.size();
  if (n == 0) {
    y_std.resize(0);
    y_mean = 0.0;
    y_scale = 1.0;
    best_index = 0;
    return;
  }
  y_mean = y_raw.mean();
  const double var = n > 1 ? (y_raw.array() - y_mean).square().sum() / static_cast<double>(n - 1) : 0.0;
  y_scale = var > 0.0 ? std::sqrt(var) : 1.0;
  y_std = (y_raw.array() - y_mean) / y_scale;
  y_raw.minCoeff(&best_index);
}

// ---------------------------------------------------------------------------
// Hyperparameter packing and priors

double lengthscale_prior_mean(int dim) { return -4.0 + 0.5 * std::log(static_cast<double>(dim)); }

double lengthscale_prior_median(int dim) { return std::exp(lengthscale_prior_mean(dim)); }

Vector pack_hyperparameters(const GpHyperparameters& h, const GpFitConfig& cfg) {
  const Eigen::Index D = h.kernel.dim();
  Vector theta(D + 2);
  theta.head(D) = h.kernel.lengthscales.array().log().matrix();
  theta(D) = std::log(h.kernel.signal_variance);
  theta(D + 1) = std::log(std::max(h.noise_var - cfg.noise_floor, 1e-300));
  return theta;
}

GpHyperparameters unpack_hyperparameters(const Eigen::Ref<const Vector>& theta, const GpFitConfig& cfg) {
  const Eigen::Index D = theta.size() - 2;
  GpHyperparameters h;
  h.kernel.lengthscales = theta.head(D).array().exp().matrix();
  h.kernel.signal_variance = std::exp(theta(D));
  h.noise_var = cfg.noise_floor + std::exp(theta(D + 1));
  return h;
}

namespace {

Vector prior_means(Eigen::Index D, const GpFitConfig& cfg) {
  Vector mean(D + 2);
  mean.head(D).setConstant(lengthscale_prior_mean(static_cast<int>(D)));
  mean(D) = cfg.signal_prior_mean;
  mean(D + 1) = cfg.noise_prior_mean;
  return mean;
}

GpHyperparameters default_hyperparameters(Eigen::Index D, const GpFitConfig& cfg) {
  return unpack_hyperparameters(prior_means(D, cfg), cfg);
}

constexpr double kSigmaClamp = 1e-6;

}  // namespace

HyperObjective negative_log_posterior(const Dataset& data, const Eigen::Ref<const Vector>& theta,
                                      const GpFitConfig& cfg) {
  const Eigen::Index D = data.dim();
  const Eigen::Index n = data.size();
  if (theta.size() != D + 2) throw DomainError("negative_log_posterior: theta size mismatch");
  const GpHyperparameters h = unpack_hyperparameters(theta, cfg);
  if (!h.kernel.valid() || !std::isfinite(h.noise_var))
    return {std::numeric_limits<double>::infinity(), Vector::Zero(D + 2)};

  const Matrix K = kernel::cross(h.kernel, data.X, data.X);
  Matrix base = K;
  base.diagonal().array() += h.noise_var;
  const kernel::GramFactor factor = kernel::factor_with_jitter(base, h.kernel.signal_variance);
  const Vector alpha = factor.llt.solve(data.y_std);
  const Matrix L = factor.llt.matrixL();

  const Vector prior_mu = prior_means(D, cfg);
  const double inv_var = 1.0 / (cfg.prior_sd * cfg.prior_sd);
  const double lml = -0.5 * data.y_std.dot(alpha) - L.diagonal().array().log().sum() -
                     0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  const double log_prior = -0.5 * inv_var * (theta - prior_mu).squaredNorm();

  // d lml / d theta_j = 0.5 tr(W dA/dtheta_j), W = alpha alpha^T - A^{-1}
  Matrix W = factor.llt.solve(Matrix::Identity(n, n));
  W = alpha * alpha.transpose() - W;
  const Matrix M = W.cwiseProduct(K);
  const Vector rowsum = M.rowwise().sum();
  const Matrix MX = M * data.X;
  Vector grad(D + 2);
  for (Eigen::Index d = 0; d < D; ++d) {
    const double sq_term = data.X.col(d).array().square().matrix().dot(rowsum);
    const double cross_term = data.X.col(d).dot(MX.col(d));
    const double inv_l2 = 1.0 / (h.kernel.lengthscales(d) * h.kernel.lengthscales(d));
    grad(d) = 0.5 * inv_l2 * (2.0 * sq_term - 2.0 * cross_term);
  }
  grad(D) = 0.5 * M.sum();
  grad(D + 1) = 0.5 * std::exp(theta(D + 1)) * W.trace();
  grad -= inv_var * (theta - prior_mu);

  return {-(lml + log_prior), -grad};
}

// ---------------------------------------------------------------------------
// GPModel

GPModel::GPModel(const Dataset& data, GpHyperparameters hyper)
    : hyper_(std::move(hyper)),
      X_(data.X),
      y_std_(data.y_std),
      y_mean_(data.y_mean),
      y_scale_(data.y_scale),
      factor_(kernel::gram_factor(hyper_.kernel, data.X, hyper_.noise_var)),
      alpha_(factor_.llt.solve(y_std_)) {
  if (X_.rows() < 1) throw DomainError("gp: empty dataset");
  if (hyper_.kernel.dim() != X_.cols()) throw DomainError("gp: kernel dimension mismatch");
}

Posterior GPModel::posterior(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != dim()) throw DomainError("posterior: dimension mismatch");
  const Vector ks = kernel::cross(hyper_.kernel, x.transpose(), X_).transpose();
  const double mu = ks.dot(alpha_);
  const Vector v = factor_.llt.matrixL().solve(ks);
  const double var = std::max(hyper_.kernel.signal_variance - v.squaredNorm(), 0.0);
  return {mu * y_scale_ + y_mean_, y_scale_ * std::sqrt(var)};
}

void GPModel::posterior_batch(const Eigen::Ref<const Matrix>& P, Vector& mu, Vector& sigma) const {
  const Matrix Ks = kernel::cross(hyper_.kernel, X_, P);  // n x m
  mu = (Ks.transpose() * alpha_).array() * y_scale_ + y_mean_;
  const Matrix V = factor_.llt.matrixL().solve(Ks);
  const Vector var = (hyper_.kernel.signal_variance - V.colwise().squaredNorm().transpose().array()).max(0.0);
  sigma = y_scale_ * var.array().sqrt();
}

Matrix GPModel::posterior_covariance(const Eigen::Ref<const Matrix>& P) const {
  const Matrix Ks = kernel::cross(hyper_.kernel, X_, P);
  const Matrix V = factor_.llt.matrixL().solve(Ks);
  Matrix cov = kernel::cross(hyper_.kernel, P, P);
  cov.selfadjointView<Eigen::Lower>().rankUpdate(V.transpose(), -1.0);
  cov = cov.selfadjointView<Eigen::Lower>();
  return (y_scale_ * y_scale_) * cov;
}

PosteriorDerivatives GPModel::derivatives(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != dim()) throw DomainError("derivatives: dimension mismatch");
  const Vector inv_l2 = hyper_.kernel.lengthscales.array().square().inverse();
  const Vector ks = kernel::cross(hyper_.kernel, x.transpose(), X_).transpose();
  // Row i of Wd is (x - x_i) / l^2, so dk(x, x_i)/dx = -k_i Wd.row(i).
  const Matrix Wd = ((-X_).rowwise() + x.transpose()) * inv_l2.asDiagonal();
  const Matrix J = -(ks.asDiagonal() * Wd);

  const Vector ak = alpha_.cwiseProduct(ks);
  Vector grad_mu = J.transpose() * alpha_;
  Matrix hess_mu = Wd.transpose() * ak.asDiagonal() * Wd;
  hess_mu.diagonal() -= ak.sum() * inv_l2;

  const Vector v = factor_.llt.solve(ks);
  const double var = std::max(hyper_.kernel.signal_variance - ks.dot(v), 0.0);
  const Vector grad_var = -2.0 * J.transpose() * v;
  const Matrix LJ = factor_.llt.matrixL().solve(J);
  const Vector vk = v.cwiseProduct(ks);
  Matrix hess_var = LJ.transpose() * LJ + Wd.transpose() * vk.asDiagonal() * Wd;
  hess_var.diagonal() -= vk.sum() * inv_l2;
  hess_var *= -2.0;

  const double s = std::max(std::sqrt(var), kSigmaClamp);
  Vector grad_sigma = grad_var / (2.0 * s);
  Matrix hess_sigma = (hess_var - 2.0 * grad_sigma * grad_sigma.transpose()) / (2.0 * s);

  PosteriorDerivatives out;
  out.grad_mu = y_scale_ * grad_mu;
  out.hess_mu = y_scale_ * 0.5 * (hess_mu + hess_mu.transpose());
  out.grad_sigma = y_scale_ * grad_sigma;
  out.hess_sigma = y_scale_ * 0.5 * (hess_sigma + hess_sigma.transpose());
  return out;
}

Vector GPModel::mean_gradient(const Eigen::Ref<const Vector>& x) const {
  const Vector inv_l2 = hyper_.kernel.lengthscales.array().square().inverse();
  const Vector ks = kernel::cross(hyper_.kernel, x.transpose(), X_).transpose();
  const Matrix Wd = ((-X_).rowwise() + x.transpose()) * inv_l2.asDiagonal();
  return -y_scale_ * (Wd.transpose() * alpha_.cwiseProduct(ks));
}

double GPModel::log_marginal_likelihood() const {
  const Matrix L = factor_.llt.matrixL();
  return -0.5 * y_std_.dot(alpha_) - L.diagonal().array().log().sum() -
         0.5 * static_cast<double>(size()) * std::log(2.0 * std::numbers::pi);
}

// ---------------------------------------------------------------------------
// Fitting

GPModel fit(const Dataset& data, int dim, Rng& rng, const GpFitConfig& cfg,
            const std::optional<GpHyperparameters>& warm_start) {
  if (data.size() < 2) throw DomainError("fit: need at least two observations");
  if (data.dim() != dim) throw DomainError("fit: dimension mismatch");

  const bool constant = (data.y_raw.array() == data.y_raw(0)).all();
  if (constant) return {data, default_hyperparameters(dim, cfg)};

  const Vector mean = prior_means(dim, cfg);
  std::normal_distribution<double> normal(0.0, cfg.prior_sd);

  auto objective = [&](const Vector& theta, Vector& grad) {
    try {
      HyperObjective r = negative_log_posterior(data, theta, cfg);
      grad = std::move(r.grad);
      return r.value;
    } catch (const NumericalError&) {
      grad.setZero(theta.size());
      return std::numeric_limits<double>::infinity();
    }
  };

  // Start order: warm start, data-scale start, then prior draws. Starts drawn
  // near the prior mode of a small lengthscale can sit on a likelihood
  // plateau (K ~ sigma_f^2 I), so the data-scale start sets every lengthscale
  // to the typical distance sqrt(D/6) between uniform points.
  std::vector<Vector> starts;
  if (warm_start) starts.push_back(pack_hyperparameters(*warm_start, cfg));
  if (cfg.data_scale_start && static_cast<int>(starts.size()) < cfg.num_starts) {
    Vector theta0 = mean;
    theta0.head(dim).setConstant(0.5 * std::log(static_cast<double>(dim) / 6.0));
    starts.push_back(theta0);
  }
  while (static_cast<int>(starts.size()) < std::max(cfg.num_starts, 1)) {
    Vector theta0(dim + 2);
    for (Eigen::Index j = 0; j < theta0.size(); ++j) theta0(j) = mean(j) + normal(rng);
    starts.push_back(std::move(theta0));
  }

  Vector best_theta;
  double best_value = std::numeric_limits<double>::infinity();
  for (const Vector& theta0 : starts) {
    const detail::LbfgsResult r = detail::lbfgs_minimize(objective, theta0, cfg.max_iters, cfg.grad_tol);
    if (std::isfinite(r.value) && r.value < best_value) {
      best_value = r.value;
      best_theta = r.x;
    }
  }
  if (!std::isfinite(best_value)) throw NumericalError("fit: no start produced a finite posterior");
  return {data, unpack_hyperparameters(best_theta, cfg)};
}

// ---------------------------------------------------------------------------
// Uniform error bound diagnostic

UniformBoundReport uniform_bound(const GPModel& model, const Dataset& data, double tau, double delta) {
  if (!(tau > 0.0 && tau <= 0.5)) throw DomainError("uniform_bound: tau must be in (0, 0.5]");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("uniform_bound: delta must be in (0, 1)");
  (void)data;

  const double D = static_cast<double>(model.dim());
  const double n = static_cast<double>(model.size());
  const double per_axis = std::ceil(1.0 / (2.0 * tau) - 1e-12);

  UniformBoundReport r{};
  r.tau = tau;
  r.delta = delta;
  r.log_covering_count = D * std::log(per_axis);
  r.covering_count = std::exp(r.log_covering_count);
  r.beta = 2.0 * (r.log_covering_count - std::log(delta));

  const KernelParams& kp = model.params();
  // sup ||grad_x k|| = sigma_f^2 e^{-1/2} / min l, attained at unit scaled lag
  // along the shortest lengthscale.
  r.L_k = kp.signal_variance * std::exp(-0.5) / kp.lengthscales.minCoeff();

  const Eigen::SelfAdjointEigenSolver<Matrix> eig(model.gram(), Eigen::EigenvaluesOnly);
  const double inv_norm = 1.0 / eig.eigenvalues().minCoeff();
  r.L_mu = model.y_scale() * r.L_k * std::sqrt(n) * model.alpha().norm();
  r.omega_sigma = model.y_scale() *
                  std::sqrt(2.0 * tau * r.L_k * (1.0 + n * inv_norm * kp.signal_variance));

  SobolSequence seq(static_cast<int>(model.dim()));
  const Matrix pts = seq.draw(256);
  double lf = 0.0;
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    lf = std::max(lf, model.mean_gradient(pts.row(i).transpose()).norm());
  r.L_f_hat = lf;
  r.L_f_is_proxy = true;
  r.gamma = (r.L_mu + r.L_f_hat) * tau + std::sqrt(r.beta) * r.omega_sigma;
  return r;
}

}  // namespace newtonbo
