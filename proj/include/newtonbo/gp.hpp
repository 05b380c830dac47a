#ifndef NEWTONBO_GP_HPP
#define NEWTONBO_GP_HPP

#include "newtonbo/kernel.hpp"
#include "newtonbo/types.hpp"

#include <optional>

namespace newtonbo {

/// Observations in the unit box plus standardized targets.
///
/// y_std = (y_raw - y_mean) / y_scale, where y_scale is the sample standard
/// deviation (1 when all observations coincide).
struct Dataset {
  Matrix X;
  Vector y_raw;
  Vector y_std;
  double y_mean = 0.0;
  double y_scale = 1.0;
  Eigen::Index best_index = 0;

  Dataset() = default;
  Dataset(Matrix X, Vector y);

  Eigen::Index size() const { return X.rows(); }
  Eigen::Index dim() const { return X.cols(); }
  double best_value() const { return y_raw(best_index); }
  Vector best_point() const { return X.row(best_index).transpose(); }

  void append(const Eigen::Ref<const Vector>& x, double y);
  void append(const Matrix& Xnew, const Vector& ynew);

 private:
  void restandardize();
};

/// Kernel hyperparameters plus observation noise variance.
struct GpHyperparameters {
  KernelParams kernel;
  double noise_var = 1e-6;
};

/// Hyperparameter priors and optimizer budget for MAP fitting.
///
/// log l_d ~ N(-4 + ln(D)/2, 1), log sigma_f^2 ~ N(0, 1), and the noise is
/// noise_floor + exp(theta) with theta ~ N(-6, 1).
struct GpFitConfig {
  int num_starts = 5;
  int max_iters = 200;
  double grad_tol = 1e-5;
  double noise_floor = 1e-6;
  double signal_prior_mean = 0.0;
  double noise_prior_mean = -6.0;
  double prior_sd = 1.0;
  bool data_scale_start = true;
};

/// Prior location of log l_d for dimension D.
double lengthscale_prior_mean(int dim);
/// exp(lengthscale_prior_mean(dim)); the prior median lengthscale.
double lengthscale_prior_median(int dim);

struct Posterior {
  double mu;
  double sigma;
};

struct PosteriorDerivatives {
  Vector grad_mu;
  Matrix hess_mu;
  Vector grad_sigma;
  Matrix hess_sigma;
};

/// GP conditioned on a dataset, with a cached Cholesky factor of
/// K + noise_var I. Immutable; queries are safe to run concurrently.
class GPModel {
 public:
  GPModel(const Dataset& data, GpHyperparameters hyper);

  const GpHyperparameters& hyperparameters() const { return hyper_; }
  const KernelParams& params() const { return hyper_.kernel; }
  double noise_var() const { return hyper_.noise_var; }
  double jitter() const { return factor_.jitter; }
  const Matrix& train_X() const { return X_; }
  const Vector& alpha() const { return alpha_; }
  const Vector& y_std() const { return y_std_; }
  double y_mean() const { return y_mean_; }
  double y_scale() const { return y_scale_; }
  Eigen::Index dim() const { return X_.cols(); }
  Eigen::Index size() const { return X_.rows(); }
  const Eigen::LLT<Matrix>& factor() const { return factor_.llt; }
  const Matrix& gram() const { return factor_.matrix; }

  /// Posterior mean and standard deviation in raw units.
  Posterior posterior(const Eigen::Ref<const Vector>& x) const;
  /// Posterior mean and standard deviation at every row of P (raw units).
  void posterior_batch(const Eigen::Ref<const Matrix>& P, Vector& mu, Vector& sigma) const;
  /// Joint posterior covariance of the rows of P in raw units.
  Matrix posterior_covariance(const Eigen::Ref<const Matrix>& P) const;

  /// Gradients and Hessians of the posterior mean and standard deviation in
  /// raw units. The standard deviation is clamped at 1e-6 (standardized)
  /// before dividing, so sigma derivatives are approximate right at data.
  PosteriorDerivatives derivatives(const Eigen::Ref<const Vector>& x) const;
  /// Posterior mean gradient only (raw units).
  Vector mean_gradient(const Eigen::Ref<const Vector>& x) const;

  /// log p(y_std | hyperparameters) for the conditioned data.
  double log_marginal_likelihood() const;

 private:
  GpHyperparameters hyper_;
  Matrix X_;
  Vector y_std_;
  double y_mean_;
  double y_scale_;
  kernel::GramFactor factor_;
  Vector alpha_;
};

/// Negative log posterior of the hyperparameters (the quantity MAP fitting
/// minimizes) and its gradient with respect to the packed log-parameters
/// [log l_1..log l_D, log sigma_f^2, log(noise - floor)].
struct HyperObjective {
  double value;
  Vector grad;
};
HyperObjective negative_log_posterior(const Dataset& data, const Eigen::Ref<const Vector>& theta,
                                      const GpFitConfig& cfg = {});

Vector pack_hyperparameters(const GpHyperparameters& h, const GpFitConfig& cfg = {});
GpHyperparameters unpack_hyperparameters(const Eigen::Ref<const Vector>& theta,
                                         const GpFitConfig& cfg = {});

/// MAP fit by multi-start L-BFGS in log-parameter space. num_starts starts
/// in total: the warm start when given, one data-scale start, and draws from
/// the priors for the rest.
/// Constant observations skip optimization and use the prior medians.
GPModel fit(const Dataset& data, int dim, Rng& rng, const GpFitConfig& cfg = {},
            const std::optional<GpHyperparameters>& warm_start = std::nullopt);

/// Quantities of the high-probability uniform error bound
/// |f - mu| <= sqrt(beta) sigma + gamma on the unit box.
struct UniformBoundReport {
  double tau;
  double delta;
  double covering_count;      // ceil(1/(2 tau))^D, may be +inf for huge D
  double log_covering_count;  // exact even when covering_count overflows
  double beta;
  double L_k;      // kernel Lipschitz constant (standardized units)
  double L_mu;     // posterior-mean Lipschitz bound (raw units)
  double omega_sigma;
  double L_f_hat;  // empirical proxy: max posterior-mean gradient norm
  bool L_f_is_proxy = true;
  double gamma;
};

UniformBoundReport uniform_bound(const GPModel& model, const Dataset& data, double tau, double delta);

}  // namespace newtonbo

#endif  // NEWTONBO_GP_HPP
