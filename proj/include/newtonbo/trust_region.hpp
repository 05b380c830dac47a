#ifndef NEWTONBO_TRUST_REGION_HPP
#define NEWTONBO_TRUST_REGION_HPP

#include "newtonbo/types.hpp"

#include <string>

namespace newtonbo {

enum class RadiusUpdate { turbo, ratio };

RadiusUpdate parse_radius_update(const std::string& name);
std::string to_string(RadiusUpdate mode);

struct TrustRegionConfig {
  double delta_init = 0.4;
  double delta_max = 0.8;
  double delta_min = 0.05;
  int tau_succ = 3;
  int tau_fail = 3;
  // Ratio-rule constants.
  double eta0 = 0.25;
  double eta1 = 0.75;
  double beta1 = 0.5;
  double beta2 = 2.0;
  double mu_cap = 10.0;
  double grad_tol = 1e-5;
  RadiusUpdate mode = RadiusUpdate::turbo;

  /// Throws ConfigError when an ordering constraint is violated.
  void validate() const;
};

enum class RegionStatus { active, terminated };

struct TrustRegionState {
  Vector center;
  double best_value = 0.0;
  double delta = 0.4;
  int succ_count = 0;
  int fail_count = 0;
  RegionStatus status = RegionStatus::active;

  static TrustRegionState start(const Eigen::Ref<const Vector>& center, double value,
                                const TrustRegionConfig& cfg);
  bool active() const { return status == RegionStatus::active; }
};

/// Actual over predicted reduction; 0 when the predicted reduction is
/// below 1e-12 in magnitude.
double rho(double f_old, double f_new, double m_old, double m_new);

/// Ratio rule: rho >= eta1 grows to min(beta2 delta, mu ||g||, delta_max),
/// rho < eta0 shrinks by beta1, otherwise unchanged.
TrustRegionState update_ratio(TrustRegionState tr, double rho, double grad_norm,
                              const TrustRegionConfig& cfg);

/// Success/failure counters: tau_succ consecutive improvements double the
/// radius (capped at delta_max); tau_fail consecutive failures halve it.
TrustRegionState update_turbo(TrustRegionState tr, bool improved, const TrustRegionConfig& cfg);

/// True when delta < delta_min or grad_norm < grad_tol.
bool should_restart(const TrustRegionState& tr, double grad_norm, const TrustRegionConfig& cfg);

/// Moves the center to x when value is strictly below best_value.
bool recenter(TrustRegionState& tr, const Eigen::Ref<const Vector>& x, double value);

}  // namespace newtonbo

#endif  // NEWTONBO_TRUST_REGION_HPP
