#include "newtonbo/trust_region.hpp"

#include <algorithm>
#include <cmath>

namespace newtonbo {

RadiusUpdate parse_radius_update(const std::string& name) {
  if (name == "turbo") return RadiusUpdate::turbo;
  if (name == "ratio") return RadiusUpdate::ratio;
  throw ConfigError("unknown trust-region update '" + name + "' (expected turbo or ratio)");
}

std::string to_string(RadiusUpdate mode) { return mode == RadiusUpdate::turbo ? "turbo" : "ratio"; }

void TrustRegionConfig::validate() const {
  if (!(delta_min > 0.0 && delta_min < delta_init && delta_init <= delta_max))
    throw ConfigError("trust region: need 0 < delta_min < delta_init <= delta_max");
  if (!(eta0 > 0.0 && eta0 <= eta1 && eta1 < 1.0))
    throw ConfigError("trust region: need 0 < eta0 <= eta1 < 1");
  if (!(beta1 > 0.0 && beta1 < 1.0 && beta2 > 1.0))
    throw ConfigError("trust region: need 0 < beta1 < 1 < beta2");
  if (!(mu_cap >= 1.0)) throw ConfigError("trust region: need mu >= 1");
  if (tau_succ < 1 || tau_fail < 1) throw ConfigError("trust region: counters must be positive");
  if (!(grad_tol >= 0.0)) throw ConfigError("trust region: grad_tol must be nonnegative");
}

TrustRegionState TrustRegionState::start(const Eigen::Ref<const Vector>& center, double value,
                                         const TrustRegionConfig& cfg) {
  TrustRegionState tr;
  tr.center = center;
  tr.best_value = value;
  tr.delta = cfg.delta_init;
  return tr;
}

double rho(double f_old, double f_new, double m_old, double m_new) {
  const double predicted = m_old - m_new;
  if (std::abs(predicted) < 1e-12) return 0.0;
  return (f_old - f_new) / predicted;
}

TrustRegionState update_ratio(TrustRegionState tr, double rho_k, double grad_norm,
                              const TrustRegionConfig& cfg) {
  if (!tr.active()) throw DomainError("update_ratio: region is terminated");
  if (rho_k >= cfg.eta1) {
    tr.delta = std::min({cfg.beta2 * tr.delta, cfg.mu_cap * grad_norm, cfg.delta_max});
  } else if (rho_k < cfg.eta0) {
    tr.delta = cfg.beta1 * tr.delta;
  }
  tr.succ_count = 0;
  tr.fail_count = 0;
  return tr;
}

TrustRegionState update_turbo(TrustRegionState tr, bool improved, const TrustRegionConfig& cfg) {
  if (!tr.active()) throw DomainError("update_turbo: region is terminated");
  if (improved) {
    ++tr.succ_count;
    tr.fail_count = 0;
  } else {
    tr.succ_count = 0;
    ++tr.fail_count;
  }
  if (tr.succ_count >= cfg.tau_succ) {
    tr.delta = std::min(2.0 * tr.delta, cfg.delta_max);
    tr.succ_count = 0;
  }
  if (tr.fail_count >= cfg.tau_fail) {
    tr.delta = 0.5 * tr.delta;
    tr.fail_count = 0;
  }
  return tr;
}

bool should_restart(const TrustRegionState& tr, double grad_norm, const TrustRegionConfig& cfg) {
  return tr.delta < cfg.delta_min || grad_norm < cfg.grad_tol;
}

bool recenter(TrustRegionState& tr, const Eigen::Ref<const Vector>& x, double value) {
  if (!(value < tr.best_value)) return false;
  tr.center = x;
  tr.best_value = value;
  return true;
}

}  // namespace newtonbo
