#ifndef NEWTONBO_RESTART_HPP
#define NEWTONBO_RESTART_HPP

#include "newtonbo/gp.hpp"
#include "newtonbo/types.hpp"

#include <string>
#include <vector>

namespace newtonbo {

enum class RestartKind { thompson, max_variance, random };

RestartKind parse_restart_kind(const std::string& name);
std::string to_string(RestartKind kind);

struct RestartStrategy {
  RestartKind kind = RestartKind::thompson;
  int pool_size = 0;  // <= 0: 512 * min(D, 10)
  int num_samples = 8;
  double exclusion_radius = 0.05;
  // Thompson draws are joint over at most this many pool points, chosen by
  // lowest mu - prescreen_width * sigma.
  int max_joint_size = 1024;
  double prescreen_width = 3.0;

  int resolved_pool_size(Eigen::Index dim) const;
  void validate() const;
};

/// n scrambled Sobol points in [0,1)^dim.
Matrix initial_design(Eigen::Index n, int dim, Rng& rng);

struct RestartChoice {
  Vector point;
  bool fallback = false;  // exclusion emptied the pool; point is uniform
};

/// Restart location for one terminated region. Pool points within
/// infinity-distance exclusion_radius of an active center are never chosen.
///
///  - max_variance: pool argmax of the posterior standard deviation.
///  - thompson: num_samples joint posterior draws over the pool; the
///    minimizer of one uniformly chosen draw.
///  - random: uniform point in the unit box.
RestartChoice restart_point(const GPModel& model, const Dataset& data, const RestartStrategy& strat,
                            const std::vector<Vector>& active_centers, Rng& rng);

/// Several restart locations sharing one pool and one set of joint
/// samples. Each pick is added to the exclusion set of the following ones,
/// and Thompson picks cycle through distinct samples.
std::vector<RestartChoice> restart_points(const GPModel& model, const Dataset& data,
                                          const RestartStrategy& strat,
                                          const std::vector<Vector>& active_centers, int count, Rng& rng);

}  // namespace newtonbo

#endif  // NEWTONBO_RESTART_HPP
