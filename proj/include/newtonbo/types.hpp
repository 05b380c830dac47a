#ifndef NEWTONBO_TYPES_HPP
#define NEWTONBO_TYPES_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace newtonbo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Random stream used throughout. Every stochastic operation takes one by
/// reference so that runs are reproducible from a single seed.
using Rng = std::mt19937_64;

/// Invalid user-facing configuration (unknown names, inconsistent flags).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Linear algebra failure that survived all recovery attempts.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Derives an independent child seed from a parent seed and a tag
/// (splitmix64 finalizer over the combined words).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline bool in_unit_box(const Eigen::Ref<const Vector>& u) {
  return (u.array() >= 0.0).all() && (u.array() <= 1.0).all();
}

/// Uniform point in [0,1]^dim.
inline Vector uniform_point(Eigen::Index dim, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector u(dim);
  for (Eigen::Index d = 0; d < dim; ++d) u(d) = unif(rng);
  return u;
}

}  // namespace newtonbo

#endif  // NEWTONBO_TYPES_HPP
