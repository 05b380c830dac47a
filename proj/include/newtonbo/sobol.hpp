#ifndef NEWTONBO_SOBOL_HPP
#define NEWTONBO_SOBOL_HPP

#include "newtonbo/types.hpp"

#include <cstdint>
#include <vector>

namespace newtonbo {

/// Scrambled Sobol sequence in [0,1)^D using Joe-Kuo direction numbers with
/// a random linear matrix scramble and digital shift. Supports up to 1024
/// dimensions and 2^32 points.
class SobolSequence {
 public:
  static constexpr int kBits = 32;

  /// Unscrambled sequence (first point is the origin).
  explicit SobolSequence(int dim);
  /// Scrambled sequence; identical rng state gives identical points.
  SobolSequence(int dim, Rng& rng);

  int dim() const { return dim_; }

  /// Next point of the sequence.
  Vector next();
  /// Next n points as rows of an n x D matrix.
  Matrix draw(Eigen::Index n);

 private:
  void init_directions();

  int dim_;
  std::uint64_t index_ = 0;
  std::vector<std::uint32_t> directions_;  // dim_ * kBits, row per dimension
  std::vector<std::uint32_t> state_;
};

/// n scrambled low-discrepancy points in [0,1)^dim, deterministic given rng.
Matrix sobol_points(Eigen::Index n, int dim, Rng& rng);

}  // namespace newtonbo

#endif  // NEWTONBO_SOBOL_HPP
