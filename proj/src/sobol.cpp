#include "newtonbo/sobol.hpp"

#include "sobol_directions.hpp"

#include <bit>
#include <string>

namespace newtonbo {

SobolSequence::SobolSequence(int dim) : dim_(dim) {
  if (dim < 1 || dim > detail::kSobolMaxDim)
    throw DomainError("sobol: dimension must be in [1, " + std::to_string(detail::kSobolMaxDim) + "]");
  init_directions();
  state_.assign(dim_, 0u);
}

SobolSequence::SobolSequence(int dim, Rng& rng) : SobolSequence(dim) {
  // Linear matrix scramble: each direction integer is multiplied (over GF(2))
  // by a random lower-triangular matrix with unit diagonal, acting on the
  // digits from the most significant bit down. Then a random digital shift.
  std::uniform_int_distribution<std::uint32_t> bits;
  for (int d = 0; d < dim_; ++d) {
    std::array<std::uint32_t, kBits> rows{};  // rows[b]: mask of source digits for output digit b
    for (int b = 0; b < kBits; ++b) {
      const std::uint32_t below = b == 0 ? 0u : (bits(rng) >> (kBits - b)) << (kBits - b);
      rows[b] = below | (1u << (kBits - 1 - b));
    }
    for (int j = 0; j < kBits; ++j) {
      const std::uint32_t v = directions_[d * kBits + j];
      std::uint32_t out = 0;
      for (int b = 0; b < kBits; ++b)
        if (std::popcount(rows[b] & v) & 1) out |= 1u << (kBits - 1 - b);
      directions_[d * kBits + j] = out;
    }
    state_[d] = bits(rng);
  }
}

void SobolSequence::init_directions() {
  directions_.assign(static_cast<std::size_t>(dim_) * kBits, 0u);
  for (int j = 0; j < kBits; ++j) directions_[j] = 1u << (kBits - 1 - j);
  for (int d = 1; d < dim_; ++d) {
    const auto& entry = detail::kSobolDirections[d];
    const int m = entry.degree;
    std::array<std::uint32_t, kBits> v{};
    for (int j = 0; j < m && j < kBits; ++j) v[j] = entry.m[j];
    for (int j = m; j < kBits; ++j) {
      std::uint32_t nv = v[j - m];
      std::uint32_t pow2 = 1;
      for (int k = 0; k < m; ++k) {
        pow2 <<= 1;
        if ((entry.poly >> (m - 1 - k)) & 1u) nv ^= pow2 * v[j - k - 1];
      }
      v[j] = nv;
    }
    for (int j = 0; j < kBits; ++j) directions_[d * kBits + j] = v[j] << (kBits - 1 - j);
  }
}

Vector SobolSequence::next() {
  constexpr double scale = 1.0 / 4294967296.0;
  Vector x(dim_);
  for (int d = 0; d < dim_; ++d) x(d) = static_cast<double>(state_[d]) * scale;
  // Gray-code update: flip the direction of the lowest zero bit of index_.
  const int c = std::countr_one(index_);
  if (c >= kBits) throw DomainError("sobol: sequence exhausted");
  for (int d = 0; d < dim_; ++d) state_[d] ^= directions_[d * kBits + c];
  ++index_;
  return x;
}

Matrix SobolSequence::draw(Eigen::Index n) {
  Matrix out(n, dim_);
  for (Eigen::Index i = 0; i < n; ++i) out.row(i) = next().transpose();
  return out;
}

Matrix sobol_points(Eigen::Index n, int dim, Rng& rng) {
  SobolSequence seq(dim, rng);
  return seq.draw(n);
}

}  // namespace newtonbo
