#ifndef NEWTONBO_LOCAL_MODEL_HPP
#define NEWTONBO_LOCAL_MODEL_HPP

#include "newtonbo/gp.hpp"
#include "newtonbo/types.hpp"

namespace newtonbo {

/// Local quadratic model m(center + s) = f0 + g's + s'Bs/2.
template <typename Scalar>
struct QuadraticModelT {
  using VectorS = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using MatrixS = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  VectorS center;
  Scalar f0{0};
  VectorS g;
  MatrixS B;
  Scalar lambda{0};

  Eigen::Index dim() const { return g.size(); }
};

using QuadraticModel = QuadraticModelT<double>;

/// f0 + g's + s'Bs/2. Throws DomainError on a dimension mismatch.
template <typename Scalar, typename Derived>
Scalar eval_model(const QuadraticModelT<Scalar>& q, const Eigen::MatrixBase<Derived>& s) {
  if (s.size() != q.g.size()) throw DomainError("eval_model: dimension mismatch");
  return q.f0 + q.g.dot(s) + Scalar(0.5) * s.dot(q.B * s);
}

/// Model from the posterior derivatives at center with the
/// reparameterization g = grad mu + lambda grad sigma,
/// B = sym(hess mu + lambda hess sigma). lambda must lie in (-1, 1).
QuadraticModel build_model(const GPModel& model, const Eigen::Ref<const Vector>& center, double lambda);

/// Draw from N(0, 1) truncated to (-1, 1) by inverse CDF.
double sample_lambda(Rng& rng);

/// Standard deviation of N(0, 1) truncated to (-1, 1).
double truncated_lambda_sd();

}  // namespace newtonbo

#endif  // NEWTONBO_LOCAL_MODEL_HPP
