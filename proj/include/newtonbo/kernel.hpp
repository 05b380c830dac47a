#ifndef NEWTONBO_KERNEL_HPP
#define NEWTONBO_KERNEL_HPP

#include "newtonbo/types.hpp"

#include <cmath>

namespace newtonbo {

/// ARD squared-exponential kernel hyperparameters.
template <typename Scalar>
struct KernelParamsT {
  using VectorS = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  VectorS lengthscales;
  Scalar signal_variance{1};

  Eigen::Index dim() const { return lengthscales.size(); }

  bool valid() const {
    return lengthscales.size() > 0 && (lengthscales.array() > Scalar(0)).all() &&
           lengthscales.allFinite() && signal_variance > Scalar(0) && std::isfinite(signal_variance);
  }
};

using KernelParams = KernelParamsT<double>;

/// Value, gradient and Hessian of k(x, x') with respect to x.
template <typename Scalar>
struct KernelDerivativesT {
  Scalar value;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> grad;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> hess;
};

using KernelDerivatives = KernelDerivativesT<double>;

namespace kernel {

namespace detail {

template <typename Scalar, typename A, typename B>
void check_dims(const KernelParamsT<Scalar>& p, const Eigen::MatrixBase<A>& x,
                const Eigen::MatrixBase<B>& xp) {
  if (x.size() != p.dim() || xp.size() != p.dim())
    throw DomainError("kernel: dimension mismatch");
}

}  // namespace detail

/// sigma_f^2 * exp(-0.5 * sum_d (x_d - x'_d)^2 / l_d^2)
template <typename Scalar, typename A, typename B>
Scalar eval(const KernelParamsT<Scalar>& p, const Eigen::MatrixBase<A>& x,
            const Eigen::MatrixBase<B>& xp) {
  detail::check_dims(p, x, xp);
  const Scalar r2 = ((x - xp).array() / p.lengthscales.array()).square().sum();
  return p.signal_variance * std::exp(Scalar(-0.5) * r2);
}

template <typename Scalar, typename A, typename B>
KernelDerivativesT<Scalar> derivatives(const KernelParamsT<Scalar>& p,
                                       const Eigen::MatrixBase<A>& x,
                                       const Eigen::MatrixBase<B>& xp) {
  using VectorS = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  detail::check_dims(p, x, xp);
  const VectorS inv_l2 = p.lengthscales.array().square().inverse().matrix();
  const VectorS diff = x - xp;
  const Scalar k = p.signal_variance *
                   std::exp(Scalar(-0.5) * (diff.array().square() * inv_l2.array()).sum());
  // w_d = (x_d - x'_d) / l_d^2
  const VectorS w = diff.cwiseProduct(inv_l2);
  KernelDerivativesT<Scalar> out;
  out.value = k;
  out.grad = -k * w;
  out.hess = k * (w * w.transpose());
  out.hess.diagonal() -= k * inv_l2;
  return out;
}

/// Factorized gram matrix K + noise_var I + jitter I.
struct GramFactor {
  Matrix matrix;
  Eigen::LLT<Matrix> llt;
  double jitter = 0.0;
};

/// Cross-covariance matrix with rows of A against rows of B.
inline Matrix cross(const KernelParams& p, const Eigen::Ref<const Matrix>& A,
                    const Eigen::Ref<const Matrix>& B) {
  if (A.cols() != p.dim() || B.cols() != p.dim()) throw DomainError("kernel: dimension mismatch");
  const Vector inv_l = p.lengthscales.cwiseInverse();
  const Matrix As = A * inv_l.asDiagonal();
  const Matrix Bs = B * inv_l.asDiagonal();
  Matrix r2 = (-2.0 * As * Bs.transpose()).colwise() + As.rowwise().squaredNorm();
  r2.rowwise() += Bs.rowwise().squaredNorm().transpose();
  return p.signal_variance * (-0.5 * r2.array().max(0.0)).exp().matrix();
}

/// Factorizes base + jitter I. Jitter starts at 1e-8 signal_variance and
/// grows x10 per failed factorization up to 1e-2 signal_variance; beyond that
/// a NumericalError is thrown.
inline GramFactor factor_with_jitter(const Matrix& base, double signal_variance) {
  GramFactor out;
  for (double jitter = 1e-8 * signal_variance; jitter <= 1e-2 * signal_variance * (1 + 1e-9);
       jitter *= 10.0) {
    out.matrix = base;
    out.matrix.diagonal().array() += jitter;
    out.llt.compute(out.matrix);
    if (out.llt.info() == Eigen::Success) {
      out.jitter = jitter;
      return out;
    }
  }
  throw NumericalError("gram: factorization failed after jitter escalation");
}

/// Builds and factorizes K + noise_var I (+ jitter, see factor_with_jitter).
inline GramFactor gram_factor(const KernelParams& p, const Eigen::Ref<const Matrix>& X,
                              double noise_var) {
  Matrix base = cross(p, X, X);
  base.diagonal().array() += noise_var;
  return factor_with_jitter(base, p.signal_variance);
}

/// K + noise_var I + jitter I, with the jitter that made it factorizable.
inline Matrix gram(const KernelParams& p, const Eigen::Ref<const Matrix>& X, double noise_var) {
  return gram_factor(p, X, noise_var).matrix;
}

}  // namespace kernel

}  // namespace newtonbo

#endif  // NEWTONBO_KERNEL_HPP
