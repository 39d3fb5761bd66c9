#ifndef VARHSMM_LOGSPACE_HPP
#define VARHSMM_LOGSPACE_HPP

#include <Eigen/Core>
#include <cmath>
#include <limits>

namespace varhsmm {

template <typename Scalar = double>
inline constexpr Scalar kNegInf = -std::numeric_limits<Scalar>::infinity();

/// log(exp(a) + exp(b)) without overflow; -inf is the additive identity.
template <typename Scalar>
Scalar log_add(Scalar a, Scalar b) {
  if (a == kNegInf<Scalar>) return b;
  if (b == kNegInf<Scalar>) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

/// Elementwise exp that maps -inf to exactly 0. Eigen's packet exp clamps
/// very negative inputs and returns a denormal instead.
template <typename Derived>
auto exp_exact(const Eigen::ArrayBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return x.unaryExpr([](Scalar v) { return v == kNegInf<Scalar> ? Scalar(0) : std::exp(v); });
}

/// log(sum(exp(x))) over any dense Eigen expression. Returns -inf for an
/// empty or all -inf input.
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::DenseBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  if (x.size() == 0) return kNegInf<Scalar>;
  const Scalar peak = x.maxCoeff();
  if (peak == kNegInf<Scalar>) return peak;
  if (!std::isfinite(peak)) return peak;
  return peak + std::log(exp_exact(x.derived().array() - peak).sum());
}

/// Running accumulator for log-domain sums built one term at a time.
template <typename Scalar = double>
class LogAccumulator {
 public:
  void add(Scalar v) { value_ = log_add(value_, v); }
  Scalar value() const { return value_; }

 private:
  Scalar value_ = kNegInf<Scalar>;
};

template <typename Scalar>
Scalar safe_log(Scalar x) {
  return x > Scalar(0) ? std::log(x) : kNegInf<Scalar>;
}

}  // namespace varhsmm

#endif  // VARHSMM_LOGSPACE_HPP
