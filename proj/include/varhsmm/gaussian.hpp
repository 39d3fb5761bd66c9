#ifndef VARHSMM_GAUSSIAN_HPP
#define VARHSMM_GAUSSIAN_HPP

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "varhsmm/errors.hpp"
#include "varhsmm/model.hpp"

namespace varhsmm {

/// Cholesky factor L of a covariance, Sigma = L L^T, with cached log|Sigma|.
///
/// Construction fails with ValidationError when the input is not positive
/// definite; no jitter is ever added.
template <typename Scalar>
class CholeskyFactor {
 public:
  using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  template <typename Derived>
  explicit CholeskyFactor(const Eigen::MatrixBase<Derived>& covariance) {
    if (covariance.rows() != covariance.cols())
      throw ValidationError("covariance must be square");
    Eigen::LLT<MatrixType> llt(covariance.template cast<Scalar>());
    if (llt.info() != Eigen::Success) throw ValidationError("covariance not positive definite");
    lower_ = llt.matrixL();
    if (!(lower_.diagonal().array() > Scalar(0)).all() || !lower_.allFinite())
      throw ValidationError("covariance not positive definite");
    log_det_ = Scalar(2) * lower_.diagonal().array().log().sum();
  }

  const MatrixType& lower() const { return lower_; }
  Scalar log_det() const { return log_det_; }
  Eigen::Index dim() const { return lower_.rows(); }

  /// ||L^{-1} x||^2 for a single vector.
  template <typename Derived>
  Scalar mahalanobis(const Eigen::MatrixBase<Derived>& x) const {
    return lower_.template triangularView<Eigen::Lower>().solve(x).squaredNorm();
  }

 private:
  MatrixType lower_;
  Scalar log_det_ = Scalar(0);
};

template <typename Derived>
CholeskyFactor(const Eigen::MatrixBase<Derived>&) -> CholeskyFactor<typename Derived::Scalar>;

/// log N(y; mean, Sigma) evaluated through the Cholesky factor of Sigma.
template <typename DerivedY, typename DerivedM, typename Scalar>
Scalar log_density(const Eigen::MatrixBase<DerivedY>& y, const Eigen::MatrixBase<DerivedM>& mean,
                   const CholeskyFactor<Scalar>& chol) {
  const auto d = static_cast<Scalar>(chol.dim());
  const Scalar log_2pi = std::log(Scalar(2) * std::numbers::pi_v<Scalar>);
  return Scalar(-0.5) * (d * log_2pi + chol.log_det() + chol.mahalanobis(y - mean));
}

/// mu_i + sum_k A_{k,i} y_{t-k}; lags that fall before the first row are
/// omitted.
Vector conditional_mean(const ModelParams& params, int state, const TimeSeries& series, int t);

/// Same as above with an explicit history, most recent observation first.
/// At most `order` entries of `history` are used.
Vector conditional_mean(const ModelParams& params, int state, const std::vector<Vector>& history);

/// Log density of y_{t_start .. t_start + n - 1} under state `state`, with
/// autoregressive lags taken from the observed series (they may cross the
/// segment boundary).
double segment_log_density(const ModelParams& params, int state, int t_start, int n,
                           const TimeSeries& series);

/// Per-time, per-state emission log densities plus running sums, so any
/// segment density is an O(1) difference.
class EmissionTable {
 public:
  EmissionTable() = default;

  /// Throws ValidationError if any covariance is not positive definite or the
  /// series width does not match the model.
  EmissionTable(const TimeSeries& series, const ModelParams& params);

  /// Wraps precomputed log densities (rows are time, columns are states).
  explicit EmissionTable(Matrix log_densities);

  int length() const { return static_cast<int>(per_time_.rows()); }
  int states() const { return static_cast<int>(per_time_.cols()); }

  double at(int t, int state) const { return per_time_(t, state); }

  /// Sum over t in [start, start + n).
  double segment(int state, int start, int n) const {
    return cumulative_(start + n, state) - cumulative_(start, state);
  }

  const Matrix& log_densities() const { return per_time_; }

 private:
  void accumulate();

  Matrix per_time_;
  Matrix cumulative_;
};

/// Design row for the VAR regression at time t: [y_{t-1}; ...; y_{t-p}] with
/// zeros where the lag precedes the series.
Vector lagged_regressors(const TimeSeries& series, int t, int order);

}  // namespace varhsmm

#endif  // VARHSMM_GAUSSIAN_HPP
