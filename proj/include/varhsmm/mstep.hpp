#ifndef VARHSMM_MSTEP_HPP
#define VARHSMM_MSTEP_HPP

#include <Eigen/Dense>
#include <vector>

#include "varhsmm/errors.hpp"
#include "varhsmm/model.hpp"

namespace varhsmm {

/// Strengths of the two regularizers: covariance shrinkage and LASSO on the
/// autoregression coefficients.
struct RegularizationConfig {
  double lambda_sigma = 0.0;
  double lambda_a = 0.0;
};

void validate(const RegularizationConfig& reg);

/// Convex combination of a covariance estimate with the scaled identity of the
/// same trace: (S + lambda * tr(S)/d * I) / (1 + lambda).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> shrink_covariance(
    const Eigen::MatrixBase<Derived>& sample, typename Derived::Scalar lambda) {
  using Scalar = typename Derived::Scalar;
  if (lambda < Scalar(0)) throw ValidationError("shrinkage strength must be non-negative");
  const auto d = sample.rows();
  const Scalar scale = sample.trace() / static_cast<Scalar>(d);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out = sample / (Scalar(1) + lambda);
  out.diagonal().array() += lambda / (Scalar(1) + lambda) * scale;
  return out;
}

/// A stochastic vector/matrix update together with the rows that fell back to
/// a uniform distribution because they carried no posterior mass.
struct StochasticUpdate {
  Matrix value;
  std::vector<int> fallback_rows;
};

/// delta_j = gamma_0(j) / sum gamma_0. Throws on an all-zero input.
Vector update_delta(const Vector& gamma0);

/// Row-normalised transition counts with the diagonal forced to zero. Rows with
/// no outflow become uniform over the other states.
StochasticUpdate update_transition(const Matrix& transition_counts);

/// Row-normalised expected duration counts; empty rows become uniform.
StochasticUpdate update_duration(const Matrix& duration_counts);

struct LassoOptions {
  double tolerance = 1e-7;  // max absolute coefficient change per sweep
  int max_sweeps = 10000;
};

/// Solution of min_{b0, b} sum_t w_t (y_t - b0 - x_t^T b)^2 + lambda ||b||_1.
struct LassoFit {
  double intercept = 0.0;
  Vector coefficients;
  int sweeps = 0;
  bool converged = false;
};

/// Weighted LASSO with an unpenalised intercept, solved by cyclic coordinate
/// descent with soft-thresholding on the weighted-centred problem. Every
/// column of `responses` is a separate problem sharing the design.
class WeightedLasso {
 public:
  /// Rows of `design` are observations. Throws on non-finite input, negative
  /// weights or zero total weight.
  WeightedLasso(const Matrix& design, const Vector& weights);

  LassoFit solve(const Vector& response, double lambda, const LassoOptions& options = {},
                 std::vector<double>* objective_trace = nullptr) const;

  /// Value of the penalised objective at (intercept, coefficients).
  double objective(const Vector& response, double lambda, double intercept,
                   const Vector& coefficients) const;

 private:
  Matrix design_;
  Vector weights_;
  Vector design_mean_;   // weighted column means
  Matrix gram_;          // Xc^T W Xc
  double total_weight_ = 0.0;
};

struct RegressionUpdate {
  Vector intercept;         // mu_j
  std::vector<Matrix> ar;   // A_{1,j} .. A_{p,j}
  bool converged = true;
};

/// Weighted VAR(p) regression for one state: each response coordinate is an
/// independent weighted LASSO on [y_{t-1}; ...; y_{t-p}] with an unpenalised
/// intercept. Missing pre-sample lags are zero.
RegressionUpdate update_regression(const TimeSeries& series, const Vector& weights, int order,
                                   double lambda_a, const LassoOptions& options = {});

/// Weighted residual covariance (divided by the total weight), shrunk toward
/// the trace-matched scaled identity.
Matrix update_covariance(const Matrix& residuals, const Vector& weights, double lambda_sigma);

/// y_t minus its conditional mean under (intercept, ar), for every t.
Matrix var_residuals(const TimeSeries& series, const Vector& intercept, const std::vector<Matrix>& ar);

}  // namespace varhsmm

#endif  // VARHSMM_MSTEP_HPP
