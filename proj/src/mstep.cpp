#include "varhsmm/mstep.hpp"

#include <fmt/format.h>

#include <cmath>

#include "varhsmm/gaussian.hpp"

namespace varhsmm {

namespace {

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

StochasticUpdate normalise_rows(const Matrix& counts, bool zero_diagonal) {
  StochasticUpdate out{Matrix::Zero(counts.rows(), counts.cols()), {}};
  const auto cols = counts.cols();
  for (Eigen::Index i = 0; i < counts.rows(); ++i) {
    Eigen::RowVectorXd row = counts.row(i);
    if (zero_diagonal) row(i) = 0.0;
    if ((row.array() < 0.0).any() || !row.allFinite())
      throw ValidationError(fmt::format("row {} of the expected counts is negative or non-finite", i + 1));
    const double total = row.sum();
    if (total > 0.0) {
      out.value.row(i) = row / total;
      continue;
    }
    out.fallback_rows.push_back(static_cast<int>(i));
    const double slots = zero_diagonal ? static_cast<double>(cols - 1) : static_cast<double>(cols);
    out.value.row(i).setConstant(1.0 / slots);
    if (zero_diagonal) out.value(i, i) = 0.0;
  }
  return out;
}

}  // namespace

void validate(const RegularizationConfig& reg) {
  if (!(reg.lambda_sigma >= 0.0) || !(reg.lambda_a >= 0.0))
    throw ValidationError(fmt::format("regularization strengths must be non-negative (got {}, {})",
                                      reg.lambda_sigma, reg.lambda_a));
}

Vector update_delta(const Vector& gamma0) {
  if ((gamma0.array() < 0.0).any() || !gamma0.allFinite())
    throw ValidationError("initial-state posterior must be non-negative and finite");
  const double total = gamma0.sum();
  if (total <= 0.0) throw ValidationError("initial-state posterior has no mass");
  return gamma0 / total;
}

StochasticUpdate update_transition(const Matrix& transition_counts) {
  if (transition_counts.rows() != transition_counts.cols())
    throw ValidationError("transition counts must be square");
  if (transition_counts.rows() == 1) return {Matrix::Zero(1, 1), {}};
  return normalise_rows(transition_counts, true);
}

StochasticUpdate update_duration(const Matrix& duration_counts) {
  return normalise_rows(duration_counts, false);
}

WeightedLasso::WeightedLasso(const Matrix& design, const Vector& weights)
    : design_(design), weights_(weights) {
  if (design.rows() != weights.size())
    throw ValidationError("design and weights have different lengths");
  if (!design.allFinite()) throw ValidationError("design contains non-finite entries");
  if (!weights.allFinite() || (weights.array() < 0.0).any())
    throw ValidationError("weights must be finite and non-negative");
  total_weight_ = weights.sum();
  if (total_weight_ <= 0.0) throw ValidationError("weights sum to zero");

  design_mean_ = design.transpose() * weights / total_weight_;
  const Matrix centred = design.rowwise() - design_mean_.transpose();
  const Matrix scaled = centred.array().colwise() * weights.array().sqrt();
  gram_.noalias() = scaled.transpose() * scaled;
}

double WeightedLasso::objective(const Vector& response, double lambda, double intercept,
                                const Vector& coefficients) const {
  const Vector resid =
      (response - design_ * coefficients).array() - intercept;
  return (weights_.array() * resid.array().square()).sum() + lambda * coefficients.lpNorm<1>();
}

LassoFit WeightedLasso::solve(const Vector& response, double lambda, const LassoOptions& options,
                              std::vector<double>* objective_trace) const {
  if (response.size() != design_.rows()) throw ValidationError("response length mismatch");
  if (!response.allFinite()) throw ValidationError("response contains non-finite entries");
  if (lambda < 0.0) throw ValidationError("lambda must be non-negative");

  const auto P = design_.cols();
  const double response_mean = weights_.dot(response) / total_weight_;
  const Vector centred_response = response.array() - response_mean;
  const Vector wy = weights_.cwiseProduct(centred_response);
  const Vector corr = design_.transpose() * wy - design_mean_ * wy.sum();
  const double yy = centred_response.dot(wy);
  const double half_lambda = 0.5 * lambda;

  LassoFit fit;
  fit.coefficients = Vector::Zero(P);
  Vector& b = fit.coefficients;
  // grad = corr - G b, half the negative gradient of the smooth part.
  Vector grad = corr;

  auto centred_objective = [&]() {
    return yy - 2.0 * corr.dot(b) + b.dot(gram_ * b) + lambda * b.lpNorm<1>();
  };
  if (objective_trace) objective_trace->push_back(centred_objective());

  if (P == 0) fit.converged = true;
  for (int sweep = 0; sweep < options.max_sweeps && P > 0; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index l = 0; l < P; ++l) {
      const double g_ll = gram_(l, l);
      const double old = b(l);
      const double updated = g_ll > 0.0 ? soft_threshold(grad(l) + g_ll * old, half_lambda) / g_ll : 0.0;
      const double delta = updated - old;
      if (delta != 0.0) {
        b(l) = updated;
        grad.noalias() -= gram_.col(l) * delta;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    fit.sweeps = sweep + 1;
    if (objective_trace) objective_trace->push_back(centred_objective());
    if (max_change < options.tolerance) {
      fit.converged = true;
      break;
    }
  }
  fit.intercept = response_mean - design_mean_.dot(b);
  return fit;
}

RegressionUpdate update_regression(const TimeSeries& series, const Vector& weights, int order,
                                   double lambda_a, const LassoOptions& options) {
  const auto T = series.rows();
  const auto d = series.cols();
  if (weights.size() != T) throw ValidationError("weights and series have different lengths");
  if (order < 0) throw ValidationError("autoregression order must be non-negative");

  Matrix design(T, order * d);
  for (Eigen::Index t = 0; t < T; ++t)
    design.row(t) = lagged_regressors(series, static_cast<int>(t), order).transpose();
  const WeightedLasso lasso(design, weights);

  RegressionUpdate out;
  out.intercept = Vector::Zero(d);
  out.ar.assign(order, Matrix::Zero(d, d));
  for (Eigen::Index k = 0; k < d; ++k) {
    const LassoFit fit = lasso.solve(series.col(k), lambda_a, options);
    out.converged = out.converged && fit.converged;
    out.intercept(k) = fit.intercept;
    for (int lag = 0; lag < order; ++lag)
      out.ar[lag].row(k) = fit.coefficients.segment(lag * d, d).transpose();
  }
  return out;
}

Matrix update_covariance(const Matrix& residuals, const Vector& weights, double lambda_sigma) {
  if (residuals.rows() != weights.size())
    throw ValidationError("residuals and weights have different lengths");
  const double total = weights.sum();
  if (!(total > 0.0)) throw ValidationError("covariance update needs positive total weight");
  const Matrix scaled = residuals.array().colwise() * weights.array().sqrt();
  Matrix sample = scaled.transpose() * scaled / total;
  sample = 0.5 * (sample + sample.transpose());
  return shrink_covariance(sample, lambda_sigma);
}

Matrix var_residuals(const TimeSeries& series, const Vector& intercept, const std::vector<Matrix>& ar) {
  const auto T = series.rows();
  Matrix resid = series.rowwise() - intercept.transpose();
  const int order = static_cast<int>(ar.size());
  for (int k = 1; k <= order && k < T; ++k)
    resid.bottomRows(T - k).noalias() -= series.topRows(T - k) * ar[k - 1].transpose();
  return resid;
}

}  // namespace varhsmm
