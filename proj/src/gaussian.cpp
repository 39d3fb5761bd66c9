#include "varhsmm/gaussian.hpp"

#include <fmt/format.h>

namespace varhsmm {

namespace {

void check_state(const ModelParams& params, int state) {
  if (state < 0 || state >= params.states())
    throw ValidationError(fmt::format("state index {} out of range [0, {})", state, params.states()));
}

}  // namespace

Vector conditional_mean(const ModelParams& params, int state, const TimeSeries& series, int t) {
  check_state(params, state);
  if (t < 0 || t >= series.rows()) throw ValidationError(fmt::format("time {} out of range", t));
  Vector mean = params.intercept[state];
  const auto& lags = params.ar[state];
  const int usable = std::min<int>(static_cast<int>(lags.size()), t);
  for (int k = 1; k <= usable; ++k) mean.noalias() += lags[k - 1] * series.row(t - k).transpose();
  return mean;
}

Vector conditional_mean(const ModelParams& params, int state, const std::vector<Vector>& history) {
  check_state(params, state);
  Vector mean = params.intercept[state];
  const auto& lags = params.ar[state];
  const std::size_t usable = std::min(lags.size(), history.size());
  for (std::size_t k = 0; k < usable; ++k) mean.noalias() += lags[k] * history[k];
  return mean;
}

double segment_log_density(const ModelParams& params, int state, int t_start, int n,
                           const TimeSeries& series) {
  check_state(params, state);
  if (t_start < 0 || n < 1 || t_start + n > series.rows())
    throw ValidationError(fmt::format("segment [{}, {}) outside series of length {}", t_start,
                                      t_start + n, series.rows()));
  const CholeskyFactor chol(params.covariance[state]);
  double total = 0.0;
  for (int t = t_start; t < t_start + n; ++t)
    total += log_density(series.row(t).transpose(), conditional_mean(params, state, series, t), chol);
  return total;
}

EmissionTable::EmissionTable(const TimeSeries& series, const ModelParams& params) {
  const int m = params.states();
  const auto T = series.rows();
  if (m == 0 || params.intercept.front().size() != series.cols())
    throw ValidationError(fmt::format("series has {} columns but the model has dimension {}",
                                      series.cols(), m == 0 ? 0 : params.intercept.front().size()));
  per_time_.resize(T, m);
  for (int j = 0; j < m; ++j) {
    const CholeskyFactor chol(params.covariance[j]);
    // Residuals for every time point at once: Y - 1 mu^T - sum_k lag_k(Y) A_k^T.
    Matrix resid = series.rowwise() - params.intercept[j].transpose();
    const int order = static_cast<int>(params.ar[j].size());
    for (int k = 1; k <= order && k < T; ++k)
      resid.bottomRows(T - k).noalias() -= series.topRows(T - k) * params.ar[j][k - 1].transpose();
    // L^{-1} applied to every residual column in one triangular solve.
    const Matrix whitened =
        chol.lower().triangularView<Eigen::Lower>().solve(resid.transpose());
    const double constant =
        -0.5 * (static_cast<double>(series.cols()) * std::log(2.0 * std::numbers::pi) + chol.log_det());
    per_time_.col(j) = constant - 0.5 * whitened.colwise().squaredNorm().transpose().array();
  }
  accumulate();
}

EmissionTable::EmissionTable(Matrix log_densities) : per_time_(std::move(log_densities)) {
  accumulate();
}

void EmissionTable::accumulate() {
  cumulative_.setZero(per_time_.rows() + 1, per_time_.cols());
  for (Eigen::Index t = 0; t < per_time_.rows(); ++t)
    cumulative_.row(t + 1) = cumulative_.row(t) + per_time_.row(t);
}

Vector lagged_regressors(const TimeSeries& series, int t, int order) {
  const auto d = series.cols();
  Vector x = Vector::Zero(order * d);
  for (int k = 1; k <= order && t - k >= 0; ++k)
    x.segment((k - 1) * d, d) = series.row(t - k).transpose();
  return x;
}

}  // namespace varhsmm
