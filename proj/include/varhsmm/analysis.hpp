#ifndef VARHSMM_ANALYSIS_HPP
#define VARHSMM_ANALYSIS_HPP

#include <vector>

#include "varhsmm/model.hpp"

namespace varhsmm {

/// y_t = log(price_{t+1}) - log(price_t), column by column. Throws
/// ValidationError naming the first non-positive entry (1-based row/column).
TimeSeries log_returns(const Matrix& prices);

struct CorrelationReport {
  int lag = 0;
  double alpha = 0.05;
  Matrix corr;                           // corr(a, b) = corr(y_t[a], y_{t+lag}[b])
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> significant;
  int n_significant = 0;                 // lag 0 excludes the diagonal
  std::vector<int> zero_variance_columns;
};

/// Pearson lag-k correlation over the overlapping window with per-window
/// means, screened by a two-sided Fisher z test: |atanh(rho)| sqrt(n - 3)
/// against the normal 1 - alpha/2 quantile. Requires T > lag + 2.
CorrelationReport lag_correlation(const TimeSeries& series, int lag, double alpha = 0.05);

}  // namespace varhsmm

#endif  // VARHSMM_ANALYSIS_HPP
