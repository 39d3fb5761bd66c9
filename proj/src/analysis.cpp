#include "varhsmm/analysis.hpp"

#include <fmt/format.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "varhsmm/errors.hpp"

namespace varhsmm {

TimeSeries log_returns(const Matrix& prices) {
  if (prices.rows() < 2) throw ValidationError("need at least two price rows");
  for (Eigen::Index t = 0; t < prices.rows(); ++t)
    for (Eigen::Index c = 0; c < prices.cols(); ++c)
      if (!(prices(t, c) > 0.0) || !std::isfinite(prices(t, c)))
        throw ValidationError(fmt::format("non-positive price {} at row {}, column {}", prices(t, c), t + 1, c + 1));
  // Scalar log: the packet path can round a value differently from the tail.
  const Matrix logs = prices.unaryExpr([](double v) { return std::log(v); });
  return logs.bottomRows(prices.rows() - 1) - logs.topRows(prices.rows() - 1);
}

CorrelationReport lag_correlation(const TimeSeries& series, int lag, double alpha) {
  if (lag < 0) throw ValidationError("lag must be non-negative");
  if (series.rows() <= lag + 2) throw ValidationError(fmt::format("series too short for lag {}", lag));
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  const auto n = series.rows() - lag;
  const auto d = series.cols();

  const Matrix lead = series.topRows(n).rowwise() - series.topRows(n).colwise().mean();
  const Matrix lagged = series.bottomRows(n).rowwise() - series.bottomRows(n).colwise().mean();
  const Eigen::RowVectorXd lead_sd = lead.colwise().norm();
  const Eigen::RowVectorXd lagged_sd = lagged.colwise().norm();

  CorrelationReport report;
  report.lag = lag;
  report.alpha = alpha;
  report.corr = lead.transpose() * lagged;
  for (Eigen::Index c = 0; c < d; ++c)
    if (lead_sd(c) == 0.0 || lagged_sd(c) == 0.0) report.zero_variance_columns.push_back(static_cast<int>(c));
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      const double denom = lead_sd(a) * lagged_sd(b);
      report.corr(a, b) = denom > 0.0 ? std::clamp(report.corr(a, b) / denom, -1.0, 1.0) : 0.0;
    }
  }
  if (lag == 0) {
    for (Eigen::Index a = 0; a < d; ++a)
      if (lead_sd(a) > 0.0) report.corr(a, a) = 1.0;
  }

  const double critical = boost::math::quantile(boost::math::normal(), 1.0 - alpha / 2.0);
  const double se = n > 3 ? 1.0 / std::sqrt(static_cast<double>(n - 3)) : std::numeric_limits<double>::infinity();
  report.significant.setConstant(d, d, false);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      if (lag == 0 && a == b) continue;
      const double rho = report.corr(a, b);
      const double z = std::abs(rho) >= 1.0 ? std::numeric_limits<double>::infinity() : std::atanh(rho);
      if (std::abs(z) / se > critical) {
        report.significant(a, b) = true;
        ++report.n_significant;
      }
    }
  }
  return report;
}

}  // namespace varhsmm
