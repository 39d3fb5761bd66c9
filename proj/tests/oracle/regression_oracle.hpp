#ifndef VARHSMM_TESTS_REGRESSION_ORACLE_HPP
#define VARHSMM_TESTS_REGRESSION_ORACLE_HPP

// Weighted least squares through the normal equations, and the KKT residual
// of the weighted LASSO, both written out directly.

#include <Eigen/Dense>

namespace oracle {

/// argmin sum_t w_t (y_t - b0 - x_t^T b)^2; returns [b0; b].
inline Eigen::VectorXd weighted_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
  Eigen::MatrixXd z(x.rows(), x.cols() + 1);
  z << Eigen::VectorXd::Ones(x.rows()), x;
  const Eigen::MatrixXd normal = z.transpose() * w.asDiagonal() * z;
  const Eigen::VectorXd rhs = z.transpose() * w.asDiagonal() * y;
  return normal.inverse() * rhs;
}

/// Largest violation of the subgradient conditions for
/// sum_t w_t (y_t - b0 - x_t^T b)^2 + lambda ||b||_1:
///   g_l = -2 sum_t w_t x_tl r_t;  g_l + lambda sign(b_l) = 0 if b_l != 0, |g_l| <= lambda otherwise,
/// plus the intercept condition sum_t w_t r_t = 0. Scaled by 1 / sum w.
inline double lasso_kkt_violation(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                                  double lambda, double b0, const Eigen::VectorXd& b) {
  const Eigen::VectorXd r = y - x * b - Eigen::VectorXd::Constant(y.size(), b0);
  const Eigen::VectorXd g = -2.0 * x.transpose() * (w.array() * r.array()).matrix();
  double worst = std::abs(2.0 * w.dot(r));
  for (Eigen::Index l = 0; l < b.size(); ++l) {
    const double v = b(l) != 0.0 ? std::abs(g(l) + lambda * (b(l) > 0 ? 1.0 : -1.0))
                                 : std::max(std::abs(g(l)) - lambda, 0.0);
    worst = std::max(worst, v);
  }
  return worst / w.sum();
}

}  // namespace oracle

#endif  // VARHSMM_TESTS_REGRESSION_ORACLE_HPP
