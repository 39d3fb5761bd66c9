#include "varhsmm/decode.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "varhsmm/errors.hpp"
#include "varhsmm/gaussian.hpp"
#include "varhsmm/inference.hpp"
#include "varhsmm/logspace.hpp"

namespace varhsmm {

namespace {

constexpr double kNInf = kNegInf<double>;

void check_inputs(const TimeSeries& series, const ModelParams& params, const ModelSpec& spec) {
  require_valid(spec, params);
  if (series.rows() < 1) throw ValidationError("series is empty");
  if (series.cols() != spec.dim)
    throw ValidationError(fmt::format("series has {} columns, model dimension is {}", series.cols(), spec.dim));
  if (!series.allFinite()) throw ValidationError("series contains non-finite values");
}

// mu_j + sum_k A_{k,j} y_{t-k}, where t may be one past the last row.
Vector next_conditional_mean(const ModelParams& params, int state, const TimeSeries& series, int t) {
  Vector mean = params.intercept[state];
  const auto& lags = params.ar[state];
  for (int k = 1; k <= static_cast<int>(lags.size()) && t - k >= 0; ++k)
    mean.noalias() += lags[k - 1] * series.row(t - k).transpose();
  return mean;
}

}  // namespace

DecodedPath viterbi_decode(const TimeSeries& series, const ModelParams& params, const ModelSpec& spec) {
  check_inputs(series, params, spec);
  const EmissionTable emissions(series, params);
  const int T = emissions.length();
  const int m = spec.states;

  DecodedPath path;
  if (m == 1) {
    path.states.assign(T, 0);
    path.segments.push_back({0, 0, T});
    path.path_log_score = emissions.segment(0, 0, T);
    return path;
  }

  const int dmax = spec.max_duration;
  const DurationLogs dur = duration_logs(params.duration);
  const Matrix log_q = effective_log_transition(params);

  Matrix entry = Matrix::Constant(T, m, kNInf);
  Eigen::MatrixXi entry_from = Eigen::MatrixXi::Constant(T, m, -1);
  Matrix exit = Matrix::Constant(T, m, kNInf);
  Eigen::MatrixXi exit_duration = Eigen::MatrixXi::Zero(T, m);
  for (int j = 0; j < m; ++j) entry(0, j) = safe_log(params.initial(j));

  for (int t = 0; t < T; ++t) {
    const int reach = std::min(dmax, t + 1);
    for (int j = 0; j < m; ++j) {
      for (int n = 1; n <= reach; ++n) {
        const int start = t - n + 1;
        if (entry(start, j) == kNInf) continue;
        const double score = entry(start, j) + dur.log_pmf(j, n - 1) + emissions.segment(j, start, n);
        if (score > exit(t, j)) {
          exit(t, j) = score;
          exit_duration(t, j) = n;
        }
      }
    }
    if (t + 1 == T) break;
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < m; ++i) {
        const double score = exit(t, i) + log_q(i, j);
        if (score > entry(t + 1, j)) {
          entry(t + 1, j) = score;
          entry_from(t + 1, j) = i;
        }
      }
    }
  }

  double best = kNInf;
  int best_state = -1;
  int best_duration = 0;
  for (int j = 0; j < m; ++j) {
    for (int n = 1; n <= std::min(dmax, T); ++n) {
      const int start = T - n;
      if (entry(start, j) == kNInf) continue;
      const double score = entry(start, j) + dur.log_survival(j, n - 1) + emissions.segment(j, start, n);
      if (score > best) {
        best = score;
        best_state = j;
        best_duration = n;
      }
    }
  }
  if (best_state < 0) throw ValidationError("no segmentation has positive probability");

  std::vector<Segment> reversed;
  int state = best_state;
  int start = T - best_duration;
  reversed.push_back({state, start, best_duration});
  while (start > 0) {
    const int previous = entry_from(start, state);
    const int n = exit_duration(start - 1, previous);
    start -= n;
    state = previous;
    reversed.push_back({state, start, n});
  }
  path.segments.assign(reversed.rbegin(), reversed.rend());
  path.states.resize(T);
  for (const auto& seg : path.segments)
    std::fill_n(path.states.begin() + seg.start, seg.duration, seg.state);
  path.path_log_score = best;
  return path;
}

Matrix predictive_state_probabilities(const TimeSeries& series, const ModelParams& params,
                                      const ModelSpec& spec) {
  check_inputs(series, params, spec);
  const EmissionTable emissions(series, params);
  const ForwardPass fwd = forward(emissions, params);
  const int T = emissions.length();
  const int m = spec.states;
  const int dmax = spec.max_duration;
  const DurationLogs dur = duration_logs(params.duration);
  const Matrix log_q = effective_log_transition(params);

  Matrix out(T + 1, m);
  out.row(0) = params.initial.transpose();
  Eigen::RowVectorXd log_pred(m);
  for (int t = 1; t <= T; ++t) {
    const Matrix& alpha = fwd.log_alpha[t - 1];
    for (int j = 0; j < m; ++j) {
      // Segment in progress at t - 1 survives one more step.
      LogAccumulator<> acc;
      for (int n = 1; n < dmax; ++n) {
        if (alpha(j, n - 1) == kNInf) continue;
        acc.add(alpha(j, n - 1) - dur.log_survival(j, n - 1) + dur.log_survival(j, n));
      }
      // Segment ended at t - 1 and j is entered.
      const double entered = t < T ? fwd.log_entry(t, j)
                                   : log_sum_exp(fwd.log_exit.row(T - 1).transpose() + log_q.col(j));
      acc.add(entered);
      log_pred(j) = acc.value();
    }
    const double norm = log_sum_exp(log_pred);
    out.row(t) = exp_exact(log_pred.array() - norm);
  }
  return out;
}

Vector filtered_state_probabilities(const TimeSeries& prefix, const ModelParams& params,
                                    const ModelSpec& spec) {
  if (prefix.rows() < 1) throw ValidationError("filtering needs at least one observation");
  return predictive_state_probabilities(prefix, params, spec).bottomRows(1).transpose();
}

Vector forecast_one_step(const TimeSeries& prefix, const ModelParams& params, const ModelSpec& spec) {
  const Vector probs = filtered_state_probabilities(prefix, params, spec);
  const int t = static_cast<int>(prefix.rows());
  Vector out = Vector::Zero(spec.dim);
  for (int j = 0; j < spec.states; ++j) out += probs(j) * next_conditional_mean(params, j, prefix, t);
  return out;
}

Matrix rolling_forecasts(const TimeSeries& series, const ModelParams& params, const ModelSpec& spec,
                         int first, int last) {
  const int T = static_cast<int>(series.rows());
  if (first < 1 || first > last || last > T + 1)
    throw ValidationError(fmt::format("forecast window [{}, {}) invalid for a series of length {}", first, last, T));
  if (first == last) return Matrix(0, spec.dim);
  const TimeSeries observed = series.topRows(std::min(last, T));
  const Matrix probs = predictive_state_probabilities(observed.topRows(last - 1), params, spec);
  Matrix out(last - first, spec.dim);
  for (int t = first; t < last; ++t) {
    Vector f = Vector::Zero(spec.dim);
    for (int j = 0; j < spec.states; ++j) f += probs(t, j) * next_conditional_mean(params, j, observed, t);
    out.row(t - first) = f.transpose();
  }
  return out;
}

double msfe(const Matrix& forecasts, const Matrix& actuals) {
  if (forecasts.rows() == 0) throw ValidationError("msfe needs at least one forecast");
  if (forecasts.rows() != actuals.rows() || forecasts.cols() != actuals.cols())
    throw ValidationError("forecasts and actuals differ in shape");
  return (forecasts - actuals).rowwise().squaredNorm().mean();
}

}  // namespace varhsmm
