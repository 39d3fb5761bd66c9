#include "varhsmm/inference.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "varhsmm/logspace.hpp"

namespace varhsmm {

namespace {

constexpr double kNInf = kNegInf<double>;

void check_inputs(const TimeSeries& series, const ModelParams& params, const ModelSpec& spec) {
  require_valid(spec, params);
  if (series.rows() < 1) throw ValidationError("series is empty");
  if (series.cols() != spec.dim)
    throw ValidationError(fmt::format("series has {} columns, model dimension is {}",
                                      series.cols(), spec.dim));
  if (!series.allFinite()) throw ValidationError("series contains non-finite values");
}

void check_shapes(const EmissionTable& emissions, const ModelParams& params) {
  if (emissions.states() != params.states())
    throw ValidationError("emission table and parameters disagree on the number of states");
  if (emissions.length() < 1) throw ValidationError("series is empty");
}

}  // namespace

DurationLogs duration_logs(const Matrix& duration) {
  const auto m = duration.rows();
  const auto dmax = duration.cols();
  DurationLogs out{Matrix(m, dmax), Matrix(m, dmax)};
  for (Eigen::Index j = 0; j < m; ++j) {
    double tail = 0.0;
    for (Eigen::Index n = dmax - 1; n >= 0; --n) {
      tail += duration(j, n);
      out.log_pmf(j, n) = safe_log(duration(j, n));
      out.log_survival(j, n) = safe_log(tail);
    }
  }
  return out;
}

Matrix effective_log_transition(const ModelParams& params) {
  if (params.states() == 1) return Matrix::Zero(1, 1);
  return params.transition.unaryExpr([](double q) { return safe_log(q); });
}

ForwardPass forward(const EmissionTable& emissions, const ModelParams& params) {
  check_shapes(emissions, params);
  const int T = emissions.length();
  const int m = params.states();
  const int dmax = static_cast<int>(params.duration.cols());
  const DurationLogs dur = duration_logs(params.duration);
  const Matrix log_q = effective_log_transition(params);

  ForwardPass out;
  out.log_alpha.assign(T, Matrix::Constant(m, dmax, kNInf));
  out.log_entry = Matrix::Constant(T, m, kNInf);
  out.log_exit = Matrix::Constant(T, m, kNInf);
  out.log_entry.row(0) = params.initial.unaryExpr([](double p) { return safe_log(p); }).transpose();

  for (int t = 0; t < T; ++t) {
    Matrix& alpha = out.log_alpha[t];
    const int reach = std::min(dmax, t + 1);
    for (int j = 0; j < m; ++j) {
      LogAccumulator<> exit;
      for (int n = 1; n <= reach; ++n) {
        const int start = t - n + 1;
        const double entry = out.log_entry(start, j);
        if (entry == kNInf) continue;
        const double base = entry + emissions.segment(j, start, n);
        alpha(j, n - 1) = base + dur.log_survival(j, n - 1);
        exit.add(base + dur.log_pmf(j, n - 1));
      }
      out.log_exit(t, j) = exit.value();
    }
    if (t + 1 < T) {
      for (int j = 0; j < m; ++j)
        out.log_entry(t + 1, j) = log_sum_exp(out.log_exit.row(t).transpose() + log_q.col(j));
    }
  }
  out.log_likelihood = log_sum_exp(out.log_alpha[T - 1].reshaped());
  return out;
}

BackwardPass backward(const EmissionTable& emissions, const ModelParams& params) {
  check_shapes(emissions, params);
  const int T = emissions.length();
  const int m = params.states();
  const int dmax = static_cast<int>(params.duration.cols());
  const DurationLogs dur = duration_logs(params.duration);
  const Matrix log_q = effective_log_transition(params);

  BackwardPass out;
  out.log_start = Matrix::Constant(T, m, kNInf);
  out.log_after_exit = Matrix::Constant(T, m, kNInf);

  for (int s = T - 1; s >= 0; --s) {
    if (s + 1 < T) {
      for (int j = 0; j < m; ++j)
        out.log_after_exit(s, j) = log_sum_exp(log_q.row(j).transpose() + out.log_start.row(s + 1).transpose());
    }
    for (int i = 0; i < m; ++i) {
      LogAccumulator<> acc;
      const int reach = std::min(dmax, T - s);
      for (int len = 1; len <= reach; ++len) {
        const double seg = emissions.segment(i, s, len);
        if (s + len == T) {
          acc.add(dur.log_survival(i, len - 1) + seg);
        } else {
          acc.add(dur.log_pmf(i, len - 1) + seg + out.log_after_exit(s + len - 1, i));
        }
      }
      out.log_start(s, i) = acc.value();
    }
  }

  // Each beta entry sums directly over the remaining length of the segment in
  // progress, so no survival ratios are chained through the recursion.
  out.log_beta.assign(T, Matrix::Constant(m, dmax, kNInf));
  for (int t = 0; t < T; ++t) {
    const int reach = std::min(dmax, t + 1);
    for (int j = 0; j < m; ++j) {
      for (int n = 1; n <= reach; ++n) {
        const double log_surv = dur.log_survival(j, n - 1);
        if (log_surv == kNInf) continue;
        const int start = t - n + 1;
        LogAccumulator<> acc;
        const int last_complete = std::min(dmax, T - 1 - start);
        for (int total = n; total <= last_complete; ++total) {
          acc.add(dur.log_pmf(j, total - 1) + emissions.segment(j, t + 1, total - n) +
                  out.log_after_exit(start + total - 1, j));
        }
        if (T - start <= dmax) {
          acc.add(dur.log_survival(j, T - start - 1) + emissions.segment(j, t + 1, T - 1 - t));
        }
        out.log_beta[t](j, n - 1) = acc.value() - log_surv;
      }
    }
  }
  return out;
}

ForwardPass forward(const TimeSeries& series, const ModelParams& params, const ModelSpec& spec) {
  check_inputs(series, params, spec);
  return forward(EmissionTable(series, params), params);
}

BackwardPass backward(const TimeSeries& series, const ModelParams& params, const ModelSpec& spec) {
  check_inputs(series, params, spec);
  return backward(EmissionTable(series, params), params);
}

PosteriorSummaries posterior_summaries(const EmissionTable& emissions, const ModelParams& params) {
  const ForwardPass fwd = forward(emissions, params);
  const BackwardPass bwd = backward(emissions, params);
  const double ll = fwd.log_likelihood;
  if (!std::isfinite(ll))
    throw ValidationError(fmt::format("log-likelihood is not finite ({})", ll));

  const int T = emissions.length();
  const int m = params.states();
  const int dmax = static_cast<int>(params.duration.cols());
  const DurationLogs dur = duration_logs(params.duration);
  const Matrix log_q = effective_log_transition(params);

  PosteriorSummaries out;
  out.log_likelihood = ll;
  out.gamma = Matrix::Zero(T, m);
  out.eta.assign(T, Matrix::Zero(m, dmax));
  for (int t = 0; t < T; ++t) {
    out.eta[t] = (fwd.log_alpha[t] + bwd.log_beta[t]).array() - ll;
    out.eta[t] = exp_exact(out.eta[t].array());
    out.gamma.row(t) = out.eta[t].rowwise().sum().transpose();
  }

  out.xi.assign(std::max(T - 1, 0), Matrix::Zero(m, m));
  out.transition_counts = Matrix::Zero(m, m);
  for (int t = 0; t + 1 < T; ++t) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        out.xi[t](i, j) = std::exp(fwd.log_exit(t, i) + log_q(i, j) + bwd.log_start(t + 1, j) - ll);
    out.transition_counts += out.xi[t];
  }

  // Completed segments: start at t - n + 1, end exactly at t < T - 1.
  out.duration_counts = Matrix::Zero(m, dmax);
  for (int t = 0; t + 1 < T; ++t) {
    for (int j = 0; j < m; ++j) {
      const double after = bwd.log_after_exit(t, j);
      if (after == kNInf) continue;
      const int reach = std::min(dmax, t + 1);
      for (int n = 1; n <= reach; ++n) {
        const int start = t - n + 1;
        const double lp = fwd.log_entry(start, j) + dur.log_pmf(j, n - 1) +
                          emissions.segment(j, start, n) + after - ll;
        out.duration_counts(j, n - 1) += std::exp(lp);
      }
    }
  }
  // Censored final segment: elapsed n at T - 1, total duration m >= n.
  for (int j = 0; j < m; ++j) {
    for (int n = 1; n <= dmax; ++n) {
      const double w = out.eta[T - 1](j, n - 1);
      if (w == 0.0) continue;
      for (int total = n; total <= dmax; ++total) {
        out.duration_counts(j, total - 1) +=
            w * std::exp(dur.log_pmf(j, total - 1) - dur.log_survival(j, n - 1));
      }
    }
  }
  return out;
}

PosteriorSummaries posterior_summaries(const TimeSeries& series, const ModelParams& params,
                                       const ModelSpec& spec) {
  check_inputs(series, params, spec);
  return posterior_summaries(EmissionTable(series, params), params);
}

}  // namespace varhsmm
