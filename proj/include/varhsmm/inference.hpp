#ifndef VARHSMM_INFERENCE_HPP
#define VARHSMM_INFERENCE_HPP

#include <vector>

#include "varhsmm/gaussian.hpp"
#include "varhsmm/model.hpp"

namespace varhsmm {

// Explicit-duration forward-backward recursions, all in the log domain.
//
// Tables are indexed [t](state, n - 1) where n is the ELAPSED duration of the
// segment in progress at time t (it started at t - n + 1). With that indexing
//
//   alpha_t(j, n) = P(y_{0..t}, segment of j started at t-n+1, duration >= n)
//   beta_t(j, n)  = P(y_{t+1..T-1} | y_{0..t}, same event)
//
// so sum_{j,n} alpha_t(j, n) beta_t(j, n) = P(y) for every t. The segment that
// reaches the end of the series is right-censored: it contributes the
// survival mass sum_{m >= n} r_j(m) instead of r_j(n).
//
// With a single state the chain renews itself at the end of every segment, so
// the likelihood collapses to the plain VAR(p) likelihood whatever r is.

/// Log duration pmf and log survival function, both M x D.
struct DurationLogs {
  Matrix log_pmf;       // log r_j(n)
  Matrix log_survival;  // log sum_{m >= n} r_j(m)
};

DurationLogs duration_logs(const Matrix& duration);

/// log Q, except that a one-state model uses log 1 for its self-renewal.
Matrix effective_log_transition(const ModelParams& params);

struct ForwardPass {
  std::vector<Matrix> log_alpha;  // T entries of M x D
  Matrix log_entry;               // (t, j): log P(y_{0..t-1}, segment of j starts at t)
  Matrix log_exit;                // (t, j): log P(y_{0..t}, segment of j ends exactly at t)
  double log_likelihood = 0.0;
};

struct BackwardPass {
  std::vector<Matrix> log_beta;  // T entries of M x D
  Matrix log_start;              // (t, j): log P(y_{t..T-1} | y_{0..t-1}, segment of j starts at t)
  Matrix log_after_exit;         // (t, j): log P(y_{t+1..T-1} | y_{0..t}, segment of j ended at t)
};

ForwardPass forward(const EmissionTable& emissions, const ModelParams& params);
BackwardPass backward(const EmissionTable& emissions, const ModelParams& params);

/// Validating entry points on raw series.
ForwardPass forward(const TimeSeries& series, const ModelParams& params, const ModelSpec& spec);
BackwardPass backward(const TimeSeries& series, const ModelParams& params, const ModelSpec& spec);

/// Posterior quantities normalised by the likelihood, i.e. conditional on y.
struct PosteriorSummaries {
  Matrix gamma;                 // T x M: P(S_t = j | y)
  std::vector<Matrix> xi;       // T-1 entries of M x M: P(segment of i ends at t, j starts at t+1 | y)
  std::vector<Matrix> eta;      // T entries of M x D: P(S_t = j, elapsed duration n | y)
  Matrix transition_counts;     // M x M: sum_t xi_t
  Matrix duration_counts;       // M x D: expected number of segments of j lasting exactly n
  double log_likelihood = 0.0;
};

/// Runs forward and backward and combines them. `duration_counts` spreads the
/// censored final segment over its possible total durations in proportion to
/// the current duration pmf, which keeps the duration update an exact EM step.
PosteriorSummaries posterior_summaries(const EmissionTable& emissions, const ModelParams& params);

PosteriorSummaries posterior_summaries(const TimeSeries& series, const ModelParams& params,
                                       const ModelSpec& spec);

}  // namespace varhsmm

#endif  // VARHSMM_INFERENCE_HPP
