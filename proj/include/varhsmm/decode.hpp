#ifndef VARHSMM_DECODE_HPP
#define VARHSMM_DECODE_HPP

#include <vector>

#include "varhsmm/model.hpp"

namespace varhsmm {

/// A run of one state: rows [start, start + duration).
struct Segment {
  int state = 0;
  int start = 0;
  int duration = 0;

  bool operator==(const Segment&) const = default;
};

struct DecodedPath {
  std::vector<int> states;        // length T, 0-based state per row
  std::vector<Segment> segments;  // consecutive segments have distinct states
  double path_log_score = 0.0;    // log of delta * prod r q * emission densities
};

/// Joint MAP segmentation by max-product explicit-duration dynamic
/// programming. The final segment is right-censored exactly as in the forward
/// pass. Ties go to the lower state index, then to the shorter duration.
DecodedPath viterbi_decode(const TimeSeries& series, const ModelParams& params, const ModelSpec& spec);

/// Row t holds P(S_t = j | y_0 .. y_{t-1}) for t = 0 .. T (row 0 is delta,
/// row T is the prediction for the first unobserved time).
Matrix predictive_state_probabilities(const TimeSeries& series, const ModelParams& params,
                                      const ModelSpec& spec);

/// P(S_{t+1} = j | y_{1:t}) where `prefix` holds y_{1:t}, t >= 1.
Vector filtered_state_probabilities(const TimeSeries& prefix, const ModelParams& params,
                                    const ModelSpec& spec);

/// Posterior-predictive mean of the observation following `prefix`.
Vector forecast_one_step(const TimeSeries& prefix, const ModelParams& params, const ModelSpec& spec);

/// One-step forecasts of rows first .. last - 1 of `series`, each conditioned
/// only on the rows before it. Requires 1 <= first <= last <= T + 1; a target
/// row equal to T is the first unobserved point.
Matrix rolling_forecasts(const TimeSeries& series, const ModelParams& params, const ModelSpec& spec,
                         int first, int last);

/// Mean over rows of the squared Euclidean forecast error.
double msfe(const Matrix& forecasts, const Matrix& actuals);

}  // namespace varhsmm

#endif  // VARHSMM_DECODE_HPP
