#ifndef VARHSMM_EM_HPP
#define VARHSMM_EM_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "varhsmm/model.hpp"
#include "varhsmm/mstep.hpp"

namespace varhsmm {

enum class InitPolicy { SegmentedMoments, UserSupplied };

struct FitConfig {
  RegularizationConfig reg;
  int max_iterations = 200;
  double tolerance = 1e-6;  // on the relative change of the penalized log-likelihood
  InitPolicy init_policy = InitPolicy::SegmentedMoments;
  std::uint64_t seed = 0;
  bool jitter = false;      // perturb initial means by 1e-3 coordinate sd
  LassoOptions lasso;
};

void validate(const FitConfig& config);

struct FitResult {
  ModelParams params;
  std::vector<double> penalized_loglik_trace;
  int iterations = 0;  // number of M-steps performed
  bool converged = false;
  double log_likelihood = 0.0;
  std::vector<std::string> diagnostics;
};

/// log-likelihood minus lambda_a times the l1 norm of every AR coefficient.
/// Covariance shrinkage acts through the M-step only and adds no term.
double penalized_objective(double log_likelihood, const ModelParams& params,
                           const RegularizationConfig& reg);

/// Deterministic segmented-moments start: M contiguous blocks ranked by the
/// trace of their sample covariance (state 1 = calmest block), block moments
/// as means and (shrunk) covariances, zero autoregression, uniform delta, Q
/// and r. Requires T >= M (p + 2).
ModelParams initialize(const TimeSeries& series, const ModelSpec& spec, const FitConfig& config);

/// Penalized EM. Uses `initial` when given (required for UserSupplied),
/// otherwise initialize(). An M-step that would lower the penalized
/// log-likelihood is halved toward the current parameters until it does not,
/// so the trace is non-decreasing. Throws FitError if the likelihood at the
/// start is non-finite or a covariance cannot be factorized.
FitResult fit(const TimeSeries& series, const ModelSpec& spec, const FitConfig& config,
              const std::optional<ModelParams>& initial = std::nullopt);

}  // namespace varhsmm

#endif  // VARHSMM_EM_HPP
