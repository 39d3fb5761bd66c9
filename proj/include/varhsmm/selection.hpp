#ifndef VARHSMM_SELECTION_HPP
#define VARHSMM_SELECTION_HPP

#include <string>
#include <vector>

#include "varhsmm/em.hpp"
#include "varhsmm/model.hpp"

namespace varhsmm {

enum class RefitPolicy {
  FitOnceFilterForward,  // fit on the training rows once, then filter forward
  RefitEachStep,         // refit on all rows before every validation target
};

/// Rows [0, train_end) train, [train_end, validation_end) are the one-step
/// validation targets.
struct CvPlan {
  int train_end = 0;       // T1
  int validation_end = 0;  // T2
  std::vector<double> grid_sigma;
  std::vector<double> grid_a;
  RefitPolicy refit = RefitPolicy::FitOnceFilterForward;
};

/// n points equally spaced on the log scale between lo and hi inclusive.
std::vector<double> log_grid(double lo, double hi, int n);

/// 15 points on [1e-4, 1] for the covariance shrinkage.
std::vector<double> default_sigma_grid();

/// 15 points on [0.1, 100] for the LASSO.
std::vector<double> default_a_grid();

void validate(const CvPlan& plan, int series_length);

struct CvCell {
  double lambda_sigma = 0.0;
  double lambda_a = 0.0;
  double msfe = 0.0;  // +inf when the fit failed or did not converge
  bool converged = false;
  std::string diagnostic;
};

struct CvResult {
  Matrix msfe_surface;  // |grid_sigma| x |grid_a|
  double best_lambda_sigma = 0.0;
  double best_lambda_a = 0.0;
  std::vector<CvCell> cells;  // row-major over (sigma, a)
};

/// Two-dimensional grid search on one-step-ahead MSFE over the validation
/// rows. Cells are independent and may be evaluated on up to `threads`
/// threads; the result does not depend on the thread count. Ties in the
/// argmin go to the larger lambda_sigma, then the larger lambda_a.
CvResult grid_search(const TimeSeries& series, const ModelSpec& spec, const CvPlan& plan,
                     const FitConfig& config, int threads = 1);

struct Candidate {
  std::string description;
  ModelSpec spec;
  FitConfig config;
  std::vector<double> grid_sigma;  // empty: use the plan's grid
  std::vector<double> grid_a;
};

struct ComparisonRow {
  std::string description;
  ModelSpec spec;
  std::int64_t free_parameters = 0;
  double lambda_sigma = 0.0;
  double lambda_a = 0.0;
  double validation_msfe = 0.0;
  double forecast_msfe = 0.0;  // over rows [T2, T); +inf on failure
  std::string diagnostic;
};

/// Selects lambda for every candidate by grid_search, refits on rows [0, T2)
/// at the selected values and scores one-step forecasts of rows [T2, T).
/// Rows are sorted by forecast MSFE; values within `tie_tolerance` of each
/// other rank the candidate with fewer free parameters first.
std::vector<ComparisonRow> compare_models(const TimeSeries& series, const std::vector<Candidate>& candidates,
                                          const CvPlan& plan, int threads = 1, double tie_tolerance = 1e-12);

}  // namespace varhsmm

#endif  // VARHSMM_SELECTION_HPP
