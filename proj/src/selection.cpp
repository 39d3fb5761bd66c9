#include "varhsmm/selection.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "varhsmm/decode.hpp"
#include "varhsmm/errors.hpp"

namespace varhsmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename Task>
void run_parallel(int count, int threads, Task&& task) {
  threads = std::clamp(threads, 1, std::max(count, 1));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) task(i);
    });
  }
}

void check_grid(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) throw ValidationError(fmt::format("{} grid is empty", name));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0) || !std::isfinite(grid[i]))
      throw ValidationError(fmt::format("{} grid has an invalid value {}", name, grid[i]));
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw ValidationError(fmt::format("{} grid must be strictly increasing", name));
  }
}

CvCell evaluate_cell(const TimeSeries& series, const ModelSpec& spec, const CvPlan& plan,
                     FitConfig config, double lambda_sigma, double lambda_a) {
  CvCell cell{lambda_sigma, lambda_a, kInf, false, {}};
  config.reg = {lambda_sigma, lambda_a};
  const TimeSeries observed = series.topRows(plan.validation_end);
  const Matrix actuals = observed.middleRows(plan.train_end, plan.validation_end - plan.train_end);
  try {
    if (plan.refit == RefitPolicy::FitOnceFilterForward) {
      const FitResult fitted = fit(series.topRows(plan.train_end), spec, config);
      cell.converged = fitted.converged;
      const Matrix forecasts =
          rolling_forecasts(observed, fitted.params, spec, plan.train_end, plan.validation_end);
      cell.msfe = msfe(forecasts, actuals);
    } else {
      Matrix forecasts(actuals.rows(), actuals.cols());
      cell.converged = true;
      for (int t = plan.train_end; t < plan.validation_end; ++t) {
        const FitResult fitted = fit(series.topRows(t), spec, config);
        cell.converged = cell.converged && fitted.converged;
        forecasts.row(t - plan.train_end) = forecast_one_step(series.topRows(t), fitted.params, spec).transpose();
      }
      cell.msfe = msfe(forecasts, actuals);
    }
    if (!cell.converged) cell.diagnostic = "EM did not converge within max_iterations";
    if (!std::isfinite(cell.msfe)) cell.diagnostic = "non-finite forecast error";
  } catch (const std::exception& e) {
    cell.converged = false;
    cell.diagnostic = e.what();
  }
  if (!cell.converged || !std::isfinite(cell.msfe)) cell.msfe = kInf;
  return cell;
}

}  // namespace

std::vector<double> log_grid(double lo, double hi, int n) {
  if (n < 1 || !(lo > 0.0) || !(hi >= lo)) throw ValidationError("log grid needs n >= 1 and 0 < lo <= hi");
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / (n - 1);
  for (int i = 0; i < n; ++i) out[i] = std::exp(a + step * i);
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> default_sigma_grid() { return log_grid(1e-4, 1.0, 15); }

std::vector<double> default_a_grid() { return log_grid(0.1, 100.0, 15); }

void validate(const CvPlan& plan, int series_length) {
  if (plan.train_end < 1 || plan.train_end >= plan.validation_end || plan.validation_end > series_length)
    throw ValidationError(fmt::format("need 1 <= T1 < T2 <= T (got T1={}, T2={}, T={})", plan.train_end,
                                      plan.validation_end, series_length));
  check_grid(plan.grid_sigma, "lambda_sigma");
  check_grid(plan.grid_a, "lambda_a");
}

CvResult grid_search(const TimeSeries& series, const ModelSpec& spec, const CvPlan& plan,
                     const FitConfig& config, int threads) {
  validate(plan, static_cast<int>(series.rows()));
  validate_spec(spec);
  validate(config);
  const int rows = static_cast<int>(plan.grid_sigma.size());
  const int cols = static_cast<int>(plan.grid_a.size());

  CvResult result;
  result.cells.resize(static_cast<std::size_t>(rows) * cols);
  run_parallel(rows * cols, threads, [&](int index) {
    const int r = index / cols;
    const int c = index % cols;
    result.cells[index] = evaluate_cell(series, spec, plan, config, plan.grid_sigma[r], plan.grid_a[c]);
  });

  result.msfe_surface.resize(rows, cols);
  double best = kInf;
  int best_index = -1;
  for (int r = rows - 1; r >= 0; --r) {
    for (int c = cols - 1; c >= 0; --c) {
      const CvCell& cell = result.cells[r * cols + c];
      result.msfe_surface(r, c) = cell.msfe;
      if (cell.msfe < best) {
        best = cell.msfe;
        best_index = r * cols + c;
      }
    }
  }
  if (best_index < 0) {
    std::string reason = result.cells.front().diagnostic;
    throw FitError(fmt::format("no grid cell produced a finite MSFE (first cell: {})", reason), 0);
  }
  result.best_lambda_sigma = result.cells[best_index].lambda_sigma;
  result.best_lambda_a = result.cells[best_index].lambda_a;
  return result;
}

std::vector<ComparisonRow> compare_models(const TimeSeries& series, const std::vector<Candidate>& candidates,
                                          const CvPlan& plan, int threads, double tie_tolerance) {
  if (candidates.empty()) throw ValidationError("compare_models needs at least one candidate");
  const int T = static_cast<int>(series.rows());
  if (plan.validation_end >= T) throw ValidationError("no rows left for the forecast period (need T2 < T)");

  std::vector<ComparisonRow> rows;
  for (const Candidate& candidate : candidates) {
    ComparisonRow row;
    row.description = candidate.description;
    row.spec = candidate.spec;
    row.free_parameters = count_free_parameters(candidate.spec);
    row.validation_msfe = kInf;
    row.forecast_msfe = kInf;
    try {
      CvPlan own = plan;
      if (!candidate.grid_sigma.empty()) own.grid_sigma = candidate.grid_sigma;
      if (!candidate.grid_a.empty()) own.grid_a = candidate.grid_a;
      const CvResult cv = grid_search(series, candidate.spec, own, candidate.config, threads);
      row.lambda_sigma = cv.best_lambda_sigma;
      row.lambda_a = cv.best_lambda_a;
      row.validation_msfe = cv.msfe_surface.minCoeff();

      FitConfig config = candidate.config;
      config.reg = {row.lambda_sigma, row.lambda_a};
      const FitResult fitted = fit(series.topRows(plan.validation_end), candidate.spec, config);
      const Matrix forecasts = rolling_forecasts(series, fitted.params, candidate.spec, plan.validation_end, T);
      row.forecast_msfe = msfe(forecasts, series.bottomRows(T - plan.validation_end));
      if (!fitted.converged) row.diagnostic = "final refit did not converge";
    } catch (const std::exception& e) {
      row.diagnostic = e.what();
    }
    rows.push_back(std::move(row));
  }

  // Insertion sort: the tolerance makes "ties" non-transitive, which rules out
  // std::sort's strict-weak-ordering requirement.
  auto before = [tie_tolerance](const ComparisonRow& a, const ComparisonRow& b) {
    const bool finite = std::isfinite(a.forecast_msfe) && std::isfinite(b.forecast_msfe);
    if (finite && std::abs(a.forecast_msfe - b.forecast_msfe) <= tie_tolerance)
      return a.free_parameters < b.free_parameters;
    return a.forecast_msfe < b.forecast_msfe;
  };
  for (std::size_t i = 1; i < rows.size(); ++i)
    for (std::size_t k = i; k > 0 && before(rows[k], rows[k - 1]); --k) std::swap(rows[k], rows[k - 1]);
  return rows;
}

}  // namespace varhsmm
