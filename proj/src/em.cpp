#include "varhsmm/em.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "varhsmm/errors.hpp"
#include "varhsmm/gaussian.hpp"
#include "varhsmm/inference.hpp"
#include "varhsmm/logspace.hpp"
#include "varhsmm/random.hpp"

namespace varhsmm {

namespace {

constexpr double kDegenerateMass = 1e-6;
constexpr int kMaxHalvings = 30;

bool is_positive_definite(const Matrix& s) {
  Eigen::LLT<Matrix> llt(s);
  return llt.info() == Eigen::Success && s.allFinite();
}

// Singular covariances only arise without shrinkage (or with an all-zero
// residual trace). Add the smallest ridge that restores a Cholesky factor and
// record it.
Matrix ensure_factorizable(Matrix s, const std::string& label, std::vector<std::string>& diagnostics) {
  if (is_positive_definite(s)) return s;
  const auto d = s.rows();
  double ridge = std::max(1e-10 * std::abs(s.trace()) / static_cast<double>(d), 1e-12);
  for (int attempt = 0; attempt < 40; ++attempt, ridge *= 10.0) {
    Matrix candidate = s;
    candidate.diagonal().array() += ridge;
    if (is_positive_definite(candidate)) {
      diagnostics.push_back(fmt::format("{}: covariance singular, ridge {:.3g} added", label, ridge));
      return candidate;
    }
  }
  throw ValidationError(fmt::format("{}: covariance cannot be made positive definite", label));
}

// (1 - w) a + w b for every parameter. Probability tables, zero diagonals and
// positive definiteness are all preserved by convex combinations.
ModelParams blend(const ModelParams& a, const ModelParams& b, double w) {
  ModelParams out = a;
  out.initial = (1 - w) * a.initial + w * b.initial;
  out.transition = (1 - w) * a.transition + w * b.transition;
  out.duration = (1 - w) * a.duration + w * b.duration;
  for (std::size_t j = 0; j < a.intercept.size(); ++j) {
    out.intercept[j] = (1 - w) * a.intercept[j] + w * b.intercept[j];
    out.covariance[j] = (1 - w) * a.covariance[j] + w * b.covariance[j];
    for (std::size_t k = 0; k < a.ar[j].size(); ++k) out.ar[j][k] = (1 - w) * a.ar[j][k] + w * b.ar[j][k];
  }
  return out;
}

std::pair<Vector, Matrix> block_moments(const TimeSeries& block) {
  const Vector mean = block.colwise().mean().transpose();
  const Matrix centred = block.rowwise() - mean.transpose();
  Matrix cov = centred.transpose() * centred / static_cast<double>(block.rows());
  return {mean, 0.5 * (cov + cov.transpose())};
}

ModelParams m_step(const TimeSeries& series, const ModelSpec& spec, const PosteriorSummaries& post,
                   const ModelParams& current, const FitConfig& config, int iteration,
                   std::vector<std::string>& diagnostics) {
  ModelParams next = current;
  const double T = static_cast<double>(series.rows());

  next.initial = update_delta(post.gamma.row(0).transpose());

  auto transition = update_transition(post.transition_counts);
  next.transition = std::move(transition.value);
  for (int i : transition.fallback_rows)
    diagnostics.push_back(fmt::format("iteration {}: state {} has no outgoing transition mass; uniform row used",
                                      iteration, i + 1));

  auto duration = update_duration(post.duration_counts);
  next.duration = std::move(duration.value);
  for (int i : duration.fallback_rows)
    diagnostics.push_back(fmt::format("iteration {}: state {} has no duration mass; uniform durations used",
                                      iteration, i + 1));

  for (int j = 0; j < spec.states; ++j) {
    const Vector weights = post.gamma.col(j);
    if (weights.sum() < kDegenerateMass * T) {
      diagnostics.push_back(fmt::format(
          "iteration {}: state {} posterior mass {:.3g} below threshold; emission parameters frozen",
          iteration, j + 1, weights.sum()));
      continue;
    }
    RegressionUpdate reg = update_regression(series, weights, spec.order, config.reg.lambda_a, config.lasso);
    if (!reg.converged)
      diagnostics.push_back(fmt::format("iteration {}: coordinate descent for state {} hit the sweep limit",
                                        iteration, j + 1));
    const Matrix resid = var_residuals(series, reg.intercept, reg.ar);
    next.covariance[j] =
        ensure_factorizable(update_covariance(resid, weights, config.reg.lambda_sigma),
                            fmt::format("iteration {}: state {}", iteration, j + 1), diagnostics);
    next.intercept[j] = std::move(reg.intercept);
    next.ar[j] = std::move(reg.ar);
  }
  return next;
}

}  // namespace

void validate(const FitConfig& config) {
  validate(config.reg);
  if (config.max_iterations < 1) throw ValidationError("max_iterations must be at least 1");
  if (!(config.tolerance > 0.0)) throw ValidationError("tolerance must be positive");
}

double penalized_objective(double log_likelihood, const ModelParams& params,
                           const RegularizationConfig& reg) {
  return log_likelihood - reg.lambda_a * ar_l1_norm(params);
}

ModelParams initialize(const TimeSeries& series, const ModelSpec& spec, const FitConfig& config) {
  validate_spec(spec);
  validate(config.reg);
  const int T = static_cast<int>(series.rows());
  const int m = spec.states;
  if (series.cols() != spec.dim)
    throw ValidationError(fmt::format("series has {} columns, model dimension is {}", series.cols(), spec.dim));
  if (T < m * (spec.order + 2))
    throw ValidationError(fmt::format("series too short: T={} but initialization needs at least M(p+2)={}", T,
                                      m * (spec.order + 2)));

  struct Block {
    Vector mean;
    Matrix cov;
  };
  std::vector<Block> blocks;
  const int size = T / m;
  for (int b = 0; b < m; ++b) {
    const int start = b * size;
    const int len = b + 1 == m ? T - start : size;
    auto [mean, cov] = block_moments(series.middleRows(start, len));
    blocks.push_back({std::move(mean), std::move(cov)});
  }
  std::stable_sort(blocks.begin(), blocks.end(),
                   [](const Block& a, const Block& b) { return a.cov.trace() < b.cov.trace(); });

  ModelParams params = make_default_params(spec);
  std::vector<std::string> ignored;
  for (int i = 0; i < m; ++i) {
    params.intercept[i] = blocks[i].mean;
    params.covariance[i] = ensure_factorizable(shrink_covariance(blocks[i].cov, config.reg.lambda_sigma),
                                               fmt::format("initial block {}", i + 1), ignored);
  }

  if (config.jitter) {
    Rng rng(config.seed);
    const Vector sd = ((series.rowwise() - series.colwise().mean()).colwise().squaredNorm() /
                       static_cast<double>(T))
                          .cwiseSqrt()
                          .transpose();
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < spec.dim; ++k) params.intercept[i](k) += 1e-3 * sd(k) * rng.normal();
  }
  return params;
}

FitResult fit(const TimeSeries& series, const ModelSpec& spec, const FitConfig& config,
              const std::optional<ModelParams>& initial) {
  validate(config);
  validate_spec(spec);
  if (series.cols() != spec.dim)
    throw ValidationError(fmt::format("series has {} columns, model dimension is {}", series.cols(), spec.dim));
  if (!series.allFinite()) throw ValidationError("series contains non-finite values");

  FitResult result;
  if (initial) {
    result.params = *initial;
  } else if (config.init_policy == InitPolicy::UserSupplied) {
    throw ValidationError("user-supplied initialization requested but no initial parameters given");
  } else {
    result.params = initialize(series, spec, config);
  }
  require_valid(spec, result.params);

  struct Evaluated {
    PosteriorSummaries post;
    double objective = kNegInf<double>;
  };
  const auto evaluate = [&](const ModelParams& params) {
    Evaluated e;
    e.post = posterior_summaries(EmissionTable(series, params), params);
    e.objective = penalized_objective(e.post.log_likelihood, params, config.reg);
    return e;
  };

  Evaluated current;
  try {
    current = evaluate(result.params);
  } catch (const ValidationError& e) {
    throw FitError(fmt::format("E-step failed at iteration 0: {}", e.what()), 0);
  }
  if (!std::isfinite(current.objective))
    throw FitError("non-finite penalized log-likelihood at the initial parameters", 0);
  result.penalized_loglik_trace.push_back(current.objective);
  result.log_likelihood = current.post.log_likelihood;

  for (int iteration = 0; iteration < config.max_iterations; ++iteration) {
    ModelParams proposal;
    try {
      proposal = m_step(series, spec, current.post, result.params, config, iteration, result.diagnostics);
    } catch (const ValidationError& e) {
      throw FitError(fmt::format("M-step failed at iteration {}: {}", iteration, e.what()), iteration);
    }

    // The covariance shrinkage is an estimator rather than a maximizer of the
    // penalized objective, so an M-step can occasionally lower it. Such steps
    // are pulled back toward the current parameters until they stop doing so.
    ModelParams candidate = proposal;
    Evaluated next;
    double step = 1.0;
    for (int halving = 0; halving <= kMaxHalvings; ++halving) {
      if (halving > 0) {
        step *= 0.5;
        candidate = blend(result.params, proposal, step);
      }
      try {
        next = evaluate(candidate);
      } catch (const ValidationError&) {
        next.objective = kNegInf<double>;
      }
      if (next.objective >= current.objective) break;
    }
    if (!(next.objective >= current.objective)) {
      result.diagnostics.push_back(
          fmt::format("iteration {}: no step increases the penalized log-likelihood; stopping", iteration));
      result.converged = true;
      break;
    }
    if (step < 1.0)
      result.diagnostics.push_back(fmt::format("iteration {}: M-step shortened to {:g}", iteration, step));

    const double previous = current.objective;
    result.params = std::move(candidate);
    current = std::move(next);
    result.penalized_loglik_trace.push_back(current.objective);
    result.log_likelihood = current.post.log_likelihood;
    result.iterations = iteration + 1;
    if (std::abs(current.objective - previous) <= config.tolerance * std::max(std::abs(previous), 1.0)) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace varhsmm
