#include "varhsmm/model.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "varhsmm/errors.hpp"

namespace varhsmm {

namespace {

constexpr double kProbTol = 1e-10;
constexpr double kSymTol = 1e-12;

void check_probability_vector(const Eigen::Ref<const Vector>& v, const std::string& name,
                              std::vector<std::string>& out) {
  if (!v.allFinite()) {
    out.push_back(fmt::format("{} has non-finite entries", name));
    return;
  }
  if ((v.array() < 0.0).any()) out.push_back(fmt::format("{} has negative entries", name));
  if (std::abs(v.sum() - 1.0) > kProbTol)
    out.push_back(fmt::format("{} sums to {} instead of 1", name, v.sum()));
}

std::vector<bool> reachable_from(const Matrix& adjacency, int root, bool reverse) {
  const int m = static_cast<int>(adjacency.rows());
  std::vector<bool> seen(m, false);
  std::vector<int> stack{root};
  seen[root] = true;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (int j = 0; j < m; ++j) {
      const double w = reverse ? adjacency(j, i) : adjacency(i, j);
      if (w > 0.0 && !seen[j]) {
        seen[j] = true;
        stack.push_back(j);
      }
    }
  }
  return seen;
}

}  // namespace

ModelParams make_default_params(const ModelSpec& spec) {
  validate_spec(spec);
  const int m = spec.states;
  const int d = spec.dim;
  ModelParams p;
  p.initial = Vector::Constant(m, 1.0 / m);
  p.transition = Matrix::Zero(m, m);
  if (m > 1) {
    p.transition.setConstant(1.0 / (m - 1));
    p.transition.diagonal().setZero();
  }
  p.duration = Matrix::Constant(m, spec.max_duration, 1.0 / spec.max_duration);
  p.intercept.assign(m, Vector::Zero(d));
  p.covariance.assign(m, Matrix::Identity(d, d));
  p.ar.assign(m, std::vector<Matrix>(spec.order, Matrix::Zero(d, d)));
  return p;
}

ModelSpec spec_of(const ModelParams& params) {
  ModelSpec spec;
  spec.states = params.states();
  spec.dim = params.intercept.empty() ? 0 : static_cast<int>(params.intercept.front().size());
  spec.order = params.ar.empty() ? 0 : static_cast<int>(params.ar.front().size());
  spec.max_duration = static_cast<int>(params.duration.cols());
  return spec;
}

void validate_spec(const ModelSpec& spec) {
  if (spec.states < 1 || spec.dim < 1 || spec.order < 0 || spec.max_duration < 1) {
    throw ValidationError(fmt::format("invalid model spec: M={} d={} p={} D={}", spec.states,
                                      spec.dim, spec.order, spec.max_duration));
  }
}

std::vector<std::string> validate_params(const ModelSpec& spec, const ModelParams& params) {
  std::vector<std::string> out;
  if (spec.states < 1 || spec.dim < 1 || spec.order < 0 || spec.max_duration < 1) {
    out.push_back("spec dimensions out of range");
    return out;
  }
  const int m = spec.states;
  const int d = spec.dim;

  if (params.initial.size() != m) {
    out.push_back(fmt::format("delta has length {}, expected {}", params.initial.size(), m));
  } else {
    check_probability_vector(params.initial, "delta", out);
  }

  if (params.transition.rows() != m || params.transition.cols() != m) {
    out.push_back(fmt::format("Q is {}x{}, expected {}x{}", params.transition.rows(),
                              params.transition.cols(), m, m));
  } else {
    for (int i = 0; i < m; ++i) {
      if (params.transition(i, i) != 0.0)
        out.push_back(fmt::format("nonzero diagonal at state {}", i + 1));
      // A single state has no outgoing transitions at all.
      if (m > 1) {
        check_probability_vector(params.transition.row(i).transpose(),
                                 fmt::format("Q row {}", i + 1), out);
      }
    }
  }

  if (params.duration.rows() != m || params.duration.cols() != spec.max_duration) {
    out.push_back(fmt::format("r is {}x{}, expected {}x{}", params.duration.rows(),
                              params.duration.cols(), m, spec.max_duration));
  } else {
    for (int i = 0; i < m; ++i) {
      check_probability_vector(params.duration.row(i).transpose(),
                               fmt::format("r row {}", i + 1), out);
    }
  }

  if (static_cast<int>(params.intercept.size()) != m) {
    out.push_back(fmt::format("mu has {} states, expected {}", params.intercept.size(), m));
  } else {
    for (int i = 0; i < m; ++i) {
      if (params.intercept[i].size() != d)
        out.push_back(fmt::format("mu[{}] has length {}, expected {}", i + 1,
                                  params.intercept[i].size(), d));
      else if (!params.intercept[i].allFinite())
        out.push_back(fmt::format("mu[{}] has non-finite entries", i + 1));
    }
  }

  if (static_cast<int>(params.covariance.size()) != m) {
    out.push_back(fmt::format("Sigma has {} states, expected {}", params.covariance.size(), m));
  } else {
    for (int i = 0; i < m; ++i) {
      const Matrix& s = params.covariance[i];
      if (s.rows() != d || s.cols() != d) {
        out.push_back(fmt::format("Sigma[{}] is {}x{}, expected {}x{}", i + 1, s.rows(),
                                  s.cols(), d, d));
        continue;
      }
      if (!s.allFinite()) {
        out.push_back(fmt::format("Sigma[{}] has non-finite entries", i + 1));
        continue;
      }
      if ((s - s.transpose()).cwiseAbs().maxCoeff() > kSymTol)
        out.push_back(fmt::format("Sigma[{}] not symmetric", i + 1));
      Eigen::LLT<Matrix> llt(s);
      if (llt.info() != Eigen::Success)
        out.push_back(fmt::format("Sigma[{}] not positive definite", i + 1));
    }
  }

  if (static_cast<int>(params.ar.size()) != m) {
    out.push_back(fmt::format("A has {} states, expected {}", params.ar.size(), m));
  } else {
    for (int i = 0; i < m; ++i) {
      if (static_cast<int>(params.ar[i].size()) != spec.order) {
        out.push_back(fmt::format("A[{}] has {} lags, expected {}", i + 1, params.ar[i].size(),
                                  spec.order));
        continue;
      }
      for (int k = 0; k < spec.order; ++k) {
        const Matrix& a = params.ar[i][k];
        if (a.rows() != d || a.cols() != d)
          out.push_back(fmt::format("A[{}][{}] is {}x{}, expected {}x{}", i + 1, k + 1,
                                    a.rows(), a.cols(), d, d));
        else if (!a.allFinite())
          out.push_back(fmt::format("A[{}][{}] has non-finite entries", i + 1, k + 1));
      }
    }
  }
  return out;
}

void require_valid(const ModelSpec& spec, const ModelParams& params) {
  const auto violations = validate_params(spec, params);
  if (violations.empty()) return;
  std::string msg = "invalid model parameters:";
  for (const auto& v : violations) msg += "\n  " + v;
  throw ValidationError(msg);
}

std::int64_t count_free_parameters(const ModelSpec& spec) {
  validate_spec(spec);
  const std::int64_t m = spec.states;
  const std::int64_t d = spec.dim;
  const std::int64_t p = spec.order;
  const std::int64_t dmax = spec.max_duration;
  return (m - 1) + m * (dmax - 1) + m * std::max<std::int64_t>(m - 2, 0) + m * d +
         m * d * (d + 1) / 2 + m * p * d * d;
}

bool check_irreducibility(const Matrix& transition) {
  if (transition.rows() != transition.cols() || transition.rows() == 0) return false;
  const auto forward = reachable_from(transition, 0, false);
  const auto backward = reachable_from(transition, 0, true);
  return std::all_of(forward.begin(), forward.end(), [](bool b) { return b; }) &&
         std::all_of(backward.begin(), backward.end(), [](bool b) { return b; });
}

ModelParams permute_states(const ModelParams& params, std::span<const int> perm) {
  const int m = params.states();
  if (static_cast<int>(perm.size()) != m)
    throw ValidationError("permutation length does not match the number of states");
  std::vector<int> check(perm.begin(), perm.end());
  std::sort(check.begin(), check.end());
  for (int i = 0; i < m; ++i)
    if (check[i] != i) throw ValidationError("not a permutation of the state labels");

  ModelParams out = params;
  for (int i = 0; i < m; ++i) {
    const int pi = perm[i];
    out.initial(pi) = params.initial(i);
    out.duration.row(pi) = params.duration.row(i);
    out.intercept[pi] = params.intercept[i];
    out.covariance[pi] = params.covariance[i];
    out.ar[pi] = params.ar[i];
    for (int j = 0; j < m; ++j) out.transition(pi, perm[j]) = params.transition(i, j);
  }
  return out;
}

double ar_l1_norm(const ModelParams& params) {
  double total = 0.0;
  for (const auto& lags : params.ar)
    for (const auto& a : lags) total += a.cwiseAbs().sum();
  return total;
}

}  // namespace varhsmm
