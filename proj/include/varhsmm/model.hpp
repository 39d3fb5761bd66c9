#ifndef VARHSMM_MODEL_HPP
#define VARHSMM_MODEL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace varhsmm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// T x d observations; row t is the observation at time t.
using TimeSeries = Eigen::MatrixXd;

/// Structural dimensions of a VAR(p)-HSMM.
struct ModelSpec {
  int states = 1;        // M
  int dim = 1;           // d
  int order = 0;         // p
  int max_duration = 1;  // D

  bool operator==(const ModelSpec&) const = default;
};

/// Full parameter set of a VAR(p)-HSMM.
///
/// Duration densities are dense M x D tables: duration(i, n - 1) is the
/// probability that state i lasts exactly n steps. Autoregression matrices are
/// indexed ar[state][lag - 1].
struct ModelParams {
  Vector initial;                        // delta, length M
  Matrix transition;                     // Q, M x M, zero diagonal
  Matrix duration;                       // r, M x D
  std::vector<Vector> intercept;         // mu_i, length d
  std::vector<Matrix> covariance;        // Sigma_i, d x d
  std::vector<std::vector<Matrix>> ar;   // A_{k,i}, d x d

  int states() const { return static_cast<int>(initial.size()); }
};

/// Builds a parameter set with the right shapes for `spec`: uniform initial
/// and duration distributions, uniform off-diagonal transitions, zero means,
/// identity covariances and zero autoregression.
ModelParams make_default_params(const ModelSpec& spec);

/// Recovers the structural dimensions implied by the shapes of `params`.
/// The autoregression order comes from ar[0].size().
ModelSpec spec_of(const ModelParams& params);

/// Every invariant violation of `params` against `spec`. Empty iff valid.
std::vector<std::string> validate_params(const ModelSpec& spec, const ModelParams& params);

/// Throws ValidationError listing every violation when the report is non-empty.
void require_valid(const ModelSpec& spec, const ModelParams& params);

void validate_spec(const ModelSpec& spec);

/// Number of free parameters:
/// (M-1) + M(D-1) + M max(M-2, 0) + M d + M d(d+1)/2 + M p d^2.
std::int64_t count_free_parameters(const ModelSpec& spec);

/// True iff the directed graph with an edge i -> j whenever Q(i, j) > 0 is
/// strongly connected.
bool check_irreducibility(const Matrix& transition);

/// Relabels states: state `perm[i]` of the result is state `i` of `params`.
ModelParams permute_states(const ModelParams& params, std::span<const int> perm);

/// Sum of absolute values of every autoregression coefficient.
double ar_l1_norm(const ModelParams& params);

}  // namespace varhsmm

#endif  // VARHSMM_MODEL_HPP
