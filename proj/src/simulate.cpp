#include "varhsmm/simulate.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>

#include "varhsmm/errors.hpp"
#include "varhsmm/gaussian.hpp"

namespace varhsmm {

SimulationOutput simulate(const ModelSpec& spec, const ModelParams& params, int T, std::uint64_t seed) {
  require_valid(spec, params);
  if (T < 1) throw ValidationError("simulation length must be positive");

  const int d = spec.dim;
  std::vector<Matrix> factors;
  for (const auto& cov : params.covariance) factors.push_back(CholeskyFactor(cov).lower());

  Rng rng(seed);
  SimulationOutput out;
  out.series.resize(T, d);
  out.states.reserve(T);

  int state = rng.categorical(params.initial);
  int t = 0;
  Vector noise(d);
  while (t < T) {
    const int duration = 1 + rng.categorical(params.duration.row(state));
    const int len = std::min(duration, T - t);
    out.segments.push_back({state, t, len});
    for (int s = 0; s < len; ++s, ++t) {
      Vector y = params.intercept[state];
      for (int k = 1; k <= spec.order && t - k >= 0; ++k)
        y.noalias() += params.ar[state][k - 1] * out.series.row(t - k).transpose();
      for (int c = 0; c < d; ++c) noise(c) = rng.normal();
      y.noalias() += factors[state] * noise;
      out.series.row(t) = y.transpose();
      out.states.push_back(state);
    }
    if (spec.states > 1) state = rng.categorical(params.transition.row(state));
  }
  return out;
}

StateMatch match_states(const std::vector<int>& estimated, const std::vector<int>& truth, int states) {
  if (estimated.size() != truth.size()) throw ValidationError("state sequences differ in length");
  if (states < 1) throw ValidationError("number of states must be positive");
  if (states > 8) throw ValidationError("state matching is limited to M <= 8");
  for (std::size_t t = 0; t < estimated.size(); ++t) {
    if (estimated[t] < 0 || estimated[t] >= states || truth[t] < 0 || truth[t] >= states)
      throw ValidationError(fmt::format("state label out of range at position {}", t));
  }

  // confusion(e, s) counts rows with estimated label e and true label s.
  Eigen::MatrixXi confusion = Eigen::MatrixXi::Zero(states, states);
  for (std::size_t t = 0; t < estimated.size(); ++t) ++confusion(estimated[t], truth[t]);

  std::vector<int> perm(states);
  std::iota(perm.begin(), perm.end(), 0);
  StateMatch best{perm, 1.0};
  int best_hits = -1;
  do {
    int hits = 0;
    for (int e = 0; e < states; ++e) hits += confusion(e, perm[e]);
    if (hits > best_hits) {
      best_hits = hits;
      best.permutation = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  const auto n = static_cast<double>(estimated.size());
  best.misclassification = n > 0 ? 1.0 - best_hits / n : 0.0;
  return best;
}

}  // namespace varhsmm
