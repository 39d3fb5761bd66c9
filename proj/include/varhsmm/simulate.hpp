#ifndef VARHSMM_SIMULATE_HPP
#define VARHSMM_SIMULATE_HPP

#include <cstdint>
#include <vector>

#include "varhsmm/decode.hpp"
#include "varhsmm/model.hpp"
#include "varhsmm/random.hpp"

namespace varhsmm {

struct SimulationOutput {
  TimeSeries series;
  std::vector<int> states;        // 0-based generating state per row
  std::vector<Segment> segments;  // the last one is truncated at T
};

/// Draws T observations from the generative process: S_1 ~ delta, duration
/// ~ r_{S_1}, that many VAR(p) emissions, a jump through Q (never to the same
/// state), repeat. Pre-sample lags are zero vectors. Bit-identical for equal
/// seeds.
SimulationOutput simulate(const ModelSpec& spec, const ModelParams& params, int T, std::uint64_t seed);

struct StateMatch {
  std::vector<int> permutation;  // estimated label e is truth label permutation[e]
  double misclassification = 0.0;
};

/// Exhaustive search over the M! relabelings of `estimated` for the one that
/// disagrees with `truth` at the fewest rows. M > 8 is rejected.
StateMatch match_states(const std::vector<int>& estimated, const std::vector<int>& truth, int states);

}  // namespace varhsmm

#endif  // VARHSMM_SIMULATE_HPP
