#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include "support/instances.hpp"
#include "varhsmm/errors.hpp"
#include "varhsmm/simulate.hpp"

using namespace varhsmm;

namespace {

ModelParams three_state(int D) {
  ModelParams p = make_default_params({3, 2, 1, D});
  p.initial << 0.2, 0.3, 0.5;
  p.transition << 0, 0.3, 0.7, 0.6, 0, 0.4, 0.5, 0.5, 0;
  for (int i = 0; i < 3; ++i)
    for (int n = 1; n <= D; ++n) p.duration(i, n - 1) = 1.0 + ((i + 1) * n) % 4;
  p.duration = p.duration.array().colwise() / p.duration.rowwise().sum().array();
  p.intercept[1] << 2, 2;
  p.ar[2][0] << 0.3, 0, 0, 0.3;
  return p;
}

}  // namespace

TEST_CASE("standard normal special case") {
  ModelParams p = make_default_params({1, 1, 0, 1});
  const SimulationOutput sim = simulate({1, 1, 0, 1}, p, 100000, 1);
  CHECK(std::abs(sim.series.mean()) < 0.01);
  const double var = (sim.series.array() - sim.series.mean()).square().mean();
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("structure of the simulated path") {
  const ModelParams p = three_state(6);
  const SimulationOutput sim = simulate({3, 2, 1, 6}, p, 3000, 2);
  CHECK(sim.series.rows() == 3000);
  CHECK(sim.states.size() == 3000);
  int covered = 0;
  for (std::size_t s = 0; s < sim.segments.size(); ++s) {
    const Segment& seg = sim.segments[s];
    CHECK(seg.start == covered);
    CHECK(seg.duration >= 1);
    CHECK(seg.duration <= 6);
    if (s > 0) CHECK(seg.state != sim.segments[s - 1].state);
    for (int t = seg.start; t < seg.start + seg.duration; ++t) CHECK(sim.states[t] == seg.state);
    covered += seg.duration;
  }
  CHECK(covered == 3000);
}

TEST_CASE("same seed, same draws") {
  const ModelParams p = three_state(4);
  const SimulationOutput a = simulate({3, 2, 1, 4}, p, 500, 42);
  const SimulationOutput b = simulate({3, 2, 1, 4}, p, 500, 42);
  CHECK(a.series == b.series);
  CHECK(a.states == b.states);
  CHECK_FALSE(simulate({3, 2, 1, 4}, p, 500, 43).series == a.series);
}

TEST_CASE("transition and duration frequencies") {
  const int D = 5;
  const ModelParams p = three_state(D);
  const SimulationOutput sim = simulate({3, 2, 1, D}, p, 120000, 3);
  Matrix transitions = Matrix::Zero(3, 3);
  Matrix durations = Matrix::Zero(3, D);
  for (std::size_t s = 0; s + 1 < sim.segments.size(); ++s) {
    transitions(sim.segments[s].state, sim.segments[s + 1].state) += 1;
    durations(sim.segments[s].state, sim.segments[s].duration - 1) += 1;
  }
  REQUIRE(transitions.sum() > 10000);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (p.transition(i, j) > 0)
        CHECK(transitions(i, j) / transitions.row(i).sum() == doctest::Approx(p.transition(i, j)).epsilon(0.05));

  const boost::math::chi_squared chi(D - 1);
  const double critical = boost::math::quantile(boost::math::complement(chi, 0.01));
  for (int i = 0; i < 3; ++i) {
    const double n = durations.row(i).sum();
    double stat = 0.0;
    for (int k = 0; k < D; ++k) {
      const double expected = n * p.duration(i, k);
      stat += (durations(i, k) - expected) * (durations(i, k) - expected) / expected;
    }
    CHECK(stat < critical);
  }
}

TEST_CASE("state matching") {
  const std::vector<int> truth{0, 0, 1, 1};
  CHECK(match_states(truth, truth, 2).misclassification == 0.0);
  const StateMatch swapped = match_states({1, 1, 0, 0}, truth, 2);
  CHECK(swapped.misclassification == 0.0);
  CHECK(swapped.permutation == std::vector<int>{1, 0});
  CHECK(match_states({0, 1, 1, 1}, truth, 2).misclassification == 0.25);
  CHECK_THROWS_AS(match_states({0}, {0}, 9), ValidationError);
  CHECK_THROWS_AS(match_states({0, 1}, {0}, 2), ValidationError);

  // Three labels, cyclically renamed with two errors.
  const std::vector<int> t3{0, 0, 1, 1, 2, 2, 2, 0, 1, 2};
  std::vector<int> e3;
  for (int s : t3) e3.push_back((s + 1) % 3);
  e3[0] = 0;
  e3[9] = 1;
  CHECK(match_states(e3, t3, 3).misclassification == doctest::Approx(0.2));
}

TEST_CASE("invalid simulation requests") {
  const ModelParams p = three_state(4);
  CHECK_THROWS_AS(simulate({3, 2, 1, 4}, p, 0, 1), ValidationError);
  CHECK_THROWS_AS(simulate({3, 2, 1, 5}, p, 10, 1), ValidationError);
}
