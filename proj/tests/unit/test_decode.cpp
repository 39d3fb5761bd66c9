#include <doctest.h>

#include "oracle/segmentation_oracle.hpp"
#include "support/instances.hpp"
#include "varhsmm/decode.hpp"
#include "varhsmm/inference.hpp"
#include "varhsmm/simulate.hpp"

using namespace varhsmm;

namespace {

// Textbook scaled HMM filter: predictive P(S_{t} | y_{0..t-1}) for t = 0..T.
Matrix hmm_predictive(const ModelParams& p, const TimeSeries& y) {
  const int m = p.states();
  const int T = static_cast<int>(y.rows());
  Matrix out(T + 1, m);
  Eigen::RowVectorXd pred = p.initial.transpose();
  out.row(0) = pred;
  for (int t = 0; t < T; ++t) {
    Eigen::RowVectorXd filt(m);
    for (int j = 0; j < m; ++j)
      filt(j) = pred(j) * std::exp(oracle::explicit_log_density(y.row(t).transpose(),
                                                                oracle::explicit_mean(p, j, y, t), p.covariance[j]));
    filt /= filt.sum();
    pred = filt * p.transition;
    out.row(t + 1) = pred;
  }
  return out;
}

}  // namespace

TEST_CASE("one state decodes to a single segment") {
  Rng rng(1);
  const ModelSpec spec{1, 2, 1, 4};
  const ModelParams p = testing_support::random_params(spec, rng);
  const TimeSeries y = testing_support::random_series(rng, 30, 2);
  const DecodedPath path = viterbi_decode(y, p, spec);
  CHECK(path.segments.size() == 1);
  CHECK(std::all_of(path.states.begin(), path.states.end(), [](int s) { return s == 0; }));
  CHECK(path.path_log_score == doctest::Approx(forward(y, p, spec).log_likelihood));
  CHECK(filtered_state_probabilities(y, p, spec)(0) == doctest::Approx(1.0));
}

TEST_CASE("hand case M=2, T=5, D=2 matches the argmax") {
  ModelParams p = make_default_params({2, 1, 0, 2});
  p.initial << 0.5, 0.5;
  p.transition << 0, 1, 1, 0;
  p.duration << 0.4, 0.6, 0.7, 0.3;
  p.intercept[1](0) = 3.0;
  TimeSeries y(5, 1);
  y << 0.2, 2.8, 3.1, -0.4, 0.1;
  const auto ref = oracle::reference(p, y);
  const DecodedPath path = viterbi_decode(y, p, {2, 1, 0, 2});
  REQUIRE(path.segments.size() == ref.map_path.size());
  for (std::size_t s = 0; s < path.segments.size(); ++s) {
    CHECK(path.segments[s].state == ref.map_path[s].state);
    CHECK(path.segments[s].duration == ref.map_path[s].duration);
  }
  CHECK(path.path_log_score == doctest::Approx(ref.map_log_weight).epsilon(1e-12));
}

TEST_CASE("Viterbi agrees with the enumeration on random instances") {
  Rng rng(2);
  for (int rep = 0; rep < 50; ++rep) {
    const ModelSpec spec{2 + static_cast<int>(rng.next_u64() % 2), 1 + static_cast<int>(rng.next_u64() % 2),
                         static_cast<int>(rng.next_u64() % 2), 2 + static_cast<int>(rng.next_u64() % 2)};
    const ModelParams p = testing_support::random_params(spec, rng);
    const TimeSeries y = testing_support::random_series(rng, 4 + static_cast<int>(rng.next_u64() % 5), spec.dim);
    const auto ref = oracle::reference(p, y);
    const DecodedPath path = viterbi_decode(y, p, spec);
    CAPTURE(rep);
    REQUIRE(path.segments.size() == ref.map_path.size());
    for (std::size_t s = 0; s < path.segments.size(); ++s) {
      CHECK(path.segments[s].state == ref.map_path[s].state);
      CHECK(path.segments[s].start == ref.map_path[s].start);
      CHECK(path.segments[s].duration == ref.map_path[s].duration);
    }
    CHECK(path.path_log_score <= ref.log_likelihood + 1e-12);
    for (std::size_t s = 1; s < path.segments.size(); ++s)
      CHECK(path.segments[s].state != path.segments[s - 1].state);
  }
}

TEST_CASE("ties go to the lower state, then the shorter duration") {
  ModelParams p = make_default_params({2, 1, 0, 2});
  p.transition << 0, 1, 1, 0;
  const TimeSeries y = TimeSeries::Zero(2, 1);
  const DecodedPath path = viterbi_decode(y, p, {2, 1, 0, 2});
  // Every path has the same score; the lower-state, shorter-duration choice
  // is made at each backtracking step from the end.
  CHECK(path.segments.back().state == 0);
  CHECK(path.segments.back().duration == 1);
}

TEST_CASE("well separated states decode accurately") {
  ModelParams p = make_default_params({2, 1, 0, 10});
  p.initial << 0.5, 0.5;
  p.transition << 0, 1, 1, 0;
  p.duration.setConstant(0.1);
  p.intercept[1](0) = 10.0;
  const SimulationOutput sim = simulate({2, 1, 0, 10}, p, 500, 3);
  const DecodedPath path = viterbi_decode(sim.series, p, {2, 1, 0, 10});
  CHECK(match_states(path.states, sim.states, 2).misclassification <= 0.05);
}

TEST_CASE("D=1 reduces to the HMM predictive filter") {
  Rng rng(4);
  for (int m : {2, 3}) {
    const ModelSpec spec{m, 2, 1, 1};
    const ModelParams p = testing_support::random_params(spec, rng);
    const TimeSeries y = testing_support::random_series(rng, 25, 2);
    CHECK((predictive_state_probabilities(y, p, spec) - hmm_predictive(p, y)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("predictive probabilities are distributions") {
  Rng rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    const ModelSpec spec{2 + static_cast<int>(rng.next_u64() % 3), 2, 1, 1 + static_cast<int>(rng.next_u64() % 6)};
    const ModelParams p = testing_support::random_params(spec, rng);
    const TimeSeries y = testing_support::random_series(rng, 12, 2);
    const Vector f = filtered_state_probabilities(y, p, spec);
    CHECK(f.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.minCoeff() >= 0.0);
  }
}

TEST_CASE("forecast arithmetic") {
  ModelParams p = make_default_params({1, 2, 0, 1});
  p.intercept[0] << 1.5, -2.0;
  const TimeSeries y = TimeSeries::Random(10, 2);
  CHECK((forecast_one_step(y, p, {1, 2, 0, 1}) - p.intercept[0]).norm() < 1e-15);

  // Two states with identical emissions: the state probabilities do not matter.
  Rng rng(6);
  ModelParams q = testing_support::random_params({2, 2, 1, 3}, rng);
  q.intercept[1] = q.intercept[0];
  q.ar[1] = q.ar[0];
  q.covariance[1] = q.covariance[0];
  const TimeSeries z = testing_support::random_series(rng, 8, 2);
  CHECK((forecast_one_step(z, q, {2, 2, 1, 3}) - (q.intercept[0] + q.ar[0][0] * z.row(7).transpose())).norm() <
        1e-12);

  // Scalar hand case: weights from the filter, means by hand.
  ModelParams h = make_default_params({2, 1, 1, 2});
  h.transition << 0, 1, 1, 0;
  h.intercept[0](0) = 0.0;
  h.intercept[1](0) = 1.0;
  h.ar[0][0](0, 0) = 0.5;
  h.ar[1][0](0, 0) = -0.5;
  TimeSeries w(3, 1);
  w << 0.3, -0.2, 0.8;
  const Vector probs = filtered_state_probabilities(w, h, {2, 1, 1, 2});
  const double hand = probs(0) * (0.5 * 0.8) + probs(1) * (1.0 - 0.5 * 0.8);
  CHECK(forecast_one_step(w, h, {2, 1, 1, 2})(0) == doctest::Approx(hand).epsilon(1e-14));
}

TEST_CASE("forecasts scale with the data") {
  Rng rng(7);
  const ModelSpec spec{2, 2, 1, 3};
  const ModelParams p = testing_support::random_params(spec, rng);
  const TimeSeries y = testing_support::random_series(rng, 15, 2);
  const double c = 3.0;
  ModelParams scaled = p;
  for (int j = 0; j < 2; ++j) {
    scaled.intercept[j] *= c;
    scaled.covariance[j] *= c * c;
  }
  const TimeSeries yc = c * y;
  CHECK((forecast_one_step(yc, scaled, spec) - c * forecast_one_step(y, p, spec)).norm() < 1e-10);
}

TEST_CASE("rolling forecasts agree with prefix forecasts") {
  Rng rng(8);
  const ModelSpec spec{2, 2, 1, 3};
  const ModelParams p = testing_support::random_params(spec, rng);
  const TimeSeries y = testing_support::random_series(rng, 20, 2);
  const Matrix rolled = rolling_forecasts(y, p, spec, 15, 21);
  CHECK(rolled.rows() == 6);
  for (int t = 15; t <= 20; ++t)
    CHECK((rolled.row(t - 15).transpose() - forecast_one_step(y.topRows(t), p, spec)).norm() < 1e-12);
  CHECK(rolling_forecasts(y, p, spec, 5, 5).rows() == 0);
  CHECK_THROWS_AS(rolling_forecasts(y, p, spec, 0, 5), ValidationError);
  CHECK_THROWS_AS(rolling_forecasts(y, p, spec, 5, 22), ValidationError);
}

TEST_CASE("msfe") {
  const Matrix a = Matrix::Random(4, 3);
  CHECK(msfe(a, a) == 0.0);
  CHECK(msfe(Matrix{{1, 2}}, Matrix{{0, 0}}) == 5.0);
  CHECK(msfe(Matrix{{1, 0}, {0, 2}}, Matrix::Zero(2, 2)) == 2.5);
  CHECK_THROWS_AS(msfe(Matrix(0, 2), Matrix(0, 2)), ValidationError);
  CHECK_THROWS_AS(msfe(Matrix::Zero(2, 2), Matrix::Zero(3, 2)), ValidationError);
}
