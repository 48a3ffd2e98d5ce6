#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace spose;
using Catch::Approx;

TEST_CASE("first adam step moves by about lr in the gradient's sign") {
  // With zero moments, bias correction makes the first step lr * g/|g|.
  Matrix x(1, 2);
  x << 1.0, 1.0;
  Matrix grad(1, 2);
  grad << 2.5, -0.5;
  AdamState state(1, 2);
  adam_step(x, grad, state, {});
  CHECK(state.t == 1);
  CHECK(x(0, 0) == Approx(1.0 - 0.001).margin(1e-9));
  CHECK(x(0, 1) == Approx(1.0 + 0.001).margin(1e-9));
}

TEST_CASE("projection clamps a crossing weight to zero") {
  // lr 0.0008 against a positive gradient sends 0.0005 to -0.0003, then the
  // projection lands it exactly on the boundary.
  Matrix x(1, 1);
  x << 0.0005;
  Matrix grad(1, 1);
  grad << 1.0;
  AdamState state(1, 1);
  AdamConfig cfg;
  cfg.learning_rate = 0.0008;
  adam_step(x, grad, state, cfg);
  CHECK(x(0, 0) == 0.0);
}

TEST_CASE("200 steps solve a separable quadratic under the constraint") {
  // f(w) = (w1-1)^2 + (w2+2)^2 with w >= 0 has its constrained minimum at
  // (1, 0): the w2 term always pushes negative and the projection holds it.
  Matrix w(1, 2);
  w << 1.01, 0.005;
  AdamState state(1, 2);
  AdamConfig cfg;
  cfg.learning_rate = 1e-4;
  for (int step = 0; step < 200; ++step) {
    Matrix grad(1, 2);
    grad << 2.0 * (w(0, 0) - 1.0), 2.0 * (w(0, 1) + 2.0);
    adam_step(w, grad, state, cfg);
  }
  CHECK(std::abs(w(0, 0) - 1.0) < 1e-3);
  CHECK(std::abs(w(0, 1)) < 1e-3);
}

TEST_CASE("initial weights are deterministic, small, non-negative") {
  Matrix a = make_initial_weights(6, 4, 123);
  Matrix b = make_initial_weights(6, 4, 123);
  Matrix c = make_initial_weights(6, 4, 124);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a.minCoeff() >= 0.0);
  CHECK(a.maxCoeff() < 0.1);
  CHECK_THROWS_AS(make_initial_weights(0, 4, 1), invalid_input);
  CHECK_THROWS_AS(make_initial_weights(4, 0, 1), invalid_input);
}

TEST_CASE("zero epochs is the identity") {
  Matrix x = make_initial_weights(5, 3, 9);
  Matrix before = x;
  AdamState state(5, 3);
  std::vector<TripletJudgment> js = testsup::random_judgments(5, 20, 10);
  run_epochs(x, js, 0.01, 0, 0, 100, 9, state);
  CHECK(x == before);
  CHECK(state.t == 0);
}

TEST_CASE("epoch schedule depends only on seed and absolute epoch index") {
  std::vector<TripletJudgment> js = testsup::random_judgments(8, 250, 31);
  Matrix oneshot = make_initial_weights(8, 4, 32);
  AdamState st1(8, 4);
  run_epochs(oneshot, js, 0.005, 8, 0, 64, 32, st1);

  Matrix resumed = make_initial_weights(8, 4, 32);
  AdamState st2(8, 4);
  run_epochs(resumed, js, 0.005, 5, 0, 64, 32, st2);
  run_epochs(resumed, js, 0.005, 3, 5, 64, 32, st2);

  CHECK(oneshot == resumed);
  CHECK(st1.t == st2.t);
}

TEST_CASE("run_epochs rejects bad arguments") {
  Matrix x = make_initial_weights(5, 2, 1);
  AdamState state(5, 2);
  std::vector<TripletJudgment> js = testsup::random_judgments(5, 10, 2);
  CHECK_THROWS_AS(run_epochs(x, {}, 0.01, 1, 0, 100, 1, state), invalid_input);
  CHECK_THROWS_AS(run_epochs(x, js, 0.01, -1, 0, 100, 1, state), invalid_input);
  CHECK_THROWS_AS(run_epochs(x, js, 0.01, 1, 0, 0, 1, state), invalid_input);
}

TEST_CASE("crushing penalty empties the embedding") {
  std::vector<TripletJudgment> js = testsup::random_judgments(10, 200, 41);
  Matrix x = make_initial_weights(10, 5, 42);
  AdamState state(10, 5);
  run_epochs(x, js, 10.0, 100, 0, 100, 42, state);
  CHECK(x.maxCoeff() < 1e-3);
  CHECK(x.minCoeff() >= 0.0);
}

TEST_CASE("training approaches the generator's validation likelihood") {
  // 20 concepts, 4 latent dimensions, 50k judgments (1000 distinct triples,
  // 50 repeats). The fitted model's validation log-likelihood should come
  // within 2% of the generator's own.
  GroundTruth truth = generate_ground_truth(20, 4, 0.5, 1.5, 77);
  TripletDataset data = sample_triplets(truth, 1000, 78, 50);
  auto [train, val] = split_train_validation(data, 0.9, 79);

  Matrix x = make_initial_weights(20, 8, 80);
  AdamState state(20, 8);
  run_epochs(x, train.judgments, 0.001, 60, 0, 100, 80, state);

  const double model_ll = log_likelihood(x, val.judgments);
  const double truth_ll = log_likelihood(truth.embedding.values(), val.judgments);
  CHECK(std::abs(model_ll - truth_ll) <= 0.02 * std::abs(truth_ll));
}
