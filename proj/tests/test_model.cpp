#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace spose;
using Catch::Approx;

TEST_CASE("softmax3 on pinned inputs") {
  TripletProbabilities thirds = softmax3(0.0, 0.0, 0.0);
  CHECK(thirds[0] == Approx(1.0 / 3.0).margin(1e-15));
  CHECK(thirds[1] == Approx(1.0 / 3.0).margin(1e-15));
  CHECK(thirds[2] == Approx(1.0 / 3.0).margin(1e-15));

  TripletProbabilities half = softmax3(std::log(2.0), 0.0, 0.0);
  CHECK(half[0] == Approx(0.5).margin(1e-14));
  CHECK(half[1] == Approx(0.25).margin(1e-14));
  CHECK(half[2] == Approx(0.25).margin(1e-14));
}

TEST_CASE("softmax3 survives large scores via max subtraction") {
  TripletProbabilities p = softmax3(1000.0, 0.0, 0.0);
  CHECK(std::isfinite(p[0]));
  CHECK(p[0] == Approx(1.0).margin(1e-12));
  CHECK(p[1] >= 0.0);
  CHECK(p[2] >= 0.0);

  TripletProbabilities q = softmax3(-1000.0, -1000.0, -1000.0);
  CHECK(q[0] == Approx(1.0 / 3.0).margin(1e-15));

  CHECK_THROWS_AS(softmax3(std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0), numeric_error);
}

TEST_CASE("softmax3 normalizes, shifts, and orders like the oracle") {
  Rng rng(derive_seed(100, streams::kChoices));
  for (int trial = 0; trial < 200; ++trial) {
    const double s12 = 20.0 * rng.next_unit() - 10.0;
    const double s13 = 20.0 * rng.next_unit() - 10.0;
    const double s23 = 20.0 * rng.next_unit() - 10.0;
    TripletProbabilities p = softmax3(s12, s13, s23);
    CHECK(std::abs(p[0] + p[1] + p[2] - 1.0) <= 1e-12);

    // Shift invariance.
    const double c = 100.0 * rng.next_unit() - 50.0;
    TripletProbabilities shifted = softmax3(s12 + c, s13 + c, s23 + c);
    for (int k = 0; k < 3; ++k) CHECK(shifted[k] == Approx(p[k]).margin(1e-12));

    // Agreement with the extended-precision oracle.
    auto exact = testsup::oracle::softmax3(s12, s13, s23);
    for (int k = 0; k < 3; ++k) {
      CHECK(p[k] == Approx(static_cast<double>(exact[static_cast<std::size_t>(k)])).margin(1e-13));
    }
  }
}

TEST_CASE("raising one similarity raises its probability") {
  double prev = softmax3(-3.0, 0.4, -0.2)[0];
  for (double s12 = -2.5; s12 < 3.0; s12 += 0.5) {
    const double cur = softmax3(s12, 0.4, -0.2)[0];
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("zero embedding gives chance log-likelihood") {
  Matrix x = Matrix::Zero(5, 3);
  std::vector<TripletJudgment> js = testsup::random_judgments(5, 60, 17);
  CHECK(log_likelihood(x, js) ==
        Approx(60.0 * std::log(1.0 / 3.0)).epsilon(1e-12));
  CHECK(mean_cross_entropy(x, js) == Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("likelihood and objective match the extended-precision oracle") {
  Matrix x = testsup::random_matrix(8, 4, 0.0, 2.0, 3);
  std::vector<TripletJudgment> js = testsup::random_judgments(8, 120, 4);
  const double lambda = 0.013;

  CHECK(log_likelihood(x, js) ==
        Approx(static_cast<double>(testsup::oracle::log_likelihood(x, js))).epsilon(1e-12));
  CHECK(penalized_objective(x, js, lambda) ==
        Approx(static_cast<double>(testsup::oracle::objective(x, js, lambda))).epsilon(1e-12));
  CHECK(mean_cross_entropy(x, js) ==
        Approx(-static_cast<double>(testsup::oracle::log_likelihood(x, js)) / 120.0)
            .epsilon(1e-12));
  CHECK_THROWS_AS(mean_cross_entropy(x, {}), invalid_input);
}

TEST_CASE("analytic gradient matches central finite differences") {
  // Entries bounded away from zero so the L1 term is differentiable at x.
  Matrix x = testsup::random_matrix(6, 3, 0.01, 2.0, 5);
  std::vector<TripletJudgment> js = testsup::random_judgments(6, 40, 6);
  const double lambda = 0.01;

  Matrix g = batch_gradient(x, js, lambda);
  Matrix fd = testsup::oracle::fd_gradient(x, js, lambda, 1e-5);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index f = 0; f < x.cols(); ++f) {
      const double rel =
          std::abs(g(i, f) - fd(i, f)) / std::max(std::abs(fd(i, f)), 1e-3);
      CHECK(rel < 1e-4);
    }
  }
}

TEST_CASE("batch gradient adds lambda once per call and sums over judgments") {
  Matrix x = testsup::random_matrix(7, 3, 0.0, 1.5, 8);
  std::vector<TripletJudgment> js = testsup::random_judgments(7, 30, 9);
  const double lambda = 0.21;

  std::vector<TripletJudgment> first(js.begin(), js.begin() + 12);
  std::vector<TripletJudgment> rest(js.begin() + 12, js.end());
  Matrix whole = batch_gradient(x, js, lambda);
  Matrix sum = batch_gradient(x, first, lambda) + batch_gradient(x, rest, lambda) -
               Matrix::Constant(x.rows(), x.cols(), lambda);
  CHECK((whole - sum).cwiseAbs().maxCoeff() < 1e-12);

  // Empty batch leaves only the penalty term.
  Matrix empty = batch_gradient(x, {}, lambda);
  CHECK((empty.array() == lambda).all());
}

TEST_CASE("triplet probabilities index pairs in PairChoice order") {
  Matrix x(3, 2);
  x << 2.0, 0.0, 2.0, 0.0, 0.0, 1.0;
  // s12 = 4, s13 = 0, s23 = 0: the identical pair dominates.
  TripletProbabilities p = triplet_probabilities(x, 0, 1, 2);
  CHECK(p[PairChoice::kFirstSecond] > 0.9);
  CHECK(p[PairChoice::kFirstThird] == Approx(p[PairChoice::kSecondThird]).epsilon(1e-12));

  TripletJudgment j{0, 1, 2, PairChoice::kFirstSecond};
  TripletProbabilities q = triplet_probabilities(x, j);
  for (int k = 0; k < 3; ++k) CHECK(q[k] == p[k]);
}
