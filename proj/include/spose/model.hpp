/// @file  model.hpp
/// @brief SPoSE choice model: dot-product similarity, softmax over the three
///        pairs of a triplet, penalized log-likelihood, and its gradient.
///
/// A judgment asks which pair of (i1,i2,i3) is most similar, i.e. which item
/// is the odd one out. The model scores pair (a,b) by <x_a, x_b> and chooses
/// among the three pairs with softmax probabilities.

#pragma once

#include "spose/types.hpp"

#include <array>
#include <cmath>

namespace spose {

/// Dot-product similarity between two concept rows.
inline double similarity(const Matrix& x, int a, int b) {
  return x.row(a).dot(x.row(b));
}

/// Softmax over the three pair similarities of one triplet.
/// Index order matches PairChoice: [ (i1,i2), (i1,i3), (i2,i3) ].
struct TripletProbabilities {
  std::array<double, 3> p;

  double operator[](PairChoice c) const { return p[static_cast<int>(c)]; }
  double operator[](int c) const { return p[static_cast<std::size_t>(c)]; }
};

/// Numerically safe softmax of three raw similarity scores.
inline TripletProbabilities softmax3(double s12, double s13, double s23) {
  const double m = std::max(s12, std::max(s13, s23));
  const double e12 = std::exp(s12 - m);
  const double e13 = std::exp(s13 - m);
  const double e23 = std::exp(s23 - m);
  const double z = e12 + e13 + e23;
  if (!std::isfinite(z) || z <= 0.0) {
    throw numeric_error("softmax normalizer is not finite and positive");
  }
  return TripletProbabilities{{e12 / z, e13 / z, e23 / z}};
}

/// Choice probabilities for a triplet under embedding x.
inline TripletProbabilities triplet_probabilities(const Matrix& x, int i1, int i2, int i3) {
  return softmax3(similarity(x, i1, i2), similarity(x, i1, i3), similarity(x, i2, i3));
}

inline TripletProbabilities triplet_probabilities(const Matrix& x, const TripletJudgment& j) {
  return triplet_probabilities(x, j.i1, j.i2, j.i3);
}

/// Sum of log choice probabilities over a set of judgments.
inline double log_likelihood(const Matrix& x, const std::vector<TripletJudgment>& judgments) {
  double ll = 0.0;
  for (const TripletJudgment& j : judgments) {
    ll += std::log(triplet_probabilities(x, j)[j.choice]);
  }
  return ll;
}

/// Training objective: negative log-likelihood plus lambda times the entrywise
/// L1 norm of the embedding. Entries are non-negative during training, but the
/// absolute value keeps the objective meaningful for arbitrary inputs.
inline double penalized_objective(const Matrix& x, const std::vector<TripletJudgment>& judgments,
                                  double lambda) {
  return -log_likelihood(x, judgments) + lambda * x.array().abs().sum();
}

/// Mean cross-entropy (mean negative log probability) of the observed choices.
inline double mean_cross_entropy(const Matrix& x, const std::vector<TripletJudgment>& judgments) {
  if (judgments.empty()) throw invalid_input("cross-entropy of an empty judgment set");
  return -log_likelihood(x, judgments) / static_cast<double>(judgments.size());
}

/// Adds the gradient of -log p(choice) for one judgment into grad.
/// With e_ab = p_ab - 1[chosen pair is (a,b)], each pair (a,b) contributes
/// e_ab * x_b to row a and e_ab * x_a to row b.
inline void add_nll_gradient(const Matrix& x, const TripletJudgment& j, Matrix& grad) {
  const TripletProbabilities p = triplet_probabilities(x, j);
  const double e12 = p[0] - (j.choice == PairChoice::kFirstSecond ? 1.0 : 0.0);
  const double e13 = p[1] - (j.choice == PairChoice::kFirstThird ? 1.0 : 0.0);
  const double e23 = p[2] - (j.choice == PairChoice::kSecondThird ? 1.0 : 0.0);
  grad.row(j.i1) += e12 * x.row(j.i2) + e13 * x.row(j.i3);
  grad.row(j.i2) += e12 * x.row(j.i1) + e23 * x.row(j.i3);
  grad.row(j.i3) += e13 * x.row(j.i1) + e23 * x.row(j.i2);
}

/// Gradient of the penalized objective summed over a batch of judgments.
/// The L1 term contributes +lambda to every entry; under the non-negativity
/// constraint the penalty always pushes entries toward zero.
inline Matrix batch_gradient(const Matrix& x, const std::vector<TripletJudgment>& judgments,
                             double lambda) {
  Matrix grad = Matrix::Constant(x.rows(), x.cols(), lambda);
  for (const TripletJudgment& j : judgments) {
    add_nll_gradient(x, j, grad);
  }
  return grad;
}

}  // namespace spose
