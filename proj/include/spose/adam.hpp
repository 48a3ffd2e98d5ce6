/// @file  adam.hpp
/// @brief Projected Adam: standard Adam updates followed by clamping every
///        entry to the non-negative orthant.

#pragma once

#include "spose/model.hpp"
#include "spose/rng.hpp"
#include "spose/types.hpp"

#include <cmath>

namespace spose {

/// First and second moment estimates plus the step counter.
struct AdamState {
  Matrix m;
  Matrix v;
  long long t = 0;

  AdamState(Eigen::Index rows, Eigen::Index cols)
      : m(Matrix::Zero(rows, cols)), v(Matrix::Zero(rows, cols)) {}
};

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// One Adam step with bias correction, then projection onto x >= 0.
inline void adam_step(Matrix& x, const Matrix& grad, AdamState& state, const AdamConfig& cfg) {
  if (grad.rows() != x.rows() || grad.cols() != x.cols()) {
    throw invalid_input("gradient shape does not match parameters");
  }
  ++state.t;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
  state.v.array() = cfg.beta2 * state.v.array() + (1.0 - cfg.beta2) * grad.array().square();
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  x.array() -= cfg.learning_rate * (state.m.array() / bc1) /
               ((state.v.array() / bc2).sqrt() + cfg.epsilon);
  x = x.array().max(0.0).matrix();
  if (!x.allFinite()) throw numeric_error("parameters diverged during optimization");
}

/// Uniform [0, 0.1) initialization, the standard SPoSE starting point.
inline Matrix make_initial_weights(int concepts, int dims, std::uint64_t seed) {
  if (concepts <= 0 || dims <= 0) throw invalid_input("initial weights need positive shape");
  Rng rng(derive_seed(seed, streams::kInit));
  Matrix x(concepts, dims);
  for (int i = 0; i < concepts; ++i) {
    for (int f = 0; f < dims; ++f) {
      x(i, f) = 0.1 * rng.next_unit();
    }
  }
  return x;
}

/// Runs mini-batch epochs of projected Adam on the penalized objective.
///
/// Each epoch shuffles the judgment order with a stream derived from
/// (seed, kEpochBase + epoch_index), so the schedule depends only on the seed
/// and the absolute epoch number; resuming after n epochs and running k more
/// matches a single (n + k)-epoch run. Batch gradients sum over the batch and
/// include +lambda per entry once per batch.
inline void run_epochs(Matrix& x, const std::vector<TripletJudgment>& judgments, double lambda,
                       int epochs, int first_epoch_index, int batch_size, std::uint64_t seed,
                       AdamState& state, const AdamConfig& cfg = {}) {
  if (judgments.empty()) throw invalid_input("cannot train on an empty judgment set");
  if (epochs < 0) throw invalid_input("negative epoch count");
  if (batch_size <= 0) throw invalid_input("batch size must be positive");
  const std::size_t n = judgments.size();
  std::vector<std::size_t> order(n);
  std::vector<TripletJudgment> batch;
  batch.reserve(static_cast<std::size_t>(batch_size));
  for (int e = 0; e < epochs; ++e) {
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(derive_seed(seed, streams::kEpochBase +
                                  static_cast<std::uint64_t>(first_epoch_index + e)));
    rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(batch_size)) {
      const std::size_t stop = std::min(n, start + static_cast<std::size_t>(batch_size));
      batch.clear();
      for (std::size_t k = start; k < stop; ++k) batch.push_back(judgments[order[k]]);
      Matrix grad = batch_gradient(x, batch, lambda);
      adam_step(x, grad, state, cfg);
    }
  }
}

}  // namespace spose
