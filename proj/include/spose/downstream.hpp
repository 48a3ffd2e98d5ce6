/// @file  downstream.hpp
/// @brief Downstream analyses of a learned embedding: binary feature
///        prediction with L2 logistic regression and AUC, dimension
///        interpretation with L1-penalized non-negative least squares,
///        typicality scores, and nearest-neighbor category classification.

#pragma once

#include "spose/io.hpp"
#include "spose/parallel.hpp"
#include "spose/rng.hpp"
#include "spose/stats.hpp"
#include "spose/types.hpp"

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace spose {

/// 10 log-spaced penalties from 1e-4 to 1e2, shared default for both
/// regression tasks.
inline std::vector<double> default_regularization_grid() {
  std::vector<double> grid;
  grid.reserve(10);
  for (int i = 0; i < 10; ++i) {
    grid.push_back(std::pow(10.0, -4.0 + 6.0 * static_cast<double>(i) / 9.0));
  }
  return grid;
}

/// Nested cross-validation layout: outer folds produce out-of-fold
/// predictions, inner folds select the regularization penalty.
struct CrossValidationPlan {
  int outer_folds = 10;
  int inner_folds = 10;
  std::vector<double> lambda_grid = default_regularization_grid();
  std::uint64_t seed = 0;

  void validate() const {
    if (outer_folds < 2) throw invalid_input("cv plan: outer folds must be >= 2");
    if (inner_folds < 2) throw invalid_input("cv plan: inner folds must be >= 2");
    if (lambda_grid.empty()) throw invalid_input("cv plan: empty regularization grid");
    for (double l : lambda_grid) {
      if (!(l > 0.0)) throw invalid_input("cv plan: penalties must be positive");
    }
  }
};

/// Deterministic k-fold partition of items 0..n-1: shuffle under the seed,
/// then cut into contiguous chunks (the first n mod k folds get one extra
/// item). Each fold is returned sorted ascending.
inline std::vector<std::vector<int>> make_folds(int n, int k, std::uint64_t seed) {
  if (k < 2) throw invalid_input("fold count must be >= 2");
  if (n < k) throw invalid_input("cannot split " + std::to_string(n) + " items into " +
                                 std::to_string(k) + " folds");
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<std::vector<int>> folds(static_cast<std::size_t>(k));
  const int base = n / k;
  const int extra = n % k;
  int pos = 0;
  for (int f = 0; f < k; ++f) {
    const int count = base + (f < extra ? 1 : 0);
    auto& fold = folds[static_cast<std::size_t>(f)];
    fold.assign(order.begin() + pos, order.begin() + pos + count);
    std::sort(fold.begin(), fold.end());
    pos += count;
  }
  return folds;
}

// ---------------------------------------------------------------------------
// Fold-local standardization
// ---------------------------------------------------------------------------

/// Column means and standard deviations estimated on a training fold.
/// Constant columns get sd 0 and transform to 0 (they carry no signal).
struct Standardizer {
  Vector mean;
  Vector sd;

  static Standardizer fit(const Matrix& x, const std::vector<int>& rows) {
    if (rows.empty()) throw invalid_input("standardizer: empty row set");
    const Eigen::Index p = x.cols();
    Standardizer s;
    s.mean = Vector::Zero(p);
    s.sd = Vector::Zero(p);
    for (int r : rows) s.mean += x.row(r).transpose();
    s.mean /= static_cast<double>(rows.size());
    for (int r : rows) {
      s.sd.array() += (x.row(r).transpose() - s.mean).array().square();
    }
    s.sd = (s.sd / static_cast<double>(rows.size())).cwiseSqrt();
    return s;
  }

  /// Standardized submatrix for the given rows.
  Matrix transform(const Matrix& x, const std::vector<int>& rows) const {
    Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (Eigen::Index f = 0; f < x.cols(); ++f) {
        out(static_cast<Eigen::Index>(r), f) =
            sd(f) > 0.0 ? (x(rows[r], f) - mean(f)) / sd(f) : 0.0;
      }
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// L2-regularized logistic regression
// ---------------------------------------------------------------------------

struct LogisticModel {
  Vector w;
  double bias = 0.0;
  bool converged = false;
  int iterations = 0;
};

namespace detail {

/// log(1 + exp(t)) without overflow.
inline double log1pexp(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

/// Logistic sigmoid without overflow.
inline double sigmoid(double t) {
  return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

}  // namespace detail

/// Minimizes mean logistic loss + (lambda/2)·||w||² (bias unpenalized) by
/// full-batch gradient descent with backtracking line search. Converged means
/// the gradient norm fell below 1e-6 within the iteration budget.
inline LogisticModel fit_logistic_l2(const Matrix& x, const std::vector<int>& y, double lambda,
                                     int max_iterations = 10000, double tolerance = 1e-6) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (static_cast<Eigen::Index>(y.size()) != n) {
    throw invalid_input("logistic: label count does not match row count");
  }
  if (n == 0) throw invalid_input("logistic: empty design matrix");
  if (!(lambda >= 0.0)) throw invalid_input("logistic: negative penalty");
  Vector s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y[static_cast<std::size_t>(i)] != 0 && y[static_cast<std::size_t>(i)] != 1) {
      throw invalid_input("logistic: labels must be 0 or 1");
    }
    s(i) = y[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
  }

  auto objective = [&](const Vector& w, double b) {
    const Vector z = x * w;
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) total += detail::log1pexp(-s(i) * (z(i) + b));
    return total / static_cast<double>(n) + 0.5 * lambda * w.squaredNorm();
  };

  LogisticModel model;
  model.w = Vector::Zero(p);
  double& b = model.bias;
  for (int it = 0; it < max_iterations; ++it) {
    const Vector z = x * model.w;
    Vector g(n);
    for (Eigen::Index i = 0; i < n; ++i) g(i) = -s(i) * detail::sigmoid(-s(i) * (z(i) + b));
    const Vector grad_w = x.transpose() * g / static_cast<double>(n) + lambda * model.w;
    const double grad_b = g.sum() / static_cast<double>(n);
    const double grad_sq = grad_w.squaredNorm() + grad_b * grad_b;
    if (std::sqrt(grad_sq) < tolerance) {
      model.converged = true;
      return model;
    }
    const double f0 = objective(model.w, b);
    double step = 1.0;
    Vector w_try;
    double b_try = 0.0, f_try = 0.0;
    bool accepted = false;
    while (step >= 1e-20) {
      w_try = model.w - step * grad_w;
      b_try = b - step * grad_b;
      f_try = objective(w_try, b_try);
      if (f_try <= f0 - 1e-4 * step * grad_sq) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // flat to machine precision; treat as a stop
    model.w = std::move(w_try);
    b = b_try;
    model.iterations = it + 1;
  }
  const Vector z = x * model.w;
  Vector g(n);
  for (Eigen::Index i = 0; i < n; ++i) g(i) = -s(i) * detail::sigmoid(-s(i) * (z(i) + b));
  const Vector grad_w = x.transpose() * g / static_cast<double>(n) + lambda * model.w;
  const double grad_b = g.sum() / static_cast<double>(n);
  model.converged = std::sqrt(grad_w.squaredNorm() + grad_b * grad_b) < tolerance;
  return model;
}

// ---------------------------------------------------------------------------
// L1-penalized non-negative least squares
// ---------------------------------------------------------------------------

struct NnlsModel {
  Vector w;  // entrywise >= 0
  double intercept = 0.0;
  bool converged = false;
  int sweeps = 0;
};

/// Minimizes 1/(2n)·||y - Xw - b||² + lambda·Σw_f subject to w >= 0, with an
/// unpenalized intercept, by cyclic coordinate descent with non-negative
/// soft-thresholding. Converged when the largest coordinate change in a full
/// sweep falls below 1e-8.
inline NnlsModel fit_nnls_l1(const Matrix& x, const Vector& y, double lambda,
                             int max_sweeps = 100000, double tolerance = 1e-8) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (y.size() != n) throw invalid_input("nnls: target length does not match row count");
  if (n == 0) throw invalid_input("nnls: empty design matrix");
  if (!(lambda >= 0.0)) throw invalid_input("nnls: negative penalty");

  NnlsModel model;
  model.w = Vector::Zero(p);
  Vector column_scale(p);
  for (Eigen::Index f = 0; f < p; ++f) {
    column_scale(f) = x.col(f).squaredNorm() / static_cast<double>(n);
  }
  Vector residual = y;  // y - Xw - b, maintained incrementally
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double max_change = 0.0;
    const double bias_shift = residual.mean();
    model.intercept += bias_shift;
    residual.array() -= bias_shift;
    max_change = std::abs(bias_shift);
    for (Eigen::Index f = 0; f < p; ++f) {
      if (column_scale(f) <= 0.0) continue;
      const double rho = x.col(f).dot(residual) / static_cast<double>(n) +
                         column_scale(f) * model.w(f);
      const double updated = std::max(0.0, (rho - lambda) / column_scale(f));
      if (updated != model.w(f)) {
        residual += x.col(f) * (model.w(f) - updated);
        max_change = std::max(max_change, std::abs(updated - model.w(f)));
        model.w(f) = updated;
      }
    }
    model.sweeps = sweep;
    if (max_change < tolerance) {
      model.converged = true;
      break;
    }
  }
  return model;
}

// ---------------------------------------------------------------------------
// Shared nested-CV plumbing
// ---------------------------------------------------------------------------

namespace detail {

/// Rows of `all` not present in the sorted list `excluded`.
inline std::vector<int> complement(const std::vector<int>& all, const std::vector<int>& excluded) {
  std::vector<int> out;
  out.reserve(all.size() - excluded.size());
  std::size_t e = 0;
  for (int v : all) {
    if (e < excluded.size() && excluded[e] == v) {
      ++e;
    } else {
      out.push_back(v);
    }
  }
  return out;
}

/// Concepts shared between an embedding and a feature table, in table order.
/// Returns (embedding row, table row) pairs.
inline std::vector<std::pair<int, int>> shared_concepts(const Embedding& emb,
                                                        const FeatureTable& table) {
  std::vector<std::pair<int, int>> rows;
  for (int t = 0; t < table.concepts(); ++t) {
    const std::string& name = table.vocabulary().name(t);
    if (emb.vocabulary().contains(name)) {
      rows.emplace_back(emb.vocabulary().index_of(name), t);
    }
  }
  if (rows.empty()) {
    throw invalid_input("no concepts shared between embedding and feature table");
  }
  return rows;
}

/// Picks the grid value with the lowest score; ties go to the larger penalty.
inline std::size_t pick_penalty(const std::vector<double>& grid,
                                const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (scores[i] < scores[best] || (scores[i] == scores[best] && grid[i] > grid[best])) {
      best = i;
    }
  }
  return best;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Feature prediction (logistic + AUC)
// ---------------------------------------------------------------------------

struct FeatureAucRecord {
  std::string feature;
  double auc = 0.0;
  bool converged = true;  // false if any outer-fold fit hit the iteration cap
};

/// Nested-CV evaluation of how well the embedding predicts each binary
/// feature. Outer folds produce pooled out-of-fold decision scores; inner
/// folds select the L2 penalty by validation log-loss; AUC is computed over
/// the pooled scores with midrank tie handling. Predictors are standardized
/// with training-fold statistics at every level.
inline std::vector<FeatureAucRecord> logistic_feature_auc(const Embedding& emb,
                                                          const FeatureTable& targets,
                                                          const CrossValidationPlan& plan,
                                                          int jobs = 1) {
  plan.validate();
  const std::vector<std::pair<int, int>> shared = detail::shared_concepts(emb, targets);
  const int n = static_cast<int>(shared.size());
  if (n < plan.outer_folds) {
    throw invalid_input("fewer shared concepts than outer folds");
  }

  Matrix x(n, emb.dims());
  for (int i = 0; i < n; ++i) x.row(i) = emb.values().row(shared[static_cast<std::size_t>(i)].first);

  const int k = targets.features();
  std::vector<std::vector<int>> labels(static_cast<std::size_t>(k),
                                       std::vector<int>(static_cast<std::size_t>(n)));
  for (int j = 0; j < k; ++j) {
    int positives = 0;
    for (int i = 0; i < n; ++i) {
      const double v = targets.values()(shared[static_cast<std::size_t>(i)].second, j);
      if (v != 0.0 && v != 1.0) {
        throw invalid_input("feature '" + targets.feature_names()[static_cast<std::size_t>(j)] +
                            "' is not binary");
      }
      labels[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = v == 1.0 ? 1 : 0;
      positives += v == 1.0 ? 1 : 0;
    }
    if (positives < 2 || n - positives < 2) {
      throw invalid_input("feature '" + targets.feature_names()[static_cast<std::size_t>(j)] +
                          "' needs at least 2 positives and 2 negatives");
    }
  }

  // Fold structure is shared across features so results are comparable.
  const std::vector<std::vector<int>> outer =
      make_folds(n, plan.outer_folds, derive_seed(plan.seed, streams::kFoldBase));
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  std::vector<std::vector<int>> outer_train;
  std::vector<std::vector<std::vector<int>>> inner;
  for (std::size_t o = 0; o < outer.size(); ++o) {
    outer_train.push_back(detail::complement(all, outer[o]));
    inner.push_back(make_folds(static_cast<int>(outer_train[o].size()), plan.inner_folds,
                               derive_seed(plan.seed, streams::kFoldBase + 1 + o)));
  }

  std::vector<FeatureAucRecord> records(static_cast<std::size_t>(k));
  detail::parallel_tasks(k, jobs, [&](int j) {
    const std::vector<int>& y = labels[static_cast<std::size_t>(j)];
    std::vector<double> scores(static_cast<std::size_t>(n), 0.0);
    bool converged = true;
    for (std::size_t o = 0; o < outer.size(); ++o) {
      const std::vector<int>& train_rows = outer_train[o];
      // Inner selection: summed validation log-loss per penalty.
      std::vector<double> penalty_loss(plan.lambda_grid.size(), 0.0);
      for (const std::vector<int>& fold_positions : inner[o]) {
        std::vector<int> val_rows;
        val_rows.reserve(fold_positions.size());
        for (int pos : fold_positions) val_rows.push_back(train_rows[static_cast<std::size_t>(pos)]);
        std::vector<int> fit_rows = detail::complement(train_rows, val_rows);
        const Standardizer stats = Standardizer::fit(x, fit_rows);
        const Matrix x_fit = stats.transform(x, fit_rows);
        const Matrix x_val = stats.transform(x, val_rows);
        std::vector<int> y_fit;
        y_fit.reserve(fit_rows.size());
        for (int r : fit_rows) y_fit.push_back(y[static_cast<std::size_t>(r)]);
        for (std::size_t li = 0; li < plan.lambda_grid.size(); ++li) {
          const LogisticModel fit = fit_logistic_l2(x_fit, y_fit, plan.lambda_grid[li]);
          for (std::size_t v = 0; v < val_rows.size(); ++v) {
            const double z = x_val.row(static_cast<Eigen::Index>(v)).dot(fit.w) + fit.bias;
            const double sign = y[static_cast<std::size_t>(val_rows[v])] == 1 ? 1.0 : -1.0;
            penalty_loss[li] += detail::log1pexp(-sign * z);
          }
        }
      }
      const std::size_t li = detail::pick_penalty(plan.lambda_grid, penalty_loss);

      const Standardizer stats = Standardizer::fit(x, train_rows);
      const Matrix x_train = stats.transform(x, train_rows);
      std::vector<int> y_train;
      y_train.reserve(train_rows.size());
      for (int r : train_rows) y_train.push_back(y[static_cast<std::size_t>(r)]);
      const LogisticModel fit = fit_logistic_l2(x_train, y_train, plan.lambda_grid[li]);
      converged = converged && fit.converged;
      const Matrix x_test = stats.transform(x, outer[o]);
      for (std::size_t t = 0; t < outer[o].size(); ++t) {
        scores[static_cast<std::size_t>(outer[o][t])] =
            x_test.row(static_cast<Eigen::Index>(t)).dot(fit.w) + fit.bias;
      }
    }
    records[static_cast<std::size_t>(j)] =
        FeatureAucRecord{targets.feature_names()[static_cast<std::size_t>(j)],
                         roc_auc(scores, y), converged};
  });
  return records;
}

// ---------------------------------------------------------------------------
// Dimension interpretation (NNLS)
// ---------------------------------------------------------------------------

struct DimensionExplainRecord {
  int dim = 0;
  double cv_pearson = 0.0;      // pooled out-of-fold predictions vs the dimension
  double selected_lambda = 0.0; // penalty used for the reported weights
  bool converged = true;
  Vector weights;               // raw predictor units, entrywise >= 0
  double intercept = 0.0;
};

/// Explains each embedding dimension as an L1-penalized non-negative
/// combination of predictor features. Outer folds give the out-of-fold
/// prediction correlation; the reported weights come from a full-data fit at
/// a penalty chosen by one more k-fold CV, de-standardized to raw predictor
/// units.
inline std::vector<DimensionExplainRecord> nnls_explain(const Embedding& emb,
                                                        const FeatureTable& predictors,
                                                        const CrossValidationPlan& plan,
                                                        int jobs = 1) {
  plan.validate();
  const std::vector<std::pair<int, int>> shared = detail::shared_concepts(emb, predictors);
  const int n = static_cast<int>(shared.size());
  if (n < plan.outer_folds) throw invalid_input("fewer shared concepts than outer folds");

  Matrix x(n, predictors.features());
  Matrix targets(n, emb.dims());
  for (int i = 0; i < n; ++i) {
    x.row(i) = predictors.values().row(shared[static_cast<std::size_t>(i)].second);
    targets.row(i) = emb.values().row(shared[static_cast<std::size_t>(i)].first);
  }
  for (int d = 0; d < emb.dims(); ++d) {
    const double first = targets(0, d);
    bool varies = false;
    for (int i = 1; i < n && !varies; ++i) varies = targets(i, d) != first;
    if (!varies) {
      throw invalid_input("embedding dimension " + std::to_string(d) +
                          " has zero variance over the shared concepts");
    }
  }

  const std::vector<std::vector<int>> outer =
      make_folds(n, plan.outer_folds, derive_seed(plan.seed, streams::kFoldBase));
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  std::vector<std::vector<int>> outer_train;
  std::vector<std::vector<std::vector<int>>> inner;
  for (std::size_t o = 0; o < outer.size(); ++o) {
    outer_train.push_back(detail::complement(all, outer[o]));
    inner.push_back(make_folds(static_cast<int>(outer_train[o].size()), plan.inner_folds,
                               derive_seed(plan.seed, streams::kFoldBase + 1 + o)));
  }
  // Separate partition for choosing the final full-data penalty.
  const std::vector<std::vector<int>> final_folds =
      make_folds(n, plan.inner_folds,
                 derive_seed(plan.seed, streams::kFoldBase + 1 +
                                            static_cast<std::uint64_t>(plan.outer_folds)));

  auto validation_sse = [&](const Vector& y, const std::vector<int>& fit_rows,
                            const std::vector<int>& val_rows, double lambda, bool* ok) {
    const Standardizer stats = Standardizer::fit(x, fit_rows);
    const Matrix x_fit = stats.transform(x, fit_rows);
    Vector y_fit(static_cast<Eigen::Index>(fit_rows.size()));
    for (std::size_t r = 0; r < fit_rows.size(); ++r) {
      y_fit(static_cast<Eigen::Index>(r)) = y(fit_rows[r]);
    }
    const NnlsModel fit = fit_nnls_l1(x_fit, y_fit, lambda);
    if (ok) *ok = fit.converged;
    const Matrix x_val = stats.transform(x, val_rows);
    double sse = 0.0;
    for (std::size_t v = 0; v < val_rows.size(); ++v) {
      const double pred = x_val.row(static_cast<Eigen::Index>(v)).dot(fit.w) + fit.intercept;
      const double err = pred - y(val_rows[v]);
      sse += err * err;
    }
    return sse;
  };

  std::vector<DimensionExplainRecord> records(static_cast<std::size_t>(emb.dims()));
  detail::parallel_tasks(emb.dims(), jobs, [&](int d) {
    const Vector y = targets.col(d);
    DimensionExplainRecord rec;
    rec.dim = d;

    std::vector<double> pooled_pred(static_cast<std::size_t>(n), 0.0);
    for (std::size_t o = 0; o < outer.size(); ++o) {
      const std::vector<int>& train_rows = outer_train[o];
      std::vector<double> penalty_sse(plan.lambda_grid.size(), 0.0);
      for (const std::vector<int>& fold_positions : inner[o]) {
        std::vector<int> val_rows;
        val_rows.reserve(fold_positions.size());
        for (int pos : fold_positions) val_rows.push_back(train_rows[static_cast<std::size_t>(pos)]);
        const std::vector<int> fit_rows = detail::complement(train_rows, val_rows);
        for (std::size_t li = 0; li < plan.lambda_grid.size(); ++li) {
          penalty_sse[li] += validation_sse(y, fit_rows, val_rows, plan.lambda_grid[li], nullptr);
        }
      }
      const std::size_t li = detail::pick_penalty(plan.lambda_grid, penalty_sse);

      const Standardizer stats = Standardizer::fit(x, train_rows);
      const Matrix x_train = stats.transform(x, train_rows);
      Vector y_train(static_cast<Eigen::Index>(train_rows.size()));
      for (std::size_t r = 0; r < train_rows.size(); ++r) {
        y_train(static_cast<Eigen::Index>(r)) = y(train_rows[r]);
      }
      const NnlsModel fit = fit_nnls_l1(x_train, y_train, plan.lambda_grid[li]);
      rec.converged = rec.converged && fit.converged;
      const Matrix x_test = stats.transform(x, outer[o]);
      for (std::size_t t = 0; t < outer[o].size(); ++t) {
        pooled_pred[static_cast<std::size_t>(outer[o][t])] =
            x_test.row(static_cast<Eigen::Index>(t)).dot(fit.w) + fit.intercept;
      }
    }
    std::vector<double> y_vec(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) y_vec[static_cast<std::size_t>(i)] = y(i);
    try {
      rec.cv_pearson = pearson(pooled_pred, y_vec);
    } catch (const numeric_error&) {
      rec.cv_pearson = 0.0;  // constant predictions carry no signal
    }

    // Final fit: plain k-fold CV on all shared concepts picks the penalty.
    std::vector<double> penalty_sse(plan.lambda_grid.size(), 0.0);
    for (const std::vector<int>& fold : final_folds) {
      const std::vector<int> fit_rows = detail::complement(all, fold);
      for (std::size_t li = 0; li < plan.lambda_grid.size(); ++li) {
        penalty_sse[li] += validation_sse(y, fit_rows, fold, plan.lambda_grid[li], nullptr);
      }
    }
    const std::size_t li = detail::pick_penalty(plan.lambda_grid, penalty_sse);
    rec.selected_lambda = plan.lambda_grid[li];

    const Standardizer stats = Standardizer::fit(x, all);
    const Matrix x_all = stats.transform(x, all);
    const NnlsModel fit = fit_nnls_l1(x_all, y, rec.selected_lambda);
    rec.converged = rec.converged && fit.converged;
    rec.weights = Vector::Zero(x.cols());
    rec.intercept = fit.intercept;
    for (Eigen::Index f = 0; f < x.cols(); ++f) {
      if (stats.sd(f) > 0.0) {
        rec.weights(f) = fit.w(f) / stats.sd(f);
        rec.intercept -= fit.w(f) * stats.mean(f) / stats.sd(f);
      }
    }
    records[static_cast<std::size_t>(d)] = std::move(rec);
  });
  return records;
}

// ---------------------------------------------------------------------------
// Typicality
// ---------------------------------------------------------------------------

/// Dot product of each member vector with the member centroid.
inline std::vector<double> typicality_scores(const Embedding& emb,
                                             const std::vector<int>& members) {
  if (members.size() < 2) throw invalid_input("typicality needs at least 2 category members");
  std::vector<int> sorted = members;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] < 0 || sorted[i] >= emb.concepts()) {
      throw invalid_input("typicality: member index out of range");
    }
    if (i > 0 && sorted[i] == sorted[i - 1]) {
      throw invalid_input("typicality: duplicate member index");
    }
  }
  Vector centroid = Vector::Zero(emb.dims());
  for (int i : members) centroid += emb.values().row(i).transpose();
  centroid /= static_cast<double>(members.size());
  std::vector<double> scores;
  scores.reserve(members.size());
  for (int i : members) scores.push_back(emb.values().row(i).dot(centroid));
  return scores;
}

// ---------------------------------------------------------------------------
// Category classification
// ---------------------------------------------------------------------------

/// Category assignment for a labeled subset of concepts.
struct CategoryLabeling {
  std::map<int, std::string> label_of;  // concept index -> category name

  std::map<std::string, std::vector<int>> groups() const {
    std::map<std::string, std::vector<int>> by_category;
    for (const auto& [index, category] : label_of) by_category[category].push_back(index);
    return by_category;
  }
};

struct NnCategoryResult {
  double accuracy = 0.0;
  std::vector<int> excluded_zero_norm;  // labeled concepts with all-zero vectors
};

/// Leave-one-out nearest-neighbor classification by cosine similarity over
/// the labeled concepts. Zero-norm vectors cannot be compared and are
/// excluded (reported). Cosine ties go to the lowest concept index.
inline NnCategoryResult nn_category_accuracy(const Embedding& emb, const CategoryLabeling& labels) {
  if (labels.label_of.empty()) throw invalid_input("category labeling is empty");
  for (const auto& [index, category] : labels.label_of) {
    if (index < 0 || index >= emb.concepts()) {
      throw invalid_input("category labeling references concept index out of range");
    }
    if (category.empty()) throw invalid_input("empty category name");
  }
  for (const auto& [category, members] : labels.groups()) {
    if (members.size() < 2) {
      throw invalid_input("category '" + category + "' needs at least 2 members");
    }
  }

  NnCategoryResult result;
  std::vector<int> included;
  std::vector<double> norms;
  for (const auto& [index, category] : labels.label_of) {
    const double norm = emb.values().row(index).norm();
    if (norm > 0.0) {
      included.push_back(index);
      norms.push_back(norm);
    } else {
      result.excluded_zero_norm.push_back(index);
    }
  }
  if (included.size() < 2) {
    throw numeric_error("fewer than 2 labeled concepts with nonzero vectors");
  }

  long long correct = 0;
  for (std::size_t a = 0; a < included.size(); ++a) {
    double best = -2.0;
    int best_index = -1;
    for (std::size_t b = 0; b < included.size(); ++b) {
      if (a == b) continue;
      const double cosine = emb.values().row(included[a]).dot(emb.values().row(included[b])) /
                            (norms[a] * norms[b]);
      if (cosine > best) {
        best = cosine;
        best_index = included[b];
      }
    }
    if (labels.label_of.at(best_index) == labels.label_of.at(included[a])) ++correct;
  }
  result.accuracy = static_cast<double>(correct) / static_cast<double>(included.size());
  return result;
}

// ---------------------------------------------------------------------------
// Label and score file I/O
// ---------------------------------------------------------------------------

/// Category file: `name<TAB>category` per line, `#` comments.
inline CategoryLabeling load_category_labels(const std::string& path,
                                             const ConceptVocabulary& vocab) {
  std::ifstream in = detail::open_input(path);
  CategoryLabeling labels;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> fields = detail::split_tabs(line);
    if (fields.size() != 2) throw detail::parse_error(path, line_no, "expected `name<TAB>category`");
    if (fields[1].empty()) throw detail::parse_error(path, line_no, "empty category");
    int index = 0;
    try {
      index = vocab.index_of(fields[0]);
    } catch (const invalid_input& e) {
      throw detail::parse_error(path, line_no, e.what());
    }
    if (!labels.label_of.emplace(index, fields[1]).second) {
      throw detail::parse_error(path, line_no, "concept '" + fields[0] + "' labeled twice");
    }
  }
  return labels;
}

/// Score file: `name<TAB>score` per line, `#` comments.
inline std::map<int, double> load_score_table(const std::string& path,
                                              const ConceptVocabulary& vocab) {
  std::ifstream in = detail::open_input(path);
  std::map<int, double> scores;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> fields = detail::split_tabs(line);
    if (fields.size() != 2) throw detail::parse_error(path, line_no, "expected `name<TAB>score`");
    int index = 0;
    try {
      index = vocab.index_of(fields[0]);
    } catch (const invalid_input& e) {
      throw detail::parse_error(path, line_no, e.what());
    }
    const double value = detail::parse_double(fields[1], path, line_no);
    if (!scores.emplace(index, value).second) {
      throw detail::parse_error(path, line_no, "concept '" + fields[0] + "' scored twice");
    }
  }
  return scores;
}

}  // namespace spose
