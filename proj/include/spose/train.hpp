/// @file  train.hpp
/// @brief Full fitting protocol: train/validation split, lambda grid search
///        by validation cross-entropy, dimension pruning, and cross-run
///        dimension matching.

#pragma once

#include "spose/adam.hpp"
#include "spose/io.hpp"
#include "spose/model.hpp"
#include "spose/parallel.hpp"
#include "spose/rng.hpp"
#include "spose/stats.hpp"
#include "spose/types.hpp"

#include <utility>
#include <vector>

namespace spose {

/// Deterministic shuffle split: the first floor(fraction * n) judgments of
/// the shuffled order train, the rest validate.
inline std::pair<TripletDataset, TripletDataset> split_train_validation(const TripletDataset& data,
                                                                        double fraction,
                                                                        std::uint64_t seed) {
  if (data.judgments.empty()) throw invalid_input("cannot split an empty dataset");
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw invalid_input("split fraction must lie strictly between 0 and 1");
  }
  const std::size_t n = data.judgments.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(derive_seed(seed, streams::kSplit));
  rng.shuffle(order);
  const std::size_t n_train = static_cast<std::size_t>(fraction * static_cast<double>(n));
  std::vector<TripletJudgment> train, val;
  train.reserve(n_train);
  val.reserve(n - n_train);
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_train ? train : val).push_back(data.judgments[order[i]]);
  }
  return {TripletDataset(data.vocabulary, std::move(train)),
          TripletDataset(data.vocabulary, std::move(val))};
}

namespace detail {

/// Columns whose mean value reaches the threshold.
inline int count_retained(const Matrix& x, double threshold) {
  int kept = 0;
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    if (x.col(f).mean() >= threshold) ++kept;
  }
  return kept;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Grid search
// ---------------------------------------------------------------------------

struct GridSearchRecord {
  double lambda;
  double validation_ce;    // mean negative log probability on the validation set
  double train_objective;  // penalized objective on the training split
  int retained_dims;       // columns with mean >= prune threshold
};

struct GridSearchReport {
  std::vector<GridSearchRecord> records;
  double selected_lambda = 0.0;
  int selected_index = -1;
};

namespace detail {

struct GridCandidate {
  GridSearchRecord record;
  Matrix weights;
};

/// Trains one model per grid value from a shared split and identical
/// initialization, keeping the final weights so the selected candidate can be
/// reused without retraining (the rerun would be bit-identical anyway).
inline std::vector<GridCandidate> run_grid(const TripletDataset& data, const TrainConfig& config,
                                           int jobs) {
  config.validate();
  auto [train_set, val_set] = split_train_validation(data, config.split_fraction, config.seed);
  if (train_set.judgments.empty()) throw invalid_input("training split is empty");
  if (val_set.judgments.empty()) throw invalid_input("validation split is empty");
  const Matrix init =
      make_initial_weights(data.vocabulary.size(), config.init_dims, config.seed);

  std::vector<GridCandidate> candidates(config.lambda_grid.size());
  detail::parallel_tasks(static_cast<int>(config.lambda_grid.size()), jobs, [&](int t) {
    const double lambda = config.lambda_grid[static_cast<std::size_t>(t)];
    Matrix x = init;
    AdamState state(x.rows(), x.cols());
    AdamConfig adam;
    adam.learning_rate = config.learning_rate;
    run_epochs(x, train_set.judgments, lambda, config.epochs, 0, config.batch_size, config.seed,
               state, adam);
    GridSearchRecord rec;
    rec.lambda = lambda;
    rec.validation_ce = mean_cross_entropy(x, val_set.judgments);
    rec.train_objective = penalized_objective(x, train_set.judgments, lambda);
    rec.retained_dims = detail::count_retained(x, config.prune_threshold);
    candidates[static_cast<std::size_t>(t)] = GridCandidate{rec, std::move(x)};
  });
  return candidates;
}

inline GridSearchReport pick_selected(const std::vector<GridCandidate>& candidates) {
  GridSearchReport report;
  report.records.reserve(candidates.size());
  for (const GridCandidate& c : candidates) report.records.push_back(c.record);
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const GridSearchRecord& r = report.records[i];
    if (report.selected_index < 0) {
      report.selected_index = static_cast<int>(i);
      continue;
    }
    const GridSearchRecord& best = report.records[static_cast<std::size_t>(report.selected_index)];
    if (r.validation_ce < best.validation_ce ||
        (r.validation_ce == best.validation_ce && r.lambda > best.lambda)) {
      report.selected_index = static_cast<int>(i);
    }
  }
  report.selected_lambda = report.records[static_cast<std::size_t>(report.selected_index)].lambda;
  return report;
}

}  // namespace detail

/// Grid search over config.lambda_grid: one shared split, identical
/// initialization per candidate, selection by lowest mean validation
/// cross-entropy with ties broken toward larger lambda.
inline GridSearchReport select_lambda(const TripletDataset& data, const TrainConfig& config,
                                      int jobs = 1) {
  return detail::pick_selected(detail::run_grid(data, config, jobs));
}

// ---------------------------------------------------------------------------
// Pruning
// ---------------------------------------------------------------------------

/// Drops every column whose mean value falls below the threshold and reorders
/// the survivors by descending column sum. Returns the pruned embedding and
/// the surviving columns' original indices in the new order.
inline std::pair<Embedding, std::vector<int>> prune_dimensions(const Embedding& emb,
                                                               double threshold) {
  if (threshold < 0.0) throw invalid_input("prune threshold must be non-negative");
  const Matrix& x = emb.values();
  std::vector<int> kept;
  for (int f = 0; f < emb.dims(); ++f) {
    if (x.col(f).mean() >= threshold) kept.push_back(f);
  }
  if (kept.empty()) {
    throw numeric_error("all dimensions fall below the prune threshold; model is degenerate");
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [&](int a, int b) { return x.col(a).sum() > x.col(b).sum(); });
  Matrix pruned(emb.concepts(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t f = 0; f < kept.size(); ++f) {
    pruned.col(static_cast<Eigen::Index>(f)) = x.col(kept[f]);
  }
  return {Embedding(emb.vocabulary(), std::move(pruned)), std::move(kept)};
}

// ---------------------------------------------------------------------------
// Dimension matching
// ---------------------------------------------------------------------------

struct MatchedPair {
  int dim_a;
  int dim_b;
  double correlation;
};

struct DimensionMatchReport {
  std::vector<MatchedPair> pairs;
  int count_above_threshold = 0;
  double threshold = 0.0;
  std::vector<int> zero_variance_a;  // columns excluded from matching
  std::vector<int> zero_variance_b;
};

/// Greedy dimension matching between two embeddings over the same vocabulary:
/// repeatedly pair the unmatched column pair with the highest Pearson
/// correlation (ties toward the lowest (dim_a, dim_b)). Zero-variance columns
/// cannot be correlated and are excluded but reported.
inline DimensionMatchReport match_dimensions(const Embedding& a, const Embedding& b,
                                             double threshold) {
  if (a.vocabulary() != b.vocabulary()) {
    throw invalid_input("match_dimensions requires identical vocabularies");
  }
  DimensionMatchReport report;
  report.threshold = threshold;

  const int m = a.concepts();
  auto column = [m](const Matrix& x, int f) {
    std::vector<double> col(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) col[static_cast<std::size_t>(i)] = x(i, f);
    return col;
  };
  auto has_variance = [&](const Matrix& x, int f) {
    for (int i = 1; i < m; ++i) {
      if (x(i, f) != x(0, f)) return true;
    }
    return false;
  };

  std::vector<int> cols_a, cols_b;
  for (int f = 0; f < a.dims(); ++f) {
    (has_variance(a.values(), f) ? cols_a : report.zero_variance_a).push_back(f);
  }
  for (int f = 0; f < b.dims(); ++f) {
    (has_variance(b.values(), f) ? cols_b : report.zero_variance_b).push_back(f);
  }

  struct Entry {
    double r;
    int fa;
    int fb;
  };
  std::vector<Entry> entries;
  entries.reserve(cols_a.size() * cols_b.size());
  for (int fa : cols_a) {
    const std::vector<double> va = column(a.values(), fa);
    for (int fb : cols_b) {
      entries.push_back(Entry{pearson(va, column(b.values(), fb)), fa, fb});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    if (x.r != y.r) return x.r > y.r;
    if (x.fa != y.fa) return x.fa < y.fa;
    return x.fb < y.fb;
  });

  std::vector<bool> used_a(static_cast<std::size_t>(a.dims()), false);
  std::vector<bool> used_b(static_cast<std::size_t>(b.dims()), false);
  for (const Entry& e : entries) {
    if (used_a[static_cast<std::size_t>(e.fa)] || used_b[static_cast<std::size_t>(e.fb)]) continue;
    used_a[static_cast<std::size_t>(e.fa)] = true;
    used_b[static_cast<std::size_t>(e.fb)] = true;
    report.pairs.push_back(MatchedPair{e.fa, e.fb, e.r});
    if (e.r >= threshold) ++report.count_above_threshold;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Full protocol
// ---------------------------------------------------------------------------

struct TrainFullResult {
  Embedding embedding;  // pruned, columns in descending-sum order
  GridSearchReport report;
  std::vector<int> retained_columns;  // original column indices
};

/// Grid search, then the model at the selected lambda (the grid candidate is
/// reused; retraining with the same seed would reproduce it bit-for-bit),
/// then pruning at config.prune_threshold.
inline TrainFullResult train_full(const TripletDataset& data, const TrainConfig& config,
                                  int jobs = 1) {
  std::vector<detail::GridCandidate> candidates = detail::run_grid(data, config, jobs);
  GridSearchReport report = detail::pick_selected(candidates);
  Embedding fitted(data.vocabulary,
                   std::move(candidates[static_cast<std::size_t>(report.selected_index)].weights));
  auto [pruned, retained] = prune_dimensions(fitted, config.prune_threshold);
  return TrainFullResult{std::move(pruned), std::move(report), std::move(retained)};
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

inline void save_grid_report(const GridSearchReport& report, const std::string& path) {
  std::ofstream out = detail::open_output(path);
  out << "# spose-grid-report selected_lambda=" << format_double(report.selected_lambda) << '\n';
  out << "lambda\tvalidation_ce\ttrain_objective\tretained_dims\n";
  for (const GridSearchRecord& r : report.records) {
    out << format_double(r.lambda) << '\t' << format_double(r.validation_ce) << '\t'
        << format_double(r.train_objective) << '\t' << r.retained_dims << '\n';
  }
  detail::finish_output(out, path);
}

inline void save_match_report(const DimensionMatchReport& report, const std::string& path) {
  std::ofstream out = detail::open_output(path);
  out << "# spose-match-report threshold=" << format_double(report.threshold)
      << " count_above_threshold=" << report.count_above_threshold << '\n';
  out << "dim_a\tdim_b\tpearson\n";
  for (const MatchedPair& p : report.pairs) {
    out << p.dim_a << '\t' << p.dim_b << '\t' << format_double(p.correlation) << '\n';
  }
  for (int f : report.zero_variance_a) out << "# zero-variance a " << f << '\n';
  for (int f : report.zero_variance_b) out << "# zero-variance b " << f << '\n';
  detail::finish_output(out, path);
}

}  // namespace spose
