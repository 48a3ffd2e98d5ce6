#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <numeric>
#include <set>

using namespace spose;
using Catch::Approx;

TEST_CASE("default regularization grid is 10 log-spaced points over 1e-4..1e2") {
  std::vector<double> grid = default_regularization_grid();
  REQUIRE(grid.size() == 10);
  CHECK(grid.front() == Approx(1e-4).epsilon(1e-12));
  CHECK(grid.back() == Approx(1e2).epsilon(1e-12));
  const double ratio = grid[1] / grid[0];
  for (std::size_t i = 1; i < grid.size(); ++i) {
    CHECK(grid[i] / grid[i - 1] == Approx(ratio).epsilon(1e-9));
  }
}

TEST_CASE("folds partition the items with balanced sizes") {
  std::vector<std::vector<int>> folds = make_folds(23, 10, 91);
  REQUIRE(folds.size() == 10);
  std::vector<int> seen;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    CHECK(folds[f].size() == (f < 3 ? 3u : 2u));
    CHECK(std::is_sorted(folds[f].begin(), folds[f].end()));
    seen.insert(seen.end(), folds[f].begin(), folds[f].end());
  }
  std::sort(seen.begin(), seen.end());
  std::vector<int> expected(23);
  std::iota(expected.begin(), expected.end(), 0);
  CHECK(seen == expected);

  CHECK(make_folds(23, 10, 91) == folds);
  CHECK(make_folds(23, 10, 92) != folds);
  CHECK_THROWS_AS(make_folds(23, 1, 91), invalid_input);
  CHECK_THROWS_AS(make_folds(5, 10, 91), invalid_input);
}

TEST_CASE("standardizer uses fold-local population statistics") {
  Matrix x(4, 2);
  x << 1.0, 7.0, 3.0, 7.0, 5.0, 7.0, 100.0, 7.0;
  const std::vector<int> rows = {0, 1, 2};  // row 3 must not leak in
  Standardizer stats = Standardizer::fit(x, rows);
  CHECK(stats.mean(0) == Approx(3.0));
  // Population sd over {1,3,5}: sqrt(8/3).
  CHECK(stats.sd(0) == Approx(std::sqrt(8.0 / 3.0)));
  CHECK(stats.sd(1) == 0.0);

  Matrix t = stats.transform(x, rows);
  CHECK(t(0, 0) == Approx(-2.0 / std::sqrt(8.0 / 3.0)));
  CHECK(t.col(0).mean() == Approx(0.0).margin(1e-12));
  // Constant columns carry no signal and standardize to zero.
  CHECK(t.col(1).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(Standardizer::fit(x, {}), invalid_input);
}

TEST_CASE("penalty ties go to the stronger penalty") {
  const std::vector<double> grid = {0.01, 0.1, 1.0};
  CHECK(detail::pick_penalty(grid, {3.0, 2.0, 2.5}) == 1);
  CHECK(detail::pick_penalty(grid, {2.0, 2.0, 2.5}) == 1);
  CHECK(detail::pick_penalty(grid, {2.0, 2.0, 2.0}) == 2);
}

TEST_CASE("logistic solver reaches the reference optimum") {
  // Noisy labels and a real penalty make the problem strictly convex.
  Matrix x = testsup::random_matrix(60, 5, -1.0, 1.0, 501);
  Rng rng(502);
  std::vector<int> y(60);
  for (int i = 0; i < 60; ++i) {
    const double signal = x(i, 0) - 0.5 * x(i, 1);
    y[static_cast<std::size_t>(i)] = rng.next_unit() < testsup::oracle::sigmoid(2.0 * signal);
  }
  const double lambda = 0.1;
  LogisticModel model = fit_logistic_l2(x, y, lambda);
  CHECK(model.converged);

  double loss = 0.0;
  for (int i = 0; i < 60; ++i) {
    const double z = x.row(i).dot(model.w) + model.bias;
    const double s = y[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
    loss += testsup::oracle::log1pexp(-s * z);
  }
  const double objective = loss / 60.0 + 0.5 * lambda * model.w.squaredNorm();
  const double reference = testsup::oracle::logistic_reference_objective(x, y, lambda);
  CHECK(std::abs(objective - reference) < 1e-6);

  CHECK_THROWS_AS(fit_logistic_l2(x, std::vector<int>(10, 0), lambda), invalid_input);
  std::vector<int> bad = y;
  bad[0] = 2;
  CHECK_THROWS_AS(fit_logistic_l2(x, bad, lambda), invalid_input);
  CHECK_THROWS_AS(fit_logistic_l2(x, y, -1.0), invalid_input);

  LogisticModel capped = fit_logistic_l2(x, y, lambda, 1);
  CHECK_FALSE(capped.converged);
}

TEST_CASE("nnls solver reaches the reference optimum") {
  Matrix x = testsup::random_matrix(80, 6, 0.0, 1.0, 503);
  Rng rng(504);
  Vector y(80);
  for (int i = 0; i < 80; ++i) {
    y(i) = 1.5 * x(i, 0) + 0.7 * x(i, 3) + 0.1 * (rng.next_unit() - 0.5);
  }
  const double lambda = 0.05;
  NnlsModel model = fit_nnls_l1(x, y, lambda);
  CHECK(model.converged);
  CHECK(model.w.minCoeff() >= 0.0);

  const Vector resid = y - x * model.w - Vector::Constant(80, model.intercept);
  const double objective = resid.squaredNorm() / 160.0 + lambda * model.w.sum();
  const double reference = testsup::oracle::nnls_reference_objective(x, y, lambda);
  CHECK(std::abs(objective - reference) < 1e-6);
}

TEST_CASE("nnls recovers an exact sparse combination and shrinks to zero") {
  Matrix x = testsup::random_matrix(50, 4, 0.0, 1.0, 505);
  Vector y = 2.0 * x.col(1);

  NnlsModel exact = fit_nnls_l1(x, y, 1e-6);
  CHECK(exact.w(1) == Approx(2.0).margin(1e-3));
  for (int f : {0, 2, 3}) CHECK(exact.w(f) < 1e-3);

  // Overwhelming penalty: all weights zero, intercept soaks up the mean.
  NnlsModel crushed = fit_nnls_l1(x, y, 1e4);
  CHECK(crushed.w.cwiseAbs().maxCoeff() == 0.0);
  CHECK(crushed.intercept == Approx(y.mean()).margin(1e-6));

  CHECK_THROWS_AS(fit_nnls_l1(x, Vector::Zero(3), 0.1), invalid_input);
  CHECK_THROWS_AS(fit_nnls_l1(x, y, -0.1), invalid_input);
}

TEST_CASE("roc auc handles ties like the brute-force count") {
  Rng rng(506);
  std::vector<double> scores(300);
  std::vector<int> labels(300);
  for (int i = 0; i < 300; ++i) {
    scores[static_cast<std::size_t>(i)] =
        std::floor(5.0 * rng.next_unit());  // heavy ties on 5 levels
    labels[static_cast<std::size_t>(i)] = rng.next_unit() < 0.4 ? 1 : 0;
  }
  CHECK(roc_auc(scores, labels) ==
        Approx(testsup::oracle::auc(scores, labels)).margin(1e-12));

  // Invariance under strictly increasing transformations of the scores.
  std::vector<double> warped = scores;
  for (double& s : warped) s = std::exp(0.3 * s) - 2.0;
  CHECK(roc_auc(warped, labels) == roc_auc(scores, labels));

  CHECK_THROWS_AS(roc_auc(scores, std::vector<int>(300, 1)), invalid_input);
  CHECK_THROWS_AS(roc_auc(scores, std::vector<int>(299, 0)), invalid_input);
  std::vector<int> bad = labels;
  bad[0] = 3;
  CHECK_THROWS_AS(roc_auc(scores, bad), invalid_input);
}

namespace {

Embedding random_embedding(int m, int p, std::uint64_t seed) {
  return Embedding(make_synthetic_vocabulary(m), testsup::random_matrix(m, p, 0.0, 2.0, seed));
}

}  // namespace

TEST_CASE("feature auc separates a threshold feature and shrugs at noise") {
  const int m = 200;
  Embedding emb = random_embedding(m, 4, 507);

  // Feature 0: first dimension above its median. Feature 1: a coin flip.
  std::vector<double> dim0(m);
  for (int i = 0; i < m; ++i) dim0[static_cast<std::size_t>(i)] = emb.values()(i, 0);
  std::vector<double> sorted = dim0;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[m / 2];
  Rng rng(508);
  Matrix f(m, 2);
  for (int i = 0; i < m; ++i) {
    f(i, 0) = dim0[static_cast<std::size_t>(i)] > median ? 1.0 : 0.0;
    f(i, 1) = rng.next_unit() < 0.5 ? 1.0 : 0.0;
  }
  FeatureTable table(emb.vocabulary(), {"high_dim0", "noise"}, f);

  CrossValidationPlan plan;
  plan.outer_folds = 5;
  plan.inner_folds = 4;
  plan.lambda_grid = {0.01, 0.1, 1.0};
  plan.seed = 509;

  std::vector<FeatureAucRecord> records = logistic_feature_auc(emb, table, plan);
  REQUIRE(records.size() == 2);
  CHECK(records[0].feature == "high_dim0");
  CHECK(records[0].auc >= 0.95);
  // Null AUC 3 sigma band: 0.5 +- 3*sqrt((n+1)/(12*n_pos*n_neg)).
  CHECK(std::abs(records[1].auc - 0.5) <= 0.13);

  // Worker count never changes the numbers.
  std::vector<FeatureAucRecord> parallel = logistic_feature_auc(emb, table, plan, 3);
  for (std::size_t j = 0; j < records.size(); ++j) {
    CHECK(parallel[j].auc == records[j].auc);
    CHECK(parallel[j].converged == records[j].converged);
  }
}

TEST_CASE("feature auc validates its inputs") {
  Embedding emb = random_embedding(20, 3, 510);
  CrossValidationPlan plan;
  plan.outer_folds = 5;
  plan.inner_folds = 4;
  plan.lambda_grid = {0.1};

  Matrix half(20, 1);
  for (int i = 0; i < 20; ++i) half(i, 0) = 0.5;
  CHECK_THROWS_AS(
      logistic_feature_auc(emb, FeatureTable(emb.vocabulary(), {"f"}, half), plan),
      invalid_input);

  Matrix lone(20, 1);
  lone.setZero();
  lone(0, 0) = 1.0;
  CHECK_THROWS_AS(
      logistic_feature_auc(emb, FeatureTable(emb.vocabulary(), {"f"}, lone), plan),
      invalid_input);

  CrossValidationPlan bad = plan;
  bad.lambda_grid = {-1.0};
  Matrix ok(20, 1);
  for (int i = 0; i < 20; ++i) ok(i, 0) = i % 2;
  CHECK_THROWS_AS(logistic_feature_auc(emb, FeatureTable(emb.vocabulary(), {"f"}, ok), bad),
                  invalid_input);
}

TEST_CASE("nnls explanation recovers a planted predictor in raw units") {
  const int m = 60;
  Matrix f = testsup::random_matrix(m, 4, 0.0, 1.0, 511);
  Matrix e(m, 2);
  e.col(0) = 2.0 * f.col(1);                                   // exactly explained
  e.col(1) = testsup::random_matrix(m, 1, 0.0, 1.0, 512);      // unrelated
  ConceptVocabulary vocab = make_synthetic_vocabulary(m);
  Embedding emb(vocab, e);
  FeatureTable predictors(vocab, {"p0", "p1", "p2", "p3"}, f);

  CrossValidationPlan plan;
  plan.outer_folds = 5;
  plan.inner_folds = 4;
  plan.lambda_grid = {1e-4, 1e-3, 1e-2};
  plan.seed = 513;

  std::vector<DimensionExplainRecord> records = nnls_explain(emb, predictors, plan);
  REQUIRE(records.size() == 2);

  CHECK(records[0].dim == 0);
  CHECK(records[0].cv_pearson > 0.99);
  CHECK(records[0].weights(1) == Approx(2.0).margin(0.05));
  for (int p : {0, 2, 3}) CHECK(records[0].weights(p) <= 0.05);
  CHECK(records[0].weights.minCoeff() >= 0.0);

  // A target unrelated to every predictor earns a near-zero CV correlation.
  CHECK(std::abs(records[1].cv_pearson) < 0.35);

  std::vector<DimensionExplainRecord> parallel = nnls_explain(emb, predictors, plan, 2);
  for (std::size_t d = 0; d < records.size(); ++d) {
    CHECK(parallel[d].cv_pearson == records[d].cv_pearson);
    CHECK(parallel[d].selected_lambda == records[d].selected_lambda);
    CHECK(parallel[d].weights == records[d].weights);
  }
}

TEST_CASE("nnls explanation works on the shared-concept intersection") {
  // The predictor table covers more concepts than the embedding; the overlap
  // drives the fit. A completely disjoint table is an error.
  const int m = 40;
  Matrix f_wide = testsup::random_matrix(m + 10, 3, 0.0, 1.0, 514);
  ConceptVocabulary wide = make_synthetic_vocabulary(m + 10);
  FeatureTable predictors(wide, {"a", "b", "c"}, f_wide);

  Matrix e(m, 1);
  for (int i = 0; i < m; ++i) e(i, 0) = 3.0 * f_wide(i, 2);
  Embedding emb(make_synthetic_vocabulary(m), e);

  CrossValidationPlan plan;
  plan.outer_folds = 5;
  plan.inner_folds = 4;
  plan.lambda_grid = {1e-4, 1e-3};
  plan.seed = 515;

  std::vector<DimensionExplainRecord> records = nnls_explain(emb, predictors, plan);
  REQUIRE(records.size() == 1);
  CHECK(records[0].cv_pearson > 0.99);
  CHECK(records[0].weights(2) == Approx(3.0).margin(0.05));

  std::vector<std::string> other_names;
  for (int i = 0; i < 10; ++i) other_names.push_back("x" + std::to_string(i));
  Matrix f_other = testsup::random_matrix(10, 2, 0.0, 1.0, 516);
  FeatureTable disjoint(ConceptVocabulary(other_names), {"a", "b"}, f_other);
  CHECK_THROWS_AS(nnls_explain(emb, disjoint, plan), invalid_input);

  Matrix flat(m, 1);
  flat.setConstant(0.5);
  CHECK_THROWS_AS(nnls_explain(Embedding(emb.vocabulary(), flat), predictors, plan),
                  invalid_input);
}

TEST_CASE("typicality scores are centroid dot products") {
  ConceptVocabulary vocab = make_synthetic_vocabulary(6);
  Matrix x(6, 2);
  x << 1.0, 1.0,
       1.0, 1.0,
       1.0, 1.0,
       3.0, 3.0,
       0.1, 0.0,
       0.0, 0.0;
  Embedding emb(vocab, x);

  // Identical members score identically.
  std::vector<double> equal = typicality_scores(emb, {0, 1, 2});
  CHECK(equal[0] == equal[1]);
  CHECK(equal[1] == equal[2]);

  // A member scaled up along the centroid direction tops the list.
  std::vector<double> scores = typicality_scores(emb, {0, 1, 3});
  CHECK(scores[2] > scores[0]);
  CHECK(scores[2] == *std::max_element(scores.begin(), scores.end()));

  // Uniform rescaling of the embedding preserves the rank order.
  Embedding scaled(vocab, 3.0 * x);
  std::vector<double> scaled_scores = typicality_scores(scaled, {0, 1, 3});
  for (std::size_t a = 0; a < scores.size(); ++a) {
    for (std::size_t b = 0; b < scores.size(); ++b) {
      CHECK((scores[a] < scores[b]) == (scaled_scores[a] < scaled_scores[b]));
    }
  }

  CHECK_THROWS_AS(typicality_scores(emb, {0}), invalid_input);
  CHECK_THROWS_AS(typicality_scores(emb, {0, 0}), invalid_input);
  CHECK_THROWS_AS(typicality_scores(emb, {0, 99}), invalid_input);
}

TEST_CASE("one-hot category blocks classify perfectly") {
  // Three categories on disjoint axes: nearest neighbor is always in-category.
  const int per = 4;
  Matrix x = Matrix::Zero(3 * per, 3);
  CategoryLabeling labels;
  Rng rng(517);
  const char* names[3] = {"bird", "tool", "fruit"};
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < per; ++i) {
      const int row = c * per + i;
      x(row, c) = 0.5 + rng.next_unit();
      labels.label_of[row] = names[c];
    }
  }
  Embedding emb(make_synthetic_vocabulary(3 * per), x);
  NnCategoryResult result = nn_category_accuracy(emb, labels);
  CHECK(result.accuracy == 1.0);
  CHECK(result.excluded_zero_norm.empty());

  // Cosine similarity ignores per-vector positive rescaling.
  Matrix rescaled = x;
  for (int i = 0; i < rescaled.rows(); ++i) rescaled.row(i) *= 0.2 + 4.0 * rng.next_unit();
  NnCategoryResult same = nn_category_accuracy(Embedding(emb.vocabulary(), rescaled), labels);
  CHECK(same.accuracy == 1.0);
}

TEST_CASE("shuffled labels on structureless vectors score at chance") {
  const int m = 120, k = 4;
  Embedding emb = random_embedding(m, 6, 518);
  CategoryLabeling labels;
  for (int i = 0; i < m; ++i) labels.label_of[i] = "g" + std::to_string(i % k);
  NnCategoryResult result = nn_category_accuracy(emb, labels);
  // Binomial(120, 1/4): 3 sigma = 0.119.
  CHECK(std::abs(result.accuracy - 0.25) <= 0.12);
}

TEST_CASE("zero-norm vectors are excluded from classification") {
  Matrix x(5, 2);
  x << 1.0, 0.0,
       0.9, 0.1,
       0.0, 1.0,
       0.1, 0.9,
       0.0, 0.0;
  CategoryLabeling labels;
  labels.label_of[0] = "a";
  labels.label_of[1] = "a";
  labels.label_of[2] = "b";
  labels.label_of[3] = "b";
  labels.label_of[4] = "a";  // zero vector: reported, not classified
  Embedding emb(make_synthetic_vocabulary(5), x);
  NnCategoryResult result = nn_category_accuracy(emb, labels);
  CHECK(result.excluded_zero_norm == std::vector<int>{4});
  CHECK(result.accuracy == 1.0);

  CategoryLabeling lonely;
  lonely.label_of[0] = "a";
  lonely.label_of[1] = "b";
  lonely.label_of[2] = "b";
  CHECK_THROWS_AS(nn_category_accuracy(emb, lonely), invalid_input);

  Matrix zeros = Matrix::Zero(5, 2);
  CHECK_THROWS_AS(nn_category_accuracy(Embedding(emb.vocabulary(), zeros), labels),
                  numeric_error);
}

TEST_CASE("category and score files parse and validate") {
  auto dir = testsup::fresh_dir("label-io");
  ConceptVocabulary vocab({"ant", "bee", "cat"});

  const std::string labels_path = (dir / "labels.tsv").string();
  testsup::write_file(labels_path, "# labels\nant\tinsect\nbee\tinsect\ncat\tmammal\n");
  CategoryLabeling labels = load_category_labels(labels_path, vocab);
  CHECK(labels.label_of.at(0) == "insect");
  CHECK(labels.label_of.at(2) == "mammal");
  CHECK(labels.groups().at("insect") == std::vector<int>{0, 1});

  testsup::write_file(labels_path, "ant\tinsect\nant\tmammal\n");
  CHECK_THROWS_AS(load_category_labels(labels_path, vocab), invalid_input);
  testsup::write_file(labels_path, "dog\tmammal\n");
  CHECK_THROWS_AS(load_category_labels(labels_path, vocab), invalid_input);

  const std::string scores_path = (dir / "scores.tsv").string();
  testsup::write_file(scores_path, "ant\t0.25\ncat\t-1.5\n");
  std::map<int, double> scores = load_score_table(scores_path, vocab);
  CHECK(scores.at(0) == 0.25);
  CHECK(scores.at(2) == -1.5);
  CHECK(scores.count(1) == 0);

  testsup::write_file(scores_path, "ant\tnot-a-number\n");
  CHECK_THROWS_AS(load_score_table(scores_path, vocab), invalid_input);
}
