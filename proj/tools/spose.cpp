/// Command-line driver for the SPoSE pipeline. Subcommands cover synthetic
/// data generation, training, evaluation, and downstream analyses; every
/// stochastic stage draws from a single --seed, and commands that write an
/// output directory leave a manifest.json recording the configuration, input
/// digests, and timings.

#include "spose/spose.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double v) { return spose::format_double(v); }

/// Wall-clock per-stage timings for the manifest.
class Timings {
 public:
  template <typename Fn>
  auto run(const std::string& stage, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      record(stage, start);
    } else {
      auto result = fn();
      record(stage, start);
      return result;
    }
  }

  const json& as_json() const { return timings_; }

 private:
  void record(const std::string& stage, std::chrono::steady_clock::time_point start) {
    const auto elapsed = std::chrono::steady_clock::now() - start;
    timings_[stage] =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
  }

  json timings_ = json::object();
};

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw spose::io_error("cannot create directory '" + dir + "': " + ec.message());
}

/// Report text goes to the given file, or stdout when no path is set.
void emit_report(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out = spose::detail::open_output(out_path);
  out << text;
  spose::detail::finish_output(out, out_path);
}

/// Subset file: one concept name per line; indices returned in file order.
std::vector<int> load_subset(const std::string& path, const spose::ConceptVocabulary& vocab) {
  std::ifstream in = spose::detail::open_input(path);
  std::vector<int> subset;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    spose::detail::strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    try {
      subset.push_back(vocab.index_of(line));
    } catch (const spose::invalid_input& e) {
      throw spose::detail::parse_error(path, line_no, e.what());
    }
  }
  return subset;
}

std::vector<int> all_indices(int n) {
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

double median_of(std::vector<double> values) {
  if (values.empty()) throw spose::invalid_input("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

void write_manifest(const std::string& dir, const std::string& command, const json& config,
                    std::uint64_t seed, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs, const Timings& timings) {
  json manifest;
  manifest["tool"] = "spose";
  manifest["version"] = SPOSE_VERSION;
  manifest["command"] = command;
  manifest["seed"] = seed;
  manifest["config"] = config;
  json in_digests = json::object();
  for (const std::string& path : inputs) in_digests[path] = spose::file_digest(path);
  manifest["input_digests"] = in_digests;
  json out_digests = json::object();
  for (const std::string& path : outputs) out_digests[path] = spose::file_digest(path);
  manifest["output_digests"] = out_digests;
  manifest["timings_ms"] = timings.as_json();
  const std::string path = (fs::path(dir) / "manifest.json").string();
  std::ofstream out = spose::detail::open_output(path);
  out << manifest.dump(2) << '\n';
  spose::detail::finish_output(out, path);
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

struct GenerateArgs {
  int concepts = 1854;
  int dims = 49;
  double density = 14.0 / 49.0;
  double scale = 2.3;
  long long triplets = 0;
  int repeats = 1;
  std::uint64_t seed = 0;
  std::string out;
};

void run_generate(const GenerateArgs& args) {
  if (args.repeats < 1) throw spose::invalid_input("--repeats must be at least 1");
  if (args.triplets < 1) throw spose::invalid_input("--triplets must be at least 1");
  if (args.triplets % args.repeats != 0) {
    throw spose::invalid_input("--triplets (total judgments) must be divisible by --repeats");
  }
  const long long distinct = args.triplets / args.repeats;

  Timings timings;
  const spose::GroundTruth truth = timings.run("generate_truth", [&] {
    return spose::generate_ground_truth(args.concepts, args.dims, args.density, args.scale,
                                        args.seed);
  });
  const spose::TripletDataset data = timings.run("sample_triplets", [&] {
    return spose::sample_triplets(truth, distinct, args.seed, args.repeats);
  });

  ensure_dir(args.out);
  const std::string vocab_path = (fs::path(args.out) / "vocab.txt").string();
  const std::string truth_path = (fs::path(args.out) / "truth-embedding.tsv").string();
  const std::string triplet_path = (fs::path(args.out) / "triplets.tsv").string();
  timings.run("write", [&] {
    spose::save_vocabulary(truth.embedding.vocabulary(), vocab_path);
    spose::save_embedding(truth.embedding, truth_path);
    spose::save_triplets(data, triplet_path);
  });

  json config = {{"concepts", args.concepts},   {"dims", args.dims},
                 {"density", args.density},     {"scale", args.scale},
                 {"triplets", args.triplets},   {"repeats", args.repeats},
                 {"distinct_triples", distinct}};
  write_manifest(args.out, "generate", config, args.seed, {},
                 {vocab_path, truth_path, triplet_path}, timings);
  std::cout << "wrote " << vocab_path << ", " << truth_path << ", " << triplet_path << " ("
            << data.size() << " judgments over " << distinct << " distinct triples)\n";
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string triplets;
  std::string vocab;
  std::vector<double> lambda_grid;
  int epochs = 1000;
  double learning_rate = 0.001;
  int init_dims = 90;
  double prune_threshold = 0.02;
  double split_fraction = 0.9;
  int batch_size = 100;
  std::uint64_t seed = 0;
  std::string out;
  int jobs = 1;
};

std::vector<double> paper_lambda_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 15; ++i) grid.push_back(static_cast<double>(70 + 2 * i) / 10000.0);
  return grid;
}

void run_train(const TrainArgs& args) {
  Timings timings;
  const spose::ConceptVocabulary vocab =
      timings.run("load_vocab", [&] { return spose::load_vocabulary(args.vocab); });
  const spose::TripletDataset data =
      timings.run("load_triplets", [&] { return spose::load_triplets(args.triplets, vocab); });

  spose::TrainConfig config;
  config.lambda_grid = args.lambda_grid.empty() ? paper_lambda_grid() : args.lambda_grid;
  config.epochs = args.epochs;
  config.learning_rate = args.learning_rate;
  config.init_dims = args.init_dims;
  config.prune_threshold = args.prune_threshold;
  config.split_fraction = args.split_fraction;
  config.batch_size = args.batch_size;
  config.seed = args.seed;
  config.validate();

  const spose::TrainFullResult result =
      timings.run("train", [&] { return spose::train_full(data, config, args.jobs); });

  ensure_dir(args.out);
  const std::string emb_path = (fs::path(args.out) / "embedding.tsv").string();
  const std::string report_path = (fs::path(args.out) / "grid-report.tsv").string();
  const std::string columns_path = (fs::path(args.out) / "retained-columns.tsv").string();
  timings.run("write", [&] {
    spose::save_embedding(result.embedding, emb_path);
    spose::save_grid_report(result.report, report_path);
    std::ofstream out = spose::detail::open_output(columns_path);
    out << "new_index\toriginal_index\n";
    for (std::size_t f = 0; f < result.retained_columns.size(); ++f) {
      out << f << '\t' << result.retained_columns[f] << '\n';
    }
    spose::detail::finish_output(out, columns_path);
  });

  json config_json = {{"lambda_grid", config.lambda_grid},
                      {"epochs", config.epochs},
                      {"learning_rate", config.learning_rate},
                      {"init_dims", config.init_dims},
                      {"prune_threshold", config.prune_threshold},
                      {"split_fraction", config.split_fraction},
                      {"batch_size", config.batch_size},
                      {"jobs", args.jobs}};
  write_manifest(args.out, "train", config_json, args.seed, {args.triplets, args.vocab},
                 {emb_path, report_path, columns_path}, timings);
  std::cout << "selected_lambda\t" << fmt(result.report.selected_lambda) << "\n"
            << "retained_dims\t" << result.embedding.dims() << "\n"
            << "embedding\t" << emb_path << "\n";
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct AccuracyArgs {
  std::string embedding;
  std::string triplets;
  std::string vocab;
  std::string out;
};

void run_accuracy(const AccuracyArgs& args) {
  const spose::ConceptVocabulary vocab = spose::load_vocabulary(args.vocab);
  const spose::TripletDataset data = spose::load_triplets(args.triplets, vocab);
  const spose::Embedding emb =
      spose::align_to_vocabulary(spose::load_embedding(args.embedding), vocab);
  std::ostringstream report;
  report << "judgments\t" << data.size() << "\n"
         << "accuracy\t" << fmt(spose::accuracy(emb, data)) << "\n";
  emit_report(report.str(), args.out);
}

struct CeilingArgs {
  std::string counts;
  std::string triplets;
  std::string vocab;
  std::string out;
};

void run_ceiling(const CeilingArgs& args) {
  spose::RepeatedTripletSet repeats;
  if (!args.counts.empty()) {
    if (!args.triplets.empty()) {
      throw spose::invalid_input("pass either --counts or --triplets, not both");
    }
    repeats = spose::load_repeated_counts(args.counts);
  } else {
    if (args.triplets.empty() || args.vocab.empty()) {
      throw spose::invalid_input("need --counts, or --triplets with --vocab");
    }
    const spose::ConceptVocabulary vocab = spose::load_vocabulary(args.vocab);
    repeats = spose::aggregate_repeats(spose::load_triplets(args.triplets, vocab));
  }
  std::ostringstream report;
  report << "triples\t" << repeats.triples.size() << "\n"
         << "ceiling\t" << fmt(spose::bayes_ceiling(repeats)) << "\n";
  emit_report(report.str(), args.out);
}

struct SimMatrixArgs {
  std::string embedding;
  std::string triplets;
  std::string vocab;
  std::string subset;
  std::string pool = "subset";
  std::string out;
};

void run_simmatrix(const SimMatrixArgs& args) {
  spose::SimilarityMatrix sim;
  if (!args.embedding.empty()) {
    if (!args.triplets.empty()) {
      throw spose::invalid_input("pass either --embedding (model) or --triplets (empirical)");
    }
    const spose::Embedding emb = spose::load_embedding(args.embedding);
    const std::vector<int> subset = args.subset.empty()
                                        ? all_indices(emb.concepts())
                                        : load_subset(args.subset, emb.vocabulary());
    std::vector<int> pool;
    if (args.pool == "subset") {
      pool = subset;
    } else if (args.pool == "all") {
      pool = all_indices(emb.concepts());
    } else {
      throw spose::invalid_input("--pool must be 'subset' or 'all'");
    }
    sim = spose::model_similarity(emb, subset, pool);
  } else {
    if (args.triplets.empty() || args.vocab.empty()) {
      throw spose::invalid_input("need --embedding, or --triplets with --vocab");
    }
    const spose::ConceptVocabulary vocab = spose::load_vocabulary(args.vocab);
    const spose::TripletDataset data = spose::load_triplets(args.triplets, vocab);
    const std::vector<int> subset =
        args.subset.empty() ? all_indices(vocab.size()) : load_subset(args.subset, vocab);
    sim = spose::empirical_similarity(data, subset);
  }
  if (args.out.empty()) {
    const std::string tmp = "similarity.tsv";
    spose::save_similarity_matrix(sim, tmp);
    std::cout << "wrote " << tmp << "\n";
  } else {
    spose::save_similarity_matrix(sim, args.out);
  }
}

struct SimCorrArgs {
  std::string a;
  std::string b;
  std::string out;
};

void run_simcorr(const SimCorrArgs& args) {
  const spose::SimilarityMatrix a = spose::load_similarity_matrix(args.a);
  const spose::SimilarityMatrix b = spose::load_similarity_matrix(args.b);
  std::ostringstream report;
  report << "pearson\t" << fmt(spose::offdiag_pearson(a, b)) << "\n";
  emit_report(report.str(), args.out);
}

struct MatchDimsArgs {
  std::string a;
  std::string b;
  double threshold = 0.8;
  std::string out;
};

void run_match_dims(const MatchDimsArgs& args) {
  const spose::Embedding a = spose::load_embedding(args.a);
  const spose::Embedding b =
      spose::align_to_vocabulary(spose::load_embedding(args.b), a.vocabulary());
  const spose::DimensionMatchReport report = spose::match_dimensions(a, b, args.threshold);
  std::ostringstream text;
  text << "# spose-match-report threshold=" << fmt(report.threshold)
       << " count_above_threshold=" << report.count_above_threshold << "\n"
       << "dim_a\tdim_b\tpearson\n";
  for (const spose::MatchedPair& p : report.pairs) {
    text << p.dim_a << '\t' << p.dim_b << '\t' << fmt(p.correlation) << "\n";
  }
  for (int f : report.zero_variance_a) text << "# zero-variance a " << f << "\n";
  for (int f : report.zero_variance_b) text << "# zero-variance b " << f << "\n";
  emit_report(text.str(), args.out);
}

struct FilterArgs {
  std::string triplets;
  std::string vocab;
  std::string subset;
  std::string out;
  std::string excluded_out;
};

void run_filter_holdout(const FilterArgs& args) {
  const spose::ConceptVocabulary vocab = spose::load_vocabulary(args.vocab);
  const spose::TripletDataset data = spose::load_triplets(args.triplets, vocab);
  const std::vector<int> subset = load_subset(args.subset, vocab);
  std::vector<bool> in_subset(static_cast<std::size_t>(vocab.size()), false);
  for (int i : subset) in_subset[static_cast<std::size_t>(i)] = true;

  std::vector<spose::TripletJudgment> kept, excluded;
  for (const spose::TripletJudgment& j : data.judgments) {
    const int members = (in_subset[static_cast<std::size_t>(j.i1)] ? 1 : 0) +
                        (in_subset[static_cast<std::size_t>(j.i2)] ? 1 : 0) +
                        (in_subset[static_cast<std::size_t>(j.i3)] ? 1 : 0);
    (members >= 2 ? excluded : kept).push_back(j);
  }
  spose::save_triplets(spose::TripletDataset(vocab, kept), args.out);
  if (!args.excluded_out.empty()) {
    spose::save_triplets(spose::TripletDataset(vocab, excluded), args.excluded_out);
  }
  std::cout << "kept\t" << kept.size() << "\nexcluded\t" << excluded.size() << "\n";
}

// ---------------------------------------------------------------------------
// downstream
// ---------------------------------------------------------------------------

struct PredictFeaturesArgs {
  std::string embedding;
  std::string features;
  int outer_folds = 10;
  int inner_folds = 10;
  std::vector<double> grid;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out;
};

void run_predict_features(const PredictFeaturesArgs& args) {
  const spose::Embedding emb = spose::load_embedding(args.embedding);
  const spose::FeatureTable targets = spose::load_feature_table(args.features);
  spose::CrossValidationPlan plan;
  plan.outer_folds = args.outer_folds;
  plan.inner_folds = args.inner_folds;
  if (!args.grid.empty()) plan.lambda_grid = args.grid;
  plan.seed = args.seed;
  const std::vector<spose::FeatureAucRecord> records =
      spose::logistic_feature_auc(emb, targets, plan, args.jobs);

  std::ostringstream report;
  report << "feature\tauc\tconverged\n";
  std::vector<double> aucs;
  for (const spose::FeatureAucRecord& r : records) {
    report << r.feature << '\t' << fmt(r.auc) << '\t' << (r.converged ? 1 : 0) << "\n";
    aucs.push_back(r.auc);
  }
  report << "# median_auc " << fmt(median_of(aucs)) << "\n";
  emit_report(report.str(), args.out);
}

struct ExplainDimsArgs {
  std::string embedding;
  std::string features;
  int outer_folds = 10;
  int inner_folds = 10;
  std::vector<double> grid;
  std::uint64_t seed = 0;
  int top = 12;
  int jobs = 1;
  std::string out;
};

void run_explain_dims(const ExplainDimsArgs& args) {
  if (args.top < 1) throw spose::invalid_input("--top must be at least 1");
  const spose::Embedding emb = spose::load_embedding(args.embedding);
  const spose::FeatureTable predictors = spose::load_feature_table(args.features);
  spose::CrossValidationPlan plan;
  plan.outer_folds = args.outer_folds;
  plan.inner_folds = args.inner_folds;
  if (!args.grid.empty()) plan.lambda_grid = args.grid;
  plan.seed = args.seed;
  const std::vector<spose::DimensionExplainRecord> records =
      spose::nnls_explain(emb, predictors, plan, args.jobs);

  std::ostringstream report;
  report << "dim\tcv_pearson\tselected_lambda\tconverged\n";
  std::vector<double> correlations;
  for (const spose::DimensionExplainRecord& r : records) {
    report << r.dim << '\t' << fmt(r.cv_pearson) << '\t' << fmt(r.selected_lambda) << '\t'
           << (r.converged ? 1 : 0) << "\n";
    correlations.push_back(r.cv_pearson);
  }
  report << "# median_cv_pearson " << fmt(median_of(correlations)) << "\n";
  report << "# top weights per dimension (descending, raw predictor units)\n";
  report << "dim\tfeature\tweight\n";
  for (const spose::DimensionExplainRecord& r : records) {
    std::vector<int> order = all_indices(static_cast<int>(r.weights.size()));
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return r.weights(x) > r.weights(y); });
    const int shown = std::min<int>(args.top, static_cast<int>(order.size()));
    for (int k = 0; k < shown; ++k) {
      report << r.dim << '\t' << predictors.feature_names()[static_cast<std::size_t>(order[k])]
             << '\t' << fmt(r.weights(order[k])) << "\n";
    }
  }
  emit_report(report.str(), args.out);
}

struct TypicalityArgs {
  std::string embedding;
  std::string labels;
  std::string norms;
  std::string out;
};

void run_typicality(const TypicalityArgs& args) {
  const spose::Embedding emb = spose::load_embedding(args.embedding);
  const spose::CategoryLabeling labels =
      spose::load_category_labels(args.labels, emb.vocabulary());
  std::map<int, double> norms;
  if (!args.norms.empty()) norms = spose::load_score_table(args.norms, emb.vocabulary());

  std::ostringstream report;
  report << "category\tconcept\tscore\n";
  std::vector<double> per_category_r;
  std::ostringstream correlations;
  for (const auto& [category, members] : labels.groups()) {
    const std::vector<double> scores = spose::typicality_scores(emb, members);
    for (std::size_t i = 0; i < members.size(); ++i) {
      report << category << '\t' << emb.vocabulary().name(members[i]) << '\t' << fmt(scores[i])
             << "\n";
    }
    if (!norms.empty()) {
      std::vector<double> ours, theirs;
      for (std::size_t i = 0; i < members.size(); ++i) {
        auto it = norms.find(members[i]);
        if (it != norms.end()) {
          ours.push_back(scores[i]);
          theirs.push_back(it->second);
        }
      }
      if (ours.size() >= 2) {
        const double r = spose::pearson(ours, theirs);
        per_category_r.push_back(r);
        correlations << "# norm_r " << category << ' ' << fmt(r) << "\n";
      } else {
        correlations << "# norm_r " << category << " undefined\n";
      }
    }
  }
  report << correlations.str();
  if (!per_category_r.empty()) {
    report << "# median_norm_r " << fmt(median_of(per_category_r)) << "\n";
  }
  emit_report(report.str(), args.out);
}

struct ClassifyArgs {
  std::string embedding;
  std::string labels;
  std::string out;
};

void run_classify(const ClassifyArgs& args) {
  const spose::Embedding emb = spose::load_embedding(args.embedding);
  const spose::CategoryLabeling labels =
      spose::load_category_labels(args.labels, emb.vocabulary());
  const spose::NnCategoryResult result = spose::nn_category_accuracy(emb, labels);
  std::ostringstream report;
  report << "labeled\t" << labels.label_of.size() << "\n"
         << "excluded_zero_norm\t" << result.excluded_zero_norm.size() << "\n"
         << "accuracy\t" << fmt(result.accuracy) << "\n";
  for (int i : result.excluded_zero_norm) {
    report << "# excluded " << emb.vocabulary().name(i) << "\n";
  }
  emit_report(report.str(), args.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SPoSE: sparse positive embeddings from odd-one-out triplet judgments"};
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", std::string(SPOSE_VERSION));
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file (key=value; [subcommand] sections)");

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand(
      "generate", "Generate a synthetic ground truth and sampled triplet judgments");
  generate->add_option("--concepts", gen.concepts, "Number of concepts");
  generate->add_option("--dims", gen.dims, "Ground-truth dimensions");
  generate->add_option("--density", gen.density, "Probability of a nonzero entry");
  generate->add_option("--scale", gen.scale, "Upper bound of nonzero entries");
  generate->add_option("--triplets", gen.triplets, "Total judgments to sample")->required();
  generate->add_option("--repeats", gen.repeats, "Judgments per distinct triple");
  generate->add_option("--seed", gen.seed, "Root seed");
  generate->add_option("--out", gen.out, "Output directory")->required();
  generate->callback([&] { run_generate(gen); });

  TrainArgs train;
  CLI::App* train_cmd =
      app.add_subcommand("train", "Fit an embedding: grid search, training, pruning");
  train_cmd->add_option("--triplets", train.triplets, "Triplet judgment file")->required();
  train_cmd->add_option("--vocab", train.vocab, "Vocabulary file")->required();
  train_cmd->add_option("--lambda-grid", train.lambda_grid,
                        "Comma-separated penalty grid (default 0.0070..0.0100 step 0.0002)")
      ->delimiter(',');
  train_cmd->add_option("--epochs", train.epochs, "Training epochs");
  train_cmd->add_option("--lr", train.learning_rate, "Adam learning rate");
  train_cmd->add_option("--init-dims", train.init_dims, "Initial dimensions before pruning");
  train_cmd->add_option("--prune-threshold", train.prune_threshold,
                        "Minimum mean column value kept");
  train_cmd->add_option("--split", train.split_fraction, "Training share of the split");
  train_cmd->add_option("--batch", train.batch_size, "Mini-batch size");
  train_cmd->add_option("--seed", train.seed, "Root seed");
  train_cmd->add_option("--jobs", train.jobs, "Parallel grid-search workers");
  train_cmd->add_option("--out", train.out, "Output directory")->required();
  train_cmd->callback([&] { run_train(train); });

  CLI::App* evaluate = app.add_subcommand("evaluate", "Held-out evaluation tools");
  evaluate->require_subcommand(1);

  AccuracyArgs acc;
  CLI::App* acc_cmd = evaluate->add_subcommand("accuracy", "Prediction accuracy on judgments");
  acc_cmd->add_option("--embedding", acc.embedding, "Embedding file")->required();
  acc_cmd->add_option("--triplets", acc.triplets, "Triplet judgment file")->required();
  acc_cmd->add_option("--vocab", acc.vocab, "Vocabulary file")->required();
  acc_cmd->add_option("--out", acc.out, "Report file (default stdout)");
  acc_cmd->callback([&] { run_accuracy(acc); });

  CeilingArgs ceiling;
  CLI::App* ceiling_cmd =
      evaluate->add_subcommand("ceiling", "Bayes ceiling from repeated judgments");
  ceiling_cmd->add_option("--counts", ceiling.counts,
                          "Counts file: i1 i2 i3 c12 c13 c23 (tab-separated)");
  ceiling_cmd->add_option("--triplets", ceiling.triplets, "Raw judgments to aggregate");
  ceiling_cmd->add_option("--vocab", ceiling.vocab, "Vocabulary for --triplets");
  ceiling_cmd->add_option("--out", ceiling.out, "Report file (default stdout)");
  ceiling_cmd->callback([&] { run_ceiling(ceiling); });

  SimMatrixArgs simmatrix;
  CLI::App* simmatrix_cmd =
      evaluate->add_subcommand("simmatrix", "Model or empirical similarity matrix");
  simmatrix_cmd->add_option("--embedding", simmatrix.embedding, "Embedding file (model matrix)");
  simmatrix_cmd->add_option("--triplets", simmatrix.triplets, "Judgments (empirical matrix)");
  simmatrix_cmd->add_option("--vocab", simmatrix.vocab, "Vocabulary for --triplets");
  simmatrix_cmd->add_option("--subset", simmatrix.subset, "Concept-name file (default: all)");
  simmatrix_cmd->add_option("--pool", simmatrix.pool, "Third-concept pool: subset|all");
  simmatrix_cmd->add_option("--out", simmatrix.out, "Matrix file (default similarity.tsv)");
  simmatrix_cmd->callback([&] { run_simmatrix(simmatrix); });

  SimCorrArgs simcorr;
  CLI::App* simcorr_cmd =
      evaluate->add_subcommand("simcorr", "Pearson correlation of two similarity matrices");
  simcorr_cmd->add_option("--a", simcorr.a, "First matrix file")->required();
  simcorr_cmd->add_option("--b", simcorr.b, "Second matrix file")->required();
  simcorr_cmd->add_option("--out", simcorr.out, "Report file (default stdout)");
  simcorr_cmd->callback([&] { run_simcorr(simcorr); });

  MatchDimsArgs match;
  CLI::App* match_cmd =
      evaluate->add_subcommand("match-dims", "Greedy dimension matching between two embeddings");
  match_cmd->add_option("--a", match.a, "First embedding")->required();
  match_cmd->add_option("--b", match.b, "Second embedding")->required();
  match_cmd->add_option("--threshold", match.threshold, "Correlation threshold to count");
  match_cmd->add_option("--out", match.out, "Report file (default stdout)");
  match_cmd->callback([&] { run_match_dims(match); });

  FilterArgs filter;
  CLI::App* filter_cmd = evaluate->add_subcommand(
      "filter-holdout", "Drop judgments containing two or more subset concepts");
  filter_cmd->add_option("--triplets", filter.triplets, "Triplet judgment file")->required();
  filter_cmd->add_option("--vocab", filter.vocab, "Vocabulary file")->required();
  filter_cmd->add_option("--subset", filter.subset, "Concept-name file")->required();
  filter_cmd->add_option("--out", filter.out, "Kept judgments file")->required();
  filter_cmd->add_option("--excluded-out", filter.excluded_out,
                         "Optional file for the dropped judgments");
  filter_cmd->callback([&] { run_filter_holdout(filter); });

  CLI::App* downstream = app.add_subcommand("downstream", "Analyses of a learned embedding");
  downstream->require_subcommand(1);

  PredictFeaturesArgs predict;
  CLI::App* predict_cmd = downstream->add_subcommand(
      "predict-features", "Nested-CV logistic regression AUC per binary feature");
  predict_cmd->add_option("--embedding", predict.embedding, "Embedding file")->required();
  predict_cmd->add_option("--features", predict.features, "Binary feature table")->required();
  predict_cmd->add_option("--outer", predict.outer_folds, "Outer folds");
  predict_cmd->add_option("--inner", predict.inner_folds, "Inner folds");
  predict_cmd->add_option("--grid", predict.grid, "Comma-separated penalty grid")->delimiter(',');
  predict_cmd->add_option("--seed", predict.seed, "Fold-assignment seed");
  predict_cmd->add_option("--jobs", predict.jobs, "Parallel workers over features");
  predict_cmd->add_option("--out", predict.out, "Report file (default stdout)");
  predict_cmd->callback([&] { run_predict_features(predict); });

  ExplainDimsArgs explain;
  CLI::App* explain_cmd = downstream->add_subcommand(
      "explain-dims", "NNLS regression of each dimension onto predictor features");
  explain_cmd->add_option("--embedding", explain.embedding, "Embedding file")->required();
  explain_cmd->add_option("--features", explain.features, "Predictor feature table")->required();
  explain_cmd->add_option("--outer", explain.outer_folds, "Outer folds");
  explain_cmd->add_option("--inner", explain.inner_folds, "Inner folds");
  explain_cmd->add_option("--grid", explain.grid, "Comma-separated penalty grid")->delimiter(',');
  explain_cmd->add_option("--seed", explain.seed, "Fold-assignment seed");
  explain_cmd->add_option("--top", explain.top, "Weights reported per dimension");
  explain_cmd->add_option("--jobs", explain.jobs, "Parallel workers over dimensions");
  explain_cmd->add_option("--out", explain.out, "Report file (default stdout)");
  explain_cmd->callback([&] { run_explain_dims(explain); });

  TypicalityArgs typicality;
  CLI::App* typicality_cmd = downstream->add_subcommand(
      "typicality", "Centroid dot-product typicality per labeled category");
  typicality_cmd->add_option("--embedding", typicality.embedding, "Embedding file")->required();
  typicality_cmd->add_option("--labels", typicality.labels, "Category label file")->required();
  typicality_cmd->add_option("--norms", typicality.norms,
                             "Optional external score file for correlations");
  typicality_cmd->add_option("--out", typicality.out, "Report file (default stdout)");
  typicality_cmd->callback([&] { run_typicality(typicality); });

  ClassifyArgs classify;
  CLI::App* classify_cmd = downstream->add_subcommand(
      "classify", "Leave-one-out nearest-neighbor category accuracy");
  classify_cmd->add_option("--embedding", classify.embedding, "Embedding file")->required();
  classify_cmd->add_option("--labels", classify.labels, "Category label file")->required();
  classify_cmd->add_option("--out", classify.out, "Report file (default stdout)");
  classify_cmd->callback([&] { run_classify(classify); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage problems are input errors
  } catch (const spose::invalid_input& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const spose::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const spose::io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
