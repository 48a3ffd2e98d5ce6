/// @file  types.hpp
/// @brief Core domain types: vocabulary, triplet judgments, embeddings,
///        training configuration, similarity matrices, feature tables.
///
/// All types are immutable after construction and safe to share read-only
/// across threads. Invariants are checked at construction time.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace spose {

/// Error categories. The CLI maps these onto distinct exit codes:
/// invalid_input -> 2, numeric_error -> 3, io_error -> 4.
struct invalid_input : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Row-major so concept vectors (rows) are contiguous in memory.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Ordered list of unique concept names; position in the list is the index.
class ConceptVocabulary {
 public:
  ConceptVocabulary() = default;

  explicit ConceptVocabulary(std::vector<std::string> names) : names_(std::move(names)) {
    index_by_name_.reserve(names_.size());
    for (std::size_t i = 0; i < names_.size(); ++i) {
      const std::string& name = names_[i];
      if (name.empty()) {
        throw invalid_input("vocabulary: empty concept name at index " + std::to_string(i));
      }
      if (name.find('\t') != std::string::npos || name.find('\n') != std::string::npos) {
        throw invalid_input("vocabulary: concept name contains tab or newline: '" + name + "'");
      }
      if (!index_by_name_.emplace(name, static_cast<int>(i)).second) {
        throw invalid_input("vocabulary: duplicate concept name '" + name + "'");
      }
    }
  }

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int index) const { return names_.at(static_cast<std::size_t>(index)); }
  const std::vector<std::string>& names() const { return names_; }

  bool contains(const std::string& name) const { return index_by_name_.count(name) != 0; }

  /// Index of a name; throws if absent.
  int index_of(const std::string& name) const {
    auto it = index_by_name_.find(name);
    if (it == index_by_name_.end()) {
      throw invalid_input("vocabulary: unknown concept name '" + name + "'");
    }
    return it->second;
  }

  bool operator==(const ConceptVocabulary& other) const { return names_ == other.names_; }
  bool operator!=(const ConceptVocabulary& other) const { return !(*this == other); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_by_name_;
};

/// The pair of a triplet judged most similar, relative to the canonically
/// sorted triple (a < b < c).
enum class PairChoice : int {
  kFirstSecond = 0,  ///< pair (a, b)
  kFirstThird = 1,   ///< pair (a, c)
  kSecondThird = 2,  ///< pair (b, c)
};

/// One odd-one-out observation: three concept indices (kept sorted ascending)
/// and the pair chosen as most similar.
struct TripletJudgment {
  int i1 = 0;
  int i2 = 0;
  int i3 = 0;
  PairChoice choice = PairChoice::kFirstSecond;

  /// Builds a canonical judgment from a triple as listed plus the chosen-pair
  /// slot in listed order (0 = first/second, 1 = first/third, 2 = second/third).
  /// Indices are sorted ascending and the choice remapped accordingly.
  static TripletJudgment canonical(int a, int b, int c, int listed_choice) {
    if (a == b || a == c || b == c) {
      throw invalid_input("triplet: duplicate index in (" + std::to_string(a) + ", " +
                          std::to_string(b) + ", " + std::to_string(c) + ")");
    }
    if (a < 0 || b < 0 || c < 0) {
      throw invalid_input("triplet: negative concept index");
    }
    if (listed_choice < 0 || listed_choice > 2) {
      throw invalid_input("triplet: choice must be 0, 1, or 2 (got " +
                          std::to_string(listed_choice) + ")");
    }
    int chosen_x = (listed_choice == 2) ? b : a;
    int chosen_y = (listed_choice == 0) ? b : c;

    int s1 = a, s2 = b, s3 = c;
    if (s1 > s2) std::swap(s1, s2);
    if (s2 > s3) std::swap(s2, s3);
    if (s1 > s2) std::swap(s1, s2);

    int lo = std::min(chosen_x, chosen_y);
    int hi = std::max(chosen_x, chosen_y);
    PairChoice choice;
    if (lo == s1 && hi == s2) {
      choice = PairChoice::kFirstSecond;
    } else if (lo == s1 && hi == s3) {
      choice = PairChoice::kFirstThird;
    } else {
      choice = PairChoice::kSecondThird;
    }
    return TripletJudgment{s1, s2, s3, choice};
  }

  bool operator==(const TripletJudgment& o) const {
    return i1 == o.i1 && i2 == o.i2 && i3 == o.i3 && choice == o.choice;
  }
};

/// A vocabulary plus an ordered list of judgments against it. Judgment order
/// is preserved exactly as loaded; deterministic splits depend on it.
struct TripletDataset {
  ConceptVocabulary vocabulary;
  std::vector<TripletJudgment> judgments;

  TripletDataset() = default;
  TripletDataset(ConceptVocabulary vocab, std::vector<TripletJudgment> js)
      : vocabulary(std::move(vocab)), judgments(std::move(js)) {
    const int m = vocabulary.size();
    for (std::size_t k = 0; k < judgments.size(); ++k) {
      const TripletJudgment& j = judgments[k];
      if (j.i3 >= m) {
        throw invalid_input("dataset: judgment " + std::to_string(k) + " references index " +
                            std::to_string(j.i3) + " outside vocabulary of size " +
                            std::to_string(m));
      }
      if (!(j.i1 < j.i2 && j.i2 < j.i3) || j.i1 < 0) {
        throw invalid_input("dataset: judgment " + std::to_string(k) + " is not canonical");
      }
    }
  }

  std::size_t size() const { return judgments.size(); }
};

/// Non-negative m x p matrix of concept vectors (row = concept, column =
/// learned dimension), tied to a vocabulary.
class Embedding {
 public:
  Embedding() = default;

  Embedding(ConceptVocabulary vocab, Matrix values)
      : vocabulary_(std::move(vocab)), values_(std::move(values)) {
    if (values_.rows() != vocabulary_.size()) {
      throw invalid_input("embedding: row count " + std::to_string(values_.rows()) +
                          " does not match vocabulary size " +
                          std::to_string(vocabulary_.size()));
    }
    if (!values_.allFinite()) {
      throw numeric_error("embedding: non-finite entry");
    }
    if (values_.size() > 0 && values_.minCoeff() < 0.0) {
      throw invalid_input("embedding: negative entry");
    }
  }

  const ConceptVocabulary& vocabulary() const { return vocabulary_; }
  const Matrix& values() const { return values_; }
  int concepts() const { return static_cast<int>(values_.rows()); }
  int dims() const { return static_cast<int>(values_.cols()); }

 private:
  ConceptVocabulary vocabulary_;
  Matrix values_;
};

/// Reorders an embedding's rows to match the given vocabulary (by name).
/// Every name in `vocab` must be present in the embedding.
inline Embedding align_to_vocabulary(const Embedding& emb, const ConceptVocabulary& vocab) {
  if (emb.vocabulary() == vocab) return emb;
  Matrix values(vocab.size(), emb.dims());
  for (int i = 0; i < vocab.size(); ++i) {
    values.row(i) = emb.values().row(emb.vocabulary().index_of(vocab.name(i)));
  }
  return Embedding(vocab, std::move(values));
}

/// All training hyperparameters.
struct TrainConfig {
  std::vector<double> lambda_grid;
  int epochs = 1000;
  double learning_rate = 0.001;
  int init_dims = 90;
  double prune_threshold = 0.02;
  double split_fraction = 0.9;
  int batch_size = 100;
  std::uint64_t seed = 0;

  void validate() const {
    if (lambda_grid.empty()) throw invalid_input("config: lambda grid is empty");
    for (double l : lambda_grid) {
      if (!(l >= 0.0)) throw invalid_input("config: lambda must be >= 0");
    }
    if (epochs < 0) throw invalid_input("config: epochs must be >= 0");
    if (!(learning_rate > 0.0)) throw invalid_input("config: learning rate must be > 0");
    if (init_dims < 1) throw invalid_input("config: init dims must be >= 1");
    if (!(prune_threshold >= 0.0)) throw invalid_input("config: prune threshold must be >= 0");
    if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
      throw invalid_input("config: split fraction must be in (0, 1)");
    }
    if (batch_size < 1) throw invalid_input("config: batch size must be >= 1");
  }
};

/// Symmetric matrix of pairwise similarity values over a (sub-)vocabulary.
/// Entries may be undefined (flagged explicitly, never imputed); the diagonal
/// is undefined by convention.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;

  explicit SimilarityMatrix(ConceptVocabulary vocab)
      : vocabulary_(std::move(vocab)),
        values_(Eigen::MatrixXd::Constant(vocabulary_.size(), vocabulary_.size(),
                                          std::numeric_limits<double>::quiet_NaN())),
        defined_(Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
            vocabulary_.size(), vocabulary_.size(), false)) {}

  const ConceptVocabulary& vocabulary() const { return vocabulary_; }
  int size() const { return vocabulary_.size(); }

  /// Sets both (i, j) and (j, i).
  void set(int i, int j, double value) {
    check_range(i, j);
    values_(i, j) = value;
    values_(j, i) = value;
    defined_(i, j) = true;
    defined_(j, i) = true;
  }

  bool is_defined(int i, int j) const {
    check_range(i, j);
    return defined_(i, j);
  }

  double value(int i, int j) const {
    check_range(i, j);
    if (!defined_(i, j)) {
      throw invalid_input("similarity matrix: entry (" + std::to_string(i) + ", " +
                          std::to_string(j) + ") is undefined");
    }
    return values_(i, j);
  }

 private:
  void check_range(int i, int j) const {
    if (i < 0 || j < 0 || i >= size() || j >= size()) {
      throw invalid_input("similarity matrix: index out of range");
    }
  }

  ConceptVocabulary vocabulary_;
  Eigen::MatrixXd values_;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> defined_;
};

/// Per-concept external feature matrix (binary or real), with named columns.
class FeatureTable {
 public:
  FeatureTable() = default;

  FeatureTable(ConceptVocabulary vocab, std::vector<std::string> feature_names, Matrix values)
      : vocabulary_(std::move(vocab)),
        feature_names_(std::move(feature_names)),
        values_(std::move(values)) {
    if (values_.rows() != vocabulary_.size()) {
      throw invalid_input("feature table: row count does not match vocabulary size");
    }
    if (values_.cols() != static_cast<Eigen::Index>(feature_names_.size())) {
      throw invalid_input("feature table: column count does not match feature-name count");
    }
    if (!values_.allFinite()) {
      throw numeric_error("feature table: non-finite entry");
    }
    std::unordered_map<std::string, int> seen;
    for (std::size_t i = 0; i < feature_names_.size(); ++i) {
      if (feature_names_[i].empty()) throw invalid_input("feature table: empty feature name");
      if (!seen.emplace(feature_names_[i], 1).second) {
        throw invalid_input("feature table: duplicate feature name '" + feature_names_[i] + "'");
      }
    }
  }

  const ConceptVocabulary& vocabulary() const { return vocabulary_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const Matrix& values() const { return values_; }
  int concepts() const { return static_cast<int>(values_.rows()); }
  int features() const { return static_cast<int>(values_.cols()); }

 private:
  ConceptVocabulary vocabulary_;
  std::vector<std::string> feature_names_;
  Matrix values_;
};

}  // namespace spose
