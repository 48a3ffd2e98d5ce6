/// @file  evaluate.hpp
/// @brief Held-out evaluation: prediction accuracy, Bayes ceiling from
///        repeated triplets, and empirical vs model similarity matrices.

#pragma once

#include "spose/io.hpp"
#include "spose/model.hpp"
#include "spose/stats.hpp"
#include "spose/types.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace spose {

/// Outcome counts for one unique triple (indices sorted ascending).
struct RepeatedTriple {
  int i1, i2, i3;
  long long c12, c13, c23;

  long long total() const { return c12 + c13 + c23; }
};

/// Aggregated outcome counts per unique triple.
struct RepeatedTripletSet {
  std::vector<RepeatedTriple> triples;

  RepeatedTripletSet() = default;

  explicit RepeatedTripletSet(std::vector<RepeatedTriple> ts) : triples(std::move(ts)) {
    for (const RepeatedTriple& t : triples) {
      if (!(t.i1 < t.i2 && t.i2 < t.i3) || t.i1 < 0) {
        throw invalid_input("repeated triple indices must be distinct, ascending, non-negative");
      }
      if (t.c12 < 0 || t.c13 < 0 || t.c23 < 0) {
        throw invalid_input("repeated triple counts must be non-negative");
      }
      if (t.total() < 1) throw invalid_input("repeated triple needs at least one judgment");
    }
  }
};

/// Collapses individual judgments into per-triple outcome counts. Triples are
/// emitted in ascending index order.
inline RepeatedTripletSet aggregate_repeats(const TripletDataset& data) {
  std::map<std::array<int, 3>, std::array<long long, 3>> counts;
  for (const TripletJudgment& j : data.judgments) {
    counts[{j.i1, j.i2, j.i3}][static_cast<std::size_t>(j.choice)] += 1;
  }
  std::vector<RepeatedTriple> triples;
  triples.reserve(counts.size());
  for (const auto& [key, c] : counts) {
    triples.push_back(RepeatedTriple{key[0], key[1], key[2], c[0], c[1], c[2]});
  }
  return RepeatedTripletSet(std::move(triples));
}

/// Majority-vote dataset: one judgment per triple with the most frequent
/// outcome; count ties resolved by pair order (c12 before c13 before c23).
inline TripletDataset majority_outcomes(const RepeatedTripletSet& repeats,
                                        const ConceptVocabulary& vocab) {
  std::vector<TripletJudgment> judgments;
  judgments.reserve(repeats.triples.size());
  for (const RepeatedTriple& t : repeats.triples) {
    PairChoice choice = PairChoice::kFirstSecond;
    long long best = t.c12;
    if (t.c13 > best) {
      best = t.c13;
      choice = PairChoice::kFirstThird;
    }
    if (t.c23 > best) {
      choice = PairChoice::kSecondThird;
    }
    judgments.push_back(TripletJudgment{t.i1, t.i2, t.i3, choice});
  }
  return TripletDataset(vocab, std::move(judgments));
}

// ---------------------------------------------------------------------------
// Prediction
// ---------------------------------------------------------------------------

/// Highest-probability pair for a triplet; ties broken by pair-order priority
/// (first/second over first/third over second/third). Since softmax is
/// monotone in the similarities, the argmax is taken over raw similarities.
inline PairChoice predict_choice(const Embedding& emb, int i, int j, int k) {
  const int m = emb.concepts();
  for (int idx : {i, j, k}) {
    if (idx < 0 || idx >= m) throw invalid_input("predict_choice index out of range");
  }
  if (i == j || i == k || j == k) throw invalid_input("predict_choice indices must be distinct");
  const Matrix& x = emb.values();
  const double s12 = similarity(x, i, j);
  const double s13 = similarity(x, i, k);
  const double s23 = similarity(x, j, k);
  if (s12 >= s13 && s12 >= s23) return PairChoice::kFirstSecond;
  if (s13 >= s23) return PairChoice::kFirstThird;
  return PairChoice::kSecondThird;
}

/// Fraction of judgments whose recorded choice matches predict_choice.
inline double accuracy(const Embedding& emb, const TripletDataset& data) {
  if (data.judgments.empty()) throw invalid_input("accuracy of an empty dataset");
  if (emb.vocabulary() != data.vocabulary) {
    throw invalid_input("embedding and dataset vocabularies differ");
  }
  long long hits = 0;
  for (const TripletJudgment& j : data.judgments) {
    if (predict_choice(emb, j.i1, j.i2, j.i3) == j.choice) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.judgments.size());
}

/// Best achievable accuracy: mean over triples of the majority outcome's
/// empirical probability, max(c12,c13,c23)/total.
inline double bayes_ceiling(const RepeatedTripletSet& repeats) {
  if (repeats.triples.empty()) throw invalid_input("bayes ceiling of an empty set");
  double sum = 0.0;
  for (const RepeatedTriple& t : repeats.triples) {
    const long long best = std::max(t.c12, std::max(t.c13, t.c23));
    sum += static_cast<double>(best) / static_cast<double>(t.total());
  }
  return sum / static_cast<double>(repeats.triples.size());
}

// ---------------------------------------------------------------------------
// Similarity matrices
// ---------------------------------------------------------------------------

namespace detail {

inline void check_subset(const std::vector<int>& subset, int m, const char* what) {
  if (subset.size() < 2) throw invalid_input(std::string(what) + " needs a subset of size >= 2");
  std::vector<int> sorted = subset;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] < 0 || sorted[i] >= m) {
      throw invalid_input(std::string(what) + ": subset index out of range");
    }
    if (i > 0 && sorted[i] == sorted[i - 1]) {
      throw invalid_input(std::string(what) + ": subset indices must be distinct");
    }
  }
}

inline ConceptVocabulary subset_vocabulary(const ConceptVocabulary& vocab,
                                           const std::vector<int>& subset) {
  std::vector<std::string> names;
  names.reserve(subset.size());
  for (int idx : subset) names.push_back(vocab.name(idx));
  return ConceptVocabulary(std::move(names));
}

}  // namespace detail

/// Empirical pairwise similarity: among judgments containing both A and B,
/// the fraction that grouped A with B. Pairs that never co-occur are left
/// undefined. Rows and columns follow the subset order.
inline SimilarityMatrix empirical_similarity(const TripletDataset& data,
                                             const std::vector<int>& subset) {
  const int m = data.vocabulary.size();
  detail::check_subset(subset, m, "empirical_similarity");
  const int n = static_cast<int>(subset.size());
  std::vector<int> position(static_cast<std::size_t>(m), -1);
  for (int s = 0; s < n; ++s) position[static_cast<std::size_t>(subset[static_cast<std::size_t>(s)])] = s;

  Eigen::MatrixXd num = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd den = Eigen::MatrixXd::Zero(n, n);
  auto tally = [&](int a, int b, bool chosen) {
    const int pa = position[static_cast<std::size_t>(a)];
    const int pb = position[static_cast<std::size_t>(b)];
    if (pa < 0 || pb < 0) return;
    den(pa, pb) += 1.0;
    den(pb, pa) += 1.0;
    if (chosen) {
      num(pa, pb) += 1.0;
      num(pb, pa) += 1.0;
    }
  };
  for (const TripletJudgment& j : data.judgments) {
    tally(j.i1, j.i2, j.choice == PairChoice::kFirstSecond);
    tally(j.i1, j.i3, j.choice == PairChoice::kFirstThird);
    tally(j.i2, j.i3, j.choice == PairChoice::kSecondThird);
  }

  SimilarityMatrix sim{detail::subset_vocabulary(data.vocabulary, subset)};
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (den(a, b) > 0.0) sim.set(a, b, num(a, b) / den(a, b));
    }
  }
  return sim;
}

/// Model-expected pairwise similarity: S_AB is the mean over pool concepts C
/// (skipping C equal to A or B) of the probability that pair (A,B) is chosen
/// from the triplet {A,B,C}.
inline SimilarityMatrix model_similarity(const Embedding& emb, const std::vector<int>& subset,
                                         const std::vector<int>& pool) {
  const int m = emb.concepts();
  detail::check_subset(subset, m, "model_similarity");
  for (int idx : pool) {
    if (idx < 0 || idx >= m) throw invalid_input("model_similarity: pool index out of range");
  }
  const int n = static_cast<int>(subset.size());
  const Matrix& x = emb.values();
  SimilarityMatrix sim{detail::subset_vocabulary(emb.vocabulary(), subset)};
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const int ia = subset[static_cast<std::size_t>(a)];
      const int ib = subset[static_cast<std::size_t>(b)];
      double sum = 0.0;
      long long used = 0;
      for (int ic : pool) {
        if (ic == ia || ic == ib) continue;
        const double sab = similarity(x, ia, ib);
        const double sac = similarity(x, ia, ic);
        const double sbc = similarity(x, ib, ic);
        sum += softmax3(sab, sac, sbc)[0];
        ++used;
      }
      if (used == 0) {
        throw invalid_input("model_similarity: empty effective pool for a pair");
      }
      sim.set(a, b, sum / static_cast<double>(used));
    }
  }
  return sim;
}

/// Pearson correlation over upper-triangle entries defined in both matrices.
inline double offdiag_pearson(const SimilarityMatrix& a, const SimilarityMatrix& b) {
  if (a.size() != b.size()) throw invalid_input("offdiag_pearson: matrices differ in size");
  std::vector<double> va, vb;
  for (int i = 0; i < a.size(); ++i) {
    for (int j = i + 1; j < a.size(); ++j) {
      if (a.is_defined(i, j) && b.is_defined(i, j)) {
        va.push_back(a.value(i, j));
        vb.push_back(b.value(i, j));
      }
    }
  }
  if (va.size() < 2) throw invalid_input("offdiag_pearson: fewer than 2 jointly defined entries");
  return pearson(va, vb);
}

// ---------------------------------------------------------------------------
// Counts file I/O
// ---------------------------------------------------------------------------

/// Counts file: `i1<TAB>i2<TAB>i3<TAB>c12<TAB>c13<TAB>c23`, `#` comments.
inline RepeatedTripletSet load_repeated_counts(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  std::vector<RepeatedTriple> triples;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = detail::split_tabs(line);
    if (fields.size() != 6) {
      throw detail::parse_error(path, line_no, "expected 6 tab-separated fields");
    }
    long long v[6];
    for (int f = 0; f < 6; ++f) v[f] = detail::parse_int(fields[static_cast<std::size_t>(f)], path, line_no);
    try {
      RepeatedTripletSet one({RepeatedTriple{static_cast<int>(v[0]), static_cast<int>(v[1]),
                                             static_cast<int>(v[2]), v[3], v[4], v[5]}});
      triples.push_back(one.triples.front());
    } catch (const invalid_input& e) {
      throw detail::parse_error(path, line_no, e.what());
    }
  }
  return RepeatedTripletSet(std::move(triples));
}

inline void save_repeated_counts(const RepeatedTripletSet& repeats, const std::string& path) {
  std::ofstream out = detail::open_output(path);
  for (const RepeatedTriple& t : repeats.triples) {
    out << t.i1 << '\t' << t.i2 << '\t' << t.i3 << '\t' << t.c12 << '\t' << t.c13 << '\t'
        << t.c23 << '\n';
  }
  detail::finish_output(out, path);
}

}  // namespace spose
