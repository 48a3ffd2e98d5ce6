/// @file  synthetic.hpp
/// @brief Sparse non-negative ground-truth embeddings and triplet sampling
///        from the exact choice model, for oracle-style experiments.

#pragma once

#include "spose/model.hpp"
#include "spose/rng.hpp"
#include "spose/types.hpp"

#include <cstdio>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace spose {

/// Concept names "c0000", "c0001", ... so synthetic artifacts use the same
/// name-keyed formats as real data.
inline ConceptVocabulary make_synthetic_vocabulary(int m) {
  if (m <= 0) throw invalid_input("vocabulary size must be positive");
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(m));
  char buf[16];
  for (int i = 0; i < m; ++i) {
    std::snprintf(buf, sizeof(buf), "c%04d", i);
    names.emplace_back(buf);
  }
  return ConceptVocabulary(std::move(names));
}

/// A generating embedding together with the parameters that produced it.
struct GroundTruth {
  Embedding embedding;
  int dims;
  double density;
  double scale;
  std::uint64_t seed;
};

/// Bernoulli-sparse generator: each entry is zero with probability 1-density,
/// otherwise uniform on (0, scale]. Rows that come out all zero are resampled
/// so every concept has at least one active dimension.
inline GroundTruth generate_ground_truth(int m, int p, double density, double scale,
                                         std::uint64_t seed) {
  if (m <= 0 || p <= 0) throw invalid_input("ground truth needs positive shape");
  if (!(density > 0.0) || density > 1.0) throw invalid_input("density must lie in (0,1]");
  if (!(scale > 0.0)) throw invalid_input("scale must be positive");
  Rng rng(derive_seed(seed, streams::kTruth));
  Matrix x(m, p);
  for (int i = 0; i < m; ++i) {
    bool any = false;
    while (!any) {
      for (int f = 0; f < p; ++f) {
        if (rng.next_unit() < density) {
          x(i, f) = scale * (1.0 - rng.next_unit());  // maps [0,1) onto (0,scale]
          any = true;
        } else {
          x(i, f) = 0.0;
        }
      }
    }
  }
  return GroundTruth{Embedding(make_synthetic_vocabulary(m), std::move(x)), p, density, scale,
                     seed};
}

namespace detail {

/// Draws one choice index from the exact triplet distribution.
inline PairChoice draw_choice(const TripletProbabilities& p, Rng& rng) {
  const double u = rng.next_unit();
  if (u < p[0]) return PairChoice::kFirstSecond;
  if (u < p[0] + p[1]) return PairChoice::kFirstThird;
  return PairChoice::kSecondThird;
}

}  // namespace detail

/// Samples n distinct uniformly random sorted index triples by rejection.
inline std::vector<std::array<int, 3>> sample_distinct_triples(int m, long long n, Rng& rng) {
  if (m < 3) throw invalid_input("need at least 3 concepts to form a triple");
  const long long max_triples =
      static_cast<long long>(m) * (m - 1) * (m - 2) / 6;
  if (n < 1 || n > max_triples) {
    throw invalid_input("requested " + std::to_string(n) + " distinct triples, only " +
                        std::to_string(max_triples) + " exist");
  }
  std::set<std::array<int, 3>> seen;
  std::vector<std::array<int, 3>> triples;
  triples.reserve(static_cast<std::size_t>(n));
  while (static_cast<long long>(triples.size()) < n) {
    int a = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(m)));
    int b = a;
    while (b == a) b = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(m)));
    int c = a;
    while (c == a || c == b) c = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(m)));
    std::array<int, 3> t{a, b, c};
    std::sort(t.begin(), t.end());
    if (seen.insert(t).second) triples.push_back(t);
  }
  return triples;
}

/// Samples `n` distinct triples, then `repeats` independent judgments per
/// triple from the exact model distribution under the truth. Judgments appear
/// grouped by triple in sampling order.
inline TripletDataset sample_triplets(const GroundTruth& truth, long long n, std::uint64_t seed,
                                      int repeats = 1) {
  if (repeats < 1) throw invalid_input("repeats must be at least 1");
  const int m = truth.embedding.concepts();
  Rng triple_rng(derive_seed(seed, streams::kTriples));
  std::vector<std::array<int, 3>> triples = sample_distinct_triples(m, n, triple_rng);

  Rng choice_rng(derive_seed(seed, streams::kChoices));
  std::vector<TripletJudgment> judgments;
  judgments.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(repeats));
  const Matrix& x = truth.embedding.values();
  for (const std::array<int, 3>& t : triples) {
    const TripletProbabilities p = triplet_probabilities(x, t[0], t[1], t[2]);
    for (int r = 0; r < repeats; ++r) {
      judgments.push_back(TripletJudgment{t[0], t[1], t[2], detail::draw_choice(p, choice_rng)});
    }
  }
  return TripletDataset(truth.embedding.vocabulary(), std::move(judgments));
}

}  // namespace spose
