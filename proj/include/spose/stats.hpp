/// @file  stats.hpp
/// @brief Small statistics helpers shared across modules.

#pragma once

#include "spose/types.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace spose {

/// Sample Pearson correlation. Throws on length mismatch, fewer than two
/// points, or zero variance in either input.
inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw invalid_input("pearson inputs differ in length");
  const std::size_t n = a.size();
  if (n < 2) throw invalid_input("pearson needs at least 2 points");
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= static_cast<double>(n);
  mean_b /= static_cast<double>(n);
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) throw numeric_error("pearson input has zero variance");
  return sab / std::sqrt(saa * sbb);
}

/// Area under the ROC curve via the rank-sum (Mann-Whitney) statistic with
/// midranks for ties. labels[i] must be 0 or 1; both classes must be present.
inline double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw invalid_input("auc inputs differ in length");
  const std::size_t n = scores.size();
  std::size_t pos = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw invalid_input("auc labels must be 0 or 1");
    pos += static_cast<std::size_t>(y);
  }
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) throw invalid_input("auc needs both classes present");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return scores[i] < scores[j]; });

  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) rank_sum_pos += midrank;
    }
    i = j + 1;
  }
  const double u = rank_sum_pos - static_cast<double>(pos) * (static_cast<double>(pos) + 1.0) / 2.0;
  return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

}  // namespace spose
