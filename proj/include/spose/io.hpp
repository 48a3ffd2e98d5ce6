/// @file  io.hpp
/// @brief Text serialization for the pipeline's file formats.
///
/// All numeric values are written with 17 significant digits, which
/// round-trips IEEE doubles exactly. Formats:
///   - vocabulary: one concept name per line, position = index
///   - triplets:   `i1<TAB>i2<TAB>i3<TAB>choice`, `#` comment lines ignored
///   - embedding:  header `# spose-embedding m=<m> p=<p>`, then
///                 `name<TAB>v1<TAB>...<TAB>vp` per concept
///   - features:   header `name<TAB>f1<TAB>...`, then one row per concept
///   - similarity: header `name<TAB>n1<TAB>...`, square table, `nan` marks
///                 undefined entries (diagonal is always undefined)

#pragma once

#include "spose/types.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace spose {

/// Shortest fixed format that round-trips any double exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  return out;
}

inline void finish_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw io_error("write to '" + path + "' failed");
}

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

inline invalid_input parse_error(const std::string& path, int line_no, const std::string& what) {
  return invalid_input(path + ":" + std::to_string(line_no) + ": " + what);
}

/// Strict integer parse; the whole token must be consumed.
inline long long parse_int(const std::string& token, const std::string& path, int line_no) {
  if (token.empty()) throw parse_error(path, line_no, "empty integer field");
  errno = 0;
  char* end = nullptr;
  long long v = std::strtoll(token.c_str(), &end, 10);
  if (errno != 0 || end != token.c_str() + token.size()) {
    throw parse_error(path, line_no, "malformed integer '" + token + "'");
  }
  return v;
}

/// Strict double parse; accepts `nan` / `inf` spellings from strtod.
inline double parse_double(const std::string& token, const std::string& path, int line_no) {
  if (token.empty()) throw parse_error(path, line_no, "empty numeric field");
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size()) {
    throw parse_error(path, line_no, "malformed number '" + token + "'");
  }
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

inline ConceptVocabulary load_vocabulary(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  std::vector<std::string> names;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) {
      throw detail::parse_error(path, line_no, "empty concept name");
    }
    names.push_back(line);
  }
  try {
    return ConceptVocabulary(std::move(names));
  } catch (const invalid_input& e) {
    throw invalid_input(path + ": " + e.what());
  }
}

inline void save_vocabulary(const ConceptVocabulary& vocab, const std::string& path) {
  std::ofstream out = detail::open_output(path);
  for (const std::string& name : vocab.names()) {
    out << name << '\n';
  }
  detail::finish_output(out, path);
}

// ---------------------------------------------------------------------------
// Triplets
// ---------------------------------------------------------------------------

/// Loads judgments in file order. Indices are canonicalized ascending with the
/// choice remapped accordingly; the on-disk choice refers to the pair slot in
/// listed order (0 = first/second, 1 = first/third, 2 = second/third).
inline TripletDataset load_triplets(const std::string& path, const ConceptVocabulary& vocab) {
  std::ifstream in = detail::open_input(path);
  std::vector<TripletJudgment> judgments;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = detail::split_tabs(line);
    if (fields.size() != 4) {
      throw detail::parse_error(path, line_no,
                                "expected 4 tab-separated fields, got " +
                                    std::to_string(fields.size()));
    }
    long long a = detail::parse_int(fields[0], path, line_no);
    long long b = detail::parse_int(fields[1], path, line_no);
    long long c = detail::parse_int(fields[2], path, line_no);
    long long choice = detail::parse_int(fields[3], path, line_no);
    for (long long idx : {a, b, c}) {
      if (idx < 0 || idx >= vocab.size()) {
        throw detail::parse_error(path, line_no,
                                  "concept index " + std::to_string(idx) +
                                      " outside vocabulary of size " +
                                      std::to_string(vocab.size()));
      }
    }
    try {
      judgments.push_back(TripletJudgment::canonical(static_cast<int>(a), static_cast<int>(b),
                                                     static_cast<int>(c),
                                                     static_cast<int>(choice)));
    } catch (const invalid_input& e) {
      throw detail::parse_error(path, line_no, e.what());
    }
  }
  return TripletDataset(vocab, std::move(judgments));
}

inline void save_triplets(const TripletDataset& data, const std::string& path) {
  std::ofstream out = detail::open_output(path);
  for (const TripletJudgment& j : data.judgments) {
    out << j.i1 << '\t' << j.i2 << '\t' << j.i3 << '\t' << static_cast<int>(j.choice) << '\n';
  }
  detail::finish_output(out, path);
}

// ---------------------------------------------------------------------------
// Embedding
// ---------------------------------------------------------------------------

inline void save_embedding(const Embedding& emb, const std::string& path) {
  std::ofstream out = detail::open_output(path);
  out << "# spose-embedding m=" << emb.concepts() << " p=" << emb.dims() << '\n';
  for (int i = 0; i < emb.concepts(); ++i) {
    out << emb.vocabulary().name(i);
    for (int f = 0; f < emb.dims(); ++f) {
      out << '\t' << format_double(emb.values()(i, f));
    }
    out << '\n';
  }
  detail::finish_output(out, path);
}

inline Embedding load_embedding(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw invalid_input(path + ": empty embedding file");
  detail::strip_cr(line);
  int m = 0, p = 0;
  if (std::sscanf(line.c_str(), "# spose-embedding m=%d p=%d", &m, &p) != 2 || m < 0 || p < 0) {
    throw invalid_input(path + ":1: bad header '" + line + "'");
  }
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(m));
  Matrix values(m, p);
  int line_no = 1;
  int row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    if (row >= m) throw detail::parse_error(path, line_no, "more rows than header m");
    std::vector<std::string> fields = detail::split_tabs(line);
    if (static_cast<int>(fields.size()) != p + 1) {
      throw detail::parse_error(path, line_no,
                                "expected " + std::to_string(p + 1) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    names.push_back(fields[0]);
    for (int f = 0; f < p; ++f) {
      values(row, f) = detail::parse_double(fields[static_cast<std::size_t>(f) + 1], path, line_no);
    }
    ++row;
  }
  if (row != m) {
    throw invalid_input(path + ": header promises " + std::to_string(m) + " rows, found " +
                        std::to_string(row));
  }
  try {
    return Embedding(ConceptVocabulary(std::move(names)), std::move(values));
  } catch (const std::runtime_error& e) {
    throw invalid_input(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Feature table
// ---------------------------------------------------------------------------

inline void save_feature_table(const FeatureTable& table, const std::string& path) {
  std::ofstream out = detail::open_output(path);
  out << "name";
  for (const std::string& f : table.feature_names()) out << '\t' << f;
  out << '\n';
  for (int i = 0; i < table.concepts(); ++i) {
    out << table.vocabulary().name(i);
    for (int f = 0; f < table.features(); ++f) {
      out << '\t' << format_double(table.values()(i, f));
    }
    out << '\n';
  }
  detail::finish_output(out, path);
}

inline FeatureTable load_feature_table(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw invalid_input(path + ": empty feature table");
  detail::strip_cr(line);
  std::vector<std::string> header = detail::split_tabs(line);
  if (header.empty() || header[0] != "name") {
    throw invalid_input(path + ":1: first column of the header must be 'name'");
  }
  std::vector<std::string> feature_names(header.begin() + 1, header.end());
  const int k = static_cast<int>(feature_names.size());

  std::vector<std::string> names;
  std::vector<double> flat;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    std::vector<std::string> fields = detail::split_tabs(line);
    if (static_cast<int>(fields.size()) != k + 1) {
      throw detail::parse_error(path, line_no,
                                "expected " + std::to_string(k + 1) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    names.push_back(fields[0]);
    for (int f = 0; f < k; ++f) {
      flat.push_back(detail::parse_double(fields[static_cast<std::size_t>(f) + 1], path, line_no));
    }
  }
  Matrix values(static_cast<Eigen::Index>(names.size()), k);
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (int f = 0; f < k; ++f) {
      values(static_cast<Eigen::Index>(i), f) = flat[i * static_cast<std::size_t>(k) +
                                                     static_cast<std::size_t>(f)];
    }
  }
  try {
    return FeatureTable(ConceptVocabulary(std::move(names)), std::move(feature_names),
                        std::move(values));
  } catch (const std::runtime_error& e) {
    throw invalid_input(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Similarity matrix
// ---------------------------------------------------------------------------

inline void save_similarity_matrix(const SimilarityMatrix& sim, const std::string& path) {
  std::ofstream out = detail::open_output(path);
  out << "name";
  for (const std::string& n : sim.vocabulary().names()) out << '\t' << n;
  out << '\n';
  for (int i = 0; i < sim.size(); ++i) {
    out << sim.vocabulary().name(i);
    for (int j = 0; j < sim.size(); ++j) {
      out << '\t' << (sim.is_defined(i, j) ? format_double(sim.value(i, j)) : "nan");
    }
    out << '\n';
  }
  detail::finish_output(out, path);
}

inline SimilarityMatrix load_similarity_matrix(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw invalid_input(path + ": empty similarity matrix");
  detail::strip_cr(line);
  std::vector<std::string> header = detail::split_tabs(line);
  if (header.empty() || header[0] != "name") {
    throw invalid_input(path + ":1: first column of the header must be 'name'");
  }
  std::vector<std::string> names(header.begin() + 1, header.end());
  const int n = static_cast<int>(names.size());
  SimilarityMatrix sim{ConceptVocabulary(names)};

  int line_no = 1;
  int row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    if (row >= n) throw detail::parse_error(path, line_no, "more rows than header columns");
    std::vector<std::string> fields = detail::split_tabs(line);
    if (static_cast<int>(fields.size()) != n + 1) {
      throw detail::parse_error(path, line_no, "wrong field count");
    }
    if (fields[0] != names[static_cast<std::size_t>(row)]) {
      throw detail::parse_error(path, line_no, "row name does not match header order");
    }
    for (int j = 0; j < n; ++j) {
      const std::string& tok = fields[static_cast<std::size_t>(j) + 1];
      double v = detail::parse_double(tok, path, line_no);
      if (v == v && row != j) {  // NaN marks undefined; diagonal stays undefined
        if (sim.is_defined(row, j) && sim.value(row, j) != v) {
          throw detail::parse_error(path, line_no, "matrix is not symmetric");
        }
        sim.set(row, j, v);
      }
    }
    ++row;
  }
  if (row != n) throw invalid_input(path + ": missing rows");
  return sim;
}

// ---------------------------------------------------------------------------
// File digest (manifests)
// ---------------------------------------------------------------------------

/// FNV-1a 64-bit digest of a file's bytes, as 16 hex characters.
inline std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "' for digest");
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return out;
}

}  // namespace spose
