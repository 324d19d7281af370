#pragma once

// The six-dimension reference model: dimension file parsing, score
// normalization, and the immutable root -> dimension -> candidate index.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "mrm/errors.hpp"
#include "mrm/preprocess.hpp"
#include "mrm/text.hpp"

namespace mrm {

enum class Dimension {
  Synonym = 0,
  Antonym = 1,
  FormalSemantic = 2,
  LexicalSemantic = 3,
  WordOrder = 4,
  CoOccurrence = 5,
};

enum class DimensionGroup { Context, Semantic, Syntactic };

inline constexpr std::array<Dimension, 6> kAllDimensions = {
    Dimension::Synonym,        Dimension::Antonym,  Dimension::FormalSemantic,
    Dimension::LexicalSemantic, Dimension::WordOrder, Dimension::CoOccurrence,
};

constexpr DimensionGroup dimension_group(Dimension d) {
  switch (d) {
    case Dimension::Synonym:
    case Dimension::Antonym: return DimensionGroup::Context;
    case Dimension::FormalSemantic:
    case Dimension::LexicalSemantic: return DimensionGroup::Semantic;
    case Dimension::WordOrder:
    case Dimension::CoOccurrence: return DimensionGroup::Syntactic;
  }
  return DimensionGroup::Context;
}

constexpr bool is_frequency_dimension(Dimension d) {
  return d == Dimension::WordOrder || d == Dimension::CoOccurrence;
}

inline const char* dimension_name(Dimension d) {
  switch (d) {
    case Dimension::Synonym: return "synonym";
    case Dimension::Antonym: return "antonym";
    case Dimension::FormalSemantic: return "formal";
    case Dimension::LexicalSemantic: return "lexical";
    case Dimension::WordOrder: return "wordorder";
    case Dimension::CoOccurrence: return "cooccurrence";
  }
  return "?";
}

inline std::optional<Dimension> dimension_from_name(std::string_view name) {
  for (Dimension d : kAllDimensions)
    if (name == dimension_name(d)) return d;
  return std::nullopt;
}

struct ReferenceEntry {
  std::string root;   // lookup key, lowercased
  std::string term;   // candidate word or phrase
  Dimension dimension = Dimension::Synonym;
  double raw_score = 0.0;
  double norm_score = 0.0;  // filled at build time
  std::string tag;          // POS/phrase tag, frequency dimensions only
  std::string example;
};

struct ScoreScaleConfig {
  double synonym_max = 10.0;
  double antonym_max = 10.0;
  double semantic_max = 5.0;
  // Max raw frequency observed at build time, per frequency dimension.
  std::map<Dimension, double> frequency_reference;
};

struct IndexStats {
  std::size_t total_entries = 0;
  std::size_t distinct_roots = 0;
  std::map<Dimension, std::size_t> entries_per_dimension;
  // Alternate vocabulary counts for the headline repository size, whose
  // unit of counting is ambiguous.
  std::size_t distinct_terms = 0;
  std::size_t distinct_words = 0;  // single words over all roots and terms
};

// Lowercases, strips punctuation code points and collapses whitespace; the
// canonical form for phrase roots and sentence-level entries.
inline std::string normalize_phrase(std::string_view text) {
  PreprocessConfig cfg;
  cfg.punctuation = default_punctuation();
  cfg.remove_stopwords = false;
  const auto fragments = tokenize(text, cfg);
  std::string out;
  for (const auto& frag : fragments) {
    if (!out.empty()) out += ' ';
    out += frag.normalized;
  }
  return out;
}

// Entry score mapped into [0,1]. Context and semantic dimensions divide by
// their scale maximum; frequency dimensions use log10(1+raw) against the
// build-time reference frequency. Results clamp to 1.
inline double normalize_score(double raw, Dimension dimension,
                              const ScoreScaleConfig& scales) {
  if (raw < 0.0) throw DomainError("raw score must be non-negative");
  double value;
  switch (dimension) {
    case Dimension::Synonym:
      if (scales.synonym_max <= 0.0) throw DomainError("synonym_max must be positive");
      value = raw / scales.synonym_max;
      break;
    case Dimension::Antonym:
      if (scales.antonym_max <= 0.0) throw DomainError("antonym_max must be positive");
      value = raw / scales.antonym_max;
      break;
    case Dimension::FormalSemantic:
    case Dimension::LexicalSemantic:
      if (scales.semantic_max <= 0.0) throw DomainError("semantic_max must be positive");
      value = raw / scales.semantic_max;
      break;
    case Dimension::WordOrder:
    case Dimension::CoOccurrence: {
      double reference = 1.0;
      if (auto it = scales.frequency_reference.find(dimension);
          it != scales.frequency_reference.end() && it->second > 0.0)
        reference = it->second;
      const double denom = std::log10(1.0 + reference);
      value = denom > 0.0 ? std::log10(1.0 + raw) / denom : 0.0;
      break;
    }
    default:
      throw DomainError("unknown dimension");
  }
  if (value > 1.0) return 1.0;
  if (value < 0.0) return 0.0;
  return value;
}

struct DimensionParseOptions {
  // When set, sentence-pair lines additionally expand to word-level entries:
  // each content word of sentence 1 keyed to its closest content word of
  // sentence 2 by lexical similarity. Default keeps the pair as one
  // phrase-level entry.
  bool expand_pairs = false;
  std::set<std::string> stopwords = default_stopwords();
};

namespace detail {

inline double parse_decimal(std::string_view token, const std::string& path,
                            std::size_t line_no) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw FormatError(path + ":" + std::to_string(line_no) + ": non-numeric score '" +
                      std::string(token) + "'");
  return value;
}

inline std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cols.emplace_back(line.substr(start));
      break;
    }
    cols.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> content_words(std::string_view sentence,
                                              const std::set<std::string>& stopwords) {
  PreprocessConfig cfg;
  cfg.punctuation = default_punctuation();
  cfg.stopwords = stopwords;
  cfg.remove_stopwords = true;
  std::vector<std::string> words;
  for (const auto& frag : tokenize(sentence, cfg)) words.push_back(frag.normalized);
  return words;
}

}  // namespace detail

// Tab-separated UTF-8, one entry per line, '#' comment lines and blank
// lines skipped. Column layouts per dimension:
//   synonym/antonym:          word<TAB>word<TAB>score
//   formal/lexical semantic:  score<TAB>sentence1<TAB>sentence2
//   wordorder:                phrase<TAB>tag<TAB>frequency<TAB>example
//   cooccurrence:             head<TAB>phrase<TAB>tag<TAB>frequency<TAB>example
inline std::vector<ReferenceEntry> parse_dimension_file(
    const std::string& path, Dimension dimension,
    const DimensionParseOptions& options = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dimension file: " + path);
  std::vector<ReferenceEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) -> FormatError {
    return FormatError(path + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cols = detail::split_tabs(line);
    auto expect_cols = [&](std::size_t n) {
      if (cols.size() != n)
        throw fail("expected " + std::to_string(n) + " tab-separated columns, got " +
                   std::to_string(cols.size()));
    };
    switch (dimension) {
      case Dimension::Synonym:
      case Dimension::Antonym: {
        expect_cols(3);
        ReferenceEntry e;
        e.dimension = dimension;
        e.root = to_lower_ascii(detail::trim(cols[0]));
        e.term = to_lower_ascii(detail::trim(cols[1]));
        e.raw_score = detail::parse_decimal(detail::trim(cols[2]), path, line_no);
        if (e.root.empty() || e.term.empty()) throw fail("empty word column");
        entries.push_back(std::move(e));
        break;
      }
      case Dimension::FormalSemantic:
      case Dimension::LexicalSemantic: {
        expect_cols(3);
        const double score = detail::parse_decimal(detail::trim(cols[0]), path, line_no);
        const std::string s1 = normalize_phrase(cols[1]);
        const std::string s2 = normalize_phrase(cols[2]);
        if (s1.empty() || s2.empty()) throw fail("empty sentence column");
        ReferenceEntry e;
        e.dimension = dimension;
        e.root = s1;
        e.term = s2;
        e.raw_score = score;
        entries.push_back(std::move(e));
        if (options.expand_pairs) {
          const auto left = detail::content_words(cols[1], options.stopwords);
          const auto right = detail::content_words(cols[2], options.stopwords);
          for (const auto& w1 : left) {
            const std::string* best = nullptr;
            double best_sim = -1.0;
            for (const auto& w2 : right) {
              const double sim = lexical_similarity(w1, w2);
              if (sim > best_sim || (sim == best_sim && best && w2 < *best)) {
                best_sim = sim;
                best = &w2;
              }
            }
            if (best) {
              ReferenceEntry we;
              we.dimension = dimension;
              we.root = w1;
              we.term = *best;
              we.raw_score = score;
              entries.push_back(std::move(we));
            }
          }
        }
        break;
      }
      case Dimension::WordOrder: {
        expect_cols(4);
        ReferenceEntry e;
        e.dimension = dimension;
        e.root = normalize_phrase(cols[0]);
        e.term = e.root;
        e.tag = detail::trim(cols[1]);
        e.raw_score = detail::parse_decimal(detail::trim(cols[2]), path, line_no);
        e.example = detail::trim(cols[3]);
        if (e.root.empty()) throw fail("empty phrase column");
        entries.push_back(std::move(e));
        break;
      }
      case Dimension::CoOccurrence: {
        expect_cols(5);
        ReferenceEntry e;
        e.dimension = dimension;
        e.root = normalize_phrase(cols[0]);
        e.term = normalize_phrase(cols[1]);
        e.tag = detail::trim(cols[2]);
        e.raw_score = detail::parse_decimal(detail::trim(cols[3]), path, line_no);
        e.example = detail::trim(cols[4]);
        if (e.root.empty() || e.term.empty()) throw fail("empty head or phrase column");
        entries.push_back(std::move(e));
        break;
      }
    }
  }
  return entries;
}

// Conventionally named dimension files (<dimension>.tsv) present in a model
// directory, keyed by dimension so iteration order is fixed.
inline std::map<Dimension, std::string> find_dimension_files(const std::string& dir) {
  std::map<Dimension, std::string> files;
  for (Dimension d : kAllDimensions) {
    std::filesystem::path p = std::filesystem::path(dir) / (std::string(dimension_name(d)) + ".tsv");
    if (std::filesystem::exists(p)) files[d] = p.string();
  }
  return files;
}

struct IndexedTerm {
  std::string term;
  double norm_score = 0.0;
  double raw_score = 0.0;
  std::string tag;
  std::string example;
};

// Immutable after build; safe for concurrent lookups.
class ReferenceIndex {
public:
  using DimensionLists = std::map<Dimension, std::vector<IndexedTerm>>;

  // Per-dimension candidate lists for a root; empty map when absent.
  const DimensionLists& lookup(const std::string& root) const {
    static const DimensionLists empty;
    const auto it = by_root_.find(root);
    return it == by_root_.end() ? empty : it->second;
  }

  const std::map<std::string, DimensionLists>& entries() const { return by_root_; }
  const ScoreScaleConfig& scales() const { return scales_; }
  const IndexStats& stats() const { return stats_; }

private:
  std::map<std::string, DimensionLists> by_root_;
  ScoreScaleConfig scales_;
  IndexStats stats_;

  friend ReferenceIndex build_index(const std::vector<ReferenceEntry>&,
                                    const ScoreScaleConfig&);
  friend ReferenceIndex load_index(const std::string&);
};

namespace detail {

inline void split_words_into(std::string_view phrase, std::set<std::string>& out) {
  std::size_t start = 0;
  while (start <= phrase.size()) {
    const std::size_t sp = phrase.find(' ', start);
    const std::string_view word =
        phrase.substr(start, sp == std::string_view::npos ? phrase.size() - start
                                                          : sp - start);
    if (!word.empty()) out.emplace(word);
    if (sp == std::string_view::npos) break;
    start = sp + 1;
  }
}

inline IndexStats compute_stats(const std::map<std::string, ReferenceIndex::DimensionLists>& by_root) {
  IndexStats stats;
  std::set<std::string> terms;
  std::set<std::string> words;
  stats.distinct_roots = by_root.size();
  for (const auto& [root, dims] : by_root) {
    split_words_into(root, words);
    for (const auto& [dim, list] : dims) {
      stats.total_entries += list.size();
      stats.entries_per_dimension[dim] += list.size();
      for (const auto& t : list) {
        terms.insert(t.term);
        split_words_into(t.term, words);
      }
    }
  }
  stats.distinct_terms = terms.size();
  stats.distinct_words = words.size();
  return stats;
}

}  // namespace detail

// Groups entries by root and dimension, collapses duplicate
// (root, term, dimension) triples keep-max by raw score, fixes the
// frequency references, normalizes, and sorts every per-dimension list by
// norm_score descending then term ascending. Output is independent of
// entry order.
inline ReferenceIndex build_index(const std::vector<ReferenceEntry>& entries,
                                  const ScoreScaleConfig& scales = {}) {
  ReferenceIndex index;
  index.scales_ = scales;
  for (Dimension d : {Dimension::WordOrder, Dimension::CoOccurrence}) {
    double max_raw = 0.0;
    for (const auto& e : entries)
      if (e.dimension == d) max_raw = std::max(max_raw, e.raw_score);
    index.scales_.frequency_reference[d] = max_raw > 0.0 ? max_raw : 1.0;
  }

  std::map<std::string, std::map<Dimension, std::map<std::string, ReferenceEntry>>> grouped;
  for (const auto& e : entries) {
    if (e.root.empty() || e.term.empty()) throw DomainError("entry with empty root or term");
    auto& slot = grouped[e.root][e.dimension];
    auto it = slot.find(e.term);
    if (it == slot.end()) {
      slot.emplace(e.term, e);
    } else if (e.raw_score > it->second.raw_score ||
               (e.raw_score == it->second.raw_score &&
                std::tie(e.tag, e.example) < std::tie(it->second.tag, it->second.example))) {
      it->second = e;  // keep-max; equal raws keep the lexicographically least payload
    }
  }

  for (auto& [root, dims] : grouped) {
    ReferenceIndex::DimensionLists lists;
    for (auto& [dim, by_term] : dims) {
      auto& list = lists[dim];
      for (auto& [term, entry] : by_term) {
        IndexedTerm t;
        t.term = term;
        t.raw_score = entry.raw_score;
        t.norm_score = normalize_score(entry.raw_score, dim, index.scales_);
        t.tag = entry.tag;
        t.example = entry.example;
        list.push_back(std::move(t));
      }
      std::sort(list.begin(), list.end(), [](const IndexedTerm& a, const IndexedTerm& b) {
        if (a.norm_score != b.norm_score) return a.norm_score > b.norm_score;
        return a.term < b.term;
      });
    }
    index.by_root_.emplace(root, std::move(lists));
  }
  index.stats_ = detail::compute_stats(index.by_root_);
  return index;
}

inline IndexStats index_stats(const ReferenceIndex& index) { return index.stats(); }

// ---------------------------------------------------------------------------
// Compiled index file: one text header line
//   mrmindex 1<TAB>synonym_max<TAB>antonym_max<TAB>semantic_max<TAB>fref_wordorder<TAB>fref_cooccurrence
// followed by little-endian length-prefixed binary records, roots in
// ascending order:
//   u64 root_count
//   per root:  u32 len + bytes, u32 dimension_count,
//     per dimension: u32 dimension_id, u64 entry_count,
//       per entry: u32 len + term, f64 raw, f64 norm, u32 len + tag,
//                  u32 len + example

namespace detail {

template <typename T>
inline void write_pod(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

inline void write_str(std::string& out, const std::string& s) {
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out += s;
}

class BinReader {
public:
  BinReader(std::string_view data, const std::string& path) : data_(data), path_(path) {}

  template <typename T>
  T read_pod() {
    if (pos_ + sizeof(T) > data_.size()) throw FormatError(path_ + ": truncated index file");
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string read_str() {
    const auto len = read_pod<std::uint32_t>();
    if (pos_ + len > data_.size()) throw FormatError(path_ + ": truncated index file");
    std::string s(data_.substr(pos_, len));
    pos_ += len;
    return s;
  }

  std::size_t pos() const { return pos_; }
  bool at_end() const { return pos_ == data_.size(); }

private:
  std::string_view data_;
  std::string path_;
  std::size_t pos_ = 0;
};

inline std::string format_header_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::string serialize_index(const ReferenceIndex& index) {
  const auto& scales = index.scales();
  auto fref = [&](Dimension d) {
    auto it = scales.frequency_reference.find(d);
    return it == scales.frequency_reference.end() ? 1.0 : it->second;
  };
  std::string out = "mrmindex 1";
  for (double v : {scales.synonym_max, scales.antonym_max, scales.semantic_max,
                   fref(Dimension::WordOrder), fref(Dimension::CoOccurrence)}) {
    out += '\t';
    out += detail::format_header_double(v);
  }
  out += '\n';

  detail::write_pod<std::uint64_t>(out, index.entries().size());
  for (const auto& [root, dims] : index.entries()) {
    detail::write_str(out, root);
    detail::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(dims.size()));
    for (const auto& [dim, list] : dims) {
      detail::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(dim));
      detail::write_pod<std::uint64_t>(out, list.size());
      for (const auto& t : list) {
        detail::write_str(out, t.term);
        detail::write_pod<double>(out, t.raw_score);
        detail::write_pod<double>(out, t.norm_score);
        detail::write_str(out, t.tag);
        detail::write_str(out, t.example);
      }
    }
  }
  return out;
}

inline void save_index(const ReferenceIndex& index, const std::string& path) {
  const std::string bytes = serialize_index(index);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write index file: " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

inline ReferenceIndex load_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open index file: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::size_t nl = bytes.find('\n');
  if (nl == std::string::npos) throw FormatError(path + ": missing index header");
  const auto header = detail::split_tabs(std::string_view(bytes).substr(0, nl));
  if (header.size() != 6 || header[0] != "mrmindex 1")
    throw FormatError(path + ": not a compiled index file");

  ReferenceIndex index;
  double values[5];
  for (int i = 0; i < 5; ++i) values[i] = detail::parse_decimal(header[i + 1], path, 1);
  index.scales_.synonym_max = values[0];
  index.scales_.antonym_max = values[1];
  index.scales_.semantic_max = values[2];
  index.scales_.frequency_reference[Dimension::WordOrder] = values[3];
  index.scales_.frequency_reference[Dimension::CoOccurrence] = values[4];

  detail::BinReader reader(std::string_view(bytes).substr(nl + 1), path);
  const auto root_count = reader.read_pod<std::uint64_t>();
  for (std::uint64_t r = 0; r < root_count; ++r) {
    std::string root = reader.read_str();
    ReferenceIndex::DimensionLists dims;
    const auto dim_count = reader.read_pod<std::uint32_t>();
    for (std::uint32_t d = 0; d < dim_count; ++d) {
      const auto dim_id = reader.read_pod<std::uint32_t>();
      if (dim_id > 5) throw FormatError(path + ": bad dimension id in index");
      auto& list = dims[static_cast<Dimension>(dim_id)];
      const auto entry_count = reader.read_pod<std::uint64_t>();
      for (std::uint64_t e = 0; e < entry_count; ++e) {
        IndexedTerm t;
        t.term = reader.read_str();
        t.raw_score = reader.read_pod<double>();
        t.norm_score = reader.read_pod<double>();
        t.tag = reader.read_str();
        t.example = reader.read_str();
        list.push_back(std::move(t));
      }
    }
    index.by_root_.emplace(std::move(root), std::move(dims));
  }
  if (!reader.at_end()) throw FormatError(path + ": trailing bytes in index file");
  index.stats_ = detail::compute_stats(index.by_root_);
  return index;
}

}  // namespace mrm
