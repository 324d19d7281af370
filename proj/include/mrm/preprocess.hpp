#pragma once

// Token generation and root-word identification. Tokens are whitespace-split
// fragments further divided at punctuation code points, lowercased, with
// empty fragments and stopwords dropped. Roots come from a small ordered
// suffix-rule list plus a per-corpus exception map.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mrm/ingest.hpp"
#include "mrm/text.hpp"

namespace mrm {

inline const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> words = {
      "a",  "an",  "and",  "are", "as",   "at",   "be",  "but", "by",
      "for", "from", "in",  "is",  "it",   "not",  "of",  "on",  "or",
      "that", "the", "this", "to",  "was",  "were", "with"};
  return words;
}

inline const std::set<char32_t>& default_punctuation() {
  static const std::set<char32_t> set = [] {
    std::set<char32_t> s;
    for (char c : std::string("!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~")) s.insert(c);
    return s;
  }();
  return set;
}

struct PreprocessConfig {
  std::set<char32_t> punctuation = default_punctuation();
  std::set<std::string> stopwords = default_stopwords();
  bool remove_stopwords = true;
  std::map<std::string, std::string> stem_exceptions;
  bool split_fields = true;  // false: each field value is a single (possibly multiword) token
};

inline PreprocessConfig default_preprocess_config() { return {}; }

// A kept fragment of one field value. byte_offset/byte_len locate the
// surface text inside the original value.
struct TokenFragment {
  std::string surface;
  std::string normalized;
  std::size_t position = 0;
  std::size_t byte_offset = 0;
  std::size_t byte_len = 0;
};

struct Token {
  std::string surface;
  std::string normalized;
  std::int64_t record_id = 0;
  std::string field_name;
  std::size_t field_index = 0;  // index of the field instance in its record
  std::size_t position = 0;     // unique per (record_id, field_name)
  std::size_t byte_offset = 0;
  std::size_t byte_len = 0;
};

struct RootWord {
  std::string root;
  Token source;
};

namespace detail {

inline bool is_ascii_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\v' || cp == '\f';
}

}  // namespace detail

// Whitespace splits; punctuation code points split further and never appear
// in the normalized form. Positions are 0-based over kept fragments.
inline std::vector<TokenFragment> tokenize(std::string_view text,
                                           const PreprocessConfig& config) {
  std::vector<TokenFragment> out;
  std::string current;
  std::size_t frag_start = 0;

  auto flush = [&](std::size_t end_offset) {
    if (current.empty()) return;
    std::string normalized = to_lower_ascii(current);
    if (!(config.remove_stopwords && config.stopwords.count(normalized))) {
      TokenFragment frag;
      frag.surface = current;
      frag.normalized = std::move(normalized);
      frag.position = out.size();
      frag.byte_offset = frag_start;
      frag.byte_len = end_offset - frag_start;
      out.push_back(std::move(frag));
    }
    current.clear();
  };

  if (!config.split_fields) {
    // Whole-field mode: strip punctuation, collapse whitespace runs to one
    // space, keep everything as a single token.
    std::string kept;
    std::size_t i = 0;
    bool pending_space = false;
    while (i < text.size()) {
      const std::size_t cp_start = i;
      const char32_t cp = utf8_next(text, i);
      if (detail::is_ascii_space(cp)) {
        pending_space = !kept.empty();
        continue;
      }
      if (config.punctuation.count(cp)) continue;
      if (pending_space) {
        kept += ' ';
        pending_space = false;
      }
      kept.append(text.substr(cp_start, i - cp_start));
    }
    if (kept.empty()) return out;
    TokenFragment frag;
    frag.surface = std::string(text);
    frag.normalized = to_lower_ascii(kept);
    frag.position = 0;
    frag.byte_offset = 0;
    frag.byte_len = text.size();
    if (config.remove_stopwords && config.stopwords.count(frag.normalized)) return out;
    out.push_back(std::move(frag));
    return out;
  }

  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t cp_start = i;
    const char32_t cp = utf8_next(text, i);
    if (detail::is_ascii_space(cp) || config.punctuation.count(cp)) {
      flush(cp_start);
    } else {
      if (current.empty()) frag_start = cp_start;
      current.append(text.substr(cp_start, i - cp_start));
    }
  }
  flush(text.size());
  return out;
}

// Exception map wins outright; otherwise the ordered suffix rules are
// applied until none fires, which makes the result a fixpoint.
inline std::string identify_root(const std::string& normalized,
                                 const PreprocessConfig& config) {
  if (auto it = config.stem_exceptions.find(normalized); it != config.stem_exceptions.end())
    return it->second;
  std::string s = normalized;
  for (;;) {
    if (ends_with(s, "ies")) {
      s.replace(s.size() - 3, 3, "y");
    } else if (ends_with(s, "es") && s.size() >= 4) {
      s.erase(s.size() - 2);
    } else if (ends_with(s, "s") && !ends_with(s, "ss") && s.size() >= 3) {
      s.erase(s.size() - 1);
    } else if (ends_with(s, "ing") && s.size() >= 6) {
      s.erase(s.size() - 3);
    } else if (ends_with(s, "ed") && s.size() >= 5) {
      s.erase(s.size() - 2);
    } else {
      break;
    }
  }
  return s;
}

// Token stream for a whole dataset, in (record, field insertion, position)
// order. Positions continue across same-named fields of a record so that
// (record_id, field_name, position) stays unique.
inline std::vector<RootWord> generate_tokens(const UnifiedDataset& dataset,
                                             const PreprocessConfig& config) {
  std::vector<RootWord> out;
  for (const auto& rec : dataset.records) {
    std::map<std::string, std::size_t> next_position;
    for (std::size_t f = 0; f < rec.fields.size(); ++f) {
      const auto& field = rec.fields[f];
      const auto fragments = tokenize(field.value, config);
      std::size_t& base = next_position[field.name];
      for (const auto& frag : fragments) {
        Token token;
        token.surface = frag.surface;
        token.normalized = frag.normalized;
        token.record_id = rec.record_id;
        token.field_name = field.name;
        token.field_index = f;
        token.position = base + frag.position;
        token.byte_offset = frag.byte_offset;
        token.byte_len = frag.byte_len;
        out.push_back({identify_root(frag.normalized, config), std::move(token)});
      }
      base += fragments.size();
    }
  }
  return out;
}

// Dump format: record_id<TAB>field<TAB>position<TAB>surface<TAB>normalized<TAB>root.
inline std::string serialize_tokens(const std::vector<RootWord>& roots) {
  std::string out;
  for (const auto& rw : roots) {
    const Token& t = rw.source;
    out += std::to_string(t.record_id);
    out += '\t';
    out += escape_field(t.field_name);
    out += '\t';
    out += std::to_string(t.position);
    out += '\t';
    out += escape_field(t.surface);
    out += '\t';
    out += escape_field(t.normalized);
    out += '\t';
    out += escape_field(rw.root);
    out += '\n';
  }
  return out;
}

}  // namespace mrm
