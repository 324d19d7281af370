#pragma once

// Word- and phrase-level matching: the naive SRM baseline (fuzzy lookup in a
// flat term list) and the MRM matcher (score-ranked candidates from the
// six-dimension index with context-precedence selection).

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mrm/preprocess.hpp"
#include "mrm/refmodel.hpp"
#include "mrm/text.hpp"

namespace mrm {

struct MatchConfig {
  double srm_threshold = 0.75;  // minimum lexical similarity for an SRM hit
  double mrm_threshold = 0.5;   // minimum normalized score for a candidate
  bool context_precedence = true;
  // Whether antonym candidates participate in context precedence. Off by
  // default: an antonym is contextual evidence, but harmonizing a token to
  // its antonym would invert the meaning.
  bool antonym_in_context = false;
  std::size_t ngram_max = 3;  // longest phrase key tried per position
  // Rank used to break score ties; earlier wins.
  std::vector<Dimension> dimension_priority = {
      Dimension::Synonym,   Dimension::LexicalSemantic, Dimension::FormalSemantic,
      Dimension::WordOrder, Dimension::CoOccurrence,    Dimension::Antonym,
  };
};

enum class MatchRule { ContextPrecedence, HighestScore, LexicalOnly };

inline const char* match_rule_name(MatchRule r) {
  switch (r) {
    case MatchRule::ContextPrecedence: return "context-precedence";
    case MatchRule::HighestScore: return "highest-score";
    case MatchRule::LexicalOnly: return "lexical-only";
  }
  return "?";
}

struct Candidate {
  std::string term;
  Dimension dimension = Dimension::Synonym;
  double norm_score = 0.0;
  double raw_score = 0.0;
  std::string root;      // index key that produced this candidate
  std::size_t span = 1;  // positions the key covers
};

struct MatchResult {
  std::string root;  // looked-up form: the token root or joined phrase
  std::string term;
  std::optional<Dimension> dimension;  // absent for SRM results
  double norm_score = 0.0;             // normalized score, or SRM similarity
  MatchRule rule = MatchRule::HighestScore;
  std::size_t span = 1;
};

// Baseline matcher: one query against a flat term list by normalized
// edit-distance similarity. No stemming, no phrases, no dimensions.
// Similarity ties keep the smallest term.
inline std::optional<MatchResult> srm_match(const std::string& root,
                                            const std::vector<std::string>& terms,
                                            const MatchConfig& config = {}) {
  const std::string* best = nullptr;
  double best_sim = -1.0;
  for (const auto& term : terms) {
    const double sim = lexical_similarity(root, term);
    if (sim > best_sim || (sim == best_sim && best && term < *best)) {
      best_sim = sim;
      best = &term;
    }
  }
  if (!best || best_sim < config.srm_threshold) return std::nullopt;
  MatchResult r;
  r.root = root;
  r.term = *best;
  r.norm_score = best_sim;
  r.rule = MatchRule::LexicalOnly;
  return r;
}

namespace detail {

// Candidates whose key is the root n-gram starting at `start`. Phrase keys
// never extend across a record or field-instance boundary.
inline std::vector<Candidate> gather_at(const std::vector<RootWord>& roots,
                                        std::size_t start, const ReferenceIndex& index,
                                        const MatchConfig& config) {
  std::vector<Candidate> candidates;
  const Token& first = roots[start].source;
  std::string key;
  for (std::size_t n = 1; n <= config.ngram_max && start + n <= roots.size(); ++n) {
    const Token& src = roots[start + n - 1].source;
    if (n > 1 && (src.record_id != first.record_id || src.field_index != first.field_index))
      break;
    if (n > 1) key += ' ';
    key += roots[start + n - 1].root;
    for (const auto& [dim, list] : index.lookup(key)) {
      for (const auto& entry : list) {
        if (entry.norm_score < config.mrm_threshold) continue;
        Candidate c;
        c.term = entry.term;
        c.dimension = dim;
        c.norm_score = entry.norm_score;
        c.raw_score = entry.raw_score;
        c.root = key;
        c.span = n;
        candidates.push_back(std::move(c));
      }
    }
  }
  return candidates;
}

inline std::size_t priority_rank(Dimension d, const MatchConfig& config) {
  for (std::size_t i = 0; i < config.dimension_priority.size(); ++i)
    if (config.dimension_priority[i] == d) return i;
  // Dimensions omitted from the priority list sort after listed ones.
  return config.dimension_priority.size() + static_cast<std::size_t>(d);
}

// Score descending, then dimension priority, then term ascending; equal
// keys from different key lengths prefer the longer phrase.
inline bool candidate_before(const Candidate& a, const Candidate& b,
                             const MatchConfig& config) {
  if (a.norm_score != b.norm_score) return a.norm_score > b.norm_score;
  const std::size_t ra = priority_rank(a.dimension, config);
  const std::size_t rb = priority_rank(b.dimension, config);
  if (ra != rb) return ra < rb;
  if (a.term != b.term) return a.term < b.term;
  return a.span > b.span;
}

inline bool in_context_pool(const Candidate& c, const MatchConfig& config) {
  if (dimension_group(c.dimension) != DimensionGroup::Context) return false;
  return c.dimension != Dimension::Antonym || config.antonym_in_context;
}

}  // namespace detail

// Per-position candidate lists over the whole root sequence; phrase keys
// are the space-joined n-grams starting at each position.
inline std::map<std::size_t, std::vector<Candidate>> gather_candidates(
    const std::vector<RootWord>& roots, const ReferenceIndex& index,
    const MatchConfig& config = {}) {
  std::map<std::size_t, std::vector<Candidate>> out;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    auto candidates = detail::gather_at(roots, i, index, config);
    if (!candidates.empty()) out.emplace(i, std::move(candidates));
  }
  return out;
}

// Context precedence: when any eligible context-group candidate exists, the
// best of those wins even if another dimension scores higher; otherwise the
// globally best candidate wins.
inline std::optional<std::pair<Candidate, MatchRule>> select_candidate(
    const std::vector<Candidate>& candidates, const MatchConfig& config = {}) {
  const Candidate* best = nullptr;
  bool best_is_context = false;
  for (const auto& c : candidates) {
    const bool is_context = config.context_precedence && detail::in_context_pool(c, config);
    if (best) {
      if (is_context != best_is_context) {
        if (!is_context) continue;
      } else if (!detail::candidate_before(c, *best, config)) {
        continue;
      }
    }
    best = &c;
    best_is_context = is_context;
  }
  if (!best) return std::nullopt;
  return std::make_pair(*best, best_is_context ? MatchRule::ContextPrecedence
                                               : MatchRule::HighestScore);
}

// Leftmost scan: the selected candidate at each position consumes its span,
// suppressing the following span-1 positions; positions with no selection
// stay empty. One slot per input position.
inline std::vector<std::optional<MatchResult>> mrm_match(
    const std::vector<RootWord>& roots, const ReferenceIndex& index,
    const MatchConfig& config = {}) {
  std::vector<std::optional<MatchResult>> results(roots.size());
  std::size_t i = 0;
  while (i < roots.size()) {
    const auto candidates = detail::gather_at(roots, i, index, config);
    const auto selected = select_candidate(candidates, config);
    if (!selected) {
      ++i;
      continue;
    }
    MatchResult r;
    r.root = selected->first.root;
    r.term = selected->first.term;
    r.dimension = selected->first.dimension;
    r.norm_score = selected->first.norm_score;
    r.rule = selected->second;
    r.span = selected->first.span;
    results[i] = std::move(r);
    i += selected->first.span;
  }
  return results;
}

inline std::size_t count_matched(const std::vector<std::optional<MatchResult>>& results) {
  std::size_t n = 0;
  for (const auto& r : results)
    if (r) ++n;
  return n;
}

// SRM over a token stream matches each token's normalized (unstemmed) form
// independently; the baseline has no notion of fields or phrases.
inline std::vector<std::optional<MatchResult>> srm_match_roots(
    const std::vector<RootWord>& roots, const std::vector<std::string>& terms,
    const MatchConfig& config = {}) {
  std::vector<std::optional<MatchResult>> results;
  results.reserve(roots.size());
  for (const auto& rw : roots)
    results.push_back(srm_match(rw.source.normalized, terms, config));
  return results;
}

}  // namespace mrm
