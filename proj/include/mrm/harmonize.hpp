#pragma once

// End-to-end match pipeline: token stream -> match results -> match dump
// rows, harmonized dataset (matched spans spliced out for their terms,
// everything else byte-identical), and a summary report.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mrm/errors.hpp"
#include "mrm/ingest.hpp"
#include "mrm/matcher.hpp"
#include "mrm/preprocess.hpp"
#include "mrm/refmodel.hpp"
#include "mrm/text.hpp"

namespace mrm {

// One match dump line; position counts tokens within the record across all
// of its fields.
struct MatchRow {
  std::int64_t record_id = 0;
  std::size_t position = 0;
  std::string root;
  std::optional<std::string> term;
  std::optional<Dimension> dimension;
  double norm_score = 0.0;
  std::optional<MatchRule> rule;
};

struct HarmonizeStats {
  std::size_t records = 0;
  std::size_t input_tokens = 0;
  std::size_t matched = 0;    // match events; a phrase counts once
  std::size_t absorbed = 0;   // extra tokens consumed by phrase spans
  std::size_t unmatched = 0;
  std::size_t harmonized_tokens = 0;  // input_tokens - absorbed
  double matched_pct = 0.0;           // matched / input_tokens, two decimals
  std::map<Dimension, std::size_t> by_dimension;
  std::map<MatchRule, std::size_t> by_rule;
};

struct MatchPipelineResult {
  UnifiedDataset harmonized;
  std::vector<MatchRow> rows;
  HarmonizeStats stats;
};

// Matches the whole dataset and splices each matched span's field text
// (first to last covered byte) out for its selected term; unmatched text,
// punctuation, and casing survive byte-for-byte.
inline MatchPipelineResult run_match_pipeline(const UnifiedDataset& dataset,
                                              const ReferenceIndex& index,
                                              const PreprocessConfig& preprocess,
                                              const MatchConfig& match) {
  const auto roots = generate_tokens(dataset, preprocess);
  const auto results = mrm_match(roots, index, match);

  MatchPipelineResult out;
  out.stats.records = dataset.records.size();
  out.stats.input_tokens = roots.size();

  // Dump rows, with positions restarting at each record.
  std::int64_t current_record = 0;
  std::size_t record_start = 0;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (i == 0 || roots[i].source.record_id != current_record) {
      current_record = roots[i].source.record_id;
      record_start = i;
    }
    MatchRow row;
    row.record_id = current_record;
    row.position = i - record_start;
    if (results[i]) {
      row.root = results[i]->root;
      row.term = results[i]->term;
      row.dimension = results[i]->dimension;
      row.norm_score = results[i]->norm_score;
      row.rule = results[i]->rule;
    } else {
      row.root = roots[i].root;
    }
    out.rows.push_back(std::move(row));
  }

  for (const auto& r : results) {
    if (!r) continue;
    ++out.stats.matched;
    out.stats.absorbed += r->span - 1;
    if (r->dimension) ++out.stats.by_dimension[*r->dimension];
    ++out.stats.by_rule[r->rule];
  }
  out.stats.harmonized_tokens = out.stats.input_tokens - out.stats.absorbed;
  out.stats.unmatched = out.stats.harmonized_tokens - out.stats.matched;
  out.stats.matched_pct =
      out.stats.input_tokens == 0
          ? 0.0
          : round2(100.0 * static_cast<double>(out.stats.matched) /
                   static_cast<double>(out.stats.input_tokens));

  // Byte-range replacements grouped per field instance, in stream (and so
  // ascending offset) order.
  struct Splice {
    std::size_t begin = 0;
    std::size_t end = 0;
    const std::string* term = nullptr;
  };
  std::map<std::pair<std::int64_t, std::size_t>, std::vector<Splice>> splices;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i]) continue;
    const Token& first = roots[i].source;
    const Token& last = roots[i + results[i]->span - 1].source;
    Splice s;
    s.begin = first.byte_offset;
    s.end = last.byte_offset + last.byte_len;
    s.term = &results[i]->term;
    splices[{first.record_id, first.field_index}].push_back(s);
  }

  out.harmonized = dataset;
  for (auto& record : out.harmonized.records) {
    for (std::size_t f = 0; f < record.fields.size(); ++f) {
      const auto it = splices.find({record.record_id, f});
      if (it == splices.end()) continue;
      const std::string& original = record.fields[f].value;
      std::string rebuilt;
      std::size_t consumed = 0;
      for (const Splice& s : it->second) {
        rebuilt.append(original, consumed, s.begin - consumed);
        rebuilt += *s.term;
        consumed = s.end;
      }
      rebuilt.append(original, consumed, original.size() - consumed);
      record.fields[f].value = std::move(rebuilt);
    }
  }
  return out;
}

// Dump format: record_id<TAB>position<TAB>root<TAB>term<TAB>dimension<TAB>
// norm_score<TAB>rule, with '-' in the last four columns for unmatched
// tokens.
inline std::string serialize_match_rows(const std::vector<MatchRow>& rows) {
  std::string out;
  for (const auto& row : rows) {
    out += std::to_string(row.record_id);
    out += '\t';
    out += std::to_string(row.position);
    out += '\t';
    out += escape_field(row.root);
    out += '\t';
    if (row.term) {
      out += escape_field(*row.term);
      out += '\t';
      out += row.dimension ? dimension_name(*row.dimension) : "-";
      out += '\t';
      out += format_score(row.norm_score);
      out += '\t';
      out += row.rule ? match_rule_name(*row.rule) : "-";
    } else {
      out += "-\t-\t-\t-";
    }
    out += '\n';
  }
  return out;
}

// Plain-text summary: one name<TAB>value line per figure, then the
// per-dimension and per-rule selection histograms.
inline std::string format_match_report(const HarmonizeStats& stats) {
  std::string out;
  auto line = [&out](const char* name, const std::string& value) {
    out += name;
    out += '\t';
    out += value;
    out += '\n';
  };
  line("records", std::to_string(stats.records));
  line("input_tokens", std::to_string(stats.input_tokens));
  line("matched", std::to_string(stats.matched));
  line("absorbed", std::to_string(stats.absorbed));
  line("unmatched", std::to_string(stats.unmatched));
  line("harmonized_tokens", std::to_string(stats.harmonized_tokens));
  line("matched_pct", format_fixed2(stats.matched_pct));
  for (const auto& [dim, count] : stats.by_dimension) {
    out += "dimension\t";
    out += dimension_name(dim);
    out += '\t';
    out += std::to_string(count);
    out += '\n';
  }
  for (const auto& [rule, count] : stats.by_rule) {
    out += "rule\t";
    out += match_rule_name(rule);
    out += '\t';
    out += std::to_string(count);
    out += '\n';
  }
  return out;
}

}  // namespace mrm
