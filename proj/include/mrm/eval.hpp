#pragma once

// Batch evaluation harness: splits a dataset into nested prefix batches,
// runs the SRM baseline and the MRM matcher over each, and emits the
// comparison table with per-model averages.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrm/errors.hpp"
#include "mrm/ingest.hpp"
#include "mrm/matcher.hpp"
#include "mrm/preprocess.hpp"
#include "mrm/refmodel.hpp"
#include "mrm/text.hpp"

namespace mrm {

enum class Model { SRM, MRM };

inline const char* model_name(Model m) { return m == Model::SRM ? "SRM" : "MRM"; }

// Nested prefix sizes: batch k of B covers the first floor(k*N/B) records,
// so the last batch is always the whole dataset and every batch contains
// all earlier ones.
inline std::vector<std::size_t> batch_sizes(std::size_t record_count,
                                            std::size_t batch_count = 5) {
  if (batch_count == 0) throw DomainError("batch count must be positive");
  std::vector<std::size_t> sizes;
  sizes.reserve(batch_count);
  for (std::size_t k = 1; k <= batch_count; ++k)
    sizes.push_back(k * record_count / batch_count);
  return sizes;
}

struct Batch {
  std::size_t ordinal = 0;  // 1-based
  std::vector<std::size_t> record_ids;
  double fraction = 0.0;  // ordinal / batch_count
};

inline std::vector<Batch> partition_batches(const UnifiedDataset& dataset,
                                            std::size_t batch_count = 5) {
  if (dataset.records.empty()) throw DomainError("cannot batch an empty dataset");
  std::vector<Batch> batches;
  const auto sizes = batch_sizes(dataset.records.size(), batch_count);
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    Batch batch;
    batch.ordinal = k + 1;
    batch.fraction = static_cast<double>(k + 1) / static_cast<double>(batch_count);
    batch.record_ids.reserve(sizes[k]);
    for (std::size_t i = 0; i < sizes[k]; ++i)
      batch.record_ids.push_back(dataset.records[i].record_id);
    batches.push_back(std::move(batch));
  }
  return batches;
}

// Share of processed terms with a match, in percent at two decimals
// (round half away from zero).
inline double matched_percentage(std::size_t matched, std::size_t total) {
  if (matched > total) throw DomainError("matched count exceeds total");
  if (total == 0) return 0.0;
  return round2(100.0 * static_cast<double>(matched) / static_cast<double>(total));
}

struct ComparisonRow {
  std::string dataset;
  std::string batch_label;  // "1".."B", or "average"
  Model model = Model::SRM;
  bool is_average = false;
  double total_terms = 0.0;    // integral except in average rows
  double matched_terms = 0.0;  // integral except in average rows
  double matched_pct = 0.0;    // two decimals
};

// What a "term" is when counting: every processed token, or each distinct
// root once (a root counts as matched if any of its occurrences is covered
// by a match).
enum class TermCounting { Tokens, DistinctRoots };

struct EvalConfig {
  PreprocessConfig preprocess = default_preprocess_config();
  MatchConfig match;
  std::size_t batch_count = 5;
  TermCounting counting = TermCounting::Tokens;
};

// Column-wise arithmetic mean of one model's batch rows, at two decimals.
// Percentages average the per-batch values rather than re-deriving one
// from pooled counts.
inline ComparisonRow average_batches(const std::vector<ComparisonRow>& rows) {
  if (rows.empty()) throw DomainError("cannot average zero batch rows");
  ComparisonRow avg;
  avg.dataset = rows.front().dataset;
  avg.model = rows.front().model;
  avg.batch_label = "average";
  avg.is_average = true;
  for (const auto& row : rows) {
    if (row.model != avg.model || row.dataset != avg.dataset)
      throw DomainError("average_batches rows must share dataset and model");
    avg.total_terms += row.total_terms;
    avg.matched_terms += row.matched_terms;
    avg.matched_pct += row.matched_pct;
  }
  const double n = static_cast<double>(rows.size());
  avg.total_terms = round2(avg.total_terms / n);
  avg.matched_terms = round2(avg.matched_terms / n);
  avg.matched_pct = round2(avg.matched_pct / n);
  return avg;
}

// Runs both matchers over every record once, then aggregates per-record
// outcomes into the nested batches: per batch an SRM row then an MRM row,
// then the two average rows. 5 batches give 12 rows.
inline std::vector<ComparisonRow> run_experiment(const UnifiedDataset& dataset,
                                                 const std::vector<std::string>& srm_terms,
                                                 const ReferenceIndex& index,
                                                 const EvalConfig& config = {},
                                                 const std::string& dataset_label = "dataset") {
  const auto roots = generate_tokens(dataset, config.preprocess);
  const auto srm = srm_match_roots(roots, srm_terms, config.match);
  const auto mrm = mrm_match(roots, index, config.match);

  // Per-position coverage; matched phrase spans stay within one record, so
  // span expansion never leaks across a record boundary.
  std::vector<unsigned> covered(roots.size(), 0);  // bit 0: SRM, bit 1: MRM
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (srm[i]) covered[i] |= 1u;
    if (mrm[i])
      for (std::size_t k = 0; k < mrm[i]->span; ++k) covered[i + k] |= 2u;
  }

  struct PerRecord {
    std::size_t tokens = 0;
    std::size_t srm_events = 0;  // SRM matches
    std::size_t mrm_events = 0;  // MRM matches (a phrase counts once)
    std::vector<std::pair<std::string, unsigned>> root_bits;
  };
  std::map<std::int64_t, std::size_t> record_slot;
  for (std::size_t i = 0; i < dataset.records.size(); ++i)
    record_slot[dataset.records[i].record_id] = i;
  std::vector<PerRecord> per_record(dataset.records.size());
  for (std::size_t i = 0; i < roots.size(); ++i) {
    auto& rec = per_record[record_slot.at(roots[i].source.record_id)];
    ++rec.tokens;
    if (srm[i]) ++rec.srm_events;
    if (mrm[i]) ++rec.mrm_events;
    rec.root_bits.emplace_back(roots[i].root, covered[i]);
  }

  // One cumulative walk per the nested-prefix property, snapshotting counts
  // at each batch boundary.
  const auto sizes = batch_sizes(dataset.records.size(), config.batch_count);
  std::size_t tokens_total = 0, srm_events = 0, mrm_events = 0;
  std::map<std::string, unsigned> root_coverage;  // bit 0: SRM, bit 1: MRM
  std::vector<ComparisonRow> rows;
  std::size_t next_record = 0;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    for (; next_record < sizes[k]; ++next_record) {
      const auto& rec = per_record[next_record];
      tokens_total += rec.tokens;
      srm_events += rec.srm_events;
      mrm_events += rec.mrm_events;
      for (const auto& [root, bits] : rec.root_bits) root_coverage[root] |= bits;
    }
    for (Model model : {Model::SRM, Model::MRM}) {
      std::size_t total = 0, matched = 0;
      if (config.counting == TermCounting::Tokens) {
        total = tokens_total;
        matched = model == Model::SRM ? srm_events : mrm_events;
      } else {
        total = root_coverage.size();
        const unsigned bit = model == Model::SRM ? 1u : 2u;
        for (const auto& [root, bits] : root_coverage)
          if (bits & bit) ++matched;
      }
      ComparisonRow row;
      row.dataset = dataset_label;
      row.batch_label = std::to_string(k + 1);
      row.model = model;
      row.total_terms = static_cast<double>(total);
      row.matched_terms = static_cast<double>(matched);
      row.matched_pct = matched_percentage(matched, total);
      rows.push_back(std::move(row));
    }
  }

  for (Model model : {Model::SRM, Model::MRM}) {
    std::vector<ComparisonRow> model_rows;
    for (const auto& row : rows)
      if (row.model == model) model_rows.push_back(row);
    rows.push_back(average_batches(model_rows));
  }
  return rows;
}

namespace detail {

inline std::string format_count(double value, bool is_average) {
  return is_average ? format_fixed2(value) : format_int(value);
}

}  // namespace detail

inline std::string comparison_header_tsv() {
  return "dataset\tbatch\tmodel\ttotal\tmatched\tpct\n";
}

inline std::string comparison_rows_tsv(const std::vector<ComparisonRow>& rows) {
  std::string out;
  for (const auto& row : rows) {
    out += escape_field(row.dataset);
    out += '\t';
    out += row.batch_label;
    out += '\t';
    out += model_name(row.model);
    out += '\t';
    out += detail::format_count(row.total_terms, row.is_average);
    out += '\t';
    out += detail::format_count(row.matched_terms, row.is_average);
    out += '\t';
    out += format_fixed2(row.matched_pct);
    out += '\n';
  }
  return out;
}

inline std::string comparison_table_tsv(const std::vector<ComparisonRow>& rows) {
  return comparison_header_tsv() + comparison_rows_tsv(rows);
}

// Key-value tree for one dataset's rows, nested the way the comparison
// table groups them: batches, then one block per model, then the averages.
inline nlohmann::ordered_json comparison_json(const std::vector<ComparisonRow>& rows) {
  nlohmann::ordered_json out;
  auto cell = [](const ComparisonRow& row) {
    nlohmann::ordered_json c;
    if (row.is_average) {
      c["total"] = row.total_terms;
      c["matched"] = row.matched_terms;
    } else {
      c["total"] = static_cast<std::uint64_t>(row.total_terms);
      c["matched"] = static_cast<std::uint64_t>(row.matched_terms);
    }
    c["pct"] = row.matched_pct;
    return c;
  };
  out["dataset"] = rows.empty() ? "" : rows.front().dataset;
  auto& batches = out["batches"] = nlohmann::ordered_json::array();
  nlohmann::ordered_json average = nlohmann::ordered_json::object();
  std::map<std::string, std::size_t> batch_slot;
  for (const auto& row : rows) {
    if (row.is_average) {
      average[model_name(row.model)] = cell(row);
      continue;
    }
    auto it = batch_slot.find(row.batch_label);
    if (it == batch_slot.end()) {
      nlohmann::ordered_json b;
      b["batch"] = row.batch_label;
      batches.push_back(std::move(b));
      it = batch_slot.emplace(row.batch_label, batches.size() - 1).first;
    }
    batches[it->second][model_name(row.model)] = cell(row);
  }
  out["average"] = std::move(average);
  return out;
}

}  // namespace mrm
