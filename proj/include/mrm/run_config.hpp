#pragma once

// Run configuration shared by the CLI subcommands: input specs, referenced
// paths, and every tunable knob, overridable from a flat key=value config
// file (explicit command-line flags win over file values).

#include <charconv>
#include <cstddef>
#include <fstream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mrm/errors.hpp"
#include "mrm/eval.hpp"
#include "mrm/ingest.hpp"
#include "mrm/matcher.hpp"
#include "mrm/preprocess.hpp"
#include "mrm/refmodel.hpp"
#include "mrm/text.hpp"

namespace mrm {

struct InputSpec {
  std::string path;
  SourceFormat format = SourceFormat::Unstructured;
};

inline std::optional<SourceFormat> source_format_from_token(std::string_view token) {
  if (token == "csv" || token == "tabular") return SourceFormat::Tabular;
  if (token == "json" || token == "semi-structured" || token == "semistructured")
    return SourceFormat::SemiStructured;
  if (token == "txt" || token == "text" || token == "unstructured")
    return SourceFormat::Unstructured;
  return std::nullopt;
}

// `<path>:<format>`, or a bare path whose extension decides the format.
inline InputSpec parse_input_spec(const std::string& spec) {
  const std::size_t colon = spec.rfind(':');
  if (colon != std::string::npos && colon + 1 < spec.size()) {
    if (auto format = source_format_from_token(spec.substr(colon + 1)))
      return InputSpec{spec.substr(0, colon), *format};
  }
  if (auto format = source_format_from_extension(spec)) return InputSpec{spec, *format};
  throw FormatError("cannot determine input format for '" + spec +
                    "' (use <path>:<csv|json|txt>)");
}

struct RunConfig {
  std::vector<InputSpec> inputs;
  std::string model_dir;
  std::string index_path;
  std::string srm_terms_path;
  std::string out_dir;
  IngestConfig ingest;
  EvalConfig eval;  // preprocessing, matching, batching, counting
  ScoreScaleConfig scales;
  bool expand_pairs = false;  // sentence-pair dimensions also emit word pairs
};

namespace detail {

inline FormatError config_error(const std::string& path, std::size_t line_no,
                                const std::string& what) {
  return FormatError(path + ":" + std::to_string(line_no) + ": " + what);
}

inline bool parse_config_bool(const std::string& value, const std::string& path,
                              std::size_t line_no) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw config_error(path, line_no, "expected true/false, got '" + value + "'");
}

inline double parse_config_double(const std::string& value, const std::string& path,
                                  std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw config_error(path, line_no, "expected a number, got '" + value + "'");
  return v;
}

inline std::size_t parse_config_size(const std::string& value, const std::string& path,
                                     std::size_t line_no) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size() || v == 0)
    throw config_error(path, line_no, "expected a positive integer, got '" + value + "'");
  return v;
}

inline std::vector<std::string> split_comma_list(const std::string& value) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t comma = value.find(',', start);
    const std::string item =
        trim(value.substr(start, comma == std::string::npos ? value.size() - start
                                                            : comma - start));
    if (!item.empty()) items.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return items;
}

}  // namespace detail

// Applies one `key = value` assignment. Shared by the config-file reader;
// `path`/`line_no` only feed error messages.
inline void apply_config_value(RunConfig& config, const std::string& key,
                               const std::string& value, const std::string& path = "<config>",
                               std::size_t line_no = 0) {
  auto bad_range = [&](const std::string& what) {
    return detail::config_error(path, line_no, what);
  };
  if (key == "srm_threshold" || key == "mrm_threshold") {
    const double v = detail::parse_config_double(value, path, line_no);
    if (v < 0.0 || v > 1.0) throw bad_range(key + " must lie in [0,1]");
    (key == "srm_threshold" ? config.eval.match.srm_threshold
                            : config.eval.match.mrm_threshold) = v;
  } else if (key == "context_precedence") {
    config.eval.match.context_precedence = detail::parse_config_bool(value, path, line_no);
  } else if (key == "antonym_in_context") {
    config.eval.match.antonym_in_context = detail::parse_config_bool(value, path, line_no);
  } else if (key == "ngram_max") {
    config.eval.match.ngram_max = detail::parse_config_size(value, path, line_no);
  } else if (key == "dimension_priority") {
    std::vector<Dimension> priority;
    for (const auto& name : detail::split_comma_list(value)) {
      const auto dim = dimension_from_name(name);
      if (!dim) throw bad_range("unknown dimension '" + name + "'");
      priority.push_back(*dim);
    }
    std::set<Dimension> seen(priority.begin(), priority.end());
    if (priority.size() != kAllDimensions.size() || seen.size() != kAllDimensions.size())
      throw bad_range("dimension_priority must list all six dimensions once");
    config.eval.match.dimension_priority = std::move(priority);
  } else if (key == "remove_stopwords") {
    config.eval.preprocess.remove_stopwords = detail::parse_config_bool(value, path, line_no);
  } else if (key == "stopwords") {
    config.eval.preprocess.stopwords.clear();
    for (const auto& word : detail::split_comma_list(value))
      config.eval.preprocess.stopwords.insert(to_lower_ascii(word));
  } else if (key == "split_fields") {
    config.eval.preprocess.split_fields = detail::parse_config_bool(value, path, line_no);
  } else if (key == "batches") {
    config.eval.batch_count = detail::parse_config_size(value, path, line_no);
  } else if (key == "counting") {
    if (value == "tokens") {
      config.eval.counting = TermCounting::Tokens;
    } else if (value == "distinct-roots") {
      config.eval.counting = TermCounting::DistinctRoots;
    } else {
      throw bad_range("counting must be 'tokens' or 'distinct-roots'");
    }
  } else if (key == "synonym_max" || key == "antonym_max" || key == "semantic_max") {
    const double v = detail::parse_config_double(value, path, line_no);
    if (v <= 0.0) throw bad_range(key + " must be positive");
    if (key == "synonym_max") config.scales.synonym_max = v;
    if (key == "antonym_max") config.scales.antonym_max = v;
    if (key == "semantic_max") config.scales.semantic_max = v;
  } else if (key == "expand_pairs") {
    config.expand_pairs = detail::parse_config_bool(value, path, line_no);
  } else if (key == "csv_delimiter") {
    if (value.size() != 1) throw bad_range("csv_delimiter must be a single character");
    config.ingest.csv_delimiter = value[0];
  } else if (key == "paragraph_mode") {
    config.ingest.paragraph_mode = detail::parse_config_bool(value, path, line_no);
  } else {
    throw detail::config_error(path, line_no, "unknown config key '" + key + "'");
  }
}

// Flat `key = value` file; '#' comment lines and blank lines are skipped.
inline void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = detail::trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw detail::config_error(path, line_no, "expected key = value");
    const std::string key = detail::trim(stripped.substr(0, eq));
    const std::string value = detail::trim(stripped.substr(eq + 1));
    if (key.empty()) throw detail::config_error(path, line_no, "empty config key");
    apply_config_value(config, key, value, path, line_no);
  }
}

// SRM term list: one term per line, lowercased; '#' comments and blank
// lines skipped. Order is preserved, duplicates dropped.
inline std::vector<std::string> parse_srm_terms(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open SRM term file: " + path);
  std::vector<std::string> terms;
  std::set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string term = to_lower_ascii(detail::trim(line));
    if (term.empty() || term[0] == '#') continue;
    if (seen.insert(term).second) terms.push_back(term);
  }
  return terms;
}

}  // namespace mrm
