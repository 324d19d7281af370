#pragma once

// Readers for the three input shapes (tabular, semi-structured, unstructured)
// and the unification step that concatenates them into one record set.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mrm/errors.hpp"
#include "mrm/text.hpp"

namespace mrm {

enum class SourceFormat { Tabular, SemiStructured, Unstructured };

inline const char* source_format_name(SourceFormat f) {
  switch (f) {
    case SourceFormat::Tabular: return "tabular";
    case SourceFormat::SemiStructured: return "semi-structured";
    case SourceFormat::Unstructured: return "unstructured";
  }
  return "?";
}

// Extension-based inference, used only when the caller declares no format.
inline std::optional<SourceFormat> source_format_from_extension(const std::string& path) {
  const auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".csv") return SourceFormat::Tabular;
  if (ext == ".json") return SourceFormat::SemiStructured;
  if (ext == ".txt" || ext == ".text") return SourceFormat::Unstructured;
  return std::nullopt;
}

struct Field {
  std::string name;
  std::string value;
};

struct Record {
  std::int64_t record_id = 0;
  std::vector<Field> fields;
  SourceFormat origin_format = SourceFormat::Unstructured;
  std::string origin_path;
};

struct Provenance {
  std::string path;
  SourceFormat format = SourceFormat::Unstructured;
  std::size_t record_count = 0;
};

struct UnifiedDataset {
  std::vector<Record> records;
  std::vector<Provenance> provenance;
};

struct IngestConfig {
  char csv_delimiter = ',';
  std::string flatten_separator = ".";   // nested key joiner
  std::string array_join = "; ";         // scalar-array element joiner
  bool paragraph_mode = false;           // unstructured: blank-line-delimited paragraphs
};

namespace detail {

inline std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

// Splits into lines on '\n', tolerating a trailing '\r' per line. The final
// segment after the last newline is kept only when non-empty.
inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) {
        std::string_view last = text.substr(start);
        if (!last.empty() && last.back() == '\r') last.remove_suffix(1);
        lines.emplace_back(last);
      }
      break;
    }
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    start = nl + 1;
  }
  return lines;
}

// One CSV row. Cells may be double-quoted; "" inside quotes is a literal
// quote. Newlines inside quotes are not supported, so line numbers in
// errors stay exact.
inline std::vector<std::string> split_csv_row(const std::string& line, char delim,
                                              const std::string& path, std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cell;
  std::size_t i = 0;
  const std::size_t n = line.size();
  while (true) {
    cell.clear();
    if (i < n && line[i] == '"') {
      ++i;
      bool closed = false;
      while (i < n) {
        if (line[i] == '"') {
          if (i + 1 < n && line[i + 1] == '"') {
            cell += '"';
            i += 2;
          } else {
            ++i;
            closed = true;
            break;
          }
        } else {
          cell += line[i++];
        }
      }
      if (!closed)
        throw FormatError(path + ":" + std::to_string(line_no) + ": unterminated quoted cell");
    } else {
      while (i < n && line[i] != delim) cell += line[i++];
    }
    cells.push_back(cell);
    if (i >= n) break;
    if (line[i] != delim)
      throw FormatError(path + ":" + std::to_string(line_no) +
                        ": unexpected character after quoted cell");
    ++i;  // skip delimiter; a trailing delimiter yields a final empty cell
    if (i == n) {
      cells.emplace_back();
      break;
    }
  }
  return cells;
}

inline void check_utf8(std::string_view text, const std::string& path, bool as_encoding_error) {
  if (auto bad = utf8_invalid_at(text)) {
    const std::string msg =
        path + ": invalid UTF-8 at byte offset " + std::to_string(*bad);
    if (as_encoding_error) throw EncodingError(msg);
    throw FormatError(msg);
  }
}

inline void flatten_json(const nlohmann::ordered_json& node, const std::string& prefix,
                         const IngestConfig& config, std::vector<Field>& out) {
  if (node.is_object()) {
    for (auto it = node.begin(); it != node.end(); ++it) {
      const std::string key =
          prefix.empty() ? it.key() : prefix + config.flatten_separator + it.key();
      flatten_json(it.value(), key, config, out);
    }
    return;
  }
  if (node.is_array()) {
    const bool all_scalar =
        std::all_of(node.begin(), node.end(),
                    [](const nlohmann::ordered_json& e) { return !e.is_structured(); });
    if (all_scalar) {
      std::string joined;
      for (std::size_t k = 0; k < node.size(); ++k) {
        if (k > 0) joined += config.array_join;
        const auto& e = node[k];
        joined += e.is_string() ? e.get<std::string>() : e.dump();
      }
      out.push_back({prefix, joined});
    } else {
      for (std::size_t k = 0; k < node.size(); ++k)
        flatten_json(node[k], prefix + config.flatten_separator + std::to_string(k),
                     config, out);
    }
    return;
  }
  out.push_back({prefix, node.is_string() ? node.get<std::string>() : node.dump()});
}

}  // namespace detail

// Comma-separated text with a header row naming the fields. Cell text is
// preserved verbatim.
inline std::vector<Record> read_tabular(const std::string& path,
                                        const IngestConfig& config = {}) {
  std::string text = detail::read_file_bytes(path);
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) text.erase(0, 3);
  detail::check_utf8(text, path, false);
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw FormatError(path + ": missing header row");
  const auto header = detail::split_csv_row(lines[0], config.csv_delimiter, path, 1);
  std::vector<Record> records;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto cells = detail::split_csv_row(lines[li], config.csv_delimiter, path, li + 1);
    if (cells.size() != header.size())
      throw FormatError(path + ":" + std::to_string(li + 1) + ": expected " +
                        std::to_string(header.size()) + " cells, got " +
                        std::to_string(cells.size()));
    Record rec;
    rec.record_id = static_cast<std::int64_t>(records.size());
    rec.origin_format = SourceFormat::Tabular;
    rec.origin_path = path;
    for (std::size_t c = 0; c < cells.size(); ++c) rec.fields.push_back({header[c], cells[c]});
    records.push_back(std::move(rec));
  }
  return records;
}

// A key-value object tree or an array of objects. Each top-level object
// becomes one record; nested keys are flattened with the configured
// separator, scalar arrays joined element-wise.
inline std::vector<Record> read_semistructured(const std::string& path,
                                               const IngestConfig& config = {}) {
  const std::string text = detail::read_file_bytes(path);
  detail::check_utf8(text, path, false);
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::ordered_json::parse_error& e) {
    throw FormatError(path + ": parse error at byte offset " + std::to_string(e.byte) +
                      ": " + e.what());
  }
  std::vector<const nlohmann::ordered_json*> tops;
  if (doc.is_object()) {
    tops.push_back(&doc);
  } else if (doc.is_array()) {
    for (std::size_t k = 0; k < doc.size(); ++k) {
      if (!doc[k].is_object())
        throw FormatError(path + ": top-level array element " + std::to_string(k) +
                          " is not an object");
      tops.push_back(&doc[k]);
    }
  } else {
    throw FormatError(path + ": top-level value is not an object or array of objects");
  }
  std::vector<Record> records;
  for (const auto* obj : tops) {
    Record rec;
    rec.record_id = static_cast<std::int64_t>(records.size());
    rec.origin_format = SourceFormat::SemiStructured;
    rec.origin_path = path;
    detail::flatten_json(*obj, "", config, rec.fields);
    records.push_back(std::move(rec));
  }
  return records;
}

// UTF-8 plain text; one record per line by default, or one per
// blank-line-delimited paragraph. The single field is named "text".
inline std::vector<Record> read_unstructured(const std::string& path,
                                             const IngestConfig& config = {}) {
  const std::string text = detail::read_file_bytes(path);
  detail::check_utf8(text, path, true);
  const auto lines = detail::split_lines(text);
  std::vector<std::string> units;
  if (!config.paragraph_mode) {
    units.assign(lines.begin(), lines.end());
  } else {
    std::string block;
    for (const auto& line : lines) {
      if (line.empty()) {
        if (!block.empty()) units.push_back(std::exchange(block, {}));
      } else {
        if (!block.empty()) block += '\n';
        block += line;
      }
    }
    if (!block.empty()) units.push_back(std::move(block));
  }
  std::vector<Record> records;
  for (auto& unit : units) {
    Record rec;
    rec.record_id = static_cast<std::int64_t>(records.size());
    rec.origin_format = SourceFormat::Unstructured;
    rec.origin_path = path;
    rec.fields.push_back({"text", std::move(unit)});
    records.push_back(std::move(rec));
  }
  return records;
}

inline std::vector<Record> read_file(const std::string& path, SourceFormat format,
                                     const IngestConfig& config = {}) {
  switch (format) {
    case SourceFormat::Tabular: return read_tabular(path, config);
    case SourceFormat::SemiStructured: return read_semistructured(path, config);
    case SourceFormat::Unstructured: return read_unstructured(path, config);
  }
  throw DomainError("unknown source format");
}

struct ReadPart {
  std::vector<Record> records;
  std::string path;
  SourceFormat format = SourceFormat::Unstructured;
};

// Concatenates parts in argument order and reassigns record ids densely
// from 0, so output order is a pure function of input order.
inline UnifiedDataset unify(std::vector<ReadPart> parts) {
  UnifiedDataset ds;
  for (auto& part : parts) {
    ds.provenance.push_back({part.path, part.format, part.records.size()});
    for (auto& rec : part.records) {
      rec.record_id = static_cast<std::int64_t>(ds.records.size());
      ds.records.push_back(std::move(rec));
    }
  }
  return ds;
}

// Dump format: record_id<TAB>field_name<TAB>value, one line per field.
inline std::string serialize_dataset(const UnifiedDataset& ds) {
  std::string out;
  for (const auto& rec : ds.records) {
    for (const auto& f : rec.fields) {
      out += std::to_string(rec.record_id);
      out += '\t';
      out += escape_field(f.name);
      out += '\t';
      out += escape_field(f.value);
      out += '\n';
    }
  }
  return out;
}

}  // namespace mrm
