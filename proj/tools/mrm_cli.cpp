// Command-line front end: build-index, match, evaluate, stats.
//
// Exit codes: 0 success, 1 generic failure, 2 missing input, 3 parse error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mrm/errors.hpp"
#include "mrm/eval.hpp"
#include "mrm/harmonize.hpp"
#include "mrm/ingest.hpp"
#include "mrm/matcher.hpp"
#include "mrm/preprocess.hpp"
#include "mrm/refmodel.hpp"
#include "mrm/run_config.hpp"

namespace {

void require_path(const std::string& path, const char* what) {
  if (!std::filesystem::exists(path))
    throw mrm::IoError(std::string("missing ") + what + ": " + path);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw mrm::IoError("cannot write: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw mrm::IoError("short write: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string format_index_stats(const mrm::IndexStats& stats) {
  std::string out;
  auto line = [&out](const char* name, std::size_t value) {
    out += name;
    out += '\t';
    out += std::to_string(value);
    out += '\n';
  };
  line("total_entries", stats.total_entries);
  line("distinct_roots", stats.distinct_roots);
  line("distinct_terms", stats.distinct_terms);
  line("distinct_words", stats.distinct_words);
  for (const auto& [dim, count] : stats.entries_per_dimension) {
    out += "dimension\t";
    out += mrm::dimension_name(dim);
    out += '\t';
    out += std::to_string(count);
    out += '\n';
  }
  return out;
}

mrm::ReferenceIndex build_from_model_dir(const mrm::RunConfig& config) {
  require_path(config.model_dir, "model directory");
  const auto files = mrm::find_dimension_files(config.model_dir);
  if (files.empty())
    throw mrm::IoError("no dimension files found in: " + config.model_dir);
  mrm::DimensionParseOptions options;
  options.expand_pairs = config.expand_pairs;
  options.stopwords = config.eval.preprocess.stopwords;
  std::vector<mrm::ReferenceEntry> entries;
  for (const auto& [dim, path] : files) {
    auto parsed = mrm::parse_dimension_file(path, dim, options);
    entries.insert(entries.end(), std::make_move_iterator(parsed.begin()),
                   std::make_move_iterator(parsed.end()));
  }
  return mrm::build_index(entries, config.scales);
}

// An explicit --index wins; otherwise the model directory is compiled in
// memory.
mrm::ReferenceIndex acquire_index(const mrm::RunConfig& config) {
  if (!config.index_path.empty()) {
    require_path(config.index_path, "index");
    return mrm::load_index(config.index_path);
  }
  if (!config.model_dir.empty()) return build_from_model_dir(config);
  throw mrm::IoError("missing index: provide --index or --model-dir");
}

mrm::UnifiedDataset read_inputs(const std::vector<mrm::InputSpec>& specs,
                                const mrm::IngestConfig& ingest) {
  std::vector<mrm::ReadPart> parts;
  for (const auto& spec : specs) {
    mrm::ReadPart part;
    part.path = spec.path;
    part.format = spec.format;
    part.records = mrm::read_file(spec.path, spec.format, ingest);
    parts.push_back(std::move(part));
  }
  return mrm::unify(std::move(parts));
}

int cmd_build_index(const mrm::RunConfig& config) {
  const auto index = build_from_model_dir(config);
  const std::filesystem::path out(config.index_path);
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  mrm::save_index(index, config.index_path);
  std::fputs(format_index_stats(index.stats()).c_str(), stdout);
  return 0;
}

int cmd_match(const mrm::RunConfig& config) {
  const auto index = acquire_index(config);
  const auto dataset = read_inputs(config.inputs, config.ingest);
  const auto result = mrm::run_match_pipeline(dataset, index, config.eval.preprocess,
                                              config.eval.match);
  std::filesystem::create_directories(config.out_dir);
  const std::filesystem::path out(config.out_dir);
  write_file_atomic(out / "matches.tsv", mrm::serialize_match_rows(result.rows));
  write_file_atomic(out / "harmonized.tsv", mrm::serialize_dataset(result.harmonized));
  const std::string report = mrm::format_match_report(result.stats);
  write_file_atomic(out / "report.txt", report);
  std::fputs(report.c_str(), stdout);
  return 0;
}

int cmd_evaluate(const mrm::RunConfig& config) {
  const auto index = acquire_index(config);
  require_path(config.srm_terms_path, "SRM term file");
  const auto terms = mrm::parse_srm_terms(config.srm_terms_path);

  std::string table = mrm::comparison_header_tsv();
  nlohmann::ordered_json tree = nlohmann::ordered_json::array();
  for (const auto& spec : config.inputs) {
    mrm::ReadPart part;
    part.path = spec.path;
    part.format = spec.format;
    part.records = mrm::read_file(spec.path, spec.format, config.ingest);
    auto dataset = mrm::unify({std::move(part)});
    const auto rows = mrm::run_experiment(dataset, terms, index, config.eval, spec.path);
    table += mrm::comparison_rows_tsv(rows);
    tree.push_back(mrm::comparison_json(rows));
  }

  std::filesystem::create_directories(config.out_dir);
  const std::filesystem::path out(config.out_dir);
  write_file_atomic(out / "comparison.tsv", table);
  write_file_atomic(out / "comparison.json", tree.dump(2) + "\n");
  std::fputs(table.c_str(), stdout);
  return 0;
}

int cmd_stats(const mrm::RunConfig& config) {
  const auto index = acquire_index(config);
  std::fputs(format_index_stats(index.stats()).c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multidimensional reference model toolkit"};
  app.require_subcommand(1);

  mrm::RunConfig config;
  std::vector<std::string> input_specs;
  std::string config_path;
  double srm_threshold = 0.0;
  double mrm_threshold = 0.0;
  std::size_t batches = 0;
  bool no_context_precedence = false;

  auto add_model_flags = [&](CLI::App* cmd) {
    cmd->add_option("--model-dir", config.model_dir,
                    "Directory holding <dimension>.tsv files");
    cmd->add_option("--index", config.index_path, "Compiled index file");
  };
  auto add_config_flag = [&](CLI::App* cmd) {
    return cmd->add_option("--config", config_path, "Flat key=value config file");
  };

  CLI::App* build = app.add_subcommand("build-index", "Compile dimension files into an index");
  build->add_option("--model-dir", config.model_dir, "Directory holding <dimension>.tsv files")
      ->required();
  build->add_option("--index", config.index_path, "Output path for the compiled index")
      ->required();
  add_config_flag(build);

  CLI::App* match = app.add_subcommand("match", "Match datasets and emit harmonized output");
  add_model_flags(match);
  match->add_option("--input", input_specs, "Input dataset as <path>[:<format>]")
      ->required();
  match->add_option("--out", config.out_dir, "Output directory")->required();
  CLI::Option* match_mrm = match->add_option("--mrm-threshold", mrm_threshold,
                                             "Minimum normalized candidate score");
  CLI::Option* match_nocp = match->add_flag("--no-context-precedence", no_context_precedence,
                                            "Select purely by score");
  add_config_flag(match);

  CLI::App* evaluate = app.add_subcommand("evaluate", "Batch comparison of SRM and MRM");
  add_model_flags(evaluate);
  evaluate->add_option("--input", input_specs, "Input dataset as <path>[:<format>]")
      ->required();
  evaluate->add_option("--srm-terms", config.srm_terms_path, "Flat SRM term list")
      ->required();
  evaluate->add_option("--out", config.out_dir, "Output directory")->required();
  CLI::Option* eval_srm = evaluate->add_option("--srm-threshold", srm_threshold,
                                               "Minimum SRM similarity");
  CLI::Option* eval_mrm = evaluate->add_option("--mrm-threshold", mrm_threshold,
                                               "Minimum normalized candidate score");
  CLI::Option* eval_nocp = evaluate->add_flag("--no-context-precedence", no_context_precedence,
                                              "Select purely by score");
  CLI::Option* eval_batches = evaluate->add_option("--batches", batches,
                                                   "Number of nested batches");
  add_config_flag(evaluate);

  CLI::App* stats = app.add_subcommand("stats", "Print index statistics");
  add_model_flags(stats);
  add_config_flag(stats);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (!config_path.empty()) {
      require_path(config_path, "config file");
      mrm::apply_config_file(config, config_path);
    }
    // Explicit flags override config-file values.
    if (match_mrm->count() || eval_mrm->count())
      mrm::apply_config_value(config, "mrm_threshold", mrm::format_score(mrm_threshold));
    if (eval_srm->count())
      mrm::apply_config_value(config, "srm_threshold", mrm::format_score(srm_threshold));
    if (match_nocp->count() || eval_nocp->count())
      config.eval.match.context_precedence = !no_context_precedence;
    if (eval_batches->count()) config.eval.batch_count = batches;
    for (const auto& spec : input_specs) {
      config.inputs.push_back(mrm::parse_input_spec(spec));
      require_path(config.inputs.back().path, "input");
    }

    if (build->parsed()) return cmd_build_index(config);
    if (match->parsed()) return cmd_match(config);
    if (evaluate->parsed()) return cmd_evaluate(config);
    if (stats->parsed()) return cmd_stats(config);
    return 1;
  } catch (const mrm::FormatError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const mrm::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
