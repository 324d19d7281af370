// Runs the batch evaluation over the bundled sample corpus: builds the
// reference index from data/model, reads the three corpus files, and prints
// one SRM/MRM comparison table per input.

#ifndef MRM_DATA_DIR
#define MRM_DATA_DIR "data"
#endif

#include <cstdio>
#include <string>
#include <vector>

#include "mrm/eval.hpp"
#include "mrm/refmodel.hpp"
#include "mrm/run_config.hpp"

int main() {
  const std::string data_dir = MRM_DATA_DIR;

  std::vector<mrm::ReferenceEntry> entries;
  for (const auto& [dim, path] : mrm::find_dimension_files(data_dir + "/model")) {
    const auto parsed = mrm::parse_dimension_file(path, dim);
    entries.insert(entries.end(), parsed.begin(), parsed.end());
  }
  const mrm::ReferenceIndex index = mrm::build_index(entries);
  const auto srm_terms = mrm::parse_srm_terms(data_dir + "/srm_terms.txt");

  const std::vector<std::string> inputs = {
      data_dir + "/corpus/news.csv",
      data_dir + "/corpus/headlines.json",
      data_dir + "/corpus/notes.txt",
  };
  for (const auto& path : inputs) {
    const auto spec = mrm::parse_input_spec(path);
    mrm::ReadPart part;
    part.records = mrm::read_file(spec.path, spec.format);
    part.path = spec.path;
    part.format = spec.format;
    const auto dataset = mrm::unify({part});
    const auto rows = mrm::run_experiment(dataset, srm_terms, index, {}, path);
    std::printf("%s", mrm::comparison_table_tsv(rows).c_str());
    std::printf("\n");
  }
  return 0;
}
