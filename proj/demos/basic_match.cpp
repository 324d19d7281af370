// Builds a tiny in-memory reference model, runs the match pipeline over a
// couple of records and prints the match rows plus the harmonized dataset.

#include <cstdio>
#include <vector>

#include "mrm/harmonize.hpp"
#include "mrm/matcher.hpp"
#include "mrm/refmodel.hpp"

int main() {
  using mrm::Dimension;

  std::vector<mrm::ReferenceEntry> entries;
  auto add = [&](const char* root, const char* term, Dimension dim, double raw) {
    mrm::ReferenceEntry e;
    e.root = root;
    e.term = term;
    e.dimension = dim;
    e.raw_score = raw;
    entries.push_back(e);
  };
  add("smart", "intelligent", Dimension::Synonym, 9.2);
  add("student", "pupil", Dimension::Synonym, 9.35);
  add("happy", "cheerful", Dimension::Synonym, 9.55);
  add("happy", "mad", Dimension::Antonym, 0.95);
  add("movie", "film", Dimension::Synonym, 8.87);
  add("as well", "as well", Dimension::WordOrder, 5754);

  const mrm::ReferenceIndex index = mrm::build_index(entries);

  mrm::ReadPart part;
  part.path = "<demo>";
  part.format = mrm::SourceFormat::Unstructured;
  auto push = [&](const char* text) {
    mrm::Record rec;
    rec.fields.push_back({"text", text});
    part.records.push_back(std::move(rec));
  };
  push("A smart student watched the movie.");
  push("They sang as well as they could, happy all day.");
  const mrm::UnifiedDataset dataset = mrm::unify({part});

  mrm::PreprocessConfig preprocess = mrm::default_preprocess_config();
  preprocess.remove_stopwords = false;  // keep "as ... as" intact for the phrase
  const mrm::MatchConfig match;

  const auto result = mrm::run_match_pipeline(dataset, index, preprocess, match);

  std::printf("-- match rows --\n%s", mrm::serialize_match_rows(result.rows).c_str());
  std::printf("-- harmonized --\n%s", mrm::serialize_dataset(result.harmonized).c_str());
  std::printf("-- report --\n%s", mrm::format_match_report(result.stats).c_str());
  return 0;
}
