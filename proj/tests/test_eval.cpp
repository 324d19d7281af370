#include "mrm/eval.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

namespace {

using mrm::Dimension;
using mrm::Model;

TEST(BatchSizes, TableShapedPrefixSizes) {
  EXPECT_EQ(mrm::batch_sizes(12820), (std::vector<std::size_t>{2564, 5128, 7692, 10256, 12820}));
  EXPECT_EQ(mrm::batch_sizes(10960)[0], 2192u);
  EXPECT_EQ(mrm::batch_sizes(28700)[0], 5740u);
  EXPECT_EQ(mrm::batch_sizes(82), (std::vector<std::size_t>{16, 32, 49, 65, 82}));
  EXPECT_EQ(mrm::batch_sizes(60)[0], 12u);
  EXPECT_EQ(mrm::batch_sizes(5), (std::vector<std::size_t>{1, 2, 3, 4, 5}));
  EXPECT_EQ(mrm::batch_sizes(3), (std::vector<std::size_t>{0, 1, 1, 2, 3}));
  EXPECT_EQ(mrm::batch_sizes(10, 2), (std::vector<std::size_t>{5, 10}));
  EXPECT_THROW(mrm::batch_sizes(10, 0), mrm::DomainError);
}

mrm::UnifiedDataset dataset_of(const std::vector<std::string>& texts) {
  mrm::UnifiedDataset ds;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    mrm::Record rec;
    rec.record_id = static_cast<std::int64_t>(i);
    rec.fields.push_back({"text", texts[i]});
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

TEST(PartitionBatches, NestedPrefixes) {
  const auto ds = dataset_of({"a", "b", "c", "d", "e", "f", "g"});
  const auto batches = mrm::partition_batches(ds);
  ASSERT_EQ(batches.size(), 5u);
  for (std::size_t k = 0; k < batches.size(); ++k) {
    EXPECT_EQ(batches[k].ordinal, k + 1);
    EXPECT_DOUBLE_EQ(batches[k].fraction, 0.2 * static_cast<double>(k + 1));
    if (k > 0) {
      ASSERT_GE(batches[k].record_ids.size(), batches[k - 1].record_ids.size());
      for (std::size_t i = 0; i < batches[k - 1].record_ids.size(); ++i)
        EXPECT_EQ(batches[k].record_ids[i], batches[k - 1].record_ids[i]);
    }
  }
  EXPECT_EQ(batches.back().record_ids.size(), ds.records.size());
}

TEST(PartitionBatches, EmptyDatasetRejected) {
  EXPECT_THROW(mrm::partition_batches(mrm::UnifiedDataset{}), mrm::DomainError);
}

TEST(MatchedPercentage, TableValues) {
  EXPECT_DOUBLE_EQ(mrm::matched_percentage(1212, 2564), 47.27);
  EXPECT_DOUBLE_EQ(mrm::matched_percentage(2080, 2564), 81.12);
  EXPECT_DOUBLE_EQ(mrm::matched_percentage(0, 100), 0.0);
  EXPECT_DOUBLE_EQ(mrm::matched_percentage(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(mrm::matched_percentage(82, 82), 100.0);
  EXPECT_THROW(mrm::matched_percentage(3, 2), mrm::DomainError);
}

TEST(MatchedPercentage, AgreesWithIntegerOracle) {
  std::mt19937 rng(41);
  std::uniform_int_distribution<std::size_t> total_pick(1, 30000);
  for (int trial = 0; trial < 5000; ++trial) {
    const std::size_t total = total_pick(rng);
    const std::size_t matched = std::uniform_int_distribution<std::size_t>(0, total)(rng);
    // Exact-half cases (10000*matched/total ends in .5) depend on binary
    // representation; the rounding direction there is covered by unit cases.
    if ((20000 * matched + total) % (2 * total) == 0) continue;
    const auto hundredths =
        static_cast<long long>((20000 * matched + total) / (2 * total));  // round-half-up
    EXPECT_DOUBLE_EQ(mrm::matched_percentage(matched, total),
                     static_cast<double>(hundredths) / 100.0)
        << matched << "/" << total;
  }
}

mrm::ReferenceEntry entry(const char* root, const char* term, Dimension dim, double raw) {
  mrm::ReferenceEntry e;
  e.root = root;
  e.term = term;
  e.dimension = dim;
  e.raw_score = raw;
  return e;
}

TEST(AverageBatches, MeanOfColumns) {
  mrm::ComparisonRow a;
  a.dataset = "d";
  a.batch_label = "1";
  a.model = Model::SRM;
  a.total_terms = 16;
  a.matched_terms = 15;
  a.matched_pct = 47.27;
  mrm::ComparisonRow b = a;
  b.batch_label = "2";
  b.total_terms = 82;
  b.matched_terms = 70;
  b.matched_pct = 43.72;
  const auto avg = mrm::average_batches({a, b});
  EXPECT_EQ(avg.batch_label, "average");
  EXPECT_TRUE(avg.is_average);
  EXPECT_DOUBLE_EQ(avg.matched_pct, 45.50);  // mean of the percentages
  EXPECT_DOUBLE_EQ(avg.total_terms, 49.00);  // mean of the totals
  EXPECT_DOUBLE_EQ(avg.matched_terms, 42.50);
}

TEST(AverageBatches, IdenticalRowsAverageToThemselves) {
  std::vector<mrm::ComparisonRow> rows(5);
  for (auto& row : rows) {
    row.dataset = "d";
    row.model = Model::MRM;
    row.total_terms = 40;
    row.matched_terms = 4;
    row.matched_pct = 10.00;
  }
  const auto avg = mrm::average_batches(rows);
  EXPECT_DOUBLE_EQ(avg.matched_pct, 10.00);
  EXPECT_DOUBLE_EQ(avg.total_terms, 40.00);
}

TEST(AverageBatches, RejectsEmptyAndMixedInput) {
  EXPECT_THROW(mrm::average_batches({}), mrm::DomainError);
  mrm::ComparisonRow a;
  a.dataset = "d";
  a.model = Model::SRM;
  mrm::ComparisonRow b = a;
  b.model = Model::MRM;
  EXPECT_THROW(mrm::average_batches({a, b}), mrm::DomainError);
}

// Five records whose match outcomes were worked out by hand, token by token,
// and frozen here. Any drift in tokenization, stemming, thresholds, batch
// slicing or rounding shows up as a row mismatch.
class TraceExperiment : public ::testing::Test {
protected:
  void SetUp() override {
    dataset_ = dataset_of({
        "smart student",
        "happy teacher welcomes all",
        "as well as possible",
        "the movie was wonderful",
        "students enjoy bizarre films today now",
    });
    index_ = mrm::build_index({
        entry("smart", "intelligent", Dimension::Synonym, 9.2),
        entry("student", "pupil", Dimension::Synonym, 9.35),
        entry("happy", "cheerful", Dimension::Synonym, 9.55),
        entry("teacher", "instructor", Dimension::Synonym, 9.25),
        entry("movie", "film", Dimension::Synonym, 8.87),
        entry("wonderful", "terrific", Dimension::Synonym, 8.63),
        entry("bizarre", "strange", Dimension::Synonym, 9.37),
        entry("film", "movie", Dimension::Synonym, 8.0),
        entry("as well", "as well", Dimension::WordOrder, 5754),
    });
    srm_terms_ = {"smart", "student", "happy", "film", "wonderful"};
    config_.preprocess.stopwords.clear();  // keep every token, incl. "as"/"the"
  }

  mrm::UnifiedDataset dataset_;
  mrm::ReferenceIndex index_;
  std::vector<std::string> srm_terms_;
  mrm::EvalConfig config_;
};

TEST_F(TraceExperiment, RowsMatchHandComputedTrace) {
  const auto rows = mrm::run_experiment(dataset_, srm_terms_, index_, config_, "trace");
  ASSERT_EQ(rows.size(), 12u);

  struct Expected {
    const char* batch;
    Model model;
    double total, matched, pct;
  };
  const Expected want[] = {
      {"1", Model::SRM, 2, 2, 100.00},  {"1", Model::MRM, 2, 2, 100.00},
      {"2", Model::SRM, 6, 3, 50.00},   {"2", Model::MRM, 6, 4, 66.67},
      {"3", Model::SRM, 10, 3, 30.00},  {"3", Model::MRM, 10, 5, 50.00},
      {"4", Model::SRM, 14, 4, 28.57},  {"4", Model::MRM, 14, 7, 50.00},
      {"5", Model::SRM, 20, 6, 30.00},  {"5", Model::MRM, 20, 10, 50.00},
      {"average", Model::SRM, 10.40, 3.60, 47.71},
      {"average", Model::MRM, 10.40, 5.60, 63.33},
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].dataset, "trace");
    EXPECT_EQ(rows[i].batch_label, want[i].batch) << "row " << i;
    EXPECT_EQ(rows[i].model, want[i].model) << "row " << i;
    EXPECT_DOUBLE_EQ(rows[i].total_terms, want[i].total) << "row " << i;
    EXPECT_DOUBLE_EQ(rows[i].matched_terms, want[i].matched) << "row " << i;
    EXPECT_DOUBLE_EQ(rows[i].matched_pct, want[i].pct) << "row " << i;
    EXPECT_EQ(rows[i].is_average, rows[i].batch_label == std::string("average"));
  }
}

TEST_F(TraceExperiment, AverageUsesMeanOfPercentagesNotPooledCounts) {
  const auto rows = mrm::run_experiment(dataset_, srm_terms_, index_, config_, "trace");
  double batch_total = 0, batch_matched = 0;
  for (const auto& row : rows)
    if (!row.is_average && row.model == Model::SRM) {
      batch_total += row.total_terms;
      batch_matched += row.matched_terms;
    }
  const double pooled = mrm::round2(100.0 * batch_matched / batch_total);
  EXPECT_DOUBLE_EQ(pooled, 34.62);            // what the other definition would give
  EXPECT_DOUBLE_EQ(rows[10].matched_pct, 47.71);  // what the emitted average is
}

TEST_F(TraceExperiment, RowArithmeticRecomputes) {
  const auto rows = mrm::run_experiment(dataset_, srm_terms_, index_, config_, "trace");
  for (const auto& row : rows) {
    if (row.is_average) continue;
    EXPECT_DOUBLE_EQ(row.matched_pct,
                     mrm::matched_percentage(static_cast<std::size_t>(row.matched_terms),
                                             static_cast<std::size_t>(row.total_terms)));
  }
}

TEST_F(TraceExperiment, TotalsAreModelIndependent) {
  const auto rows = mrm::run_experiment(dataset_, srm_terms_, index_, config_, "trace");
  for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
    EXPECT_EQ(rows[i].batch_label, rows[i + 1].batch_label);
    EXPECT_EQ(rows[i].model, Model::SRM);
    EXPECT_EQ(rows[i + 1].model, Model::MRM);
    EXPECT_DOUBLE_EQ(rows[i].total_terms, rows[i + 1].total_terms);
  }
}

TEST_F(TraceExperiment, SerializedTableIsStable) {
  const auto rows = mrm::run_experiment(dataset_, srm_terms_, index_, config_, "trace");
  const std::string expected =
      "dataset\tbatch\tmodel\ttotal\tmatched\tpct\n"
      "trace\t1\tSRM\t2\t2\t100.00\n"
      "trace\t1\tMRM\t2\t2\t100.00\n"
      "trace\t2\tSRM\t6\t3\t50.00\n"
      "trace\t2\tMRM\t6\t4\t66.67\n"
      "trace\t3\tSRM\t10\t3\t30.00\n"
      "trace\t3\tMRM\t10\t5\t50.00\n"
      "trace\t4\tSRM\t14\t4\t28.57\n"
      "trace\t4\tMRM\t14\t7\t50.00\n"
      "trace\t5\tSRM\t20\t6\t30.00\n"
      "trace\t5\tMRM\t20\t10\t50.00\n"
      "trace\taverage\tSRM\t10.40\t3.60\t47.71\n"
      "trace\taverage\tMRM\t10.40\t5.60\t63.33\n";
  EXPECT_EQ(mrm::comparison_table_tsv(rows), expected);
}

TEST_F(TraceExperiment, JsonTreeMirrorsTable) {
  const auto rows = mrm::run_experiment(dataset_, srm_terms_, index_, config_, "trace");
  const auto doc = mrm::comparison_json(rows);
  EXPECT_EQ(doc["dataset"], "trace");
  ASSERT_EQ(doc["batches"].size(), 5u);
  EXPECT_EQ(doc["batches"][0]["batch"], "1");
  EXPECT_EQ(doc["batches"][1]["SRM"]["total"], 6);
  EXPECT_EQ(doc["batches"][1]["MRM"]["matched"], 4);
  EXPECT_DOUBLE_EQ(doc["batches"][1]["MRM"]["pct"].get<double>(), 66.67);
  EXPECT_DOUBLE_EQ(doc["average"]["SRM"]["pct"].get<double>(), 47.71);
  EXPECT_DOUBLE_EQ(doc["average"]["MRM"]["matched"].get<double>(), 5.60);
  // Key order is part of the format: dataset first, then batches, then average.
  const std::string dumped = doc.dump();
  EXPECT_LT(dumped.find("\"dataset\""), dumped.find("\"batches\""));
  EXPECT_LT(dumped.find("\"batches\""), dumped.find("\"average\""));
}

TEST(RunExperiment, FullCoverageGivesHundredPercent) {
  const auto ds = dataset_of({"alpha beta", "beta gamma", "alpha gamma", "beta beta", "gamma"});
  const auto index = mrm::build_index({
      entry("alpha", "a", Dimension::Synonym, 9.0),
      entry("beta", "b", Dimension::Synonym, 9.0),
      entry("gamma", "c", Dimension::Synonym, 9.0),
  });
  const auto rows = mrm::run_experiment(ds, {}, index, {}, "full");
  for (const auto& row : rows) {
    if (row.model == Model::MRM) {
      EXPECT_DOUBLE_EQ(row.matched_pct, 100.00);
    }
  }
}

TEST(RunExperiment, NoCoverageGivesZero) {
  const auto ds = dataset_of({"alpha beta", "beta gamma", "alpha", "beta", "gamma"});
  const auto index = mrm::build_index({entry("zzz", "z", Dimension::Synonym, 9.0)});
  const auto rows = mrm::run_experiment(ds, {"qqq"}, index, {}, "none");
  for (const auto& row : rows) EXPECT_DOUBLE_EQ(row.matched_pct, 0.0);
}

TEST(RunExperiment, EmptyPrefixBatchEmitsZeroRow) {
  const auto ds = dataset_of({"alpha", "beta", "gamma"});  // 3 records, 5 batches
  const auto index = mrm::build_index({entry("alpha", "a", Dimension::Synonym, 9.0)});
  const auto rows = mrm::run_experiment(ds, {}, index, {}, "tiny");
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_DOUBLE_EQ(rows[0].total_terms, 0.0);  // batch 1 holds floor(3/5) = 0 records
  EXPECT_DOUBLE_EQ(rows[0].matched_pct, 0.0);
  EXPECT_DOUBLE_EQ(rows[10].total_terms, mrm::round2((0 + 1 + 1 + 2 + 3) / 5.0));
}

TEST(RunExperiment, DistinctRootCountingCollapsesRepeats) {
  const auto ds = dataset_of({"happy happy student"});
  const auto index = mrm::build_index({entry("happy", "cheerful", Dimension::Synonym, 9.55)});
  mrm::EvalConfig config;
  config.batch_count = 1;

  auto rows = mrm::run_experiment(ds, {"happy"}, index, config, "tok");
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_DOUBLE_EQ(rows[0].total_terms, 3.0);  // three tokens
  EXPECT_DOUBLE_EQ(rows[0].matched_terms, 2.0);
  EXPECT_DOUBLE_EQ(rows[1].matched_terms, 2.0);

  config.counting = mrm::TermCounting::DistinctRoots;
  rows = mrm::run_experiment(ds, {"happy"}, index, config, "roots");
  EXPECT_DOUBLE_EQ(rows[0].total_terms, 2.0);  // roots: happy, student
  EXPECT_DOUBLE_EQ(rows[0].matched_terms, 1.0);
  EXPECT_DOUBLE_EQ(rows[1].matched_terms, 1.0);
  EXPECT_DOUBLE_EQ(rows[0].matched_pct, 50.00);
}

TEST(RunExperiment, PhraseSpanCoversAllItsTokensInDistinctMode) {
  const auto ds = dataset_of({"as well"});
  const auto index = mrm::build_index({entry("as well", "as well", Dimension::WordOrder, 100)});
  mrm::EvalConfig config;
  config.preprocess.stopwords.clear();
  config.batch_count = 1;
  config.counting = mrm::TermCounting::DistinctRoots;
  const auto rows = mrm::run_experiment(ds, {}, index, config, "span");
  // Tokens "as" and "well" are both covered by the single phrase match.
  EXPECT_DOUBLE_EQ(rows[1].total_terms, 2.0);
  EXPECT_DOUBLE_EQ(rows[1].matched_terms, 2.0);
  EXPECT_DOUBLE_EQ(rows[1].matched_pct, 100.00);
}

}  // namespace
