#include "mrm/ingest.hpp"

#include <gtest/gtest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

namespace fs = std::filesystem;

class IngestTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("mrm_ingest_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path.string();
  }

  fs::path dir_;
};

TEST_F(IngestTest, TabularMapsHeaderToFields) {
  const auto path = write("a.csv", "id,headline\n1,Police fire tear gas\n");
  const auto records = mrm::read_tabular(path);
  ASSERT_EQ(records.size(), 1u);
  ASSERT_EQ(records[0].fields.size(), 2u);
  EXPECT_EQ(records[0].fields[0].name, "id");
  EXPECT_EQ(records[0].fields[0].value, "1");
  EXPECT_EQ(records[0].fields[1].name, "headline");
  EXPECT_EQ(records[0].fields[1].value, "Police fire tear gas");
  EXPECT_EQ(records[0].origin_format, mrm::SourceFormat::Tabular);
}

TEST_F(IngestTest, TabularHeaderOnlyYieldsNoRecords) {
  const auto path = write("b.csv", "id,headline\n");
  EXPECT_TRUE(mrm::read_tabular(path).empty());
}

TEST_F(IngestTest, TabularQuotedCellsAndCrlf) {
  const auto path = write("c.csv",
                          "id,text\r\n"
                          "1,\"a, quoted\"\r\n"
                          "2,\"say \"\"hi\"\"\"\r\n");
  const auto records = mrm::read_tabular(path);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].fields[1].value, "a, quoted");
  EXPECT_EQ(records[1].fields[1].value, "say \"hi\"");
}

TEST_F(IngestTest, TabularCellCountMismatchNamesLine) {
  const auto path = write("d.csv", "a,b,c\n1,2,3\n4,5,6\n7,8\n");
  try {
    mrm::read_tabular(path);
    FAIL() << "expected FormatError";
  } catch (const mrm::FormatError& e) {
    EXPECT_NE(std::string(e.what()).find(":4: expected 3 cells, got 2"), std::string::npos)
        << e.what();
  }
}

TEST_F(IngestTest, TabularMissingFileIsIoError) {
  EXPECT_THROW(mrm::read_tabular((dir_ / "absent.csv").string()), mrm::IoError);
}

TEST_F(IngestTest, TabularStripsByteOrderMark) {
  const auto path = write("e.csv", "\xEF\xBB\xBFid\n9\n");
  const auto records = mrm::read_tabular(path);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].fields[0].name, "id");
}

TEST_F(IngestTest, TabularCustomDelimiter) {
  mrm::IngestConfig config;
  config.csv_delimiter = ';';
  const auto path = write("f.csv", "a;b\n1;2\n");
  const auto records = mrm::read_tabular(path, config);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].fields[1].value, "2");
}

TEST_F(IngestTest, SemiStructuredSingleObject) {
  const auto path = write("a.json", R"({"headline":"Snowden Hits Hurdles"})");
  const auto records = mrm::read_semistructured(path);
  ASSERT_EQ(records.size(), 1u);
  ASSERT_EQ(records[0].fields.size(), 1u);
  EXPECT_EQ(records[0].fields[0].name, "headline");
  EXPECT_EQ(records[0].fields[0].value, "Snowden Hits Hurdles");
}

TEST_F(IngestTest, SemiStructuredArrayOfObjectsAndNesting) {
  const auto path = write("b.json", R"([{"a":{"b":"x"}},{"tags":["p","q"],"n":3}])");
  const auto records = mrm::read_semistructured(path);
  ASSERT_EQ(records.size(), 2u);
  ASSERT_EQ(records[0].fields.size(), 1u);
  EXPECT_EQ(records[0].fields[0].name, "a.b");
  EXPECT_EQ(records[0].fields[0].value, "x");
  ASSERT_EQ(records[1].fields.size(), 2u);
  EXPECT_EQ(records[1].fields[0].name, "tags");
  EXPECT_EQ(records[1].fields[0].value, "p; q");
  EXPECT_EQ(records[1].fields[1].name, "n");
  EXPECT_EQ(records[1].fields[1].value, "3");
}

TEST_F(IngestTest, SemiStructuredArrayOfObjectsExpandsByIndex) {
  const auto path = write("c.json", R"({"rows":[{"t":"u"},{"t":"v"}]})");
  const auto records = mrm::read_semistructured(path);
  ASSERT_EQ(records.size(), 1u);
  ASSERT_EQ(records[0].fields.size(), 2u);
  EXPECT_EQ(records[0].fields[0].name, "rows.0.t");
  EXPECT_EQ(records[0].fields[1].name, "rows.1.t");
}

TEST_F(IngestTest, SemiStructuredScalarTopLevelRejected) {
  const auto path = write("d.json", R"("just a string")");
  EXPECT_THROW(mrm::read_semistructured(path), mrm::FormatError);
}

TEST_F(IngestTest, SemiStructuredParseErrorCitesOffset) {
  const auto path = write("e.json", R"({"a": )");
  try {
    mrm::read_semistructured(path);
    FAIL() << "expected FormatError";
  } catch (const mrm::FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("byte offset"), std::string::npos) << e.what();
  }
}

TEST_F(IngestTest, UnstructuredLineMode) {
  const auto path = write("a.txt", "a\nb\n");
  const auto records = mrm::read_unstructured(path);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].fields[0].name, "text");
  EXPECT_EQ(records[0].fields[0].value, "a");
  EXPECT_EQ(records[1].fields[0].value, "b");
}

TEST_F(IngestTest, UnstructuredEmptyFile) {
  EXPECT_TRUE(mrm::read_unstructured(write("b.txt", "")).empty());
}

TEST_F(IngestTest, UnstructuredParagraphMode) {
  mrm::IngestConfig config;
  config.paragraph_mode = true;
  const auto path = write("c.txt", "a\n\nb\nc\n");
  const auto records = mrm::read_unstructured(path, config);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].fields[0].value, "a");
  EXPECT_EQ(records[1].fields[0].value, "b\nc");
}

TEST_F(IngestTest, UnstructuredInvalidUtf8IsEncodingError) {
  const auto path = write("d.txt", std::string("ok\n\xFF\n"));
  try {
    mrm::read_unstructured(path);
    FAIL() << "expected EncodingError";
  } catch (const mrm::EncodingError& e) {
    EXPECT_NE(std::string(e.what()).find("byte offset 3"), std::string::npos) << e.what();
  }
}

TEST_F(IngestTest, TabularInvalidUtf8IsFormatError) {
  const auto path = write("g.csv", std::string("a\n\xFF\n"));
  EXPECT_THROW(mrm::read_tabular(path), mrm::FormatError);
}

TEST_F(IngestTest, UnifyReassignsDenseIdsAndRecordsProvenance) {
  const auto csv = write("u.csv", "t\nx\ny\n");
  const auto txt = write("u.txt", "p\nq\nr\n");
  mrm::ReadPart a{mrm::read_tabular(csv), csv, mrm::SourceFormat::Tabular};
  mrm::ReadPart b{mrm::read_unstructured(txt), txt, mrm::SourceFormat::Unstructured};
  const auto ds = mrm::unify({a, b});
  ASSERT_EQ(ds.records.size(), 5u);
  for (std::size_t i = 0; i < ds.records.size(); ++i)
    EXPECT_EQ(ds.records[i].record_id, static_cast<std::int64_t>(i));
  ASSERT_EQ(ds.provenance.size(), 2u);
  EXPECT_EQ(ds.provenance[0].record_count, 2u);
  EXPECT_EQ(ds.provenance[1].record_count, 3u);
  EXPECT_EQ(ds.records.size(), ds.provenance[0].record_count + ds.provenance[1].record_count);
}

TEST_F(IngestTest, UnifyOfNothingIsEmpty) {
  const auto ds = mrm::unify({});
  EXPECT_TRUE(ds.records.empty());
  EXPECT_TRUE(ds.provenance.empty());
}

TEST_F(IngestTest, SerializeEscapesFieldValues) {
  mrm::Record rec;
  rec.record_id = 0;
  rec.fields.push_back({"text", "tab\there"});
  mrm::UnifiedDataset ds;
  ds.records.push_back(rec);
  EXPECT_EQ(mrm::serialize_dataset(ds), "0\ttext\ttab\\there\n");
}

TEST_F(IngestTest, RoundTripStability) {
  const auto csv = write("r.csv", "h\none\ntwo\n");
  const auto json = write("r.json", R"([{"h":"three"}])");
  auto run = [&] {
    mrm::ReadPart a{mrm::read_tabular(csv), csv, mrm::SourceFormat::Tabular};
    mrm::ReadPart b{mrm::read_semistructured(json), json, mrm::SourceFormat::SemiStructured};
    return mrm::serialize_dataset(mrm::unify({a, b}));
  };
  EXPECT_EQ(run(), run());
}

TEST_F(IngestTest, FormatInferenceFromExtension) {
  EXPECT_EQ(mrm::source_format_from_extension("x.csv"), mrm::SourceFormat::Tabular);
  EXPECT_EQ(mrm::source_format_from_extension("x.json"), mrm::SourceFormat::SemiStructured);
  EXPECT_EQ(mrm::source_format_from_extension("x.txt"), mrm::SourceFormat::Unstructured);
  EXPECT_EQ(mrm::source_format_from_extension("x.bin"), std::nullopt);
}

}  // namespace
