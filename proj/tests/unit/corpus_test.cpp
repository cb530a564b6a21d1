#include <doctest.h>

#include "cqj/corpus.hpp"
#include "support.hpp"

using namespace cqj;

namespace {

SchemaConfig manual_schema() {
  SchemaConfig s;
  s.column_map = {{"query", "query"},       {"question", "question"}, {"option_1", "option_1"},
                  {"option_2", "option_2"}, {"label", "question_label"}};
  s.label_value_map = {{"0", Label::Bad}, {"1", Label::Fair}, {"2", Label::Good}};
  s.dataset = Dataset::from_name("MimicsManual");
  return s;
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::Io;
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("well-formed row maps onto a record") {
  const auto res = parse_corpus(
      "query\tquestion\toption_1\toption_2\tquestion_label\n"
      "headache\tWhat do you want to know about headache?\tsymptom\ttreatment\t2\n",
      manual_schema());
  REQUIRE(res.records.size() == 1);
  CHECK(res.errors.empty());
  const auto& r = res.records[0];
  CHECK(r.query == "headache");
  CHECK(r.options == std::vector<std::string>{"symptom", "treatment"});
  CHECK(r.label == Label::Good);
  CHECK(r.id == "MimicsManual-2");
}

TEST_CASE("row-level problems become row errors") {
  const auto res = parse_corpus(
      "query\tquestion\toption_1\toption_2\tquestion_label\n"
      "a\t\tx\ty\t1\n"
      "b\tWhich b?\tx\ty\t7\n"
      "c\tWhich c?\tx\t1\n"
      "\n"
      "d\tWhich d?\t\t\t\n",
      manual_schema());
  REQUIRE(res.errors.size() == 3);
  CHECK(res.errors[0].code == Errc::EmptyQueryOrQuestion);
  CHECK(res.errors[0].line == 2);
  CHECK(res.errors[1].code == Errc::UnmappableLabel);
  CHECK(res.errors[2].code == Errc::MalformedRow);
  REQUIRE(res.records.size() == 1);
  CHECK(res.records[0].query == "d");
  CHECK_FALSE(res.records[0].label.has_value());
  CHECK(res.records[0].options.empty());
  CHECK(format_row_errors(res.errors).starts_with("line\tcode\tmessage\n2\tEmptyQueryOrQuestion\t"));
}

TEST_CASE("missing required column fails the whole file") {
  CHECK(code_of([] { parse_corpus("qry\tquestion\tquestion_label\nx\ty\t1\n", manual_schema()); }) ==
        Errc::MissingColumn);
}

TEST_CASE("unmapped columns land in extras") {
  const auto res = parse_corpus(
      "query\tquestion\toption_1\toption_2\tquestion_label\timpressions\n"
      "q\tWhich q?\ta\tb\t0\t1234\n",
      manual_schema());
  REQUIRE(res.records.size() == 1);
  CHECK(res.records[0].extras.at("impressions") == "1234");
}

TEST_CASE("headerless files bind columns by index") {
  SchemaConfig s;
  s.has_header = false;
  s.delimiter = ',';
  s.column_map = {{"query", "0"}, {"question", "1"}, {"label", "2"}};
  s.label_value_map = {{"g", Label::Good}};
  const auto res = parse_corpus("jaguar,Which jaguar do you mean?,g\n", s);
  REQUIRE(res.records.size() == 1);
  CHECK(res.records[0].label == Label::Good);
}

TEST_CASE("bundled presets load") {
  const auto presets = load_schema_presets(CQJ_DATA_DIR "/schemas.conf");
  REQUIRE(presets.count("mimics-manual") == 1);
  REQUIRE(presets.count("mimics-duo") == 1);
  CHECK(presets.at("mimics-manual").label_value_map.at("2") == Label::Good);
  CHECK(presets.at("mimics-duo").label_value_map.at("3") == Label::Fair);
  CHECK(presets.at("mimics-duo").dataset.display_name() == "MimicsDuo");
}

TEST_CASE("preset parser rejects unknown keys and labels") {
  CHECK_THROWS_AS(parse_schema_presets("[x]\nwhatever = 1\n"), Error);
  CHECK_THROWS_AS(parse_schema_presets("[x]\nlabel.1 = Great\n"), Error);
  CHECK_THROWS_AS(parse_schema_presets("dataset = X\n"), Error);
}

TEST_CASE("jsonl round trip") {
  std::vector<ClarificationRecord> recs{
      test::make_record("a", "jaguar", "Which jaguar do you mean?", {"car", "animal"}, Label::Good),
      test::make_record("b", "q \"quoted\"", "Tab\there?", {}, std::nullopt, Dataset::from_name("MimicsDuo")),
      test::make_record("c", "ünïcode", "What?", {"x"}, Label::Bad, Dataset::from_name("Custom"))};
  recs[0].extras["k"] = "v";
  const auto text = write_jsonl(recs);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  CHECK(read_jsonl(text) == recs);
  CHECK(write_jsonl(read_jsonl(text)) == text);
  CHECK(read_jsonl("").empty());
  CHECK(write_jsonl({}).empty());
}

TEST_CASE("truncated json line reports its line number") {
  const std::vector<ClarificationRecord> recs{test::make_record("a", "q", "Which q?", {}, Label::Fair)};
  const std::string text = write_jsonl(recs) + "{\"id\": \"b\", \"query\"\n";
  try {
    read_jsonl(text);
    FAIL("expected MalformedLine");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MalformedLine);
    CHECK(std::string(e.what()).find("line=2") != std::string::npos);
  }
}

TEST_CASE("parse is deterministic") {
  const std::string raw =
      "query\tquestion\toption_1\toption_2\tquestion_label\n"
      "a\tWhich a?\tx\ty\t1\n"
      "b\tWhich b?\tx\t\t2\n";
  CHECK(write_jsonl(parse_corpus(raw, manual_schema()).records) ==
        write_jsonl(parse_corpus(raw, manual_schema()).records));
}

}
