#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "sqleq/dataset.hpp"
#include "sqleq/errors.hpp"
#include "sqleq/fixtures.hpp"
#include "sqleq/matcher.hpp"
#include "sqleq/oracle.hpp"
#include "sqleq/parse.hpp"
#include "sqleq/render.hpp"

using namespace sqleq;

namespace {

const std::string kFixtureDir = std::string(SQLEQ_DATA_DIR) + "/fixtures";

OracleReport run_oracle(const QueryPair& pair, CompareMode mode = CompareMode::Bag) {
  DifferentialConfig config;
  config.seed = kFixtureOracleSeed;
  config.instances = kFixtureOracleInstances;
  config.mode = mode;
  return differential_test(parse(pair.sql1), parse(pair.sql2), pair.schema, config);
}

const FixtureCase& find_case(const std::vector<FixtureCase>& cases, const std::string& id) {
  auto it = std::find_if(cases.begin(), cases.end(),
                         [&](const FixtureCase& c) { return c.id == id; });
  REQUIRE(it != cases.end());
  return *it;
}

// A scratch copy of the fixture directory that negative tests can corrupt.
struct ScratchCorpus {
  std::filesystem::path dir;

  ScratchCorpus() {
    dir = std::filesystem::temp_directory_path() /
          ("fixture_corpus_" + std::to_string(Catch::rngSeed()) + "_" +
           std::to_string(counter()++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    for (const auto& entry : std::filesystem::directory_iterator(kFixtureDir)) {
      std::filesystem::copy(entry.path(), dir / entry.path().filename());
    }
  }
  ~ScratchCorpus() { std::filesystem::remove_all(dir); }

  static int& counter() {
    static int n = 0;
    return n;
  }

  std::string path() const { return dir.string(); }

  void append_line(const char* file, const std::string& line) const {
    std::ofstream out(dir / file, std::ios::binary | std::ios::app);
    out << line << "\n";
  }

  nlohmann::json read_json(const char* file) const {
    std::ifstream in(dir / file);
    return nlohmann::json::parse(in);
  }

  void write_json(const char* file, const nlohmann::json& value) const {
    std::ofstream out(dir / file, std::ios::binary | std::ios::trunc);
    out << value.dump(2) << "\n";
  }
};

}  // namespace

TEST_CASE("fixture corpus loads with the documented shape") {
  std::vector<FixtureCase> all = load_fixtures(kFixtureDir);
  std::vector<FixtureCase> a = load_fixtures(kFixtureDir, FixtureSource::AppendixA);
  std::vector<FixtureCase> b = load_fixtures(kFixtureDir, FixtureSource::AppendixB);
  std::vector<FixtureCase> c = load_fixtures(kFixtureDir, FixtureSource::AppendixC);
  std::vector<FixtureCase> dev = load_fixtures(kFixtureDir, FixtureSource::DevSet);

  CHECK(a.size() == 4);
  CHECK(b.size() >= 11);
  CHECK(c.size() >= 8);
  CHECK(dev.size() == 14);
  CHECK(all.size() == a.size() + b.size() + c.size() + dev.size());

  std::set<std::string> ids;
  for (const FixtureCase& item : all) {
    CHECK(ids.insert(item.id).second);
    REQUIRE(item.pair.gold.has_value());
  }

  // The equivalent-pattern exemplars cover every equivalent category, the
  // inequivalent exemplars every inequivalent category.
  std::set<PatternCategory> b_categories;
  for (const FixtureCase& item : b) {
    REQUIRE(item.pair.category.has_value());
    CHECK(*item.pair.gold == PairLabel::Equivalent);
    b_categories.insert(*item.pair.category);
  }
  for (PatternCategory category : equivalent_categories()) {
    CHECK(b_categories.count(category) == 1);
  }
  std::set<PatternCategory> c_categories;
  for (const FixtureCase& item : c) {
    REQUIRE(item.pair.category.has_value());
    CHECK(*item.pair.gold == PairLabel::Inequivalent);
    c_categories.insert(*item.pair.category);
  }
  for (PatternCategory category : inequivalent_categories()) {
    CHECK(c_categories.count(category) == 1);
  }
}

TEST_CASE("fixture source names round-trip") {
  for (FixtureSource source : {FixtureSource::AppendixA, FixtureSource::AppendixB,
                               FixtureSource::AppendixC, FixtureSource::DevSet}) {
    auto back = fixture_source_from_string(to_string(source));
    REQUIRE(back.has_value());
    CHECK(*back == source);
  }
  CHECK_FALSE(fixture_source_from_string("appendix_z").has_value());
}

TEST_CASE("every fixture statement renders to a parse fixpoint") {
  for (const FixtureCase& item : load_fixtures(kFixtureDir)) {
    for (const std::string& sql : {item.pair.sql1, item.pair.sql2}) {
      std::string canonical = render(parse(sql));
      CHECK(render(parse(canonical)) == canonical);
    }
  }
}

TEST_CASE("frozen fixture expectations hold under the oracle and matchers") {
  for (const FixtureCase& item : load_fixtures(kFixtureDir)) {
    INFO(item.id);
    OracleReport report = run_oracle(item.pair);
    CHECK(report.status == item.expected.oracle);

    SelectStmt first = parse(item.pair.sql1);
    SelectStmt second = parse(item.pair.sql2);
    CHECK(exact_match(first, second).matched == item.expected.exact_match);
    CHECK(exact_set_match(first, second).matched == item.expected.exact_set_match);

    // The matchers only ever confirm equivalence.
    if (item.expected.exact_match || item.expected.exact_set_match) {
      CHECK(*item.pair.gold == PairLabel::Equivalent);
    }
  }
}

TEST_CASE("execution-accuracy exemplars separate bag from strict comparison") {
  std::vector<FixtureCase> a = load_fixtures(kFixtureDir, FixtureSource::AppendixA);

  // Unordered versus explicitly ordered output: same bag, different order.
  const FixtureCase& unordered = find_case(a, "a2-unordered-result");
  CHECK(run_oracle(unordered.pair).status == OracleStatus::EquivalentOnAllInstances);
  CHECK(run_oracle(unordered.pair, CompareMode::Strict).status ==
        OracleStatus::CounterexampleFound);

  // Same aggregate under different aliases: equal values, different headers.
  const FixtureCase& alias = find_case(a, "a2-alias-difference");
  CHECK(run_oracle(alias.pair).status == OracleStatus::EquivalentOnAllInstances);
  OracleReport strict = run_oracle(alias.pair, CompareMode::Strict);
  CHECK(strict.status == OracleStatus::CounterexampleFound);
  CHECK(strict.detail.find("totalorders") != std::string::npos);

  // The incomplete-WHERE trap: the filter drop must be caught within the
  // instance schedule even though lucky instances can mask it.
  const FixtureCase& incomplete = find_case(a, "a1-incomplete-where");
  OracleReport caught = run_oracle(incomplete.pair);
  CHECK(caught.status == OracleStatus::CounterexampleFound);
  CHECK(caught.instances_tried <= kFixtureOracleInstances);
}

TEST_CASE("a one-sided execution error surfaces as a fixture counterexample") {
  std::vector<FixtureCase> dev = load_fixtures(kFixtureDir, FixtureSource::DevSet);
  const FixtureCase& missing_group = find_case(dev, "dev06-missing-group-by");
  OracleReport report = run_oracle(missing_group.pair);
  REQUIRE(report.status == OracleStatus::CounterexampleFound);
  CHECK(report.detail.find("ungrouped column") != std::string::npos);

  std::vector<FixtureCase> c = load_fixtures(kFixtureDir, FixtureSource::AppendixC);
  const FixtureCase& scalar = find_case(c, "c5-scalar-subquery-misuse");
  OracleReport cardinality = run_oracle(scalar.pair);
  REQUIRE(cardinality.status == OracleStatus::CounterexampleFound);
  CHECK(cardinality.detail.find("scalar subquery cardinality") != std::string::npos);
}

TEST_CASE("corrupt fixture files are rejected with file and line") {
  SECTION("malformed JSON line") {
    ScratchCorpus scratch;
    scratch.append_line(kAppendixCFile, "{not json");
    try {
      load_fixtures(scratch.path(), FixtureSource::AppendixC);
      FAIL("expected FixtureCorrupt");
    } catch (const FixtureCorrupt& e) {
      CHECK(e.line() == 9);
      CHECK(std::string(e.what()).find(kAppendixCFile) != std::string::npos);
    }
  }

  SECTION("missing expectations entry") {
    ScratchCorpus scratch;
    nlohmann::json expectations = scratch.read_json(kExpectationsFile);
    expectations.erase("b03-distinct-category");
    scratch.write_json(kExpectationsFile, expectations);
    try {
      load_fixtures(scratch.path(), FixtureSource::AppendixB);
      FAIL("expected FixtureCorrupt");
    } catch (const FixtureCorrupt& e) {
      CHECK(e.line() == 3);
      CHECK(std::string(e.what()).find("b03-distinct-category") != std::string::npos);
    }
  }

  SECTION("manifest count mismatch") {
    ScratchCorpus scratch;
    nlohmann::json manifest = scratch.read_json("manifest.json");
    manifest["fixture_counts"]["appendix_a"] = 99;
    scratch.write_json("manifest.json", manifest);
    CHECK_THROWS_AS(load_fixtures(scratch.path(), FixtureSource::AppendixA), FixtureCorrupt);
    // Other sources remain loadable: the count check is per file.
    CHECK(load_fixtures(scratch.path(), FixtureSource::DevSet).size() == 14);
  }

  SECTION("equivalent-pattern file rejects a counterexample case") {
    ScratchCorpus scratch;
    // Graft an inequivalent exemplar onto the equivalent-pattern file.
    std::ifstream in(scratch.dir / kAppendixCFile);
    std::string line;
    std::getline(in, line);
    scratch.append_line(kAppendixBFile, line);
    nlohmann::json manifest = scratch.read_json("manifest.json");
    manifest["fixture_counts"]["appendix_b"] = 18;
    scratch.write_json("manifest.json", manifest);
    try {
      load_fixtures(scratch.path(), FixtureSource::AppendixB);
      FAIL("expected FixtureCorrupt");
    } catch (const FixtureCorrupt& e) {
      CHECK(e.line() == 18);
      CHECK(std::string(e.what()).find("expects a counterexample") != std::string::npos);
    }
  }

  SECTION("gold label contradicting the frozen oracle outcome") {
    ScratchCorpus scratch;
    nlohmann::json expectations = scratch.read_json(kExpectationsFile);
    expectations["b03-distinct-category"]["oracle"] = "counterexample_found";
    scratch.write_json(kExpectationsFile, expectations);
    try {
      load_fixtures(scratch.path(), FixtureSource::AppendixB);
      FAIL("expected FixtureCorrupt");
    } catch (const FixtureCorrupt& e) {
      CHECK(std::string(e.what()).find("contradicts") != std::string::npos);
    }
  }

  SECTION("missing gold label") {
    ScratchCorpus scratch;
    QueryPair bare;
    bare.id = "b99-unlabeled";
    bare.nl_question = "q";
    bare.sql1 = "SELECT 1;";
    bare.sql2 = "SELECT 1;";
    bare.schema = Schema::from_json(R"({"tables":[]})");
    scratch.append_line(kAppendixBFile, to_json_line(bare));
    nlohmann::json manifest = scratch.read_json("manifest.json");
    manifest["fixture_counts"]["appendix_b"] = 18;
    scratch.write_json("manifest.json", manifest);
    nlohmann::json expectations = scratch.read_json(kExpectationsFile);
    expectations["b99-unlabeled"] = {{"oracle", "equivalent_on_all_instances"},
                                     {"exact_match", true},
                                     {"exact_set_match", true}};
    scratch.write_json(kExpectationsFile, expectations);
    try {
      load_fixtures(scratch.path(), FixtureSource::AppendixB);
      FAIL("expected FixtureCorrupt");
    } catch (const FixtureCorrupt& e) {
      CHECK(std::string(e.what()).find("missing gold label") != std::string::npos);
    }
  }

  SECTION("missing fixture file") {
    ScratchCorpus scratch;
    std::filesystem::remove(scratch.dir / kDevSetFile);
    CHECK_THROWS_AS(load_fixtures(scratch.path(), FixtureSource::DevSet), FixtureCorrupt);
  }
}
