#include "sqleq/fixtures.hpp"

#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "sqleq/errors.hpp"

namespace sqleq {

namespace {

struct SourceFile {
  FixtureSource source;
  const char* file;
  const char* key;  // manifest key and serialized name
};

constexpr SourceFile kSourceFiles[] = {
    {FixtureSource::AppendixA, kAppendixAFile, "appendix_a"},
    {FixtureSource::AppendixB, kAppendixBFile, "appendix_b"},
    {FixtureSource::AppendixC, kAppendixCFile, "appendix_c"},
    {FixtureSource::DevSet, kDevSetFile, "dev_set"},
};

std::string read_file(const std::string& path, const char* name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FixtureCorrupt(name, 0, "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Parses the expectations sidecar into a per-id table.
std::map<std::string, FixtureExpectation> load_expectations(const std::string& dir) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(read_file(dir + "/" + kExpectationsFile, kExpectationsFile));
  } catch (const nlohmann::json::exception& e) {
    throw FixtureCorrupt(kExpectationsFile, 1, std::string("invalid JSON: ") + e.what());
  }
  if (!parsed.is_object()) {
    throw FixtureCorrupt(kExpectationsFile, 1, "expected an object keyed by fixture id");
  }
  std::map<std::string, FixtureExpectation> expectations;
  for (const auto& [id, entry] : parsed.items()) {
    FixtureExpectation expected;
    try {
      std::string oracle = entry.at("oracle").get<std::string>();
      if (oracle == "equivalent_on_all_instances") {
        expected.oracle = OracleStatus::EquivalentOnAllInstances;
      } else if (oracle == "counterexample_found") {
        expected.oracle = OracleStatus::CounterexampleFound;
      } else if (oracle == "execution_failed") {
        expected.oracle = OracleStatus::ExecutionFailed;
      } else {
        throw FixtureCorrupt(kExpectationsFile, 1, id + ": unknown oracle status " + oracle);
      }
      expected.exact_match = entry.at("exact_match").get<bool>();
      expected.exact_set_match = entry.at("exact_set_match").get<bool>();
    } catch (const nlohmann::json::exception& e) {
      throw FixtureCorrupt(kExpectationsFile, 1, id + ": " + e.what());
    }
    expectations.emplace(id, expected);
  }
  return expectations;
}

// Manifest counts per source file; absent entries mean "unchecked".
std::map<std::string, std::size_t> load_manifest_counts(const std::string& dir) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(read_file(dir + "/manifest.json", "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    throw FixtureCorrupt("manifest.json", 1, std::string("invalid JSON: ") + e.what());
  }
  std::map<std::string, std::size_t> counts;
  if (parsed.contains("fixture_counts")) {
    for (const auto& [key, value] : parsed["fixture_counts"].items()) {
      if (!value.is_number_unsigned()) {
        throw FixtureCorrupt("manifest.json", 1, "fixture_counts." + key + " must be a count");
      }
      counts[key] = value.get<std::size_t>();
    }
  }
  return counts;
}

void append_source(std::vector<FixtureCase>& cases, const std::string& dir,
                   const SourceFile& info,
                   const std::map<std::string, FixtureExpectation>& expectations,
                   const std::map<std::string, std::size_t>& manifest_counts) {
  const std::string path = dir + "/" + info.file;
  std::ifstream in(path);
  if (!in) throw FixtureCorrupt(info.file, 0, "cannot open file");
  std::string line;
  std::size_t line_number = 0;
  std::size_t loaded = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    FixtureCase item;
    item.source = info.source;
    try {
      item.pair = query_pair_from_json(line);
    } catch (const InputFormatError& e) {
      throw FixtureCorrupt(info.file, line_number, e.what());
    } catch (const ParseError& e) {
      throw FixtureCorrupt(info.file, line_number, std::string("bad SQL: ") + e.what());
    }
    item.id = item.pair.id;
    auto expected = expectations.find(item.id);
    if (expected == expectations.end()) {
      throw FixtureCorrupt(info.file, line_number, item.id + ": no expectations entry");
    }
    item.expected = expected->second;
    if (!item.pair.gold) {
      throw FixtureCorrupt(info.file, line_number, item.id + ": missing gold label");
    }
    // The gold label and the frozen oracle outcome must tell the same story.
    bool gold_equivalent = *item.pair.gold == PairLabel::Equivalent;
    bool oracle_equivalent = item.expected.oracle == OracleStatus::EquivalentOnAllInstances;
    if (gold_equivalent != oracle_equivalent) {
      throw FixtureCorrupt(info.file, line_number,
                           item.id + ": gold label contradicts expected oracle outcome");
    }
    // Per-source polarity: every equivalent-pattern exemplar must survive all
    // instances, every inequivalent-pattern exemplar must yield a
    // counterexample.
    if (info.source == FixtureSource::AppendixB && !oracle_equivalent) {
      throw FixtureCorrupt(info.file, line_number,
                           item.id + ": equivalent-pattern case expects a counterexample");
    }
    if (info.source == FixtureSource::AppendixC && oracle_equivalent) {
      throw FixtureCorrupt(info.file, line_number,
                           item.id + ": inequivalent-pattern case expects equivalence");
    }
    cases.push_back(std::move(item));
    ++loaded;
  }
  auto manifest = manifest_counts.find(info.key);
  if (manifest != manifest_counts.end() && manifest->second != loaded) {
    throw FixtureCorrupt(info.file, 0,
                         std::string("manifest expects ") + std::to_string(manifest->second) +
                             " cases, file has " + std::to_string(loaded));
  }
}

}  // namespace

const char* to_string(FixtureSource source) {
  for (const SourceFile& info : kSourceFiles) {
    if (info.source == source) return info.key;
  }
  return "?";
}

std::optional<FixtureSource> fixture_source_from_string(const std::string& name) {
  for (const SourceFile& info : kSourceFiles) {
    if (name == info.key) return info.source;
  }
  return std::nullopt;
}

std::vector<FixtureCase> load_fixtures(const std::string& dir,
                                       std::optional<FixtureSource> filter) {
  std::map<std::string, FixtureExpectation> expectations = load_expectations(dir);
  std::map<std::string, std::size_t> manifest_counts = load_manifest_counts(dir);
  std::vector<FixtureCase> cases;
  for (const SourceFile& info : kSourceFiles) {
    if (filter && *filter != info.source) continue;
    append_source(cases, dir, info, expectations, manifest_counts);
  }
  return cases;
}

}  // namespace sqleq
