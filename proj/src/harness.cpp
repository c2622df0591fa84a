#include "sqleq/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "sqleq/errors.hpp"
#include "sqleq/normalize.hpp"
#include "sqleq/parse.hpp"
#include "sqleq/render.hpp"
#include "sqleq/rewrite.hpp"

namespace sqleq {

using json = nlohmann::ordered_json;

const char* to_string(PipelineVariant variant) {
  switch (variant) {
    case PipelineVariant::Basic:
      return "basic";
    case PipelineVariant::Improved:
      return "improved";
  }
  return "basic";
}

const char* to_string(RewriteMode mode) {
  switch (mode) {
    case RewriteMode::Off:
      return "off";
    case RewriteMode::On:
      return "on";
    case RewriteMode::Auto:
      return "auto";
  }
  return "auto";
}

const char* to_string(DecisionStage stage) {
  switch (stage) {
    case DecisionStage::ExactMatch:
      return "exact_match";
    case DecisionStage::ExactSetMatch:
      return "exact_set_match";
    case DecisionStage::Oracle:
      return "oracle";
    case DecisionStage::LLM:
      return "llm";
    case DecisionStage::None:
      return "none";
  }
  return "none";
}

const char* to_string(PipelineVerdict verdict) {
  switch (verdict) {
    case PipelineVerdict::Equivalent:
      return "equivalent";
    case PipelineVerdict::NotEquivalent:
      return "not_equivalent";
    case PipelineVerdict::Unstable:
      return "unstable";
    case PipelineVerdict::Undecided:
      return "undecided";
  }
  return "undecided";
}

std::optional<PipelineVariant> pipeline_variant_from_string(const std::string& name) {
  if (name == "basic") return PipelineVariant::Basic;
  if (name == "improved") return PipelineVariant::Improved;
  return std::nullopt;
}

std::optional<RewriteMode> rewrite_mode_from_string(const std::string& name) {
  if (name == "off") return RewriteMode::Off;
  if (name == "on") return RewriteMode::On;
  if (name == "auto") return RewriteMode::Auto;
  return std::nullopt;
}

std::optional<DecisionStage> decision_stage_from_string(const std::string& name) {
  if (name == "exact_match") return DecisionStage::ExactMatch;
  if (name == "exact_set_match") return DecisionStage::ExactSetMatch;
  if (name == "oracle") return DecisionStage::Oracle;
  if (name == "llm") return DecisionStage::LLM;
  if (name == "none") return DecisionStage::None;
  return std::nullopt;
}

std::optional<PipelineVerdict> pipeline_verdict_from_string(const std::string& name) {
  if (name == "equivalent") return PipelineVerdict::Equivalent;
  if (name == "not_equivalent") return PipelineVerdict::NotEquivalent;
  if (name == "unstable") return PipelineVerdict::Unstable;
  if (name == "undecided") return PipelineVerdict::Undecided;
  return std::nullopt;
}

PipelineConfig basic_pipeline() {
  PipelineConfig config;
  config.variant = PipelineVariant::Basic;
  config.oracle_enabled = false;
  config.llm_enabled = true;
  config.judge.kind = TemplateKind::Basic;
  return config;
}

PipelineConfig improved_pipeline() {
  PipelineConfig config;
  config.variant = PipelineVariant::Improved;
  config.rewrite = RewriteMode::On;
  config.oracle_enabled = false;
  config.llm_enabled = true;
  config.judge.kind = TemplateKind::MiniatureMull;
  return config;
}

namespace {

// Statements as the stages see them: `first`/`second` feed the matchers and
// the judge (rewritten under the Improved variant), the originals feed the
// oracle.
struct PreparedPair {
  SelectStmt first;
  SelectStmt second;
  SelectStmt original_first;
  SelectStmt original_second;
};

MatchConfig effective_match(const PipelineConfig& config) {
  MatchConfig match = config.match;
  match.alias_sensitive = config.compare_mode == CompareMode::Strict;
  return match;
}

DifferentialConfig effective_oracle(const PipelineConfig& config) {
  DifferentialConfig oracle = config.oracle;
  oracle.mode = config.compare_mode;
  return oracle;
}

// Applies one side's rewrite, validating it under Auto. Returns the
// statement to keep and appends applied rules; validation failures and
// unsupported shapes land in `record.errors`.
SelectStmt rewrite_side(const SelectStmt& original, const Schema& schema,
                        const PipelineConfig& config, EvaluationRecord& record) {
  RewriteReport report;
  try {
    report = rewrite_subqueries(original);
  } catch (const UnsupportedSubquery& e) {
    record.errors.push_back(std::string("rewrite: ") + e.what());
    return original;
  }
  if (report.unchanged) return original;
  if (config.rewrite == RewriteMode::Auto) {
    DifferentialConfig check = effective_oracle(config);
    check.instances = kRewriteValidationInstances;
    check.mode = CompareMode::Bag;
    OracleReport oracle = differential_test(original, report.statement, schema, check);
    if (oracle.status != OracleStatus::EquivalentOnAllInstances) {
      std::string rules;
      for (const std::string& rule : report.rules_applied) {
        if (!rules.empty()) rules += ", ";
        rules += rule;
      }
      record.errors.push_back("rewrite: validation rejected " + rules + " (" +
                              to_string(oracle.status) + ")");
      return original;
    }
  }
  record.rewrite_rules.insert(record.rewrite_rules.end(), report.rules_applied.begin(),
                              report.rules_applied.end());
  return normalize(report.statement, config.match.normalization);
}

PreparedPair prepare(const QueryPair& pair, const PipelineConfig& config,
                     EvaluationRecord& record) {
  PreparedPair prepared;
  prepared.original_first = normalize(parse(pair.sql1), config.match.normalization);
  prepared.original_second = normalize(parse(pair.sql2), config.match.normalization);
  prepared.first = prepared.original_first;
  prepared.second = prepared.original_second;
  if (config.variant == PipelineVariant::Improved && config.rewrite != RewriteMode::Off) {
    prepared.first = rewrite_side(prepared.original_first, pair.schema, config, record);
    prepared.second = rewrite_side(prepared.original_second, pair.schema, config, record);
  }
  return prepared;
}

PipelineVerdict verdict_of(JudgeVerdict verdict) {
  switch (verdict) {
    case JudgeVerdict::Equivalent:
      return PipelineVerdict::Equivalent;
    case JudgeVerdict::NotEquivalent:
      return PipelineVerdict::NotEquivalent;
    case JudgeVerdict::Unstable:
      return PipelineVerdict::Unstable;
  }
  return PipelineVerdict::Unstable;
}

// Runs the judge stage for a prepared pair, updating the record in place.
void apply_judge(const QueryPair& pair, const PreparedPair& prepared,
                 const PipelineConfig& config, ChatProvider& provider,
                 EvaluationRecord& record) {
  PromptInputs inputs;
  inputs.nl_question = pair.nl_question;
  inputs.sql1 = render(prepared.first);
  inputs.sql2 = render(prepared.second);
  inputs.schema = &pair.schema;
  try {
    Judgment judgment = judge(inputs, provider, config.judge);
    record.stage = DecisionStage::LLM;
    record.verdict = verdict_of(judgment.verdict);
    record.judgment = std::move(judgment);
  } catch (const ProviderError& e) {
    record.errors.push_back(std::string("llm: ") + e.what());
  } catch (const MissingSlot& e) {
    record.errors.push_back(std::string("llm: ") + e.what());
  }
}

// Offline pipeline stages (everything up to the judge). Fills stage and
// verdict when one of them concludes; leaves Undecided otherwise.
void run_offline_stages(const QueryPair& pair, const PreparedPair& prepared,
                        const PipelineConfig& config, EvaluationRecord& record) {
  if (config.matcher_enabled) {
    MatchConfig match = effective_match(config);
    if (exact_match(prepared.first, prepared.second, match).matched) {
      record.stage = DecisionStage::ExactMatch;
      record.verdict = PipelineVerdict::Equivalent;
      return;
    }
    if (exact_set_match(prepared.first, prepared.second, match).matched) {
      record.stage = DecisionStage::ExactSetMatch;
      record.verdict = PipelineVerdict::Equivalent;
      return;
    }
  }
  if (config.oracle_enabled) {
    OracleReport oracle = differential_test(prepared.original_first, prepared.original_second,
                                            pair.schema, effective_oracle(config));
    switch (oracle.status) {
      case OracleStatus::CounterexampleFound:
        record.stage = DecisionStage::Oracle;
        record.verdict = PipelineVerdict::NotEquivalent;
        return;
      case OracleStatus::EquivalentOnAllInstances:
        record.stage = DecisionStage::Oracle;
        record.verdict = PipelineVerdict::Equivalent;
        return;
      case OracleStatus::ExecutionFailed:
        record.errors.push_back("oracle: " + (oracle.detail.empty()
                                                  ? std::string("no instance was comparable")
                                                  : oracle.detail));
        break;
    }
  }
}

EvaluationRecord error_record(const QueryPair& pair, const std::string& message) {
  EvaluationRecord record;
  record.pair_id = pair.id;
  record.gold = pair.gold;
  record.errors.push_back("pipeline: " + message);
  return record;
}

// Serializes provider access and applies the dataset-level rate budget.
class ThrottledProvider : public ChatProvider {
 public:
  ThrottledProvider(ChatProvider& inner, double calls_per_second)
      : inner_(inner),
        limiter_(calls_per_second > 0.0
                     ? std::make_unique<RateLimiter>(calls_per_second, 1.0)
                     : nullptr) {}

  std::string complete(const std::string& prompt, double temperature) override {
    if (limiter_) limiter_->acquire();
    return inner_.complete(prompt, temperature);
  }

 private:
  ChatProvider& inner_;
  std::unique_ptr<RateLimiter> limiter_;
};

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

EvaluationRecord run_pipeline(const QueryPair& pair, const PipelineConfig& config,
                              ChatProvider* provider) {
  auto start = std::chrono::steady_clock::now();
  EvaluationRecord record;
  record.pair_id = pair.id;
  record.gold = pair.gold;
  PreparedPair prepared = prepare(pair, config, record);
  run_offline_stages(pair, prepared, config, record);
  if (record.verdict == PipelineVerdict::Undecided && config.llm_enabled) {
    if (provider == nullptr) {
      record.errors.push_back("llm: stage enabled but no provider configured");
    } else {
      apply_judge(pair, prepared, config, *provider, record);
    }
  }
  record.wall_time_ms = elapsed_ms(start);
  return record;
}

std::string EvaluationRecord::to_json() const {
  json doc;
  doc["id"] = pair_id;
  doc["stage"] = to_string(stage);
  doc["verdict"] = to_string(verdict);
  if (gold) doc["gold"] = to_string(*gold);
  if (judgment) {
    json votes;
    for (const auto& [vote, count] : judgment->vote_counts) votes[to_string(vote)] = count;
    doc["judge"] = {{"verdict", to_string(judgment->verdict)},
                    {"stable", judgment->stable},
                    {"runs", judgment->runs.size()},
                    {"votes", std::move(votes)}};
  }
  if (!rewrite_rules.empty()) doc["rewrite_rules"] = rewrite_rules;
  if (!errors.empty()) doc["errors"] = errors;
  doc["wall_time_ms"] = std::round(wall_time_ms * 1000.0) / 1000.0;
  return doc.dump();
}

EvaluationRecord EvaluationRecord::from_json(const std::string& text) {
  auto malformed = [](const std::string& message) {
    return InputFormatError("evaluation record", 1, message);
  };
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw malformed("not a JSON object");
  EvaluationRecord record;
  try {
    record.pair_id = doc.at("id").get<std::string>();
    auto stage = decision_stage_from_string(doc.at("stage").get<std::string>());
    auto verdict = pipeline_verdict_from_string(doc.at("verdict").get<std::string>());
    if (!stage || !verdict) throw malformed("unknown stage or verdict name");
    record.stage = *stage;
    record.verdict = *verdict;
    if (doc.contains("gold")) {
      auto gold = pair_label_from_string(doc["gold"].get<std::string>());
      if (!gold) throw malformed("unknown gold label");
      record.gold = *gold;
    }
    if (doc.contains("judge")) {
      const json& j = doc["judge"];
      Judgment judgment;
      judgment.stable = j.at("stable").get<bool>();
      std::string name = j.at("verdict").get<std::string>();
      if (name == "equivalent") judgment.verdict = JudgeVerdict::Equivalent;
      else if (name == "not_equivalent") judgment.verdict = JudgeVerdict::NotEquivalent;
      else if (name == "unstable") judgment.verdict = JudgeVerdict::Unstable;
      else throw malformed("unknown judge verdict");
      judgment.runs.resize(j.at("runs").get<std::size_t>());
      if (j.contains("votes")) {
        for (const auto& [vote, count] : j["votes"].items()) {
          if (vote == "equivalent") judgment.vote_counts[RunVerdict::Equivalent] = count;
          else if (vote == "not_equivalent")
            judgment.vote_counts[RunVerdict::NotEquivalent] = count;
          else if (vote == "undetermined")
            judgment.vote_counts[RunVerdict::Undetermined] = count;
        }
      }
      record.judgment = std::move(judgment);
    }
    if (doc.contains("rewrite_rules"))
      record.rewrite_rules = doc["rewrite_rules"].get<std::vector<std::string>>();
    if (doc.contains("errors")) record.errors = doc["errors"].get<std::vector<std::string>>();
    if (doc.contains("wall_time_ms")) record.wall_time_ms = doc["wall_time_ms"].get<double>();
  } catch (const json::exception& e) {
    throw malformed(e.what());
  }
  return record;
}

namespace {

LabelMetrics label_metrics(int tp, int fp, int fn) {
  LabelMetrics metrics;
  metrics.precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  metrics.recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  double sum = metrics.precision + metrics.recall;
  metrics.f1 = sum > 0.0 ? 2.0 * metrics.precision * metrics.recall / sum : 0.0;
  return metrics;
}

double round4(double x) { return std::round(x * 10000.0) / 10000.0; }

bool matches4(double value, double target) {
  return std::abs(round4(value) - target) < 1e-9;
}

}  // namespace

MetricsReport metrics_from_confusion(const ConfusionCounts& counts) {
  MetricsReport report;
  report.counts = counts;
  report.total = counts.total();
  report.equivalent = label_metrics(counts.tp, counts.fp, counts.fn);
  // NotEquivalent as positive: its true positives are the tn cell, its false
  // positives the pairs wrongly pushed to NotEquivalent (fn), and its misses
  // the pairs wrongly kept Equivalent (fp).
  report.not_equivalent = label_metrics(counts.tn, counts.fn, counts.fp);
  report.accuracy =
      report.total > 0 ? static_cast<double>(counts.tp + counts.tn) / report.total : 0.0;
  report.scored = true;
  return report;
}

double stability_rate(const std::vector<EvaluationRecord>& records) {
  int judged = 0;
  int stable = 0;
  for (const EvaluationRecord& record : records) {
    if (record.stage != DecisionStage::LLM) continue;
    ++judged;
    if (record.judgment && record.judgment->stable) ++stable;
  }
  return judged > 0 ? static_cast<double>(stable) / judged : 1.0;
}

MetricsReport compute_metrics(const std::vector<EvaluationRecord>& records,
                              const ScoringPolicy& policy) {
  ConfusionCounts counts;
  int matcher_equivalent = 0;
  int gold_equivalent = 0;
  int gold_inequivalent = 0;
  int passed_equivalent = 0;
  int passed_inequivalent = 0;
  int llm_judged = 0;
  int unstable = 0;
  int undecided = 0;
  std::map<std::string, int> histogram;
  for (const EvaluationRecord& record : records) {
    if (!record.gold) throw MissingGoldLabel(record.pair_id);
    for (const std::string& error : record.errors) {
      std::string category = error.substr(0, error.find(':'));
      ++histogram[category];
    }
    if (record.stage == DecisionStage::LLM) ++llm_judged;
    if (record.verdict == PipelineVerdict::Unstable) ++unstable;
    if (record.verdict == PipelineVerdict::Undecided) ++undecided;
    bool gold_eq = *record.gold == PairLabel::Equivalent;
    (gold_eq ? gold_equivalent : gold_inequivalent)++;
    if (gold_eq && (record.stage == DecisionStage::ExactMatch ||
                    record.stage == DecisionStage::ExactSetMatch))
      ++matcher_equivalent;
    std::optional<bool> predicted_eq;
    switch (record.verdict) {
      case PipelineVerdict::Equivalent:
        predicted_eq = true;
        break;
      case PipelineVerdict::NotEquivalent:
        predicted_eq = false;
        break;
      case PipelineVerdict::Unstable:
      case PipelineVerdict::Undecided:
        if (policy.unstable == UnstablePolicy::ScoreAsNotEquivalent) predicted_eq = false;
        break;
    }
    if (!predicted_eq) continue;
    if (gold_eq && *predicted_eq) ++counts.tp, ++passed_equivalent;
    else if (gold_eq) ++counts.fn;
    else if (*predicted_eq) ++counts.fp;
    else ++counts.tn, ++passed_inequivalent;
  }
  MetricsReport report = metrics_from_confusion(counts);
  report.total = static_cast<int>(records.size());
  report.stability_rate = stability_rate(records);
  report.gpt_call_savings =
      records.empty() ? 1.0
                      : static_cast<double>(report.total - llm_judged) / report.total;
  report.matcher_equivalent_recall =
      gold_equivalent > 0 ? static_cast<double>(matcher_equivalent) / gold_equivalent : 0.0;
  report.equivalent_passing_rate =
      gold_equivalent > 0 ? static_cast<double>(passed_equivalent) / gold_equivalent : 0.0;
  report.inequivalent_passing_rate =
      gold_inequivalent > 0 ? static_cast<double>(passed_inequivalent) / gold_inequivalent
                            : 0.0;
  report.error_histogram = std::move(histogram);
  report.llm_judged = llm_judged;
  report.unstable = unstable;
  report.undecided = undecided;
  return report;
}

std::vector<ConfusionCounts> derive_confusion_counts(const MetricTargets& targets,
                                                     int max_positives, int max_negatives,
                                                     bool exact_totals) {
  std::vector<ConfusionCounts> matches;
  int min_positives = exact_totals ? max_positives : 0;
  int min_negatives = exact_totals ? max_negatives : 0;
  for (int positives = min_positives; positives <= max_positives; ++positives) {
    for (int negatives = min_negatives; negatives <= max_negatives; ++negatives) {
      if (positives + negatives == 0) continue;
      for (int tp = 0; tp <= positives; ++tp) {
        int fn = positives - tp;
        for (int tn = 0; tn <= negatives; ++tn) {
          ConfusionCounts counts{tp, negatives - tn, tn, fn};
          MetricsReport report = metrics_from_confusion(counts);
          if (matches4(report.equivalent.precision, targets.e_precision) &&
              matches4(report.equivalent.recall, targets.e_recall) &&
              matches4(report.equivalent.f1, targets.e_f1) &&
              matches4(report.not_equivalent.precision, targets.ne_precision) &&
              matches4(report.not_equivalent.recall, targets.ne_recall) &&
              matches4(report.not_equivalent.f1, targets.ne_f1)) {
            matches.push_back(counts);
          }
        }
      }
    }
  }
  return matches;
}

std::string MetricsReport::to_json() const {
  json doc;
  auto label = [](const LabelMetrics& m) {
    return json{{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
  };
  doc["scored"] = scored;
  doc["total"] = total;
  if (scored) {
    doc["equivalent"] = label(equivalent);
    doc["not_equivalent"] = label(not_equivalent);
    doc["accuracy"] = accuracy;
    doc["counts"] = {{"tp", counts.tp}, {"fp", counts.fp}, {"tn", counts.tn}, {"fn", counts.fn}};
    doc["matcher_equivalent_recall"] = matcher_equivalent_recall;
    doc["equivalent_passing_rate"] = equivalent_passing_rate;
    doc["inequivalent_passing_rate"] = inequivalent_passing_rate;
  }
  doc["stability_rate"] = stability_rate;
  doc["gpt_call_savings"] = gpt_call_savings;
  doc["llm_judged"] = llm_judged;
  doc["unstable"] = unstable;
  doc["undecided"] = undecided;
  json histogram = json::object();
  for (const auto& [category, count] : error_histogram) histogram[category] = count;
  doc["error_histogram"] = std::move(histogram);
  return doc.dump(2);
}

std::string metrics_table(const MetricsReport& report) {
  std::ostringstream out;
  char line[160];
  if (report.scored) {
    std::snprintf(line, sizeof(line), "%-16s %9s %9s %9s\n", "label", "precision", "recall",
                  "f1");
    out << line;
    std::snprintf(line, sizeof(line), "%-16s %9.4f %9.4f %9.4f\n", "equivalent",
                  report.equivalent.precision, report.equivalent.recall, report.equivalent.f1);
    out << line;
    std::snprintf(line, sizeof(line), "%-16s %9.4f %9.4f %9.4f\n", "not_equivalent",
                  report.not_equivalent.precision, report.not_equivalent.recall,
                  report.not_equivalent.f1);
    out << line;
    std::snprintf(line, sizeof(line), "accuracy %.4f  (tp %d, fp %d, tn %d, fn %d)\n",
                  report.accuracy, report.counts.tp, report.counts.fp, report.counts.tn,
                  report.counts.fn);
    out << line;
    std::snprintf(line, sizeof(line), "passing rate: equivalent %.4f, inequivalent %.4f\n",
                  report.equivalent_passing_rate, report.inequivalent_passing_rate);
    out << line;
  }
  std::snprintf(line, sizeof(line),
                "pairs %d  judged %d  unstable %d  undecided %d\n", report.total,
                report.llm_judged, report.unstable, report.undecided);
  out << line;
  std::snprintf(line, sizeof(line), "stability %.4f  gpt-call savings %.4f\n",
                report.stability_rate, report.gpt_call_savings);
  out << line;
  if (!report.error_histogram.empty()) {
    out << "errors:";
    for (const auto& [category, count] : report.error_histogram)
      out << " " << category << "=" << count;
    out << "\n";
  }
  return out.str();
}

DatasetRun run_dataset(const std::string& path, const PipelineConfig& config,
                       ChatProvider* provider) {
  std::vector<QueryPair> pairs = load_pairs(path);
  DatasetRun run;
  run.records.resize(pairs.size());

  PipelineConfig offline = config;
  offline.llm_enabled = false;
  int workers = std::max(1, config.workers);
  if (pairs.size() < static_cast<std::size_t>(workers))
    workers = static_cast<int>(std::max<std::size_t>(pairs.size(), 1));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < pairs.size(); i = next.fetch_add(1)) {
      try {
        run.records[i] = run_pipeline(pairs[i], offline, nullptr);
      } catch (const std::exception& e) {
        run.records[i] = error_record(pairs[i], e.what());
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int i = 0; i < workers; ++i) pool.emplace_back(work);
  for (std::thread& thread : pool) thread.join();

  if (config.llm_enabled && provider != nullptr) {
    ThrottledProvider throttled(*provider, config.provider_calls_per_second);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      EvaluationRecord& record = run.records[i];
      if (record.verdict != PipelineVerdict::Undecided) continue;
      // A pair that already failed outright (e.g. unparseable SQL) cannot be
      // prompted either.
      if (!record.errors.empty() && record.errors.front().rfind("pipeline:", 0) == 0) continue;
      auto start = std::chrono::steady_clock::now();
      try {
        PipelineConfig judge_only = config;
        EvaluationRecord scratch;
        PreparedPair prepared = prepare(pairs[i], judge_only, scratch);
        apply_judge(pairs[i], prepared, judge_only, throttled, record);
      } catch (const std::exception& e) {
        record.errors.push_back(std::string("llm: ") + e.what());
      }
      record.wall_time_ms += elapsed_ms(start);
    }
  }

  bool all_gold = !run.records.empty();
  for (const EvaluationRecord& record : run.records)
    if (!record.gold) all_gold = false;
  if (all_gold) {
    run.metrics = compute_metrics(run.records);
  } else {
    MetricsReport report;
    report.total = static_cast<int>(run.records.size());
    report.stability_rate = stability_rate(run.records);
    int llm_judged = 0;
    for (const EvaluationRecord& record : run.records) {
      if (record.stage == DecisionStage::LLM) ++llm_judged;
      if (record.verdict == PipelineVerdict::Unstable) ++report.unstable;
      if (record.verdict == PipelineVerdict::Undecided) ++report.undecided;
      for (const std::string& error : record.errors)
        ++report.error_histogram[error.substr(0, error.find(':'))];
    }
    report.llm_judged = llm_judged;
    report.gpt_call_savings =
        run.records.empty()
            ? 1.0
            : static_cast<double>(report.total - llm_judged) / report.total;
    run.metrics = report;
  }
  return run;
}

}  // namespace sqleq
