#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sqleq/dataset.hpp"
#include "sqleq/judge.hpp"
#include "sqleq/matcher.hpp"
#include "sqleq/oracle.hpp"
#include "sqleq/provider.hpp"

namespace sqleq {

// The two pipeline shapes. Basic runs normalization and the string matchers
// before any later stage; Improved additionally rewrites subqueries to joins
// right after normalization, so the matchers and the judge see the rewritten
// statements.
enum class PipelineVariant { Basic, Improved };

// Whether the Improved variant's rewrite stage runs, and whether its output
// is trusted. Auto keeps a rewritten statement only after differential
// testing confirms it against the original (the IN/EXISTS rules preserve the
// result set, not necessarily row multiplicity); On trusts the rules as-is.
// The Basic variant never rewrites, regardless of this setting.
enum class RewriteMode { Off, On, Auto };

// The stage that produced a record's verdict. None means no stage concluded.
enum class DecisionStage { ExactMatch, ExactSetMatch, Oracle, LLM, None };

enum class PipelineVerdict { Equivalent, NotEquivalent, Unstable, Undecided };

const char* to_string(PipelineVariant variant);
const char* to_string(RewriteMode mode);
const char* to_string(DecisionStage stage);
const char* to_string(PipelineVerdict verdict);

std::optional<PipelineVariant> pipeline_variant_from_string(const std::string& name);
std::optional<RewriteMode> rewrite_mode_from_string(const std::string& name);
std::optional<DecisionStage> decision_stage_from_string(const std::string& name);
std::optional<PipelineVerdict> pipeline_verdict_from_string(const std::string& name);

struct PipelineConfig {
  PipelineVariant variant = PipelineVariant::Basic;
  // Auto so that the Improved variant validates rewrites by default; select
  // Off explicitly to run Improved without its rewrite stage.
  RewriteMode rewrite = RewriteMode::Auto;
  bool matcher_enabled = true;
  bool oracle_enabled = true;
  bool llm_enabled = false;
  // Single source of truth for result comparison: it drives the oracle's
  // comparison mode (oracle.mode is overwritten) and the matchers' alias
  // sensitivity (aliases are significant only under Strict, where output
  // column names matter).
  CompareMode compare_mode = CompareMode::Bag;
  DifferentialConfig oracle;
  MatchConfig match;
  JudgeConfig judge;
  // Offline stages fan out over this many worker threads in run_dataset.
  // Pairs that reach the judge are processed sequentially in input order so
  // scripted replays and rate budgets stay deterministic.
  int workers = 4;
  // Provider calls per second in run_dataset; 0 disables throttling.
  double provider_calls_per_second = 0.0;
};

// The two published pipeline shapes: string matching straight into the judge
// with the plain prompt, and the rewrite-augmented pipeline with the
// simulated-execution prompt. Neither uses the execution oracle.
PipelineConfig basic_pipeline();
PipelineConfig improved_pipeline();

// Instances used to validate a rewrite under RewriteMode::Auto.
inline constexpr int kRewriteValidationInstances = 8;

struct EvaluationRecord {
  std::string pair_id;
  DecisionStage stage = DecisionStage::None;
  PipelineVerdict verdict = PipelineVerdict::Undecided;
  std::optional<PairLabel> gold;
  // Present when the judge stage ran for this pair.
  std::optional<Judgment> judgment;
  // Rewrite rules applied to either statement, in application order.
  std::vector<std::string> rewrite_rules;
  // Recoverable per-stage failures, each "<stage>: <message>". A stage that
  // fails is recorded here and the pipeline moves on; only ParseError
  // escapes run_pipeline.
  std::vector<std::string> errors;
  double wall_time_ms = 0.0;

  std::string to_json() const;
  // Parses a record serialized by to_json. Judge run transcripts are not
  // round-tripped; verdict counts, stability, and run count are. Raises
  // InputFormatError on malformed input.
  static EvaluationRecord from_json(const std::string& text);
};

// Evaluates one pair. Stage order: normalize, then (Improved only) rewrite,
// then exact match, then exact set match, then the execution oracle when
// enabled, then the judge when enabled and a provider is given. The first
// conclusive stage decides; the matchers only ever conclude Equivalent, the
// oracle concludes NotEquivalent on a counterexample and Equivalent when all
// instances agree, and the judge maps its verdict through unchanged. The
// oracle always tests the normalized originals, not the rewritten forms, so
// an untrusted rewrite cannot manufacture a counterexample. Raises
// ParseError when either statement fails to parse.
EvaluationRecord run_pipeline(const QueryPair& pair, const PipelineConfig& config,
                              ChatProvider* provider = nullptr);

struct LabelMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Confusion counts with Equivalent as the positive class.
struct ConfusionCounts {
  int tp = 0;  // gold Equivalent, judged Equivalent
  int fp = 0;  // gold Inequivalent, judged Equivalent
  int tn = 0;  // gold Inequivalent, judged NotEquivalent
  int fn = 0;  // gold Equivalent, judged NotEquivalent
  int total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

// How verdicts that assert neither label (Unstable, Undecided) are scored.
// The default counts them as NotEquivalent, so a pipeline that cannot
// confirm a pair is marked wrong on gold-equivalent pairs; Exclude drops
// them from the confusion matrix (they still appear in the unstable and
// undecided tallies).
enum class UnstablePolicy { ScoreAsNotEquivalent, Exclude };

struct ScoringPolicy {
  UnstablePolicy unstable = UnstablePolicy::ScoreAsNotEquivalent;
};

struct MetricsReport {
  // Per-label precision/recall/F1: `equivalent` treats Equivalent as the
  // positive class, `not_equivalent` treats NotEquivalent as positive.
  LabelMetrics equivalent;
  LabelMetrics not_equivalent;
  double accuracy = 0.0;
  ConfusionCounts counts;
  // Fraction of judge-stage pairs whose runs were stable; 1.0 when no pair
  // reached the judge (vacuously stable).
  double stability_rate = 1.0;
  // Fraction of pairs decided without any provider call.
  double gpt_call_savings = 1.0;
  // Fraction of gold-equivalent pairs the string matchers decided.
  double matcher_equivalent_recall = 0.0;
  // Fraction of gold-equivalent pairs judged Equivalent, and of
  // gold-inequivalent pairs judged NotEquivalent.
  double equivalent_passing_rate = 0.0;
  double inequivalent_passing_rate = 0.0;
  // Recorded per-stage failures bucketed by stage name.
  std::map<std::string, int> error_histogram;
  int total = 0;
  int llm_judged = 0;
  int unstable = 0;
  int undecided = 0;
  // True when every record carried a gold label and the confusion-derived
  // fields above are meaningful.
  bool scored = false;

  std::string to_json() const;
};

// Fixed-width human-readable rendering of a report.
std::string metrics_table(const MetricsReport& report);

// Precision, recall, and F1 for both labels plus accuracy, from counts.
// Zero-denominator ratios are defined as 0; F1 is the harmonic mean, 0 when
// precision and recall are both 0.
MetricsReport metrics_from_confusion(const ConfusionCounts& counts);

// Scores a batch of records against their gold labels. Every record must
// carry one (MissingGoldLabel otherwise). Unstable and Undecided verdicts
// are scored per `policy` and tallied separately either way.
MetricsReport compute_metrics(const std::vector<EvaluationRecord>& records,
                              const ScoringPolicy& policy = {});

// Fraction of judge-stage records whose verdict was stable. Pairs decided
// before the judge are excluded from the denominator; 1.0 when none reached
// the judge.
double stability_rate(const std::vector<EvaluationRecord>& records);

// Published per-label scores to reproduce from integer confusion counts.
struct MetricTargets {
  double e_precision = 0.0;
  double e_recall = 0.0;
  double e_f1 = 0.0;
  double ne_precision = 0.0;
  double ne_recall = 0.0;
  double ne_f1 = 0.0;
};

// Exhaustively searches confusion counts whose six derived scores all round
// to the targets at four decimals. With exact_totals the gold label counts
// must equal max_positives/max_negatives; otherwise any split up to those
// bounds is admitted (for scores published over a subset of the corpus).
// Returns every match, so a caller can assert the solution is unique.
std::vector<ConfusionCounts> derive_confusion_counts(const MetricTargets& targets,
                                                     int max_positives, int max_negatives,
                                                     bool exact_totals);

struct DatasetRun {
  std::vector<EvaluationRecord> records;  // input order
  MetricsReport metrics;
};

// Loads a JSONL pair file and evaluates every pair. Offline stages run on a
// bounded worker pool; pairs still undecided afterwards go through the judge
// sequentially in input order, throttled to provider_calls_per_second when
// set. A pair that throws is recorded as Undecided with the error message
// and never aborts the batch. Metrics are computed when every pair carries a
// gold label; otherwise the report holds only the label-free fields and
// scored stays false.
DatasetRun run_dataset(const std::string& path, const PipelineConfig& config,
                       ChatProvider* provider = nullptr);

}  // namespace sqleq
