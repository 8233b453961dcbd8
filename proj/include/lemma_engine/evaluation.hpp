#pragma once

// Accuracy scoring, ablation grids and delta summaries, with TSV and aligned
// plain-text rendering.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lemma_engine/training.hpp"
#include "lemma_engine/vectors.hpp"

namespace lemma_engine {

struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

struct EvalOptions {
  bool case_insensitive = false;  // lemma comparison only
};

struct FileEval {
  std::string name;
  std::string group;  // optional grouping label, e.g. classical / cross-genre
  uint64_t tokens = 0;  // regular tokens seen
  uint64_t lemma_scored = 0;
  uint64_t lemma_correct = 0;
  uint64_t upos_scored = 0;
  uint64_t upos_correct = 0;

  double lemma_accuracy() const {
    return lemma_scored ? 100.0 * lemma_correct / lemma_scored : 0.0;
  }
  double upos_accuracy() const {
    return upos_scored ? 100.0 * upos_correct / upos_scored : 0.0;
  }
};

struct EvalReport {
  std::vector<FileEval> files;
};

// Exact-match accuracy per token, separately for lemma and UPOS; only tokens
// whose gold value is present are scored, range ids and empty nodes never.
// Throws EvalError when the document has no scorable tokens at all.
FileEval evaluate(const ModelParams& params, const Document& gold,
                  uint32_t source_id, const EvalOptions& options = {},
                  const ExternalVectors* ext = nullptr, std::string name = "",
                  std::string group = "");

FileEval evaluate(const BaselineModel& baseline, const Document& gold,
                  const EvalOptions& options = {}, std::string name = "",
                  std::string group = "");

// ---- ablation grid ----

struct TestSpec {
  std::string path;
  std::string group;
  std::optional<std::string> source;  // corpus name or author; generic if unset
};

struct RunSpec {
  std::string name;
  std::string corpus_config;
  std::optional<Granularity> granularity;         // overrides the config's
  std::optional<std::string> external_vectors;    // sidecar directory
  Hyperparams hp;
  std::vector<TestSpec> tests;
};

struct Comparison {
  std::string name;
  std::vector<std::string> a;  // run names, paired positionally with b
  std::vector<std::string> b;
};

struct AblationSpec {
  std::vector<RunSpec> runs;
  std::vector<Comparison> comparisons;
};

// Run file JSON: {"runs":[{"name","corpus_config","granularity"?,
//   "external_vectors":path|null,"hyperparams":{...},
//   "tests":[{"path","group","source"?}]}],
//   "comparisons":[{"name","a":[run...],"b":[run...]}]?}
// Relative paths resolve against the run file's directory.
AblationSpec load_ablation_spec(const std::string& path);
AblationSpec parse_ablation_spec(const std::string& json_text,
                                 const std::string& base_dir);

struct AblationCell {
  bool present = false;
  uint64_t lemma_scored = 0, lemma_correct = 0;
  uint64_t upos_scored = 0, upos_correct = 0;

  double lemma_accuracy() const {
    return lemma_scored ? 100.0 * lemma_correct / lemma_scored : 0.0;
  }
  double upos_accuracy() const {
    return upos_scored ? 100.0 * upos_correct / upos_scored : 0.0;
  }
};

struct AblationRow {
  std::string run;
  std::string granularity;
  bool vectors = false;
  bool failed = false;
  std::string error;
  std::vector<AblationCell> cells;  // parallel to AblationOutcome::groups
  EvalReport report;                // per-file results, feeds delta_report
};

struct DeltaColumn {
  std::string group;
  double lemma_delta = 0;  // mean percentage points, a - b
  double upos_delta = 0;
};

struct DeltaReport {
  std::vector<DeltaColumn> columns;
  size_t pairs = 0;
};

struct AblationOutcome {
  std::vector<std::string> groups;  // first-appearance order across runs
  std::vector<AblationRow> rows;
  std::vector<std::pair<std::string, DeltaReport>> deltas;  // per comparison
};

// Trains and evaluates every run; a failing run marks its row failed and the
// grid continues. Rerunning with identical seeds reproduces every cell.
AblationOutcome ablate(const AblationSpec& spec, std::ostream* progress = nullptr);

// Mean per-group percentage-point deltas over positionally paired reports.
// Throws EvalError when the two lists disagree in length or group structure.
DeltaReport delta_report(const std::vector<EvalReport>& a,
                         const std::vector<EvalReport>& b);

// ---- rendering ----

std::string format_accuracy(double percent);      // "96.19"
std::string format_delta(double percentage_points);  // "+0.430", "-1.500", "0.000"

// Resolves a sidecar argument: a directory maps to <dir>/<key>.vec, a plain
// file is returned as-is when allowed.
std::string resolve_sidecar(const std::string& vectors_arg, const std::string& key,
                            bool allow_direct_file);

std::string render_eval_tsv(const EvalReport& report);
std::string render_eval_table(const EvalReport& report);
std::string render_ablation_tsv(const AblationOutcome& outcome);
std::string render_ablation_table(const AblationOutcome& outcome);

}  // namespace lemma_engine
