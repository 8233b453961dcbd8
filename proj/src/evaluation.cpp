#include "lemma_engine/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "lemma_engine/unicode.hpp"

namespace lemma_engine {

namespace {

namespace fs = std::filesystem;

struct Scorer {
  const EvalOptions& options;
  FileEval result;

  void token(const Token& token, const Prediction& pred) {
    result.tokens++;
    if (usable_for_lemma(token)) {
      result.lemma_scored++;
      bool match = options.case_insensitive
                       ? unicode::lowercase(pred.lemma) == unicode::lowercase(*token.lemma)
                       : pred.lemma == *token.lemma;
      if (match) result.lemma_correct++;
    }
    if (usable_for_upos(token)) {
      result.upos_scored++;
      if (pred.upos == *token.upos) result.upos_correct++;
    }
  }

  FileEval finish(std::string name, std::string group) {
    if (result.lemma_scored == 0 && result.upos_scored == 0)
      throw EvalError("document" + (name.empty() ? "" : " " + name) +
                      " has no scorable tokens");
    result.name = std::move(name);
    result.group = std::move(group);
    return std::move(result);
  }
};

}  // namespace

FileEval evaluate(const ModelParams& params, const Document& gold,
                  uint32_t source_id, const EvalOptions& options,
                  const ExternalVectors* ext, std::string name, std::string group) {
  if (ext) check_alignment(*ext, gold, name.empty() ? "vectors" : name);
  Scorer scorer{options, {}};
  for (size_t si = 0; si < gold.sentences.size(); si++) {
    const Sentence& sentence = gold.sentences[si];
    const std::vector<std::vector<float>>* vecs = ext ? &ext->sentences[si] : nullptr;
    for (const Prediction& pred : predict_sentence(params, sentence, source_id, vecs))
      scorer.token(sentence.tokens[pred.token_index], pred);
  }
  return scorer.finish(std::move(name), std::move(group));
}

FileEval evaluate(const BaselineModel& baseline, const Document& gold,
                  const EvalOptions& options, std::string name, std::string group) {
  Scorer scorer{options, {}};
  for (const Sentence& sentence : gold.sentences)
    for (const Prediction& pred : baseline_predict_sentence(baseline, sentence))
      scorer.token(sentence.tokens[pred.token_index], pred);
  return scorer.finish(std::move(name), std::move(group));
}

AblationSpec parse_ablation_spec(const std::string& json_text,
                                 const std::string& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw EvalError(std::string("run file is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("runs") || !j["runs"].is_array())
    throw EvalError("run file must be an object with a \"runs\" array");

  auto resolve = [&base_dir](std::string path) {
    if (!base_dir.empty() && fs::path(path).is_relative())
      return (fs::path(base_dir) / path).string();
    return path;
  };

  AblationSpec spec;
  for (const auto& r : j["runs"]) {
    RunSpec run;
    if (!r.contains("name") || !r.contains("corpus_config"))
      throw EvalError("every run needs \"name\" and \"corpus_config\"");
    run.name = r["name"].get<std::string>();
    run.corpus_config = resolve(r["corpus_config"].get<std::string>());
    if (r.contains("granularity") && !r["granularity"].is_null())
      run.granularity = granularity_from_string(r["granularity"].get<std::string>());
    if (r.contains("external_vectors") && !r["external_vectors"].is_null())
      run.external_vectors = resolve(r["external_vectors"].get<std::string>());
    if (r.contains("hyperparams")) {
      const auto& h = r["hyperparams"];
      run.hp.epochs = h.value("epochs", run.hp.epochs);
      run.hp.learning_rate = h.value("learning_rate", run.hp.learning_rate);
      run.hp.seed = h.value("seed", run.hp.seed);
      run.hp.dev_fraction = h.value("dev_fraction", run.hp.dev_fraction);
      run.hp.hash_dim = h.value("hash_dim", run.hp.hash_dim);
      run.hp.window = h.value("window", run.hp.window);
      run.hp.allow_copy = h.value("allow_copy", run.hp.allow_copy);
    }
    if (r.contains("tests")) {
      for (const auto& t : r["tests"]) {
        TestSpec test;
        test.path = resolve(t.at("path").get<std::string>());
        test.group = t.value("group", std::string());
        if (t.contains("source") && !t["source"].is_null())
          test.source = t["source"].get<std::string>();
        run.tests.push_back(std::move(test));
      }
    }
    for (const RunSpec& existing : spec.runs)
      if (existing.name == run.name)
        throw EvalError("duplicate run name '" + run.name + "'");
    spec.runs.push_back(std::move(run));
  }

  if (j.contains("comparisons")) {
    for (const auto& c : j["comparisons"]) {
      Comparison cmp;
      cmp.name = c.at("name").get<std::string>();
      for (const auto& n : c.at("a")) cmp.a.push_back(n.get<std::string>());
      for (const auto& n : c.at("b")) cmp.b.push_back(n.get<std::string>());
      if (cmp.a.size() != cmp.b.size() || cmp.a.empty())
        throw EvalError("comparison '" + cmp.name +
                        "' needs equally long, non-empty run lists");
      spec.comparisons.push_back(std::move(cmp));
    }
  }
  return spec;
}

AblationSpec load_ablation_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EvalError("cannot open run file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_ablation_spec(buf.str(), fs::path(path).parent_path().string());
}

std::string resolve_sidecar(const std::string& vectors_arg, const std::string& key,
                            bool allow_direct_file) {
  if (fs::is_directory(vectors_arg))
    return (fs::path(vectors_arg) / (key + ".vec")).string();
  if (allow_direct_file) return vectors_arg;
  throw VectorsError("expected a sidecar directory, got a file: " + vectors_arg);
}

AblationOutcome ablate(const AblationSpec& spec, std::ostream* progress) {
  if (spec.runs.empty()) throw EvalError("run file has an empty runs list");

  AblationOutcome outcome;
  for (const RunSpec& run : spec.runs)
    for (const TestSpec& test : run.tests)
      if (std::find(outcome.groups.begin(), outcome.groups.end(), test.group) ==
          outcome.groups.end())
        outcome.groups.push_back(test.group);

  for (const RunSpec& run : spec.runs) {
    AblationRow row;
    row.run = run.name;
    row.vectors = run.external_vectors.has_value();
    row.cells.resize(outcome.groups.size());
    try {
      SourceMap map = load_source_map(run.corpus_config);
      if (run.granularity) map.granularity = *run.granularity;
      row.granularity = to_string(map.granularity);

      LoadOptions load_opts;
      load_opts.allow_copy = run.hp.allow_copy;
      if (run.external_vectors) load_opts.vectors_dir = run.external_vectors;
      TrainingSet ts = load_corpora(map, load_opts);

      if (progress) *progress << "[ablate] training run '" << run.name << "'\n";
      ModelParams params = train(ts, run.hp, nullptr, progress);

      for (const TestSpec& test : run.tests) {
        Document gold = parse_file(test.path);
        std::optional<ExternalVectors> ext;
        if (run.external_vectors) {
          std::string vec_path = resolve_sidecar(
              *run.external_vectors, fs::path(test.path).filename().string(), false);
          ext = load_vectors(vec_path);
        }
        uint32_t sid = resolve_source_or_unknown(params.source_map, test.source);
        FileEval eval = evaluate(params, gold, sid, {}, ext ? &*ext : nullptr,
                                 fs::path(test.path).filename().string(), test.group);
        row.report.files.push_back(eval);

        size_t g = std::find(outcome.groups.begin(), outcome.groups.end(),
                             test.group) -
                   outcome.groups.begin();
        AblationCell& cell = row.cells[g];
        cell.present = true;
        cell.lemma_scored += eval.lemma_scored;
        cell.lemma_correct += eval.lemma_correct;
        cell.upos_scored += eval.upos_scored;
        cell.upos_correct += eval.upos_correct;
      }
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
      if (progress) *progress << "[ablate] run '" << run.name << "' failed: "
                              << e.what() << "\n";
    }
    outcome.rows.push_back(std::move(row));
  }

  for (const Comparison& cmp : spec.comparisons) {
    auto collect = [&](const std::vector<std::string>& names,
                       std::vector<EvalReport>& out) {
      for (const std::string& name : names) {
        auto it = std::find_if(outcome.rows.begin(), outcome.rows.end(),
                               [&name](const AblationRow& r) { return r.run == name; });
        if (it == outcome.rows.end())
          throw EvalError("comparison '" + cmp.name + "' references unknown run '" +
                          name + "'");
        if (it->failed)
          throw EvalError("comparison '" + cmp.name + "' references failed run '" +
                          name + "'");
        out.push_back(it->report);
      }
    };
    try {
      std::vector<EvalReport> a, b;
      collect(cmp.a, a);
      collect(cmp.b, b);
      outcome.deltas.emplace_back(cmp.name, delta_report(a, b));
    } catch (const std::exception& e) {
      DeltaReport failed;
      failed.pairs = 0;
      outcome.deltas.emplace_back(cmp.name + " (failed: " + e.what() + ")", failed);
    }
  }
  return outcome;
}

namespace {

// Per-group micro-aggregated accuracies of one report, in `groups` order.
std::vector<std::pair<double, double>> group_accuracies(
    const EvalReport& report, const std::vector<std::string>& groups) {
  std::vector<std::pair<double, double>> out;
  for (const std::string& group : groups) {
    uint64_t ls = 0, lc = 0, us = 0, uc = 0;
    bool any = false;
    for (const FileEval& f : report.files) {
      if (f.group != group) continue;
      any = true;
      ls += f.lemma_scored;
      lc += f.lemma_correct;
      us += f.upos_scored;
      uc += f.upos_correct;
    }
    if (!any) throw EvalError("report is missing group '" + group + "'");
    out.emplace_back(ls ? 100.0 * lc / ls : 0.0, us ? 100.0 * uc / us : 0.0);
  }
  return out;
}

std::vector<std::string> report_groups(const EvalReport& report) {
  std::vector<std::string> groups;
  for (const FileEval& f : report.files)
    if (std::find(groups.begin(), groups.end(), f.group) == groups.end())
      groups.push_back(f.group);
  return groups;
}

}  // namespace

DeltaReport delta_report(const std::vector<EvalReport>& a,
                         const std::vector<EvalReport>& b) {
  if (a.size() != b.size() || a.empty())
    throw EvalError("delta_report needs equally long, non-empty report lists");

  std::vector<std::string> groups = report_groups(a[0]);
  DeltaReport report;
  report.pairs = a.size();
  for (const std::string& group : groups)
    report.columns.push_back({group, 0, 0});

  for (size_t i = 0; i < a.size(); i++) {
    std::vector<std::pair<double, double>> acc_a = group_accuracies(a[i], groups);
    std::vector<std::pair<double, double>> acc_b = group_accuracies(b[i], groups);
    for (size_t g = 0; g < groups.size(); g++) {
      report.columns[g].lemma_delta += acc_a[g].first - acc_b[g].first;
      report.columns[g].upos_delta += acc_a[g].second - acc_b[g].second;
    }
  }
  for (DeltaColumn& col : report.columns) {
    col.lemma_delta /= static_cast<double>(a.size());
    col.upos_delta /= static_cast<double>(a.size());
  }
  return report;
}

std::string format_accuracy(double percent) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", percent);
  return buf;
}

std::string format_delta(double pp) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", pp);
  std::string s = buf;
  if (s == "0.000" || s == "-0.000") return "0.000";
  if (s[0] != '-') s.insert(s.begin(), '+');
  return s;
}

namespace {

std::string render_rows_tsv(const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); i++) {
      if (i) out += '\t';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

std::string render_rows_aligned(const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> widths;
  for (const auto& row : rows) {
    if (row.size() > widths.size()) widths.resize(row.size(), 0);
    for (size_t i = 0; i < row.size(); i++)
      widths[i] = std::max(widths[i], row[i].size());
  }
  std::string out;
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); i++) {
      if (i) out += "  ";
      if (i == 0)  // first column left-aligned, the rest right-aligned
        out += row[i] + std::string(widths[i] - row[i].size(), ' ');
      else
        out += std::string(widths[i] - row[i].size(), ' ') + row[i];
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  }
  return out;
}

std::vector<std::vector<std::string>> eval_rows(const EvalReport& report) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"file", "group", "tokens", "lemma_acc", "upos_acc",
                  "lemma_scored", "upos_scored"});
  for (const FileEval& f : report.files)
    rows.push_back({f.name, f.group.empty() ? "-" : f.group,
                    std::to_string(f.tokens), format_accuracy(f.lemma_accuracy()),
                    format_accuracy(f.upos_accuracy()),
                    std::to_string(f.lemma_scored), std::to_string(f.upos_scored)});

  // group aggregates (only when any group label is set)
  bool any_group = false;
  for (const FileEval& f : report.files) any_group |= !f.group.empty();
  if (any_group) {
    for (const std::string& group : report_groups(report)) {
      uint64_t tokens = 0, ls = 0, lc = 0, us = 0, uc = 0;
      for (const FileEval& f : report.files) {
        if (f.group != group) continue;
        tokens += f.tokens;
        ls += f.lemma_scored;
        lc += f.lemma_correct;
        us += f.upos_scored;
        uc += f.upos_correct;
      }
      rows.push_back({"(group)", group.empty() ? "-" : group, std::to_string(tokens),
                      format_accuracy(ls ? 100.0 * lc / ls : 0.0),
                      format_accuracy(us ? 100.0 * uc / us : 0.0),
                      std::to_string(ls), std::to_string(us)});
    }
  }

  if (report.files.size() > 1) {
    uint64_t tokens = 0, ls = 0, lc = 0, us = 0, uc = 0;
    for (const FileEval& f : report.files) {
      tokens += f.tokens;
      ls += f.lemma_scored;
      lc += f.lemma_correct;
      us += f.upos_scored;
      uc += f.upos_correct;
    }
    rows.push_back({"(total)", "-", std::to_string(tokens),
                    format_accuracy(ls ? 100.0 * lc / ls : 0.0),
                    format_accuracy(us ? 100.0 * uc / us : 0.0),
                    std::to_string(ls), std::to_string(us)});
  }
  return rows;
}

std::vector<std::vector<std::string>> ablation_rows(const AblationOutcome& outcome) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header = {"run", "granularity", "vectors"};
  for (const std::string& group : outcome.groups) {
    std::string label = group.empty() ? "(default)" : group;
    header.push_back(label + ":lemma");
    header.push_back(label + ":upos");
  }
  header.push_back("status");
  rows.push_back(std::move(header));

  for (const AblationRow& row : outcome.rows) {
    std::vector<std::string> r = {row.run,
                                  row.granularity.empty() ? "-" : row.granularity,
                                  row.vectors ? "yes" : "no"};
    for (const AblationCell& cell : row.cells) {
      if (!cell.present || row.failed) {
        r.push_back("-");
        r.push_back("-");
      } else {
        r.push_back(format_accuracy(cell.lemma_accuracy()));
        r.push_back(format_accuracy(cell.upos_accuracy()));
      }
    }
    r.push_back(row.failed ? "FAILED: " + row.error : "ok");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<std::vector<std::string>> delta_rows(const AblationOutcome& outcome) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header = {"comparison", "pairs"};
  for (const std::string& group : outcome.groups) {
    std::string label = group.empty() ? "(default)" : group;
    header.push_back(label + ":lemma");
    header.push_back(label + ":upos");
  }
  rows.push_back(std::move(header));

  for (const auto& [name, delta] : outcome.deltas) {
    std::vector<std::string> r = {name, std::to_string(delta.pairs)};
    for (const std::string& group : outcome.groups) {
      auto it = std::find_if(delta.columns.begin(), delta.columns.end(),
                             [&group](const DeltaColumn& c) { return c.group == group; });
      if (it == delta.columns.end()) {
        r.push_back("-");
        r.push_back("-");
      } else {
        r.push_back(format_delta(it->lemma_delta));
        r.push_back(format_delta(it->upos_delta));
      }
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

std::string render_eval_tsv(const EvalReport& report) {
  return render_rows_tsv(eval_rows(report));
}

std::string render_eval_table(const EvalReport& report) {
  return render_rows_aligned(eval_rows(report));
}

std::string render_ablation_tsv(const AblationOutcome& outcome) {
  std::string out = render_rows_tsv(ablation_rows(outcome));
  if (!outcome.deltas.empty()) {
    out += '\n';
    out += render_rows_tsv(delta_rows(outcome));
  }
  return out;
}

std::string render_ablation_table(const AblationOutcome& outcome) {
  std::string out = render_rows_aligned(ablation_rows(outcome));
  if (!outcome.deltas.empty()) {
    out += "\naverage percentage-point improvement (a - b)\n";
    out += render_rows_aligned(delta_rows(outcome));
  }
  return out;
}

}  // namespace lemma_engine
