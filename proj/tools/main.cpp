// lemma-engine: train/predict/evaluate toolkit for joint lemmatization and
// POS tagging over CoNLL-U corpora.
//
// Exit codes: 0 success, 1 usage error, 2 data/model error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lemma_engine/conllu.hpp"
#include "lemma_engine/corpus.hpp"
#include "lemma_engine/evaluation.hpp"
#include "lemma_engine/model.hpp"
#include "lemma_engine/training.hpp"
#include "lemma_engine/unicode.hpp"
#include "lemma_engine/vectors.hpp"

namespace {

namespace fs = std::filesystem;
using namespace lemma_engine;

struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= s.size()) {
    size_t comma = s.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// ---- subcommand state ----

struct RulesArgs {
  std::string corpus_config;
  size_t top = 15;
  bool allow_copy = false;
};

struct TrainArgs {
  std::string corpus_config;
  std::string out;
  std::optional<std::string> granularity;
  std::optional<std::string> vectors;
  Hyperparams hp;
};

struct PredictArgs {
  std::string model;
  std::string input;
  std::optional<std::string> source;
  std::optional<std::string> vectors;
};

struct EvalArgs {
  std::string model;
  std::vector<std::string> gold;
  std::optional<std::string> groups;
  std::optional<std::string> sources;
  std::optional<std::string> vectors;
  std::optional<std::string> tsv;
  bool case_insensitive = false;
};

struct AblateArgs {
  std::string run_file;
  std::optional<std::string> out;
};

int run_rules(const RulesArgs& args) {
  SourceMap map = load_source_map(args.corpus_config);
  LoadOptions opts;
  opts.allow_copy = args.allow_copy;
  TrainingSet ts = load_corpora(map, opts);

  std::vector<std::vector<std::string>> rows;
  rows.push_back({"rule", "frequency", "examples"});
  for (const RuleEntry& entry : top_rules(ts.inventory, args.top)) {
    std::string examples;
    for (const RuleExample& ex : entry.examples) {
      if (!examples.empty()) examples += ", ";
      examples += ex.form + "→" + ex.lemma;
    }
    rows.push_back({entry.rule_string, std::to_string(entry.frequency), examples});
  }

  std::vector<size_t> widths(3, 0);
  for (const auto& row : rows)
    for (size_t i = 0; i < 3; i++) widths[i] = std::max(widths[i], row[i].size());
  for (const auto& row : rows) {
    std::string line = row[0] + std::string(widths[0] - row[0].size(), ' ') + "  " +
                       std::string(widths[1] - row[1].size(), ' ') + row[1] + "  " +
                       row[2];
    while (!line.empty() && line.back() == ' ') line.pop_back();
    std::cout << line << "\n";
  }
  return 0;
}

int run_train(const TrainArgs& args) {
  SourceMap map = load_source_map(args.corpus_config);
  if (args.granularity) map.granularity = granularity_from_string(*args.granularity);

  LoadOptions opts;
  opts.allow_copy = args.hp.allow_copy;
  if (args.vectors) opts.vectors_dir = args.vectors;
  TrainingSet ts = load_corpora(map, opts);

  std::cerr << "training on " << ts.sentences.size() << " sentences, "
            << ts.usable_lemma_tokens << " lemma tokens, " << ts.usable_upos_tokens
            << " upos tokens, " << ts.inventory.entries.size() << " rules, "
            << ts.upos_labels.size() << " upos labels\n";
  ModelParams params = train(ts, args.hp, nullptr, &std::cerr);
  save_model(params, args.out);
  std::cerr << "model written to " << args.out << "\n";
  return 0;
}

int run_predict(const PredictArgs& args) {
  ModelParams params = load_model(args.model);
  Document doc = parse_file(args.input);

  std::optional<ExternalVectors> ext;
  if (params.config.dense_width > 0 || args.vectors) {
    if (!args.vectors)
      throw ModelError("model expects external vectors; pass --vectors");
    std::string path = resolve_sidecar(*args.vectors,
                                       fs::path(args.input).filename().string(),
                                       /*allow_direct_file=*/true);
    ext = load_vectors(path);
    check_alignment(*ext, doc, path);
  }

  uint32_t source_id = resolve_source_or_unknown(params.source_map, args.source);
  for (size_t si = 0; si < doc.sentences.size(); si++) {
    Sentence& sentence = doc.sentences[si];
    const std::vector<std::vector<float>>* vecs = ext ? &ext->sentences[si] : nullptr;
    for (const Prediction& pred : predict_sentence(params, sentence, source_id, vecs)) {
      Token& token = sentence.tokens[pred.token_index];
      token.lemma = pred.lemma;
      if (!pred.upos.empty()) token.upos = pred.upos;
    }
  }
  std::cout << serialize_document(doc);
  return 0;
}

int run_eval(const EvalArgs& args) {
  ModelParams params = load_model(args.model);

  std::vector<std::string> groups(args.gold.size());
  if (args.groups) {
    std::vector<std::string> parts = split_commas(*args.groups);
    if (parts.size() == 1) parts.assign(args.gold.size(), parts[0]);
    if (parts.size() != args.gold.size())
      throw UsageError("--group needs one label, or one per gold file");
    groups = parts;
  }
  std::vector<std::optional<std::string>> sources(args.gold.size());
  if (args.sources) {
    std::vector<std::string> parts = split_commas(*args.sources);
    if (parts.size() == 1) parts.assign(args.gold.size(), parts[0]);
    if (parts.size() != args.gold.size())
      throw UsageError("--source needs one name, or one per gold file");
    for (size_t i = 0; i < parts.size(); i++)
      if (!parts[i].empty()) sources[i] = parts[i];
  }

  EvalOptions options;
  options.case_insensitive = args.case_insensitive;

  EvalReport report;
  for (size_t i = 0; i < args.gold.size(); i++) {
    Document gold = parse_file(args.gold[i]);
    std::optional<ExternalVectors> ext;
    if (params.config.dense_width > 0 || args.vectors) {
      if (!args.vectors)
        throw ModelError("model expects external vectors; pass --vectors");
      std::string path = resolve_sidecar(*args.vectors,
                                         fs::path(args.gold[i]).filename().string(),
                                         args.gold.size() == 1);
      ext = load_vectors(path);
    }
    uint32_t sid = resolve_source_or_unknown(params.source_map, sources[i]);
    report.files.push_back(evaluate(params, gold, sid, options,
                                    ext ? &*ext : nullptr,
                                    fs::path(args.gold[i]).filename().string(),
                                    groups[i]));
  }

  std::cout << render_eval_table(report);
  if (args.tsv) {
    std::string tsv = render_eval_tsv(report);
    if (*args.tsv == "-")
      std::cout << tsv;
    else
      write_text_file(*args.tsv, tsv);
  }
  return 0;
}

int run_ablate(const AblateArgs& args) {
  AblationSpec spec = load_ablation_spec(args.run_file);
  if (spec.runs.empty()) throw UsageError("run file has an empty runs list");

  AblationOutcome outcome = ablate(spec, &std::cerr);

  std::string tsv_path =
      args.out ? *args.out : args.run_file + ".report.tsv";
  write_text_file(tsv_path, render_ablation_tsv(outcome));
  std::cout << render_ablation_table(outcome);
  std::cerr << "TSV report written to " << tsv_path << "\n";

  for (const AblationRow& row : outcome.rows)
    if (row.failed) throw EvalError("run '" + row.run + "' failed: " + row.error);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"joint lemmatizer and POS tagger over CoNLL-U corpora"};
  app.require_subcommand(1);

  RulesArgs rules_args;
  CLI::App* rules = app.add_subcommand(
      "rules", "print the most frequent lemma rules of a corpus");
  rules->add_option("corpus_config", rules_args.corpus_config, "corpus config JSON")
      ->required();
  rules->add_option("--top", rules_args.top, "number of rules to print");
  rules->add_flag("--allow-copy", rules_args.allow_copy,
                  "enable copy operations in edit scripts");

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "train a joint model");
  train_cmd->add_option("corpus_config", train_args.corpus_config,
                        "corpus config JSON")->required();
  train_cmd->add_option("--out", train_args.out, "output model path")->required();
  train_cmd->add_option("--seed", train_args.hp.seed, "random seed");
  train_cmd->add_option("--epochs", train_args.hp.epochs, "training epochs");
  train_cmd->add_option("--lr", train_args.hp.learning_rate, "initial learning rate");
  train_cmd->add_option("--dev-fraction", train_args.hp.dev_fraction,
                        "held-out fraction for model selection");
  train_cmd->add_option("--hash-dim", train_args.hp.hash_dim,
                        "hashed feature space size");
  train_cmd->add_option("--window", train_args.hp.window, "context window");
  train_cmd
      ->add_option("--granularity", train_args.granularity,
                   "source-id granularity (overrides the config)")
      ->check(CLI::IsMember({"per-author-per-treebank", "single-primary-per-treebank",
                             "single-primary-single-secondary", "merged"}));
  train_cmd->add_option("--vectors", train_args.vectors,
                        "directory of <corpus-name>.vec sidecar files");
  train_cmd->add_flag("--allow-copy", train_args.hp.allow_copy,
                      "enable copy operations in edit scripts");

  PredictArgs predict_args;
  CLI::App* predict = app.add_subcommand(
      "predict", "annotate a CoNLL-U file and print it to stdout");
  predict->add_option("model", predict_args.model, "model file")->required();
  predict->add_option("input", predict_args.input, "input CoNLL-U file")->required();
  predict->add_option("--source", predict_args.source,
                      "corpus or author name for the source id");
  predict->add_option("--vectors", predict_args.vectors,
                      "sidecar vector file or directory");

  EvalArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand("eval", "score a model on gold files");
  eval_cmd->add_option("model", eval_args.model, "model file")->required();
  eval_cmd->add_option("gold", eval_args.gold, "gold CoNLL-U files")->required();
  eval_cmd->add_option("--group", eval_args.groups,
                       "comma-separated group labels (one, or one per file)");
  eval_cmd->add_option("--source", eval_args.sources,
                       "comma-separated source names (one, or one per file)");
  eval_cmd->add_option("--vectors", eval_args.vectors,
                       "sidecar vector directory (or file, single gold file)");
  eval_cmd->add_option("--tsv", eval_args.tsv, "write TSV report here ('-': stdout)");
  eval_cmd->add_flag("--case-insensitive", eval_args.case_insensitive,
                     "compare lemmas case-insensitively");

  AblateArgs ablate_args;
  CLI::App* ablate_cmd = app.add_subcommand(
      "ablate", "train and evaluate a grid of configurations");
  ablate_cmd->add_option("run_file", ablate_args.run_file, "run file JSON")
      ->required();
  ablate_cmd->add_option("--out", ablate_args.out,
                         "TSV report path (default: <run_file>.report.tsv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 1;
  }

  try {
    if (rules->parsed()) return run_rules(rules_args);
    if (train_cmd->parsed()) return run_train(train_args);
    if (predict->parsed()) return run_predict(predict_args);
    if (eval_cmd->parsed()) return run_eval(eval_args);
    if (ablate_cmd->parsed()) return run_ablate(ablate_args);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help() << std::flush;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
