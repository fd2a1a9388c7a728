// Command-line front end: scan-gen | split | align | train | parse | eval |
// report. Every subcommand reads/writes artifacts on disk and drops a
// meta_<subcommand>.json with the resolved configuration, its hash, and the
// seed, so any run is reproducible from its artifacts alone.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tpol/align.hpp"
#include "tpol/corpus.hpp"
#include "tpol/errors.hpp"
#include "tpol/eval.hpp"
#include "tpol/ibm.hpp"
#include "tpol/pipeline.hpp"
#include "tpol/reorderer.hpp"
#include "tpol/scan.hpp"
#include "tpol/translator.hpp"
#include "tpol/types.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// TPOL_OUT overrides --out when set and non-empty.
std::string resolve_out(const std::string& flag_value) {
  const char* env = std::getenv("TPOL_OUT");
  std::string out = (env && *env) ? env : flag_value;
  fs::create_directories(out);
  return out;
}

void write_meta(const std::string& out, const std::string& subcommand, json config,
                std::uint64_t seed, json extra = json::object()) {
  json meta;
  meta["subcommand"] = subcommand;
  meta["config"] = config;
  meta["config_hash"] = hex64(fnv1a64(config.dump()));
  meta["seed"] = seed;
  for (auto& [k, v] : extra.items()) meta[k] = v;
  std::ofstream f(out + "/meta_" + subcommand + ".json");
  if (!f) throw tpol::IoError("cannot write run metadata in " + out);
  f << meta.dump(2) << '\n';
}

tpol::SplitRatios parse_ratios(const std::string& s) {
  std::vector<double> vals;
  std::string cur;
  for (const char c : s + ",") {
    if (c == ',') {
      if (!cur.empty()) {
        try {
          vals.push_back(std::stod(cur));
        } catch (const std::exception&) {
          throw tpol::ConfigError("bad ratio value '" + cur + "'");
        }
      }
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (vals.size() != 3)
    throw tpol::ConfigError("--ratios expects three comma-separated values (train,dev,test)");
  return {vals[0], vals[1], vals[2]};
}

tpol::CorpusFormat parse_format(const std::string& s) {
  if (s == "jsonl") return tpol::CorpusFormat::jsonl;
  if (s == "tsv") return tpol::CorpusFormat::tsv;
  throw tpol::ConfigError("unknown corpus format '" + s + "'");
}

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw tpol::MissingArtifact(what + " path is required");
  if (!fs::exists(path)) throw tpol::MissingArtifact(what + " not found: " + path);
}

// Expands --config file contents into command-line tokens placed before the
// explicit flags, so explicit flags win under the take-last policy.
std::vector<std::string> config_tokens(const CLI::App* sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw tpol::ConfigError("cannot open config file: " + path);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw tpol::ConfigError("bad config file " + path + ": " + e.what());
  }
  if (!cfg.is_object()) throw tpol::ConfigError("config file must hold a JSON object");
  std::vector<std::string> tokens;
  auto add_scalar = [&](const std::string& opt, const json& v) {
    if (v.is_boolean()) {
      if (v.get<bool>()) tokens.push_back(opt);
    } else if (v.is_string()) {
      tokens.push_back(opt);
      tokens.push_back(v.get<std::string>());
    } else if (v.is_number()) {
      tokens.push_back(opt);
      tokens.push_back(v.dump());
    } else {
      throw tpol::ConfigError("unsupported value type for config key '" + opt + "'");
    }
  };
  for (const auto& [key, val] : cfg.items()) {
    const std::string opt = "--" + key;
    if (sub->get_option_no_throw(opt) == nullptr)
      throw tpol::ConfigError("unknown config key '" + key + "' for subcommand " +
                              sub->get_name());
    if (val.is_array()) {
      for (const auto& el : val) add_scalar(opt, el);
    } else if (!val.is_null()) {
      add_scalar(opt, val);
    }
  }
  return tokens;
}

tpol::Corpus load_input(const std::string& path, const std::string& format, bool remove_brackets,
                        bool lowercase) {
  require_file(path, "corpus");
  return tpol::load_corpus(path, parse_format(format), {remove_brackets, lowercase});
}

std::string corpus_language(const tpol::Corpus& c) {
  std::set<std::string> langs;
  for (const auto& ex : c) langs.insert(ex.language);
  if (langs.size() == 1) return *langs.begin();
  return "mixed";
}

// ---------------------------------------------------------------------------

struct Opts {
  std::string out = "out";
  std::uint64_t seed = 0;
  std::string config;
  std::string format = "jsonl";
  bool remove_brackets = false;
  bool lowercase = false;

  std::size_t limit = 0;  // scan-gen: 0 = full enumeration
  bool brackets = false;

  std::string corpus_path;
  std::string split_strategy;
  std::string ratios = "0.8,0.1,0.1";
  std::string constants_path;

  std::vector<std::string> corpora;
  std::string align_model = "ibm2";
  std::size_t iters = 10;
  std::string model_path;

  std::string train_path;
  std::size_t k = 3;
  std::size_t min_support = 3;
  double min_precision = 0.7;
  std::string reorderer_mode = "gold";
  std::string translator_path;

  std::string reorderer_path;
  bool dump_tags = false;

  std::string test_path;
  std::string predictions_path;
  std::string label = "default";
  std::string partition = "test";
  std::string align_meta_path;

  std::vector<std::string> eval_paths;
  std::string baseline = "gold";
};

void run_scan_gen(const Opts& o) {
  const std::string out = resolve_out(o.out);
  const auto examples =
      tpol::generate_scan(o.limit > 0 ? std::optional<std::size_t>(o.limit) : std::nullopt,
                          o.seed, o.brackets);
  const tpol::Corpus corpus = tpol::scan_to_corpus(examples);
  std::ofstream f(out + "/corpus.jsonl");
  if (!f) throw tpol::IoError("cannot write " + out + "/corpus.jsonl");
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    json j = tpol::detail::example_to_json(corpus[i]);
    j["actions"] = examples[i].actions;
    f << j.dump() << '\n';
  }
  std::ofstream cf(out + "/constants.txt");
  for (const auto& c : tpol::scan_constants()) cf << c << '\n';
  json cfg = {{"limit", o.limit}, {"brackets", o.brackets}, {"out", out}};
  write_meta(out, "scan-gen", cfg, o.seed, {{"count", corpus.size()}});
  std::cout << "wrote " << corpus.size() << " examples to " << out << "/corpus.jsonl\n";
}

void run_split(const Opts& o) {
  const std::string out = resolve_out(o.out);
  const tpol::Corpus corpus =
      load_input(o.corpus_path, o.format, o.remove_brackets, o.lowercase);
  const tpol::SplitRatios ratios = parse_ratios(o.ratios);
  std::set<tpol::Token> constants;
  if (!o.constants_path.empty()) constants = tpol::load_constants(o.constants_path);
  const tpol::SplitStrategy strategy = tpol::split_strategy_from_string(o.split_strategy);
  const tpol::SplitDataset split = tpol::make_split(corpus, strategy, ratios, o.seed, constants);
  tpol::write_split(out, split, ratios);
  json cfg = {{"corpus", o.corpus_path},   {"format", o.format},
              {"split", to_string(strategy)}, {"ratios", o.ratios},
              {"constants", o.constants_path}, {"remove-brackets", o.remove_brackets},
              {"lowercase", o.lowercase},   {"out", out}};
  write_meta(out, "split", cfg, o.seed,
             {{"counts",
               {{"train", split.train.size()},
                {"dev", split.dev.size()},
                {"test", split.test.size()}}}});
  std::cout << "split " << corpus.size() << " -> train " << split.train.size() << ", dev "
            << split.dev.size() << ", test " << split.test.size() << " in " << out << "\n";
}

void run_align(const Opts& o) {
  const std::string out = resolve_out(o.out);
  if (o.corpora.empty()) throw tpol::MissingArtifact("--corpus is required");
  std::vector<tpol::Corpus> inputs;
  std::set<std::string> basenames;
  for (const std::string& p : o.corpora) {
    inputs.push_back(load_input(p, o.format, o.remove_brackets, o.lowercase));
    const std::string base = fs::path(p).filename().string();
    if (!basenames.insert(base).second)
      throw tpol::ConfigError("duplicate corpus basename '" + base + "'");
  }

  json extra = json::object();
  if (o.align_model == "gold") {
    for (std::size_t f = 0; f < inputs.size(); ++f)
      for (const auto& ex : inputs[f])
        if (ex.bisymbols.empty())
          throw tpol::MissingAlignment("record '" + ex.id +
                                       "' has no gold alignment (align --align gold)");
  } else {
    tpol::IbmModel model = [&] {
      if (!o.model_path.empty()) {
        require_file(o.model_path, "alignment model");
        return tpol::IbmModel::load(o.model_path);
      }
      std::vector<tpol::IbmModel::SentencePair> pairs;
      for (const auto& c : inputs)
        for (const auto& ex : c) pairs.push_back({ex.nl, ex.mr});
      return tpol::IbmModel::train(pairs, tpol::ibm_kind_from_string(o.align_model), o.iters,
                                   o.seed);
    }();
    if (o.model_path.empty()) model.save(out + "/model.json");
    double err_sum = 0.0;
    std::size_t scored = 0;
    for (auto& corpus : inputs) {
      for (auto& ex : corpus) {
        tpol::Alignment pred = model.viterbi_bisymbolize(ex.nl, ex.mr);
        if (!ex.bisymbols.empty()) {
          err_sum += tpol::alignment_error(pred, ex.bisymbols);
          ++scored;
        }
        ex.bisymbols = std::move(pred);
        tpol::validate_example(ex);
      }
    }
    extra["final_loglik"] = model.final_loglik();
    if (scored > 0) {
      extra["mean_alignment_error"] = err_sum / static_cast<double>(scored);
      extra["scored_records"] = scored;
    }
  }

  for (std::size_t f = 0; f < inputs.size(); ++f) {
    const std::string base = fs::path(o.corpora[f]).filename().string();
    tpol::save_corpus(out + "/aligned_" + base, inputs[f]);
    tpol::save_derivations(out + "/derivations_" + base,
                           tpol::derive_training_pairs(inputs[f]));
  }
  json cfg = {{"corpus", o.corpora}, {"format", o.format},
              {"align", o.align_model}, {"iters", o.iters},
              {"model", o.model_path}, {"remove-brackets", o.remove_brackets},
              {"lowercase", o.lowercase}, {"out", out}};
  write_meta(out, "align", cfg, o.seed, extra);
  std::cout << "aligned " << inputs.size() << " corpus file(s) into " << out << "\n";
}

void run_train(const Opts& o) {
  const std::string out = resolve_out(o.out);
  const tpol::Corpus corpus = load_input(o.train_path, o.format, o.remove_brackets, o.lowercase);
  std::set<tpol::Token> constants;
  if (!o.constants_path.empty()) constants = tpol::load_constants(o.constants_path);
  const tpol::ReordererMode mode = tpol::reorderer_mode_from_string(o.reorderer_mode);

  tpol::Translator translator;
  json extra = json::object();
  if (mode == tpol::ReordererMode::gold) {
    translator = tpol::train_translator(corpus, o.k, o.min_support, o.min_precision);
  } else {
    if (o.translator_path.empty())
      throw tpol::MissingArtifact("silver reorderer training requires --translator");
    require_file(o.translator_path, "translator model");
    translator = tpol::Translator::load(o.translator_path);
  }
  tpol::Reorderer::TrainStats stats;
  const tpol::Reorderer reorderer =
      tpol::Reorderer::train(corpus, mode, &translator, constants, &stats);
  if (mode == tpol::ReordererMode::silver) {
    extra["silver_skip_rate"] = stats.silver_skip_rate;
    extra["silver_skipped"] = stats.skipped;
  }
  translator.save(out + "/translator.json");
  reorderer.save(out + "/reorderer.json");
  json cfg = {{"train", o.train_path},     {"format", o.format},
              {"constants", o.constants_path}, {"k", o.k},
              {"min-support", o.min_support},  {"min-precision", o.min_precision},
              {"reorderer-mode", o.reorderer_mode}, {"translator", o.translator_path},
              {"remove-brackets", o.remove_brackets}, {"lowercase", o.lowercase},
              {"out", out}};
  write_meta(out, "train", cfg, o.seed, extra);
  std::cout << "trained translator + reorderer (" << o.reorderer_mode << " mode) in " << out
            << "\n";
}

void run_parse(const Opts& o) {
  const std::string out = resolve_out(o.out);
  const tpol::Corpus corpus = load_input(o.corpus_path, o.format, o.remove_brackets, o.lowercase);
  require_file(o.translator_path, "translator model");
  require_file(o.reorderer_path, "reorderer model");
  const tpol::Translator translator = tpol::Translator::load(o.translator_path);
  const tpol::Reorderer reorderer = tpol::Reorderer::load(o.reorderer_path);
  const auto preds = tpol::parse_corpus(corpus, translator, reorderer);
  tpol::save_predictions(out + "/predictions.jsonl", preds);
  if (o.dump_tags) {
    std::ofstream tf(out + "/tags.tsv");
    if (!tf) throw tpol::IoError("cannot write " + out + "/tags.tsv");
    tf << "id\tposition\ttoken\ttag\tbackoff\n";
    for (const auto& ex : corpus) {
      const tpol::TokenSeq x_pad = translator.pad(ex.nl);
      const auto decisions = translator.tagger().tag_with_decisions(x_pad);
      for (std::size_t p = 0; p < x_pad.size(); ++p)
        tf << ex.id << '\t' << p << '\t' << x_pad[p] << '\t' << decisions[p].tag << '\t'
           << decisions[p].backoff << '\n';
    }
  }
  json cfg = {{"corpus", o.corpus_path},  {"format", o.format},
              {"translator", o.translator_path}, {"reorderer", o.reorderer_path},
              {"dump-tags", o.dump_tags}, {"remove-brackets", o.remove_brackets},
              {"lowercase", o.lowercase}, {"out", out}};
  write_meta(out, "parse", cfg, o.seed, {{"count", preds.size()}});
  std::cout << "parsed " << preds.size() << " sentences into " << out << "/predictions.jsonl\n";
}

void run_eval(const Opts& o) {
  const std::string out = resolve_out(o.out);
  const tpol::Corpus test = load_input(o.test_path, o.format, o.remove_brackets, o.lowercase);
  require_file(o.translator_path, "translator model");
  require_file(o.reorderer_path, "reorderer model");
  const tpol::Translator translator = tpol::Translator::load(o.translator_path);
  const tpol::Reorderer reorderer = tpol::Reorderer::load(o.reorderer_path);

  std::vector<tpol::Prediction> preds;
  const std::vector<tpol::Prediction>* preds_ptr = nullptr;
  if (!o.predictions_path.empty()) {
    require_file(o.predictions_path, "predictions");
    preds = tpol::load_predictions(o.predictions_path);
    preds_ptr = &preds;
  }
  tpol::ReportEntry entry;
  entry.config = o.label;
  entry.partition = o.partition;
  entry.language = corpus_language(test);
  entry.report = tpol::evaluate(test, translator, reorderer, preds_ptr);
  if (!o.align_meta_path.empty()) {
    require_file(o.align_meta_path, "alignment metadata");
    std::ifstream mf(o.align_meta_path);
    json meta;
    mf >> meta;
    if (meta.contains("mean_alignment_error"))
      entry.alignment_error = meta.at("mean_alignment_error").get<double>();
  }

  if (preds_ptr == nullptr) {
    std::vector<tpol::Prediction> computed;
    for (const auto& pe : entry.report.per_example) computed.push_back({pe.id, {}, pe.y_hat});
    for (std::size_t i = 0; i < test.size(); ++i) computed[i].nl = test[i].nl;
    tpol::save_predictions(out + "/predictions.jsonl", computed);
  }
  std::ofstream jf(out + "/eval.json");
  if (!jf) throw tpol::IoError("cannot write " + out + "/eval.json");
  jf << tpol::report_entry_to_json(entry).dump(2) << '\n';
  tpol::write_text_file(out + "/eval.csv", tpol::render_report_csv({entry}));
  json cfg = {{"test", o.test_path},    {"format", o.format},
              {"translator", o.translator_path}, {"reorderer", o.reorderer_path},
              {"predictions", o.predictions_path}, {"label", o.label},
              {"partition", o.partition}, {"align-meta", o.align_meta_path},
              {"remove-brackets", o.remove_brackets}, {"lowercase", o.lowercase},
              {"out", out}};
  write_meta(out, "eval", cfg, o.seed,
             {{"overall_exact_match", entry.report.overall_exact_match}});
  std::cout << "exact match " << tpol::detail::fmt6(entry.report.overall_exact_match) << " over "
            << entry.report.total() << " examples; report in " << out << "\n";
}

void run_report(const Opts& o) {
  const std::string out = resolve_out(o.out);
  if (o.eval_paths.empty()) throw tpol::MissingArtifact("report needs at least one eval.json");
  std::vector<tpol::ReportEntry> entries;
  for (const std::string& p : o.eval_paths) {
    require_file(p, "eval result");
    std::ifstream in(p);
    json j;
    try {
      in >> j;
      entries.push_back(tpol::report_entry_from_json(j));
    } catch (const json::exception& e) {
      throw tpol::MalformedRecord("bad eval result " + p + ": " + e.what());
    }
  }
  tpol::compute_accuracy_drops(entries, o.baseline);
  tpol::write_text_file(out + "/report.csv", tpol::render_report_csv(entries));
  tpol::write_text_file(out + "/report.svg", tpol::render_report_svg(entries));
  json cfg = {{"evals", o.eval_paths}, {"baseline", o.baseline}, {"out", out}};
  write_meta(out, "report", cfg, o.seed, {{"entries", entries.size()}});
  std::cout << "report over " << entries.size() << " evaluation(s) in " << out << "\n";
}

int run(int argc, char** argv) {
  Opts o;
  CLI::App app{"two-step semantic parsing: monotone translation then reordering"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub, bool with_format) {
    sub->option_defaults()->take_last();
    sub->add_option("--out", o.out, "output directory (TPOL_OUT overrides)");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--config", o.config, "JSON config file; explicit flags win");
    if (with_format) {
      sub->add_option("--format", o.format, "corpus file format")
          ->check(CLI::IsMember({"jsonl", "tsv"}));
      sub->add_flag("--remove-brackets", o.remove_brackets,
                    "drop ( ) from meaning sequences on load");
      sub->add_flag("--lowercase", o.lowercase, "lowercase utterance tokens on load");
    }
  };

  CLI::App* scan_gen = app.add_subcommand("scan-gen", "generate the synthetic command corpus");
  add_common(scan_gen, false);
  scan_gen->add_option("--limit", o.limit, "subsample size (0 = full enumeration)");
  scan_gen->add_flag("--brackets", o.brackets, "emit bracketed programs");

  CLI::App* split = app.add_subcommand("split", "partition a corpus into train/dev/test");
  add_common(split, true);
  split->add_option("--corpus", o.corpus_path, "input corpus")->required();
  split->add_option("--split", o.split_strategy, "strategy")
      ->required()
      ->check(CLI::IsMember(
          {"question", "query", "length", "scan-iid", "scan-right", "scan-around-right",
           "scan_iid", "scan_right", "scan_around_right"}));
  split->add_option("--ratios", o.ratios, "train,dev,test fractions");
  split->add_option("--constants", o.constants_path, "constant lexicon (query split)");

  CLI::App* align = app.add_subcommand("align", "add bi-symbol alignments to corpora");
  add_common(align, true);
  align->add_option("--corpus", o.corpora, "corpus file (repeatable; model trains on the union)")
      ->required()
      ->take_all();
  align->add_option("--align", o.align_model, "alignment source")
      ->check(CLI::IsMember({"gold", "ibm1", "ibm2"}));
  align->add_option("--iters", o.iters, "EM iterations per phase");
  align->add_option("--model", o.model_path, "reuse a saved model instead of training");

  CLI::App* train = app.add_subcommand("train", "train translator and reorderer");
  add_common(train, true);
  train->add_option("--train", o.train_path, "aligned training corpus")->required();
  train->add_option("--constants", o.constants_path, "constant lexicon for templates");
  train->add_option("--k", o.k, "max insertion-pattern length");
  train->add_option("--min-support", o.min_support, "insertion rule support threshold");
  train->add_option("--min-precision", o.min_precision, "insertion rule precision threshold");
  train->add_option("--reorderer-mode", o.reorderer_mode, "gold or silver")
      ->check(CLI::IsMember({"gold", "silver"}));
  train->add_option("--translator", o.translator_path,
                    "pre-trained translator (required for silver mode)");

  CLI::App* parse_cmd = app.add_subcommand("parse", "run the two-step parser");
  add_common(parse_cmd, true);
  parse_cmd->add_option("--corpus", o.corpus_path, "input corpus")->required();
  parse_cmd->add_option("--translator", o.translator_path, "translator model")->required();
  parse_cmd->add_option("--reorderer", o.reorderer_path, "reorderer model")->required();
  parse_cmd->add_flag("--dump-tags", o.dump_tags, "emit per-token tag decisions as TSV");

  CLI::App* eval_cmd = app.add_subcommand("eval", "score predictions against gold");
  add_common(eval_cmd, true);
  eval_cmd->add_option("--test", o.test_path, "gold-aligned test corpus")->required();
  eval_cmd->add_option("--translator", o.translator_path, "translator model")->required();
  eval_cmd->add_option("--reorderer", o.reorderer_path, "reorderer model")->required();
  eval_cmd->add_option("--predictions", o.predictions_path, "precomputed predictions.jsonl");
  eval_cmd->add_option("--label", o.label, "configuration label for the report");
  eval_cmd->add_option("--partition", o.partition, "partition label for the report");
  eval_cmd->add_option("--align-meta", o.align_meta_path,
                       "align run metadata (for the alignment-error column)");

  CLI::App* report = app.add_subcommand("report", "merge eval results into CSV + SVG");
  add_common(report, false);
  report->add_option("evals", o.eval_paths, "eval.json files")->required()->take_all();
  report->add_option("--baseline", o.baseline, "config label used as drop baseline");

  // Manual --config expansion so file values sit before explicit flags.
  std::vector<std::string> args(argv + 1, argv + argc);
  if (!args.empty()) {
    CLI::App* sub = app.get_subcommand_no_throw(args[0]);
    if (sub != nullptr) {
      std::string cfg_path;
      for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
          cfg_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
          cfg_path = args[i].substr(9);
      }
      if (!cfg_path.empty()) {
        const auto tokens = config_tokens(sub, cfg_path);
        args.insert(args.begin() + 1, tokens.begin(), tokens.end());
      }
    }
  }
  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", "config_error"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }

  if (scan_gen->parsed()) run_scan_gen(o);
  if (split->parsed()) run_split(o);
  if (align->parsed()) run_align(o);
  if (train->parsed()) run_train(o);
  if (parse_cmd->parsed()) run_parse(o);
  if (eval_cmd->parsed()) run_eval(o);
  if (report->parsed()) run_report(o);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const tpol::TpolError& e) {
    std::cerr << json{{"error", e.code()}, {"message", e.what()}}.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }
}
