#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "tpol/align.hpp"
#include "tpol/errors.hpp"
#include "tpol/types.hpp"

namespace tpol {

// ---------------------------------------------------------------------------
// Templates: meaning sequences with lexicon constants anonymized.

struct Template {
  TokenSeq tokens;
  std::size_t arity = 0;
};

// Replaces every token found in the constant lexicon by CONST_1, CONST_2, ...
// numbered left to right per occurrence.
inline Template extract_template(const TokenSeq& mr, const std::set<Token>& constants) {
  Template t;
  t.tokens.reserve(mr.size());
  for (const Token& tok : mr) {
    if (constants.count(tok)) {
      ++t.arity;
      t.tokens.push_back("CONST_" + std::to_string(t.arity));
    } else {
      t.tokens.push_back(tok);
    }
  }
  return t;
}

inline std::string template_key(const Template& t) { return join_tokens(t.tokens); }

// One constant per line; blank lines ignored.
inline std::set<Token> load_constants(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open constant lexicon: " + path);
  std::set<Token> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    for (const Token& tok : split_tokens(line)) out.insert(tok);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus I/O. Canonical format is JSON-lines {id, nl, mr, bisymbols,
// language}; bisymbols as [srcIdx|null, tgtIdx|null] pairs and may be absent
// for corpora awaiting automatic alignment. A TSV reader/writer
// (id, language, nl, mr, pharaoh pairs like "0-0 1-3 2-e e-4") is provided
// for interop with alignment tools.

struct NormalizeOptions {
  bool remove_brackets = false;
  bool lowercase = false;
};

enum class CorpusFormat { jsonl, tsv };

namespace detail {

inline TokenSeq tokens_from_json(const nlohmann::json& j, const std::string& field,
                                 const std::string& id) {
  if (j.is_string()) return split_tokens(j.get<std::string>());
  if (j.is_array()) {
    TokenSeq out;
    for (const auto& e : j) {
      if (!e.is_string())
        throw MalformedRecord("non-string token in field '" + field + "' of record '" + id + "'");
      out.push_back(e.get<std::string>());
    }
    return out;
  }
  throw MalformedRecord("field '" + field + "' must be a string or token array in record '" +
                        id + "'");
}

inline AlignedExample example_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw MalformedRecord("corpus line is not a JSON object");
  AlignedExample ex;
  if (!j.contains("id") || !j.at("id").is_string())
    throw MalformedRecord("record missing string field 'id'");
  ex.id = j.at("id").get<std::string>();
  if (!j.contains("nl")) throw MalformedRecord("record '" + ex.id + "' missing field 'nl'");
  if (!j.contains("mr")) throw MalformedRecord("record '" + ex.id + "' missing field 'mr'");
  ex.nl = tokens_from_json(j.at("nl"), "nl", ex.id);
  ex.mr = tokens_from_json(j.at("mr"), "mr", ex.id);
  if (j.contains("language")) ex.language = j.at("language").get<std::string>();
  if (j.contains("bisymbols")) {
    const auto& arr = j.at("bisymbols");
    if (!arr.is_array())
      throw MalformedRecord("field 'bisymbols' must be an array in record '" + ex.id + "'");
    for (const auto& p : arr) {
      if (!p.is_array() || p.size() != 2)
        throw MalformedRecord("bi-symbol must be a [src, tgt] pair in record '" + ex.id + "'");
      BiSymbol b;
      if (!p[0].is_null()) b.src = p[0].get<std::size_t>();
      if (!p[1].is_null()) b.tgt = p[1].get<std::size_t>();
      ex.bisymbols.push_back(b);
    }
  }
  return ex;
}

inline nlohmann::json example_to_json(const AlignedExample& ex) {
  nlohmann::json j;
  j["id"] = ex.id;
  j["language"] = ex.language;
  j["nl"] = ex.nl;
  j["mr"] = ex.mr;
  nlohmann::json bis = nlohmann::json::array();
  for (const BiSymbol& b : ex.bisymbols) {
    nlohmann::json pair = nlohmann::json::array();
    if (b.src)
      pair.push_back(*b.src);
    else
      pair.push_back(nullptr);
    if (b.tgt)
      pair.push_back(*b.tgt);
    else
      pair.push_back(nullptr);
    bis.push_back(pair);
  }
  j["bisymbols"] = bis;
  return j;
}

inline Alignment parse_pharaoh(const std::string& field, const std::string& id) {
  Alignment a;
  for (const std::string& pair : split_tokens(field)) {
    const auto dash = pair.find('-');
    if (dash == std::string::npos)
      throw MalformedRecord("bad alignment pair '" + pair + "' in record '" + id + "'");
    const std::string s = pair.substr(0, dash), t = pair.substr(dash + 1);
    BiSymbol b;
    try {
      if (s != "e") b.src = static_cast<std::size_t>(std::stoull(s));
      if (t != "e") b.tgt = static_cast<std::size_t>(std::stoull(t));
    } catch (const std::exception&) {
      throw MalformedRecord("bad alignment pair '" + pair + "' in record '" + id + "'");
    }
    a.push_back(b);
  }
  return a;
}

inline std::string format_pharaoh(const Alignment& a) {
  std::string out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) out += ' ';
    out += a[i].src ? std::to_string(*a[i].src) : std::string("e");
    out += '-';
    out += a[i].tgt ? std::to_string(*a[i].tgt) : std::string("e");
  }
  return out;
}

inline std::vector<std::string> split_tsv(const std::string& line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

inline std::string ascii_lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace detail

inline Corpus load_corpus(const std::string& path, CorpusFormat format = CorpusFormat::jsonl,
                          NormalizeOptions normalize = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus: " + path);
  Corpus corpus;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    AlignedExample ex;
    if (format == CorpusFormat::jsonl) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw MalformedRecord("line " + std::to_string(lineno) + " of " + path + ": " + e.what());
      }
      try {
        ex = detail::example_from_json(j);
      } catch (const nlohmann::json::exception& e) {
        throw MalformedRecord("line " + std::to_string(lineno) + " of " + path + ": " + e.what());
      }
    } else {
      const auto cols = detail::split_tsv(line);
      if (cols.size() < 4)
        throw MalformedRecord("line " + std::to_string(lineno) + " of " + path +
                              ": expected id, language, nl, mr[, alignment] columns");
      ex.id = cols[0];
      ex.language = cols[1];
      ex.nl = split_tokens(cols[2]);
      ex.mr = split_tokens(cols[3]);
      if (cols.size() > 4) ex.bisymbols = detail::parse_pharaoh(cols[4], ex.id);
    }
    if (normalize.lowercase)
      for (Token& t : ex.nl) t = detail::ascii_lower(t);
    if (!seen_ids.insert(ex.id).second)
      throw MalformedRecord("duplicate record id '" + ex.id + "' at line " +
                            std::to_string(lineno));
    validate_sentences(ex);
    if (!ex.bisymbols.empty())
      validate_alignment(ex.bisymbols, ex.nl.size(), ex.mr.size(), "record '" + ex.id + "'");
    if (normalize.remove_brackets) {
      ex = remove_brackets(ex);
      if (!ex.bisymbols.empty())
        validate_alignment(ex.bisymbols, ex.nl.size(), ex.mr.size(), "record '" + ex.id + "'");
    }
    corpus.push_back(std::move(ex));
  }
  return corpus;
}

inline void save_corpus(const std::string& path, const Corpus& corpus,
                        CorpusFormat format = CorpusFormat::jsonl) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write corpus: " + path);
  for (const AlignedExample& ex : corpus) {
    if (format == CorpusFormat::jsonl) {
      out << detail::example_to_json(ex).dump() << '\n';
    } else {
      out << ex.id << '\t' << ex.language << '\t' << join_tokens(ex.nl) << '\t'
          << join_tokens(ex.mr) << '\t' << detail::format_pharaoh(ex.bisymbols) << '\n';
    }
  }
  if (!out) throw IoError("failed writing corpus: " + path);
}

// ---------------------------------------------------------------------------
// Splits.

enum class SplitStrategy { question, query, length, scan_iid, scan_right, scan_around_right };

inline std::string to_string(SplitStrategy s) {
  switch (s) {
    case SplitStrategy::question: return "question";
    case SplitStrategy::query: return "query";
    case SplitStrategy::length: return "length";
    case SplitStrategy::scan_iid: return "scan_iid";
    case SplitStrategy::scan_right: return "scan_right";
    case SplitStrategy::scan_around_right: return "scan_around_right";
  }
  throw ConfigError("unknown split strategy value");
}

inline SplitStrategy split_strategy_from_string(std::string name) {
  std::replace(name.begin(), name.end(), '-', '_');
  if (name == "question") return SplitStrategy::question;
  if (name == "query") return SplitStrategy::query;
  if (name == "length") return SplitStrategy::length;
  if (name == "scan_iid") return SplitStrategy::scan_iid;
  if (name == "scan_right") return SplitStrategy::scan_right;
  if (name == "scan_around_right") return SplitStrategy::scan_around_right;
  throw ConfigError("unknown split strategy '" + name + "'");
}

struct SplitRatios {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;
};

struct SplitDataset {
  Corpus train;
  Corpus dev;
  Corpus test;
  SplitStrategy strategy = SplitStrategy::question;
  std::uint64_t seed = 0;
};

namespace detail {

// Fisher-Yates with an explicitly specified engine and index reduction so the
// permutation is identical across standard libraries.
inline void deterministic_shuffle(std::vector<std::size_t>& idx, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
}

inline void check_ratios(const SplitRatios& r) {
  if (r.train < 0 || r.dev < 0 || r.test < 0 || std::abs(r.train + r.dev + r.test - 1.0) > 1e-9)
    throw ConfigError("split ratios must be non-negative and sum to 1");
}

inline void check_nonempty(const SplitDataset& s, const SplitRatios& r) {
  if (s.train.empty()) throw InsufficientData("train split is empty");
  if (s.test.empty()) throw InsufficientData("test split is empty");
  if (s.dev.empty() && r.dev > 0) throw InsufficientData("dev split is empty");
}

// Splits the index permutation [train | dev | test] with rounded cut points.
inline SplitDataset cut_by_ratio(const Corpus& corpus, const std::vector<std::size_t>& order,
                                 const SplitRatios& r) {
  const auto n = static_cast<double>(order.size());
  auto n_train = static_cast<std::size_t>(std::llround(r.train * n));
  auto n_dev = static_cast<std::size_t>(std::llround(r.dev * n));
  n_train = std::min(n_train, order.size());
  n_dev = std::min(n_dev, order.size() - n_train);
  SplitDataset s;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const AlignedExample& ex = corpus[order[k]];
    if (k < n_train)
      s.train.push_back(ex);
    else if (k < n_train + n_dev)
      s.dev.push_back(ex);
    else
      s.test.push_back(ex);
  }
  return s;
}

// Whole-template-group assignment: groups ordered largest first (ties by
// template key) each go to the bucket furthest below its target size, so no
// template ever straddles a boundary.
inline SplitDataset split_by_template(const Corpus& corpus, const SplitRatios& r,
                                      const std::set<Token>& constants) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    groups[template_key(extract_template(corpus[i].mr, constants))].push_back(i);
  std::vector<const std::pair<const std::string, std::vector<std::size_t>>*> order;
  order.reserve(groups.size());
  for (const auto& g : groups) order.push_back(&g);
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    if (a->second.size() != b->second.size()) return a->second.size() > b->second.size();
    return a->first < b->first;
  });
  const auto n = static_cast<double>(corpus.size());
  const double target[3] = {r.train * n, r.dev * n, r.test * n};
  double filled[3] = {0, 0, 0};
  SplitDataset s;
  Corpus* bucket[3] = {&s.train, &s.dev, &s.test};
  for (const auto* g : order) {
    int best = 0;
    double best_deficit = target[0] - filled[0];
    for (int b = 1; b < 3; ++b) {
      const double deficit = target[b] - filled[b];
      if (deficit > best_deficit) {
        best = b;
        best_deficit = deficit;
      }
    }
    for (std::size_t i : g->second) bucket[best]->push_back(corpus[i]);
    filled[best] += static_cast<double>(g->second.size());
  }
  return s;
}

inline SplitDataset split_by_length(const Corpus& corpus, const SplitRatios& r) {
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (corpus[a].mr.size() != corpus[b].mr.size()) return corpus[a].mr.size() > corpus[b].mr.size();
    if (corpus[a].nl.size() != corpus[b].nl.size()) return corpus[a].nl.size() > corpus[b].nl.size();
    return corpus[a].id < corpus[b].id;
  });
  const auto n = static_cast<double>(order.size());
  auto n_test = static_cast<std::size_t>(std::llround(r.test * n));
  auto n_dev = static_cast<std::size_t>(std::llround(r.dev * n));
  n_test = std::min(n_test, order.size());
  n_dev = std::min(n_dev, order.size() - n_test);
  SplitDataset s;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const AlignedExample& ex = corpus[order[k]];
    if (k < n_test)
      s.test.push_back(ex);
    else if (k < n_test + n_dev)
      s.dev.push_back(ex);
    else
      s.train.push_back(ex);
  }
  return s;
}

// Compositional holdout: everything matching the predicate is test; the rest
// is shuffled into train/dev by the renormalized train:dev proportion.
template <class Pred>
inline SplitDataset split_by_predicate(const Corpus& corpus, const SplitRatios& r,
                                       std::uint64_t seed, Pred&& to_test) {
  SplitDataset s;
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (to_test(corpus[i]))
      s.test.push_back(corpus[i]);
    else
      rest.push_back(i);
  }
  deterministic_shuffle(rest, seed);
  const double denom = r.train + r.dev;
  const double train_frac = denom > 0 ? r.train / denom : 1.0;
  auto n_train = static_cast<std::size_t>(
      std::llround(train_frac * static_cast<double>(rest.size())));
  n_train = std::min(n_train, rest.size());
  for (std::size_t k = 0; k < rest.size(); ++k) {
    const AlignedExample& ex = corpus[rest[k]];
    if (k < n_train)
      s.train.push_back(ex);
    else
      s.dev.push_back(ex);
  }
  return s;
}

inline bool has_token(const TokenSeq& toks, const Token& t) {
  return std::find(toks.begin(), toks.end(), t) != toks.end();
}

inline bool has_bigram(const TokenSeq& toks, const Token& a, const Token& b) {
  for (std::size_t i = 0; i + 1 < toks.size(); ++i)
    if (toks[i] == a && toks[i + 1] == b) return true;
  return false;
}

}  // namespace detail

inline SplitDataset make_split(const Corpus& corpus, SplitStrategy strategy,
                               const SplitRatios& ratios, std::uint64_t seed,
                               const std::set<Token>& constants = {}) {
  detail::check_ratios(ratios);
  if (corpus.empty()) throw EmptyCorpus("cannot split an empty corpus");
  SplitDataset s;
  switch (strategy) {
    case SplitStrategy::question:
    case SplitStrategy::scan_iid: {
      std::vector<std::size_t> order(corpus.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      detail::deterministic_shuffle(order, seed);
      s = detail::cut_by_ratio(corpus, order, ratios);
      break;
    }
    case SplitStrategy::query:
      s = detail::split_by_template(corpus, ratios, constants);
      break;
    case SplitStrategy::length:
      s = detail::split_by_length(corpus, ratios);
      break;
    case SplitStrategy::scan_right:
      s = detail::split_by_predicate(corpus, ratios, seed, [](const AlignedExample& ex) {
        return detail::has_token(ex.nl, "right");
      });
      break;
    case SplitStrategy::scan_around_right:
      s = detail::split_by_predicate(corpus, ratios, seed, [](const AlignedExample& ex) {
        return detail::has_bigram(ex.nl, "around", "right");
      });
      break;
  }
  s.strategy = strategy;
  s.seed = seed;
  detail::check_nonempty(s, ratios);
  return s;
}

// Writes train/dev/test JSONL plus a metadata sidecar.
inline void write_split(const std::string& dir, const SplitDataset& s, const SplitRatios& ratios) {
  save_corpus(dir + "/train.jsonl", s.train);
  save_corpus(dir + "/dev.jsonl", s.dev);
  save_corpus(dir + "/test.jsonl", s.test);
  nlohmann::json meta;
  meta["strategy"] = to_string(s.strategy);
  meta["seed"] = s.seed;
  meta["ratios"] = {{"train", ratios.train}, {"dev", ratios.dev}, {"test", ratios.test}};
  meta["counts"] = {{"train", s.train.size()}, {"dev", s.dev.size()}, {"test", s.test.size()}};
  std::ofstream out(dir + "/split.json");
  if (!out) throw IoError("cannot write split metadata: " + dir + "/split.json");
  out << meta.dump(2) << '\n';
}

}  // namespace tpol
