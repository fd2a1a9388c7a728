#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tpol/align.hpp"
#include "tpol/corpus.hpp"
#include "tpol/errors.hpp"
#include "tpol/reorderer.hpp"
#include "tpol/translator.hpp"
#include "tpol/types.hpp"

namespace tpol {

// Per-example training material for both pipeline stages, read directly off
// the gold alignment.
struct TrainingPair {
  std::string id;
  TokenSeq x_pad, z_pad;            // translator pair (equal lengths)
  TokenSeq z;                       // monotone meaning sequence
  std::vector<std::size_t> perm;    // reorderer target: y[perm[i]] = z[i]
};

inline TrainingPair derive_training_pair(const AlignedExample& ex) {
  if (ex.bisymbols.empty())
    throw MissingAlignment("record '" + ex.id + "' has no alignment");
  const MonotoneDerivation d = monotonicize(ex);
  return {ex.id, d.x_pad, d.z_pad, d.z, d.perm};
}

inline std::vector<TrainingPair> derive_training_pairs(const Corpus& corpus) {
  std::vector<TrainingPair> out;
  out.reserve(corpus.size());
  for (const AlignedExample& ex : corpus) out.push_back(derive_training_pair(ex));
  return out;
}

inline Translator train_translator(const Corpus& corpus, std::size_t k = 3,
                                   std::size_t min_support = 3, double min_precision = 0.7) {
  if (corpus.empty()) throw EmptyCorpus("translator training corpus is empty");
  std::vector<std::pair<TokenSeq, TokenSeq>> padded;
  padded.reserve(corpus.size());
  for (const TrainingPair& p : derive_training_pairs(corpus))
    padded.emplace_back(p.x_pad, p.z_pad);
  return Translator::train(padded, k, min_support, min_precision);
}

// Full two-step parse.
inline TokenSeq parse(const TokenSeq& x, const Translator& translator,
                      const Reorderer& reorderer) {
  return reorderer.reorder(translator.translate(x));
}

// ---------------------------------------------------------------------------
// Derivation dump: JSONL {id, x_pad, z_pad, z, perm}, epsilon as null.

namespace detail {

inline nlohmann::json padded_to_json(const TokenSeq& toks) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Token& t : toks) {
    if (is_epsilon(t))
      arr.push_back(nullptr);
    else
      arr.push_back(t);
  }
  return arr;
}

}  // namespace detail

inline void save_derivations(const std::string& path, const std::vector<TrainingPair>& pairs) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write derivations: " + path);
  for (const TrainingPair& p : pairs) {
    nlohmann::json j;
    j["id"] = p.id;
    j["x_pad"] = detail::padded_to_json(p.x_pad);
    j["z_pad"] = detail::padded_to_json(p.z_pad);
    j["z"] = p.z;
    j["perm"] = p.perm;
    out << j.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Predictions: JSONL {id, nl, mr_pred}.

struct Prediction {
  std::string id;
  TokenSeq nl;
  TokenSeq mr_pred;
};

inline std::vector<Prediction> parse_corpus(const Corpus& corpus, const Translator& translator,
                                            const Reorderer& reorderer) {
  std::vector<Prediction> out;
  out.reserve(corpus.size());
  for (const AlignedExample& ex : corpus)
    out.push_back({ex.id, ex.nl, parse(ex.nl, translator, reorderer)});
  return out;
}

inline void save_predictions(const std::string& path, const std::vector<Prediction>& preds) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write predictions: " + path);
  for (const Prediction& p : preds) {
    nlohmann::json j;
    j["id"] = p.id;
    j["nl"] = p.nl;
    j["mr_pred"] = p.mr_pred;
    out << j.dump() << '\n';
  }
}

inline std::vector<Prediction> load_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open predictions: " + path);
  std::vector<Prediction> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      Prediction p;
      p.id = j.at("id").get<std::string>();
      if (j.contains("nl")) p.nl = j.at("nl").get<TokenSeq>();
      p.mr_pred = j.at("mr_pred").get<TokenSeq>();
      out.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw MalformedRecord("bad prediction at line " + std::to_string(lineno) + " of " + path +
                            ": " + e.what());
    }
  }
  return out;
}

}  // namespace tpol
