#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tpol/errors.hpp"
#include "tpol/types.hpp"

namespace tpol {

inline const Token& bos_token() {
  static const Token t = "<s>";
  return t;
}

inline const Token& eos_token() {
  static const Token t = "</s>";
  return t;
}

// ---------------------------------------------------------------------------
// Rule-based epsilon insertion. A rule is a pattern of up to k tokens that,
// when it ends immediately before an insertion slot, predicts an epsilon
// there. Patterns reaching past the sentence start include a <s> marker, so
// sentence-initial insertions are learnable. Precision counts each slot once.

struct InsertionRule {
  std::size_t support = 0;
  double precision = 0.0;
};

class InsertionRuleSet {
 public:
  InsertionRuleSet() = default;
  InsertionRuleSet(std::size_t k, std::size_t min_support, double min_precision)
      : k_(k), min_support_(min_support), min_precision_(min_precision) {}

  static InsertionRuleSet learn(const std::vector<TokenSeq>& x_pads, std::size_t k = 3,
                                std::size_t min_support = 3, double min_precision = 0.7) {
    InsertionRuleSet rs(k, min_support, min_precision);
    std::map<TokenSeq, std::pair<std::size_t, std::size_t>> stats;  // pattern -> (pos, total)
    for (const TokenSeq& x_pad : x_pads) {
      TokenSeq real;
      std::vector<char> slot_has_eps;  // slot s sits before real[s]
      real.push_back(bos_token());
      slot_has_eps.push_back(0);
      for (const Token& t : x_pad) {
        if (is_epsilon(t))
          slot_has_eps.back() = 1;
        else {
          real.push_back(t);
          slot_has_eps.push_back(0);
        }
      }
      // Slot s (s = 0..n) is preceded by real[0..s] where real[0] = <s>.
      for (std::size_t s = 0; s < slot_has_eps.size(); ++s) {
        const std::size_t ctx = s + 1;  // usable context length including <s>
        for (std::size_t len = 1; len <= std::min(k, ctx); ++len) {
          TokenSeq pat(real.begin() + static_cast<std::ptrdiff_t>(ctx - len),
                       real.begin() + static_cast<std::ptrdiff_t>(ctx));
          auto& st = stats[pat];
          ++st.second;
          if (slot_has_eps[s]) ++st.first;
        }
      }
    }
    for (const auto& [pat, st] : stats) {
      const double precision = static_cast<double>(st.first) / static_cast<double>(st.second);
      if (st.first >= min_support && precision >= min_precision)
        rs.rules_[pat] = InsertionRule{st.first, precision};
    }
    return rs;
  }

  // Left-to-right scan over real tokens; at each slot the longest matching
  // pattern fires once. Inserted epsilons never extend a pattern.
  TokenSeq apply(const TokenSeq& x) const {
    TokenSeq real;
    real.push_back(bos_token());
    for (const Token& t : x) real.push_back(t);
    TokenSeq out;
    for (std::size_t s = 0; s <= x.size(); ++s) {
      const std::size_t ctx = s + 1;
      for (std::size_t len = std::min(k_, ctx); len >= 1; --len) {
        TokenSeq pat(real.begin() + static_cast<std::ptrdiff_t>(ctx - len),
                     real.begin() + static_cast<std::ptrdiff_t>(ctx));
        if (rules_.count(pat)) {
          out.push_back(epsilon_token());
          break;
        }
      }
      if (s < x.size()) out.push_back(x[s]);
    }
    return out;
  }

  const std::map<TokenSeq, InsertionRule>& rules() const { return rules_; }
  std::size_t k() const { return k_; }
  std::size_t min_support() const { return min_support_; }
  double min_precision() const { return min_precision_; }
  bool empty() const { return rules_.empty(); }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["k"] = k_;
    j["min_support"] = min_support_;
    j["min_precision"] = min_precision_;
    nlohmann::json pats = nlohmann::json::object();
    for (const auto& [pat, rule] : rules_)
      pats[join_tokens(pat)] = {{"support", rule.support}, {"precision", rule.precision}};
    j["patterns"] = pats;
    return j;
  }

  static InsertionRuleSet from_json(const nlohmann::json& j) {
    InsertionRuleSet rs(j.at("k").get<std::size_t>(), j.at("min_support").get<std::size_t>(),
                        j.at("min_precision").get<double>());
    for (const auto& [key, val] : j.at("patterns").items())
      rs.rules_[split_tokens(key)] = InsertionRule{val.at("support").get<std::size_t>(),
                                                   val.at("precision").get<double>()};
    return rs;
  }

 private:
  std::size_t k_ = 3;
  std::size_t min_support_ = 3;
  double min_precision_ = 0.7;
  std::map<TokenSeq, InsertionRule> rules_;
};

// ---------------------------------------------------------------------------
// Count-based tagger with a backoff chain (token, prev, next) -> (token,
// prev) -> (token) -> corpus prior. Operates on epsilon-padded input and may
// emit epsilon tags (deletions). Ties break by higher context count, then
// higher global tag frequency, then lexicographic tag order.

class TaggerModel {
 public:
  void observe_pair(const TokenSeq& x_pad, const TokenSeq& z_pad, const std::string& id = "") {
    if (x_pad.size() != z_pad.size())
      throw LengthMismatch("padded training pair" + (id.empty() ? "" : " '" + id + "'") +
                           " has mismatched lengths");
    for (std::size_t p = 0; p < x_pad.size(); ++p) {
      const Token& tok = x_pad[p];
      const Token& prev = p > 0 ? x_pad[p - 1] : bos_token();
      const Token& next = p + 1 < x_pad.size() ? x_pad[p + 1] : eos_token();
      const Token& tag = z_pad[p];
      ++tri_[key3(tok, prev, next)][tag];
      ++bi_[key2(tok, prev)][tag];
      ++uni_[tok][tag];
      ++global_[tag];
    }
  }

  static TaggerModel train(const std::vector<std::pair<TokenSeq, TokenSeq>>& padded_pairs) {
    TaggerModel m;
    for (const auto& [x_pad, z_pad] : padded_pairs) m.observe_pair(x_pad, z_pad);
    return m;
  }

  struct Decision {
    Token tag;
    std::string backoff;  // trigram | bigram | unigram | prior
  };

  Decision predict(const Token& tok, const Token& prev, const Token& next) const {
    if (global_.empty()) throw UntrainedModel("tagger has no training counts");
    if (const auto it = tri_.find(key3(tok, prev, next)); it != tri_.end())
      return {argmax(it->second), "trigram"};
    if (const auto it = bi_.find(key2(tok, prev)); it != bi_.end())
      return {argmax(it->second), "bigram"};
    if (const auto it = uni_.find(tok); it != uni_.end()) return {argmax(it->second), "unigram"};
    return {argmax(global_), "prior"};
  }

  std::vector<Decision> tag_with_decisions(const TokenSeq& x_pad) const {
    std::vector<Decision> out;
    out.reserve(x_pad.size());
    for (std::size_t p = 0; p < x_pad.size(); ++p) {
      const Token& prev = p > 0 ? x_pad[p - 1] : bos_token();
      const Token& next = p + 1 < x_pad.size() ? x_pad[p + 1] : eos_token();
      out.push_back(predict(x_pad[p], prev, next));
    }
    return out;
  }

  // Length-preserving tag sequence over the padded input.
  TokenSeq tag(const TokenSeq& x_pad) const {
    TokenSeq out;
    out.reserve(x_pad.size());
    for (const Decision& d : tag_with_decisions(x_pad)) out.push_back(d.tag);
    return out;
  }

  bool trained() const { return !global_.empty(); }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["trigram"] = table_to_json(tri_);
    j["bigram"] = table_to_json(bi_);
    j["unigram"] = table_to_json(uni_);
    nlohmann::json g = nlohmann::json::object();
    for (const auto& [tag, c] : global_) g[tag] = c;
    j["global"] = g;
    return j;
  }

  static TaggerModel from_json(const nlohmann::json& j) {
    TaggerModel m;
    m.tri_ = table_from_json(j.at("trigram"));
    m.bi_ = table_from_json(j.at("bigram"));
    m.uni_ = table_from_json(j.at("unigram"));
    for (const auto& [tag, c] : j.at("global").items())
      m.global_[tag] = c.get<std::size_t>();
    return m;
  }

 private:
  using TagCounts = std::map<Token, std::size_t>;
  using Table = std::map<std::string, TagCounts>;

  // Tokens never contain whitespace (corpus tokens are whitespace-split), so
  // a space join is an injective key.
  static std::string key3(const Token& tok, const Token& prev, const Token& next) {
    return tok + ' ' + prev + ' ' + next;
  }
  static std::string key2(const Token& tok, const Token& prev) { return tok + ' ' + prev; }

  Token argmax(const TagCounts& counts) const {
    const Token* best = nullptr;
    std::size_t best_count = 0;
    for (const auto& [tag, c] : counts) {
      if (!best || c > best_count || (c == best_count && prefer(tag, *best))) {
        best = &tag;
        best_count = c;
      }
    }
    return *best;
  }

  // Tie-break between equal-count tags: higher global frequency, then
  // lexicographically smaller tag.
  bool prefer(const Token& a, const Token& b) const {
    const std::size_t ga = global_.count(a) ? global_.at(a) : 0;
    const std::size_t gb = global_.count(b) ? global_.at(b) : 0;
    if (ga != gb) return ga > gb;
    return a < b;
  }

  static nlohmann::json table_to_json(const Table& t) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [key, counts] : t) {
      nlohmann::json row = nlohmann::json::object();
      for (const auto& [tag, c] : counts) row[tag] = c;
      j[key] = row;
    }
    return j;
  }

  static Table table_from_json(const nlohmann::json& j) {
    Table t;
    for (const auto& [key, row] : j.items())
      for (const auto& [tag, c] : row.items()) t[key][tag] = c.get<std::size_t>();
    return t;
  }

  Table tri_, bi_, uni_;
  TagCounts global_;
};

// ---------------------------------------------------------------------------
// The monotone translator: insert epsilon slots, tag every padded position,
// drop epsilon tags.

class Translator {
 public:
  Translator() = default;
  Translator(InsertionRuleSet rules, TaggerModel tagger)
      : rules_(std::move(rules)), tagger_(std::move(tagger)) {}

  static Translator train(const std::vector<std::pair<TokenSeq, TokenSeq>>& padded_pairs,
                          std::size_t k = 3, std::size_t min_support = 3,
                          double min_precision = 0.7) {
    std::vector<TokenSeq> x_pads;
    x_pads.reserve(padded_pairs.size());
    for (const auto& [x_pad, z_pad] : padded_pairs) x_pads.push_back(x_pad);
    return Translator(InsertionRuleSet::learn(x_pads, k, min_support, min_precision),
                      TaggerModel::train(padded_pairs));
  }

  TokenSeq pad(const TokenSeq& x) const { return rules_.apply(x); }

  TokenSeq translate(const TokenSeq& x) const {
    TokenSeq z;
    for (const Token& tag : tagger_.tag(pad(x)))
      if (!is_epsilon(tag)) z.push_back(tag);
    return z;
  }

  const InsertionRuleSet& rules() const { return rules_; }
  const TaggerModel& tagger() const { return tagger_; }
  bool trained() const { return tagger_.trained(); }

  void save(const std::string& path) const {
    if (!trained()) throw UntrainedModel("cannot save an untrained translator");
    nlohmann::json j;
    j["format_version"] = 1;
    j["rules"] = rules_.to_json();
    j["tagger"] = tagger_.to_json();
    std::ofstream out(path);
    if (!out) throw IoError("cannot write translator model: " + path);
    out << j.dump(2) << '\n';
  }

  static Translator load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open translator model: " + path);
    nlohmann::json j;
    try {
      in >> j;
      return Translator(InsertionRuleSet::from_json(j.at("rules")),
                        TaggerModel::from_json(j.at("tagger")));
    } catch (const nlohmann::json::exception& e) {
      throw MalformedRecord("bad translator model file " + path + ": " + e.what());
    }
  }

 private:
  InsertionRuleSet rules_;
  TaggerModel tagger_;
};

}  // namespace tpol
