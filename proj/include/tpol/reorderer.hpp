#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tpol/align.hpp"
#include "tpol/corpus.hpp"
#include "tpol/errors.hpp"
#include "tpol/translator.hpp"
#include "tpol/types.hpp"

namespace tpol {

enum class ReordererMode { gold, silver };

inline std::string to_string(ReordererMode m) {
  return m == ReordererMode::gold ? "gold" : "silver";
}

inline ReordererMode reorderer_mode_from_string(const std::string& name) {
  if (name == "gold") return ReordererMode::gold;
  if (name == "silver") return ReordererMode::silver;
  throw ConfigError("unknown reorderer mode '" + name + "'");
}

// Second pipeline stage: permute the monotone meaning sequence back into its
// final order. Exact template matches replay a memorized permutation
// (majority vote on conflicts, first-seen on ties); unseen templates fall
// back to pairwise-precedence hill climbing over adjacent swaps.
class Reorderer {
 public:
  Reorderer() = default;
  explicit Reorderer(std::set<Token> constants) : constants_(std::move(constants)) {}

  // Gold-derived training triple: y[perm[i]] = z[i].
  void add_pair(const TokenSeq& z, const TokenSeq& y, const std::vector<std::size_t>& perm,
                const std::string& id = "") {
    const std::string ctx = id.empty() ? "" : " in record '" + id + "'";
    if (z.size() != y.size() || perm.size() != z.size())
      throw LengthMismatch("reorderer training triple has mismatched lengths" + ctx);
    std::vector<char> used(y.size(), 0);
    for (std::size_t i = 0; i < perm.size(); ++i) {
      if (perm[i] >= y.size() || used[perm[i]])
        throw AlignmentViolation("stored permutation is not a bijection" + ctx);
      used[perm[i]] = 1;
      if (y[perm[i]] != z[i])
        throw MismatchedSentence("permutation does not map z onto y" + ctx);
    }

    const Template tz = extract_template(z, constants_);
    auto& entries = memory_[template_key(tz)];
    bool found = false;
    for (auto& e : entries)
      if (e.perm == perm) {
        ++e.count;
        found = true;
        break;
      }
    if (!found) entries.push_back(MemoryEntry{perm, 1});

    // Precedence statistics over the template typed through to y order.
    TokenSeq yt(tz.tokens.size());
    for (std::size_t i = 0; i < perm.size(); ++i) yt[perm[i]] = tz.tokens[i];
    for (std::size_t i = 0; i < yt.size(); ++i)
      for (std::size_t j = i + 1; j < yt.size(); ++j) ++precedence_[yt[i] + ' ' + yt[j]];
    trained_ = true;
  }

  struct TrainStats {
    std::size_t used = 0;
    std::size_t skipped = 0;  // silver pairs with no token-multiset match
    double silver_skip_rate = 0.0;
  };

  // Gold mode reads (z, y, perm) off each example's alignment. Silver mode
  // replaces z with the translator's prediction and recovers the permutation
  // by leftmost token matching, skipping pairs whose multisets differ.
  static Reorderer train(const Corpus& corpus, ReordererMode mode, const Translator* translator,
                         const std::set<Token>& constants, TrainStats* stats = nullptr) {
    if (mode == ReordererMode::silver && (translator == nullptr || !translator->trained()))
      throw SilverWithoutTranslator("silver training mode requires a trained translator");
    if (corpus.empty()) throw EmptyCorpus("reorderer training corpus is empty");
    Reorderer r(constants);
    r.mode_ = mode;
    TrainStats st;
    for (const AlignedExample& ex : corpus) {
      if (mode == ReordererMode::gold) {
        if (ex.bisymbols.empty())
          throw MissingAlignment("record '" + ex.id + "' has no alignment for gold training");
        const MonotoneDerivation d = monotonicize(ex);
        r.add_pair(d.z, ex.mr, d.perm, ex.id);
        ++st.used;
      } else {
        const TokenSeq z = translator->translate(ex.nl);
        std::vector<std::size_t> perm;
        if (leftmost_match(z, ex.mr, perm)) {
          r.add_pair(z, ex.mr, perm, ex.id);
          ++st.used;
        } else {
          ++st.skipped;
        }
      }
    }
    if (st.used + st.skipped > 0)
      st.silver_skip_rate =
          static_cast<double>(st.skipped) / static_cast<double>(st.used + st.skipped);
    r.silver_skip_rate_ = st.silver_skip_rate;
    if (st.used == 0) throw InsufficientData("no usable reorderer training pairs");
    if (stats) *stats = st;
    return r;
  }

  TokenSeq reorder(const TokenSeq& z) const {
    if (!trained_) throw UntrainedModel("reorderer has not been trained or loaded");
    if (z.empty()) return z;
    const Template tz = extract_template(z, constants_);
    const auto mem = memory_.find(template_key(tz));
    if (mem != memory_.end()) {
      const std::vector<std::size_t>& perm = pick_perm(mem->second);
      TokenSeq y(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) y[perm[i]] = z[i];
      return y;
    }

    // Backoff: adjacent-swap hill climbing from the identity order. Swapping
    // neighbors only changes their own pairwise term, so comparing the two
    // precedence probabilities is the exact improvement test.
    std::vector<std::size_t> order(z.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const std::size_t max_passes = z.size() * z.size();
    for (std::size_t pass = 0; pass < max_passes; ++pass) {
      bool swapped = false;
      for (std::size_t p = 0; p + 1 < order.size(); ++p) {
        const Token& a = tz.tokens[order[p]];
        const Token& b = tz.tokens[order[p + 1]];
        if (precedes_prob(b, a) > precedes_prob(a, b)) {
          std::swap(order[p], order[p + 1]);
          swapped = true;
        }
      }
      if (!swapped) break;
    }
    TokenSeq y;
    y.reserve(z.size());
    for (std::size_t i : order) y.push_back(z[i]);
    return y;
  }

  // P(a appears before b) from training counts; unseen pairs are indifferent.
  double precedes_prob(const Token& a, const Token& b) const {
    const auto ab = precedence_.find(a + ' ' + b);
    const auto ba = precedence_.find(b + ' ' + a);
    const double nab = ab == precedence_.end() ? 0.0 : static_cast<double>(ab->second);
    const double nba = ba == precedence_.end() ? 0.0 : static_cast<double>(ba->second);
    if (nab + nba == 0.0) return 0.5;
    return nab / (nab + nba);
  }

  bool has_template(const TokenSeq& z) const {
    return memory_.count(template_key(extract_template(z, constants_))) > 0;
  }

  ReordererMode mode() const { return mode_; }
  double silver_skip_rate() const { return silver_skip_rate_; }
  bool trained() const { return trained_; }
  const std::set<Token>& constants() const { return constants_; }
  std::size_t template_count() const { return memory_.size(); }

  void save(const std::string& path) const {
    if (!trained_) throw UntrainedModel("cannot save an untrained reorderer");
    nlohmann::json j;
    j["format_version"] = 1;
    j["mode"] = to_string(mode_);
    j["silver_skip_rate"] = silver_skip_rate_;
    j["constants"] = std::vector<Token>(constants_.begin(), constants_.end());
    nlohmann::json mem = nlohmann::json::object();
    for (const auto& [key, entries] : memory_) {
      const MemoryEntry* win = &entries.front();
      for (const auto& e : entries)
        if (e.count > win->count) win = &e;
      mem[key] = {{"perm", win->perm}, {"support", win->count}};
    }
    j["template_memory"] = mem;
    nlohmann::json prec = nlohmann::json::object();
    for (const auto& [pair, count] : precedence_) prec[pair] = count;
    j["precedence"] = prec;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write reorderer model: " + path);
    out << j.dump(2) << '\n';
  }

  static Reorderer load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open reorderer model: " + path);
    nlohmann::json j;
    Reorderer r;
    try {
      in >> j;
      r.mode_ = reorderer_mode_from_string(j.at("mode").get<std::string>());
      r.silver_skip_rate_ = j.at("silver_skip_rate").get<double>();
      for (const auto& c : j.at("constants")) r.constants_.insert(c.get<Token>());
      for (const auto& [key, val] : j.at("template_memory").items()) {
        MemoryEntry e;
        e.perm = val.at("perm").get<std::vector<std::size_t>>();
        e.count = val.at("support").get<std::size_t>();
        r.memory_[key].push_back(e);
      }
      for (const auto& [pair, count] : j.at("precedence").items())
        r.precedence_[pair] = count.get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
      throw MalformedRecord("bad reorderer model file " + path + ": " + e.what());
    }
    r.trained_ = true;
    return r;
  }

 private:
  struct MemoryEntry {
    std::vector<std::size_t> perm;
    std::size_t count = 0;
  };

  // Majority permutation; entries are kept in first-seen order so ties keep
  // the earliest.
  static const std::vector<std::size_t>& pick_perm(const std::vector<MemoryEntry>& entries) {
    const MemoryEntry* win = &entries.front();
    for (const auto& e : entries)
      if (e.count > win->count) win = &e;
    return win->perm;
  }

  // perm[i] = leftmost not-yet-used position of z[i] in y; false when the
  // token multisets differ.
  static bool leftmost_match(const TokenSeq& z, const TokenSeq& y,
                             std::vector<std::size_t>& perm) {
    if (z.size() != y.size()) return false;
    std::vector<char> used(y.size(), 0);
    perm.assign(z.size(), 0);
    for (std::size_t i = 0; i < z.size(); ++i) {
      bool found = false;
      for (std::size_t j = 0; j < y.size(); ++j) {
        if (!used[j] && y[j] == z[i]) {
          perm[i] = j;
          used[j] = 1;
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  }

  std::set<Token> constants_;
  ReordererMode mode_ = ReordererMode::gold;
  bool trained_ = false;
  double silver_skip_rate_ = 0.0;
  std::map<std::string, std::vector<MemoryEntry>> memory_;
  std::map<std::string, std::size_t> precedence_;
};

}  // namespace tpol
