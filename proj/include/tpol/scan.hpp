#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tpol/corpus.hpp"
#include "tpol/errors.hpp"
#include "tpol/types.hpp"

namespace tpol {

// Synthetic navigational-command corpus: commands paired with low-level
// action sequences and with program-style meaning representations derived
// from the command structure.
//
// Command grammar:
//   C -> S | S and S | S after S
//   S -> V | V twice | V thrice
//   V -> U | P d | P opposite d | P around d     (P = U | turn)
//   U -> walk | look | run | jump ; d -> left | right
//
// Action semantics: "P d" turns then acts ("turn" alone contributes no move
// action); opposite doubles the turn; around repeats (turn, act) four times;
// twice/thrice repeat; "X and Y" concatenates; "X after Y" runs Y first.
//
// The program form is a prefix encoding with one function token per grammar
// construct, e.g. "jump around right twice" -> answer twice around right
// jump. Every function has fixed arity (answer/twice/thrice/opposite/around/
// left/right take one argument, and/after take two), so the bracket-free
// form is uniquely decodable; a bracketed variant is available behind a flag
// and strips back to the plain form under bracket removal.
struct ScanExample {
  TokenSeq command;
  TokenSeq actions;
  TokenSeq program;
};

namespace detail {

struct ScanPhrase {
  TokenSeq command;
  TokenSeq actions;
  TokenSeq plain;      // bracket-free program core
  TokenSeq bracketed;  // same core with explicit brackets
};

inline TokenSeq scan_turn_action(const Token& d) {
  return {d == "left" ? "I_TURN_LEFT" : "I_TURN_RIGHT"};
}

inline TokenSeq scan_prim_action(const Token& p) {
  if (p == "turn") return {};
  if (p == "walk") return {"I_WALK"};
  if (p == "look") return {"I_LOOK"};
  if (p == "run") return {"I_RUN"};
  return {"I_JUMP"};
}

inline TokenSeq operator+(TokenSeq a, const TokenSeq& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline TokenSeq repeated(const TokenSeq& a, std::size_t times) {
  TokenSeq out;
  for (std::size_t i = 0; i < times; ++i) out = out + a;
  return out;
}

inline std::vector<ScanPhrase> enumerate_verbs() {
  const std::vector<Token> prims = {"walk", "look", "run", "jump", "turn"};
  const std::vector<Token> acts = {"walk", "look", "run", "jump"};
  const std::vector<Token> dirs = {"left", "right"};
  std::vector<ScanPhrase> out;
  for (const Token& u : acts)
    out.push_back({{u}, scan_prim_action(u), {u}, {u}});
  for (const Token& p : prims)
    for (const Token& d : dirs)
      out.push_back({{p, d},
                     scan_turn_action(d) + scan_prim_action(p),
                     {d, p},
                     {d, "(", p, ")"}});
  for (const Token& p : prims)
    for (const Token& d : dirs)
      out.push_back({{p, "opposite", d},
                     scan_turn_action(d) + scan_turn_action(d) + scan_prim_action(p),
                     {"opposite", d, p},
                     {"opposite", "(", d, "(", p, ")", ")"}});
  for (const Token& p : prims)
    for (const Token& d : dirs)
      out.push_back({{p, "around", d},
                     repeated(scan_turn_action(d) + scan_prim_action(p), 4),
                     {"around", d, p},
                     {"around", "(", d, "(", p, ")", ")"}});
  return out;
}

inline std::vector<ScanPhrase> enumerate_clauses() {
  std::vector<ScanPhrase> out;
  for (const ScanPhrase& v : enumerate_verbs()) {
    out.push_back(v);
    out.push_back({v.command + TokenSeq{"twice"},
                   repeated(v.actions, 2),
                   TokenSeq{"twice"} + v.plain,
                   TokenSeq{"twice", "("} + v.bracketed + TokenSeq{")"}});
    out.push_back({v.command + TokenSeq{"thrice"},
                   repeated(v.actions, 3),
                   TokenSeq{"thrice"} + v.plain,
                   TokenSeq{"thrice", "("} + v.bracketed + TokenSeq{")"}});
  }
  return out;
}

}  // namespace detail

// Deterministic exhaustive enumeration: all single clauses, then all "and"
// combinations, then all "after" combinations. Full size 20910. `limit`
// subsamples with the seed, keeping enumeration order.
inline std::vector<ScanExample> generate_scan(std::optional<std::size_t> limit = std::nullopt,
                                              std::uint64_t seed = 0, bool brackets = false) {
  using detail::operator+;
  const std::vector<detail::ScanPhrase> clauses = detail::enumerate_clauses();
  std::vector<detail::ScanPhrase> all;
  all.reserve(clauses.size() + 2 * clauses.size() * clauses.size());
  for (const auto& s : clauses) all.push_back(s);
  for (const auto& a : clauses)
    for (const auto& b : clauses)
      all.push_back({a.command + TokenSeq{"and"} + b.command,
                     a.actions + b.actions,
                     TokenSeq{"and"} + a.plain + b.plain,
                     TokenSeq{"and", "("} + a.bracketed + b.bracketed + TokenSeq{")"}});
  for (const auto& a : clauses)
    for (const auto& b : clauses)
      all.push_back({a.command + TokenSeq{"after"} + b.command,
                     b.actions + a.actions,
                     TokenSeq{"after"} + a.plain + b.plain,
                     TokenSeq{"after", "("} + a.bracketed + b.bracketed + TokenSeq{")"}});

  std::vector<std::size_t> keep(all.size());
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
  if (limit && *limit < all.size()) {
    detail::deterministic_shuffle(keep, seed);
    keep.resize(*limit);
    std::sort(keep.begin(), keep.end());
  }

  std::vector<ScanExample> out;
  out.reserve(keep.size());
  for (std::size_t i : keep) {
    const auto& ph = all[i];
    ScanExample ex;
    ex.command = ph.command;
    ex.actions = ph.actions;
    if (brackets)
      ex.program = TokenSeq{"answer", "("} + ph.bracketed + TokenSeq{")"};
    else
      ex.program = TokenSeq{"answer"} + ph.plain;
    out.push_back(std::move(ex));
  }
  return out;
}

// The tokens that vary freely inside otherwise-identical program shapes;
// used as the template lexicon for this corpus.
inline std::set<Token> scan_constants() {
  return {"walk", "look", "run", "jump", "turn", "left", "right"};
}

// Corpus records carry the command as nl and the program as mr; alignments
// are absent (automatic alignment fills them in downstream). Ids number the
// examples in the order given.
inline Corpus scan_to_corpus(const std::vector<ScanExample>& examples) {
  Corpus corpus;
  corpus.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    AlignedExample ex;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "scan_%05zu", i);
    ex.id = buf;
    ex.nl = examples[i].command;
    ex.mr = examples[i].program;
    ex.language = "synthetic";
    corpus.push_back(std::move(ex));
  }
  return corpus;
}

inline SplitDataset scan_split(const Corpus& corpus, SplitStrategy kind, const SplitRatios& ratios,
                               std::uint64_t seed) {
  if (kind != SplitStrategy::scan_iid && kind != SplitStrategy::scan_right &&
      kind != SplitStrategy::scan_around_right)
    throw ConfigError("scan_split expects a scan split strategy");
  return make_split(corpus, kind, ratios, seed, scan_constants());
}

}  // namespace tpol
