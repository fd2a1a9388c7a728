#pragma once

#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tpol/errors.hpp"

namespace tpol {

using Token = std::string;
using TokenSeq = std::vector<Token>;

// Internal epsilon marker (U+03B5). Never a legal corpus token; serialized
// as null in JSON output.
inline const Token& epsilon_token() {
  static const Token eps = "\xce\xb5";
  return eps;
}

inline bool is_epsilon(const Token& t) { return t == epsilon_token(); }

// One link of a word alignment. Either side may be absent: (src, nullopt)
// deletes an utterance token, (nullopt, tgt) inserts a meaning token.
struct BiSymbol {
  std::optional<std::size_t> src;
  std::optional<std::size_t> tgt;

  bool is_deletion() const { return src.has_value() && !tgt.has_value(); }
  bool is_insertion() const { return !src.has_value() && tgt.has_value(); }
  bool is_link() const { return src.has_value() && tgt.has_value(); }

  friend bool operator==(const BiSymbol&, const BiSymbol&) = default;
};

using Alignment = std::vector<BiSymbol>;

// A sentence pair plus its bi-symbol alignment. `nl` is the natural-language
// utterance, `mr` the meaning representation.
struct AlignedExample {
  std::string id;
  TokenSeq nl;
  TokenSeq mr;
  Alignment bisymbols;
  std::string language = "en";
};

using Corpus = std::vector<AlignedExample>;

inline std::string join_tokens(const TokenSeq& toks) {
  std::string out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i) out += ' ';
    out += toks[i];
  }
  return out;
}

inline TokenSeq split_tokens(const std::string& s) {
  TokenSeq out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

// Checks the structural alignment invariants against sequence lengths:
//  - every source index in [0, n_src) used exactly once, same for target,
//  - no (eps, eps) symbol,
//  - source indexes appear in strictly increasing order along the list.
inline void validate_alignment(const Alignment& a, std::size_t n_src, std::size_t n_tgt,
                               const std::string& where = "") {
  const std::string ctx = where.empty() ? "" : (" in " + where);
  std::vector<char> src_seen(n_src, 0), tgt_seen(n_tgt, 0);
  std::optional<std::size_t> last_src;
  for (const BiSymbol& b : a) {
    if (!b.src && !b.tgt)
      throw AlignmentViolation("bi-symbol with both sides empty" + ctx);
    if (b.src) {
      if (*b.src >= n_src)
        throw IndexOutOfRange("source index " + std::to_string(*b.src) +
                              " out of range [0," + std::to_string(n_src) + ")" + ctx);
      if (src_seen[*b.src])
        throw AlignmentViolation("source index " + std::to_string(*b.src) +
                                 " covered twice" + ctx);
      src_seen[*b.src] = 1;
      if (last_src && *b.src <= *last_src)
        throw AlignmentViolation("source indexes not strictly increasing" + ctx);
      last_src = *b.src;
    }
    if (b.tgt) {
      if (*b.tgt >= n_tgt)
        throw IndexOutOfRange("target index " + std::to_string(*b.tgt) +
                              " out of range [0," + std::to_string(n_tgt) + ")" + ctx);
      if (tgt_seen[*b.tgt])
        throw AlignmentViolation("target index " + std::to_string(*b.tgt) +
                                 " covered twice" + ctx);
      tgt_seen[*b.tgt] = 1;
    }
  }
  for (std::size_t i = 0; i < n_src; ++i)
    if (!src_seen[i])
      throw AlignmentViolation("source index " + std::to_string(i) + " not covered" + ctx);
  for (std::size_t j = 0; j < n_tgt; ++j)
    if (!tgt_seen[j])
      throw AlignmentViolation("target index " + std::to_string(j) + " not covered" + ctx);
}

inline void validate_sentences(const AlignedExample& ex) {
  if (ex.nl.empty()) throw MalformedRecord("empty utterance in record '" + ex.id + "'");
  if (ex.mr.empty()) throw MalformedRecord("empty meaning sequence in record '" + ex.id + "'");
  for (const Token& t : ex.nl)
    if (is_epsilon(t))
      throw MalformedRecord("utterance contains reserved epsilon token in record '" + ex.id + "'");
  for (const Token& t : ex.mr)
    if (is_epsilon(t))
      throw MalformedRecord("meaning sequence contains reserved epsilon token in record '" +
                            ex.id + "'");
}

inline void validate_example(const AlignedExample& ex) {
  validate_sentences(ex);
  validate_alignment(ex.bisymbols, ex.nl.size(), ex.mr.size(), "record '" + ex.id + "'");
}

}  // namespace tpol
