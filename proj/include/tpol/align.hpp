#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <utility>
#include <vector>

#include "tpol/errors.hpp"
#include "tpol/types.hpp"

namespace tpol {

namespace detail {

// Counts inversions with a merge sort; O(n log n).
inline std::size_t count_inversions(std::vector<std::size_t>& v, std::size_t lo, std::size_t hi,
                                    std::vector<std::size_t>& tmp) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::size_t inv = count_inversions(v, lo, mid, tmp) + count_inversions(v, mid, hi, tmp);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[i] <= v[j]) {
      tmp[k++] = v[i++];
    } else {
      inv += mid - i;
      tmp[k++] = v[j++];
    }
  }
  while (i < mid) tmp[k++] = v[i++];
  while (j < hi) tmp[k++] = v[j++];
  std::copy(tmp.begin() + static_cast<std::ptrdiff_t>(lo),
            tmp.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

}  // namespace detail

// Number of crossing pairs among the fully linked bi-symbols: pairs of links
// whose source order and target order disagree. Deletions and insertions
// never cross anything.
inline std::size_t crossing_count(const Alignment& a) {
  std::vector<std::pair<std::size_t, std::size_t>> links;
  for (const BiSymbol& b : a)
    if (b.is_link()) links.emplace_back(*b.src, *b.tgt);
  std::sort(links.begin(), links.end());
  std::vector<std::size_t> tgts;
  tgts.reserve(links.size());
  for (const auto& [s, t] : links) tgts.push_back(t);
  std::vector<std::size_t> tmp(tgts.size());
  return detail::count_inversions(tgts, 0, tgts.size(), tmp);
}

inline bool is_monotone(const Alignment& a) { return crossing_count(a) == 0; }

// The monotone rewrite of one aligned example: padded parallel sequences for
// the translation step and the permutation the reorderer must learn.
// y[perm[i]] = z[i] restores the original meaning order.
struct MonotoneDerivation {
  TokenSeq x_pad;  // utterance padded with epsilons at insertion slots
  TokenSeq z_pad;  // meaning tokens in source order, epsilon where deleted
  TokenSeq z;      // z_pad without epsilons: the monotone translation target
  std::vector<std::size_t> perm;
};

// Reads the monotone derivation straight off the bi-symbol list, which is
// already sorted by source position (validated invariant).
inline MonotoneDerivation monotonicize(const AlignedExample& ex) {
  MonotoneDerivation d;
  d.x_pad.reserve(ex.bisymbols.size());
  d.z_pad.reserve(ex.bisymbols.size());
  for (const BiSymbol& b : ex.bisymbols) {
    d.x_pad.push_back(b.src ? ex.nl[*b.src] : epsilon_token());
    d.z_pad.push_back(b.tgt ? ex.mr[*b.tgt] : epsilon_token());
    if (b.tgt) {
      d.z.push_back(ex.mr[*b.tgt]);
      d.perm.push_back(*b.tgt);
    }
  }
  return d;
}

// Recovers the bi-symbol list implied by a padded pair: epsilons mark
// deletions and insertions, everything else links positionally.
inline Alignment induced_alignment(const TokenSeq& x_pad, const TokenSeq& z_pad) {
  if (x_pad.size() != z_pad.size())
    throw LengthMismatch("padded sequences differ in length: " + std::to_string(x_pad.size()) +
                         " vs " + std::to_string(z_pad.size()));
  Alignment a;
  std::size_t xi = 0, zi = 0;
  for (std::size_t p = 0; p < x_pad.size(); ++p) {
    const bool xe = is_epsilon(x_pad[p]);
    const bool ze = is_epsilon(z_pad[p]);
    if (xe && ze)
      throw AlignmentViolation("padded position " + std::to_string(p) + " is epsilon on both sides");
    BiSymbol b;
    if (!xe) b.src = xi++;
    if (!ze) b.tgt = zi++;
    a.push_back(b);
  }
  return a;
}

// Fraction of bi-symbols present in exactly one of the two alignments,
// measured against the larger one: 1 - |pred ∩ gold| / max(|pred|, |gold|).
inline double alignment_error(const Alignment& pred, const Alignment& gold) {
  using Key = std::pair<long long, long long>;
  auto key = [](const BiSymbol& b) -> Key {
    return {b.src ? static_cast<long long>(*b.src) : -1,
            b.tgt ? static_cast<long long>(*b.tgt) : -1};
  };
  std::multiset<Key> g;
  for (const BiSymbol& b : gold) g.insert(key(b));
  std::size_t matched = 0;
  for (const BiSymbol& b : pred) {
    auto it = g.find(key(b));
    if (it != g.end()) {
      g.erase(it);
      ++matched;
    }
  }
  const std::size_t denom = std::max(pred.size(), gold.size());
  if (denom == 0) return 0.0;
  return 1.0 - static_cast<double>(matched) / static_cast<double>(denom);
}

// Example-level comparison: only defined over the same sentence pair.
inline double alignment_error(const AlignedExample& pred, const AlignedExample& gold) {
  if (pred.nl != gold.nl || pred.mr != gold.mr)
    throw MismatchedSentence("records '" + pred.id + "' and '" + gold.id +
                             "' do not cover the same sentence pair");
  return alignment_error(pred.bisymbols, gold.bisymbols);
}

// Strips round brackets from the meaning sequence, remapping the alignment.
// A bi-symbol pointing at a bracket keeps its source side as a deletion, or
// disappears entirely if it had no source side.
inline AlignedExample remove_brackets(const AlignedExample& ex) {
  AlignedExample out;
  out.id = ex.id;
  out.nl = ex.nl;
  out.language = ex.language;
  std::vector<std::optional<std::size_t>> remap(ex.mr.size());
  for (std::size_t j = 0; j < ex.mr.size(); ++j) {
    if (ex.mr[j] == "(" || ex.mr[j] == ")") continue;
    remap[j] = out.mr.size();
    out.mr.push_back(ex.mr[j]);
  }
  for (const BiSymbol& b : ex.bisymbols) {
    BiSymbol nb;
    nb.src = b.src;
    if (b.tgt) {
      if (remap[*b.tgt]) {
        nb.tgt = remap[*b.tgt];
      } else if (!b.src) {
        continue;  // inserted bracket: drop the symbol
      }
    }
    out.bisymbols.push_back(nb);
  }
  if (out.mr.empty())
    throw MalformedRecord("record '" + ex.id + "' has no meaning tokens after bracket removal");
  return out;
}

}  // namespace tpol
