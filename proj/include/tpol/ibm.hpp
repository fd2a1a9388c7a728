#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tpol/errors.hpp"
#include "tpol/types.hpp"

namespace tpol {

// IBM Model 1 / Model 2 word alignment trained with EM, aligning each meaning
// token to one utterance token (or NULL). The utterance side conditions the
// translation table: t(mr_token | nl_token). Model 2 adds a distortion table
// q(slot | mr_pos, n, m) over utterance slots (slot 0 = NULL), with positions
// and lengths bucketed so long sentences share parameters.
class IbmModel {
 public:
  enum class Kind { model1, model2 };

  using SentencePair = std::pair<TokenSeq, TokenSeq>;  // (nl, mr)

  static constexpr double kDecodeSmoothing = 1e-12;
  static constexpr std::size_t kLengthCap = 40;

  static IbmModel train(const std::vector<SentencePair>& pairs, Kind kind,
                        std::size_t iterations, std::uint64_t seed) {
    if (pairs.empty()) throw EmptyCorpus("alignment training corpus is empty");
    if (iterations == 0) throw ConfigError("alignment training needs at least one iteration");
    for (const auto& [nl, mr] : pairs)
      if (nl.empty() || mr.empty())
        throw MalformedRecord("empty sentence in alignment training pair");

    IbmModel m;
    m.kind_ = kind;
    m.iterations_ = iterations;
    m.seed_ = seed;
    m.build_vocab(pairs);
    const auto ids = m.encode(pairs);
    m.t_.assign(m.src_vocab_.size() * m.tgt_vocab_.size(),
                1.0 / static_cast<double>(m.tgt_vocab_.size()));
    for (std::size_t it = 0; it < iterations; ++it) m.loglik_model1_.push_back(m.em_step(ids, false));
    if (kind == Kind::model2) {
      m.init_distortion(ids);
      for (std::size_t it = 0; it < iterations; ++it)
        m.loglik_model2_.push_back(m.em_step(ids, true));
    }
    m.trained_ = true;
    return m;
  }

  // Decodes one sentence pair into a legal ordered bi-symbol list. Each MR
  // token takes its argmax utterance position (leftmost on ties; NULL only on
  // a strictly better score). MR tokens sharing a position keep the highest-
  // scoring one as head; the rest become insertions after it. Unchosen
  // utterance tokens become deletions; NULL-aligned MR tokens anchor after
  // the nearest preceding anchored MR token, or at the front.
  Alignment viterbi_bisymbolize(const TokenSeq& nl, const TokenSeq& mr) const {
    if (!trained_) throw UntrainedModel("alignment model has not been trained or loaded");
    if (nl.empty() || mr.empty())
      throw MalformedRecord("cannot align an empty sentence pair");
    const std::size_t n = nl.size(), m = mr.size();

    // chosen[i]: utterance position for MR token i, or n for NULL. Argmax
    // over real positions keeps the leftmost on ties; NULL wins only when
    // strictly better than every real position.
    std::vector<std::size_t> chosen(m, n);
    std::vector<double> score(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t best_j = 0;
      double best = decode_score(1, nl, mr, i);
      for (std::size_t j = 1; j < n; ++j) {
        const double sc = decode_score(j + 1, nl, mr, i);
        if (sc > best) {
          best = sc;
          best_j = j;
        }
      }
      const double null_score = decode_score(0, nl, mr, i);
      if (null_score > best) {
        chosen[i] = n;
        score[i] = null_score;
      } else {
        chosen[i] = best_j;
        score[i] = best;
      }
    }

    std::vector<std::vector<std::size_t>> groups(n);
    std::vector<std::size_t> null_aligned;
    for (std::size_t i = 0; i < m; ++i) {
      if (chosen[i] < n)
        groups[chosen[i]].push_back(i);
      else
        null_aligned.push_back(i);
    }
    // Head per group: highest score, ties to the lowest MR index.
    std::vector<std::size_t> head(n, m);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i : groups[j])
        if (head[j] == m || score[i] > score[head[j]]) head[j] = i;
    }

    // anchor_group[i]: group index whose emission the NULL-aligned token i
    // follows; n means the front of the list.
    std::vector<std::size_t> mr_group(m, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i : groups[j]) mr_group[i] = j;
    std::vector<std::vector<std::size_t>> front_and_after(n + 1);
    for (std::size_t i : null_aligned) {
      std::size_t anchor = n;  // front
      for (std::size_t p = i; p-- > 0;) {
        if (mr_group[p] < n) {
          anchor = mr_group[p];
          break;
        }
      }
      front_and_after[anchor].push_back(i);
    }

    Alignment out;
    for (std::size_t i : front_and_after[n]) out.push_back({std::nullopt, i});
    for (std::size_t j = 0; j < n; ++j) {
      if (groups[j].empty()) {
        out.push_back({j, std::nullopt});
      } else {
        out.push_back({j, head[j]});
        for (std::size_t i : groups[j])
          if (i != head[j]) out.push_back({std::nullopt, i});
      }
      for (std::size_t i : front_and_after[j]) out.push_back({std::nullopt, i});
    }
    return out;
  }

  void save(const std::string& path) const {
    if (!trained_) throw UntrainedModel("cannot save an untrained alignment model");
    nlohmann::json j;
    j["format_version"] = 1;
    j["model"] = kind_ == Kind::model1 ? "model1" : "model2";
    j["iterations"] = iterations_;
    j["seed"] = seed_;
    j["vocabularies"] = {{"src", src_vocab_}, {"tgt", tgt_vocab_}};
    nlohmann::json t = nlohmann::json::object();
    for (std::size_t s = 0; s < src_vocab_.size(); ++s) {
      nlohmann::json row = nlohmann::json::object();
      for (std::size_t g = 0; g < tgt_vocab_.size(); ++g) {
        const double v = t_[s * tgt_vocab_.size() + g];
        if (v > 0) row[tgt_vocab_[g]] = v;
      }
      t[src_vocab_[s]] = row;
    }
    j["t"] = t;
    nlohmann::json q = nlohmann::json::object();
    for (const auto& [key, probs] : q_) {
      const std::string k = std::to_string(key[0]) + "," + std::to_string(key[1]) + "," +
                            std::to_string(key[2]);
      q[k] = probs;
    }
    j["q"] = q;
    j["loglik"] = {{"model1", loglik_model1_}, {"model2", loglik_model2_}};
    j["final_loglik"] = final_loglik();
    std::ofstream out(path);
    if (!out) throw IoError("cannot write alignment model: " + path);
    out << j.dump(2) << '\n';
  }

  static IbmModel load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open alignment model: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw MalformedRecord("bad alignment model file " + path + ": " + e.what());
    }
    IbmModel m;
    try {
      const std::string kind = j.at("model").get<std::string>();
      if (kind == "model1")
        m.kind_ = Kind::model1;
      else if (kind == "model2")
        m.kind_ = Kind::model2;
      else
        throw MalformedRecord("unknown alignment model kind '" + kind + "'");
      m.iterations_ = j.at("iterations").get<std::size_t>();
      m.seed_ = j.at("seed").get<std::uint64_t>();
      m.src_vocab_ = j.at("vocabularies").at("src").get<std::vector<Token>>();
      m.tgt_vocab_ = j.at("vocabularies").at("tgt").get<std::vector<Token>>();
      for (std::size_t s = 0; s < m.src_vocab_.size(); ++s) m.src_ids_[m.src_vocab_[s]] = s;
      for (std::size_t g = 0; g < m.tgt_vocab_.size(); ++g) m.tgt_ids_[m.tgt_vocab_[g]] = g;
      m.t_.assign(m.src_vocab_.size() * m.tgt_vocab_.size(), 0.0);
      for (const auto& [stok, row] : j.at("t").items()) {
        const std::size_t s = m.src_ids_.at(stok);
        for (const auto& [gtok, v] : row.items())
          m.t_[s * m.tgt_vocab_.size() + m.tgt_ids_.at(gtok)] = v.get<double>();
      }
      for (const auto& [key, probs] : j.at("q").items()) {
        std::array<std::uint32_t, 3> k{};
        std::size_t pos = 0;
        for (int f = 0; f < 3; ++f) {
          const auto comma = key.find(',', pos);
          k[static_cast<std::size_t>(f)] =
              static_cast<std::uint32_t>(std::stoul(key.substr(pos, comma - pos)));
          pos = comma == std::string::npos ? key.size() : comma + 1;
        }
        m.q_[k] = probs.get<std::vector<double>>();
      }
      if (j.contains("loglik")) {
        m.loglik_model1_ = j.at("loglik").at("model1").get<std::vector<double>>();
        m.loglik_model2_ = j.at("loglik").at("model2").get<std::vector<double>>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw MalformedRecord("bad alignment model file " + path + ": " + e.what());
    }
    m.trained_ = true;
    return m;
  }

  Kind kind() const { return kind_; }
  bool trained() const { return trained_; }
  const std::vector<Token>& src_vocab() const { return src_vocab_; }
  const std::vector<Token>& tgt_vocab() const { return tgt_vocab_; }
  const std::vector<double>& loglik_model1() const { return loglik_model1_; }
  const std::vector<double>& loglik_model2() const { return loglik_model2_; }

  double final_loglik() const {
    if (!loglik_model2_.empty()) return loglik_model2_.back();
    if (!loglik_model1_.empty()) return loglik_model1_.back();
    return 0.0;
  }

  // Raw table probability; 0 for unseen tokens or pairs.
  double t_prob(const Token& src, const Token& tgt) const {
    const auto s = src_ids_.find(src);
    const auto g = tgt_ids_.find(tgt);
    if (s == src_ids_.end() || g == tgt_ids_.end()) return 0.0;
    return t_[s->second * tgt_vocab_.size() + g->second];
  }

  // Most likely meaning token for an utterance token (ties: first-seen).
  Token argmax_translation(const Token& src) const {
    const auto s = src_ids_.find(src);
    if (s == src_ids_.end()) throw UntrainedModel("token '" + src + "' not in vocabulary");
    std::size_t best = 0;
    for (std::size_t g = 1; g < tgt_vocab_.size(); ++g)
      if (t_[s->second * tgt_vocab_.size() + g] > t_[s->second * tgt_vocab_.size() + best])
        best = g;
    return tgt_vocab_[best];
  }

  static const Token& null_token() {
    static const Token t = "<NULL>";
    return t;
  }

 private:
  void build_vocab(const std::vector<SentencePair>& pairs) {
    src_vocab_.push_back(null_token());
    src_ids_[null_token()] = 0;
    for (const auto& [nl, mr] : pairs) {
      for (const Token& w : nl)
        if (src_ids_.emplace(w, src_vocab_.size()).second) src_vocab_.push_back(w);
      for (const Token& w : mr)
        if (tgt_ids_.emplace(w, tgt_vocab_.size()).second) tgt_vocab_.push_back(w);
    }
  }

  struct IdPair {
    std::vector<std::size_t> nl;  // source ids, NULL excluded
    std::vector<std::size_t> mr;  // target ids
  };

  std::vector<IdPair> encode(const std::vector<SentencePair>& pairs) const {
    std::vector<IdPair> ids(pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      for (const Token& w : pairs[p].first) ids[p].nl.push_back(src_ids_.at(w));
      for (const Token& w : pairs[p].second) ids[p].mr.push_back(tgt_ids_.at(w));
    }
    return ids;
  }

  static std::array<std::uint32_t, 3> bucket_key(std::size_t i, std::size_t n, std::size_t m) {
    return {static_cast<std::uint32_t>(std::min(i, kLengthCap - 1)),
            static_cast<std::uint32_t>(std::min(n, kLengthCap)),
            static_cast<std::uint32_t>(std::min(m, kLengthCap))};
  }

  static std::size_t bucket_slot(std::size_t j, std::size_t n) {
    return std::min(j, std::min(n, kLengthCap));
  }

  void init_distortion(const std::vector<IdPair>& ids) {
    for (const IdPair& s : ids) {
      const std::size_t n = s.nl.size(), m = s.mr.size();
      for (std::size_t i = 0; i < m; ++i) {
        const auto key = bucket_key(i, n, m);
        auto& probs = q_[key];
        if (probs.empty())
          probs.assign(std::min(n, kLengthCap) + 1,
                       1.0 / static_cast<double>(std::min(n, kLengthCap) + 1));
      }
    }
  }

  double q_prob(std::size_t j, std::size_t i, std::size_t n, std::size_t m) const {
    const auto it = q_.find(bucket_key(i, n, m));
    if (it == q_.end()) return 1.0 / static_cast<double>(n + 1);
    return it->second[bucket_slot(j, n)];
  }

  // One EM iteration. Returns the corpus log-likelihood under the parameters
  // in force when the iteration started, so the recorded sequence is the EM
  // objective trace.
  double em_step(const std::vector<IdPair>& ids, bool with_distortion) {
    const std::size_t T = tgt_vocab_.size();
    std::vector<double> count(t_.size(), 0.0), total(src_vocab_.size(), 0.0);
    std::map<std::array<std::uint32_t, 3>, std::vector<double>> q_count;
    if (with_distortion)
      for (const auto& [key, probs] : q_) q_count[key].assign(probs.size(), 0.0);

    double loglik = 0.0;
    std::vector<double> gamma;
    for (const IdPair& s : ids) {
      const std::size_t n = s.nl.size(), m = s.mr.size();
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t g = s.mr[i];
        gamma.assign(n + 1, 0.0);
        double denom = 0.0;
        for (std::size_t j = 0; j <= n; ++j) {
          const std::size_t sid = j == 0 ? 0 : s.nl[j - 1];
          double p = t_[sid * T + g];
          p *= with_distortion ? q_prob(j, i, n, m) : 1.0 / static_cast<double>(n + 1);
          gamma[j] = p;
          denom += p;
        }
        loglik += std::log(denom);
        for (std::size_t j = 0; j <= n; ++j) {
          if (gamma[j] == 0.0) continue;
          const double w = gamma[j] / denom;
          const std::size_t sid = j == 0 ? 0 : s.nl[j - 1];
          count[sid * T + g] += w;
          total[sid] += w;
          if (with_distortion) q_count[bucket_key(i, n, m)][bucket_slot(j, n)] += w;
        }
      }
    }
    if (!std::isfinite(loglik))
      throw NonFiniteLikelihood("corpus log-likelihood is not finite; check smoothing");

    for (std::size_t sid = 0; sid < src_vocab_.size(); ++sid) {
      if (total[sid] == 0.0) continue;
      for (std::size_t g = 0; g < T; ++g) t_[sid * T + g] = count[sid * T + g] / total[sid];
    }
    if (with_distortion) {
      for (auto& [key, counts] : q_count) {
        double sum = 0.0;
        for (double c : counts) sum += c;
        if (sum == 0.0) continue;
        auto& probs = q_[key];
        for (std::size_t j = 0; j < counts.size(); ++j) probs[j] = counts[j] / sum;
      }
    }
    return loglik;
  }

  // Decode-time score of aligning MR position i to slot j (0 = NULL), with
  // add-epsilon smoothing so unseen pairs never zero out.
  double decode_score(std::size_t j, const TokenSeq& nl, const TokenSeq& mr,
                      std::size_t i) const {
    const Token& src = j == 0 ? null_token() : nl[j - 1];
    double p = t_prob(src, mr[i]) + kDecodeSmoothing;
    if (kind_ == Kind::model2) p *= q_prob(j, i, nl.size(), mr.size());
    return p;
  }

  Kind kind_ = Kind::model1;
  bool trained_ = false;
  std::size_t iterations_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<Token> src_vocab_, tgt_vocab_;
  std::unordered_map<Token, std::size_t> src_ids_, tgt_ids_;
  std::vector<double> t_;  // row-major [src][tgt]
  std::map<std::array<std::uint32_t, 3>, std::vector<double>> q_;
  std::vector<double> loglik_model1_, loglik_model2_;
};

inline IbmModel::Kind ibm_kind_from_string(const std::string& name) {
  if (name == "ibm1" || name == "model1") return IbmModel::Kind::model1;
  if (name == "ibm2" || name == "model2") return IbmModel::Kind::model2;
  throw ConfigError("unknown alignment model '" + name + "'");
}

}  // namespace tpol
