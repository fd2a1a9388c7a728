#pragma once

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tpol/align.hpp"
#include "tpol/corpus.hpp"
#include "tpol/types.hpp"

namespace testutil {

// Quadratic reference implementation for crossing counts.
inline std::size_t crossing_brute(const tpol::Alignment& a) {
  std::vector<std::pair<std::size_t, std::size_t>> links;
  for (const tpol::BiSymbol& b : a)
    if (b.is_link()) links.emplace_back(*b.src, *b.tgt);
  std::size_t c = 0;
  for (std::size_t i = 0; i < links.size(); ++i)
    for (std::size_t j = i + 1; j < links.size(); ++j)
      if ((links[i].first < links[j].first) != (links[i].second < links[j].second)) ++c;
  return c;
}

// Uniformly sampled k-subset of [0, n), sorted.
inline std::vector<std::size_t> sample_subset(std::mt19937_64& rng, std::size_t n,
                                              std::size_t k) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng() % i]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

// A random alignment satisfying every AlignedExample invariant: total
// one-to-one coverage of n source and m target tokens, source indexes
// strictly increasing, insertions scattered anywhere.
inline tpol::Alignment random_alignment(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  const std::size_t links = rng() % (std::min(n, m) + 1);
  const std::vector<std::size_t> src_linked = sample_subset(rng, n, links);
  std::vector<std::size_t> tgt_linked = sample_subset(rng, m, links);
  for (std::size_t i = tgt_linked.size(); i > 1; --i)
    std::swap(tgt_linked[i - 1], tgt_linked[rng() % i]);

  std::vector<char> tgt_used(m, 0);
  tpol::Alignment a;
  std::size_t next_link = 0;
  for (std::size_t s = 0; s < n; ++s) {
    tpol::BiSymbol b;
    b.src = s;
    if (next_link < src_linked.size() && src_linked[next_link] == s) {
      b.tgt = tgt_linked[next_link];
      tgt_used[tgt_linked[next_link]] = 1;
      ++next_link;
    }
    a.push_back(b);
  }
  for (std::size_t t = 0; t < m; ++t) {
    if (tgt_used[t]) continue;
    const std::size_t pos = rng() % (a.size() + 1);
    a.insert(a.begin() + static_cast<std::ptrdiff_t>(pos),
             tpol::BiSymbol{std::nullopt, t});
  }
  return a;
}

inline tpol::AlignedExample random_example(std::mt19937_64& rng, std::size_t max_n = 9,
                                           std::size_t max_m = 9) {
  const std::size_t n = 1 + rng() % max_n;
  const std::size_t m = 1 + rng() % max_m;
  tpol::AlignedExample ex;
  ex.id = "fuzz";
  for (std::size_t i = 0; i < n; ++i) ex.nl.push_back("s" + std::to_string(i));
  for (std::size_t j = 0; j < m; ++j) ex.mr.push_back("t" + std::to_string(j));
  ex.bisymbols = random_alignment(rng, n, m);
  return ex;
}

// The worked non-monotone example used throughout: 2 crossings,
// z = [answer, city, largest, density, all], perm = [0,3,1,2,4].
inline tpol::AlignedExample fixture_city_density() {
  tpol::AlignedExample ex;
  ex.id = "g01";
  ex.nl = {"which", "city", "has", "the", "highest", "population", "density", "?"};
  ex.mr = {"answer", "largest", "density", "city", "all"};
  ex.bisymbols = {{0, 0}, {1, 3}, {2, std::nullopt}, {3, std::nullopt}, {4, 1},
                  {5, std::nullopt}, {6, 2}, {7, std::nullopt}, {std::nullopt, 4}};
  return ex;
}

inline std::string data_dir() { return TPOL_DATA_DIR; }
inline std::string cli_path() { return TPOL_CLI_PATH; }

inline std::string make_temp_dir() {
  std::string tmpl =
      (std::filesystem::temp_directory_path() / "tpol_test_XXXXXX").string();
  if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  return tmpl;
}

struct CmdResult {
  int status = -1;
  std::string out;
  std::string err;
};

inline std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (const char c : s) {
    if (c == '\'')
      q += "'\\''";
    else
      q += c;
  }
  q += "'";
  return q;
}

// Runs the CLI binary with the given arguments; `env_prefix` may hold
// VAR=value assignments.
inline CmdResult run_cli(const std::vector<std::string>& args,
                         const std::string& env_prefix = "") {
  const std::string err_file = make_temp_dir() + "/stderr";
  std::string cmd = env_prefix.empty() ? "" : env_prefix + " ";
  cmd += shell_quote(cli_path());
  for (const std::string& a : args) cmd += " " + shell_quote(a);
  cmd += " 2>" + shell_quote(err_file);
  CmdResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed");
  char buf[4096];
  while (std::size_t got = fread(buf, 1, sizeof(buf), pipe)) r.out.append(buf, got);
  const int rc = pclose(pipe);
  r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  std::ifstream ef(err_file);
  std::stringstream ss;
  ss << ef.rdbuf();
  r.err = ss.str();
  return r;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::size_t count_lines(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

}  // namespace testutil
