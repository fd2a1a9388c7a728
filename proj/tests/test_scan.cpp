#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>

#include "helpers.hpp"
#include "tpol/errors.hpp"
#include "tpol/scan.hpp"

using namespace tpol;

namespace {

std::map<std::string, const ScanExample*> by_command(const std::vector<ScanExample>& all) {
  std::map<std::string, const ScanExample*> m;
  for (const ScanExample& ex : all) m[join_tokens(ex.command)] = &ex;
  return m;
}

}  // namespace

TEST_CASE("the full command space has exactly 20910 entries") {
  const auto all = generate_scan();
  CHECK(all.size() == 20910);

  // 102 single clauses plus two conjunctions over every ordered clause pair.
  std::size_t singles = 0;
  for (const ScanExample& ex : all) {
    const bool compound = detail::has_token(ex.command, "and") ||
                          detail::has_token(ex.command, "after");
    if (!compound) ++singles;
  }
  CHECK(singles == 102);
  CHECK(all.size() == 102 + 2 * 102 * 102);

  // Commands are unique.
  CHECK(by_command(all).size() == all.size());
}

TEST_CASE("frozen reference commands") {
  const auto all = generate_scan();
  const auto m = by_command(all);

  REQUIRE(m.count("jump"));
  CHECK(m.at("jump")->actions == TokenSeq{"I_JUMP"});
  CHECK(m.at("jump")->program == TokenSeq{"answer", "jump"});

  REQUIRE(m.count("jump twice"));
  CHECK(m.at("jump twice")->actions == TokenSeq{"I_JUMP", "I_JUMP"});
  CHECK(m.at("jump twice")->program == TokenSeq{"answer", "twice", "jump"});

  REQUIRE(m.count("jump around right"));
  CHECK(m.at("jump around right")->actions ==
        TokenSeq{"I_TURN_RIGHT", "I_JUMP", "I_TURN_RIGHT", "I_JUMP", "I_TURN_RIGHT",
                 "I_JUMP", "I_TURN_RIGHT", "I_JUMP"});
  CHECK(m.at("jump around right")->program == TokenSeq{"answer", "around", "right", "jump"});

  REQUIRE(m.count("turn left"));
  CHECK(m.at("turn left")->actions == TokenSeq{"I_TURN_LEFT"});

  REQUIRE(m.count("walk opposite left thrice"));
  CHECK(m.at("walk opposite left thrice")->actions ==
        TokenSeq{"I_TURN_LEFT", "I_TURN_LEFT", "I_WALK", "I_TURN_LEFT", "I_TURN_LEFT",
                 "I_WALK", "I_TURN_LEFT", "I_TURN_LEFT", "I_WALK"});

  REQUIRE(m.count("jump and walk"));
  CHECK(m.at("jump and walk")->actions == TokenSeq{"I_JUMP", "I_WALK"});
  CHECK(m.at("jump and walk")->program == TokenSeq{"answer", "and", "jump", "walk"});

  REQUIRE(m.count("jump after walk"));
  CHECK(m.at("jump after walk")->actions == TokenSeq{"I_WALK", "I_JUMP"});
  CHECK(m.at("jump after walk")->program == TokenSeq{"answer", "after", "jump", "walk"});
}

TEST_CASE("conjunction semantics hold across the whole space") {
  const auto all = generate_scan();
  const auto m = by_command(all);
  std::mt19937_64 rng(11);
  std::size_t checked = 0;
  while (checked < 500) {
    const ScanExample& ex = all[rng() % all.size()];
    auto it = std::find_if(ex.command.begin(), ex.command.end(), [](const Token& t) {
      return t == "and" || t == "after";
    });
    if (it == ex.command.end()) continue;
    const TokenSeq left(ex.command.begin(), it);
    const TokenSeq right(it + 1, ex.command.end());
    const ScanExample* a = m.at(join_tokens(left));
    const ScanExample* b = m.at(join_tokens(right));
    if (*it == "and")
      CHECK(ex.actions == detail::operator+(a->actions, b->actions));
    else
      CHECK(ex.actions == detail::operator+(b->actions, a->actions));
    ++checked;
  }
}

TEST_CASE("repetition and direction semantics hold for every clause") {
  const auto all = generate_scan();
  const auto m = by_command(all);
  for (const auto& [cmd, ex] : m) {
    const TokenSeq& c = ex->command;
    if (detail::has_token(c, "and") || detail::has_token(c, "after")) continue;
    if (c.back() == "twice") {
      const TokenSeq base(c.begin(), c.end() - 1);
      CHECK(ex->actions == detail::repeated(m.at(join_tokens(base))->actions, 2));
    } else if (c.back() == "thrice") {
      const TokenSeq base(c.begin(), c.end() - 1);
      CHECK(ex->actions == detail::repeated(m.at(join_tokens(base))->actions, 3));
    }
    if (c.size() == 3 && c[1] == "opposite") {
      const TokenSeq turn = detail::scan_turn_action(c[2]);
      CHECK(ex->actions == detail::operator+(detail::operator+(turn, turn),
                                             detail::scan_prim_action(c[0])));
    }
    if (c.size() == 3 && c[1] == "around") {
      const TokenSeq unit =
          detail::operator+(detail::scan_turn_action(c[2]), detail::scan_prim_action(c[0]));
      CHECK(ex->actions == detail::repeated(unit, 4));
    }
  }
}

TEST_CASE("subsampling is deterministic and order-preserving") {
  const auto a = generate_scan(2000, 42);
  const auto b = generate_scan(2000, 42);
  REQUIRE(a.size() == 2000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].command == b[i].command);
    CHECK(a[i].program == b[i].program);
  }

  const auto c = generate_scan(2000, 43);
  bool any_difference = false;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i].command != a[i].command) any_difference = true;
  CHECK(any_difference);

  // A limit at or above the full size keeps everything.
  CHECK(generate_scan(30000, 42).size() == 20910);
}

TEST_CASE("bracketed programs strip back to the plain form") {
  const auto plain = generate_scan(300, 9, false);
  const auto wrapped = generate_scan(300, 9, true);
  REQUIRE(plain.size() == wrapped.size());
  for (std::size_t i = 0; i < plain.size(); ++i) {
    REQUIRE(plain[i].command == wrapped[i].command);
    TokenSeq stripped;
    for (const Token& t : wrapped[i].program)
      if (t != "(" && t != ")") stripped.push_back(t);
    CHECK(stripped == plain[i].program);
  }
}

TEST_CASE("corpus conversion produces loadable unaligned records") {
  const Corpus c = scan_to_corpus(generate_scan(50, 3));
  REQUIRE(c.size() == 50);
  CHECK(c[0].id == "scan_00000");
  CHECK(c[49].id == "scan_00049");
  for (const AlignedExample& ex : c) {
    validate_sentences(ex);
    CHECK(ex.bisymbols.empty());
    CHECK(ex.language == "synthetic");
    CHECK(ex.mr[0] == "answer");
  }

  const std::string path = testutil::make_temp_dir() + "/scan.jsonl";
  save_corpus(path, c);
  CHECK(load_corpus(path).size() == 50);
}

TEST_CASE("right-holdout split quarantines the right token") {
  const Corpus c = scan_to_corpus(generate_scan(2000, 7));
  const SplitDataset s = scan_split(c, SplitStrategy::scan_right, {0.8, 0.1, 0.1}, 7);
  CHECK(s.train.size() + s.dev.size() + s.test.size() == c.size());
  for (const AlignedExample& ex : s.test) CHECK(detail::has_token(ex.nl, "right"));
  for (const AlignedExample& ex : s.train) CHECK_FALSE(detail::has_token(ex.nl, "right"));
  for (const AlignedExample& ex : s.dev) CHECK_FALSE(detail::has_token(ex.nl, "right"));
}

TEST_CASE("around-right holdout keeps its parts trainable") {
  const Corpus c = scan_to_corpus(generate_scan(4000, 7));
  const SplitDataset s = scan_split(c, SplitStrategy::scan_around_right, {0.8, 0.1, 0.1}, 7);
  bool train_has_around = false, train_has_right = false;
  for (const AlignedExample& ex : s.test) CHECK(detail::has_bigram(ex.nl, "around", "right"));
  for (const AlignedExample& ex : s.train) {
    CHECK_FALSE(detail::has_bigram(ex.nl, "around", "right"));
    train_has_around = train_has_around || detail::has_token(ex.nl, "around");
    train_has_right = train_has_right || detail::has_token(ex.nl, "right");
  }
  // The composition is held out, not its ingredients.
  CHECK(train_has_around);
  CHECK(train_has_right);
}

TEST_CASE("scan_split rejects non-scan strategies") {
  const Corpus c = scan_to_corpus(generate_scan(100, 1));
  CHECK_THROWS_AS(scan_split(c, SplitStrategy::question, {0.8, 0.1, 0.1}, 0), ConfigError);
  CHECK(scan_split(c, SplitStrategy::scan_iid, {0.8, 0.1, 0.1}, 0).train.size() == 80);
}
