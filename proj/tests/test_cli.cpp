#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "helpers.hpp"
#include "tpol/corpus.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using testutil::count_lines;
using testutil::make_temp_dir;
using testutil::run_cli;
using testutil::slurp;

namespace {

std::string geo_path() { return testutil::data_dir() + std::string("/geo_sample.jsonl"); }
std::string constants_path() { return testutil::data_dir() + std::string("/geo_constants.txt"); }

json stderr_json(const testutil::CmdResult& r) {
  REQUIRE_FALSE(r.err.empty());
  return json::parse(r.err);
}

}  // namespace

TEST_CASE("cli: help exits zero") {
  CHECK(run_cli({"--help"}).status == 0);
  CHECK(run_cli({"scan-gen", "--help"}).status == 0);
}

TEST_CASE("cli: missing subcommand or bad flags yield machine-readable errors") {
  const auto none = run_cli({});
  CHECK(none.status == 1);
  CHECK(stderr_json(none).at("error") == "config_error");

  const auto bad_flag = run_cli({"scan-gen", "--no-such-flag"});
  CHECK(bad_flag.status == 1);
  CHECK(stderr_json(bad_flag).at("error") == "config_error");

  const auto bad_split = run_cli({"split", "--corpus", geo_path(), "--split", "bogus"});
  CHECK(bad_split.status == 1);
  CHECK(stderr_json(bad_split).at("error") == "config_error");
}

TEST_CASE("cli: scan-gen writes corpus, constants, and metadata") {
  const std::string out = make_temp_dir();
  const auto r = run_cli({"scan-gen", "--limit", "100", "--seed", "5", "--out", out});
  REQUIRE(r.status == 0);
  CHECK(count_lines(out + "/corpus.jsonl") == 100);
  CHECK(count_lines(out + "/constants.txt") == 7);

  const json meta = json::parse(slurp(out + "/meta_scan-gen.json"));
  CHECK(meta.at("subcommand") == "scan-gen");
  CHECK(meta.at("count") == 100);
  CHECK(meta.at("seed") == 5);
  CHECK(meta.at("config_hash").get<std::string>().size() == 16);

  // The emitted corpus is loadable even with the extra actions field.
  const tpol::Corpus c = tpol::load_corpus(out + "/corpus.jsonl");
  CHECK(c.size() == 100);
  CHECK(c[0].mr[0] == "answer");
}

TEST_CASE("cli: scan-gen output is byte-deterministic") {
  const std::string a = make_temp_dir(), b = make_temp_dir();
  REQUIRE(run_cli({"scan-gen", "--limit", "200", "--seed", "9", "--out", a}).status == 0);
  REQUIRE(run_cli({"scan-gen", "--limit", "200", "--seed", "9", "--out", b}).status == 0);
  CHECK(slurp(a + "/corpus.jsonl") == slurp(b + "/corpus.jsonl"));
  CHECK(slurp(a + "/corpus.jsonl") != "");
}

TEST_CASE("cli: split partitions and reports counts") {
  const std::string out = make_temp_dir();
  const auto r = run_cli({"split", "--corpus", geo_path(), "--split", "question", "--ratios",
                          "0.5,0.25,0.25", "--seed", "13", "--out", out});
  REQUIRE(r.status == 0);
  CHECK(count_lines(out + "/train.jsonl") == 6);
  CHECK(count_lines(out + "/dev.jsonl") == 3);
  CHECK(count_lines(out + "/test.jsonl") == 3);
  const json meta = json::parse(slurp(out + "/meta_split.json"));
  CHECK(meta.at("counts").at("train") == 6);
  const json side = json::parse(slurp(out + "/split.json"));
  CHECK(side.at("strategy") == "question");
}

TEST_CASE("cli: full pipeline over the sample corpus") {
  const std::string aligned = make_temp_dir();
  const std::string trained = make_temp_dir();
  const std::string parsed = make_temp_dir();
  const std::string evaled = make_temp_dir();
  const std::string reported = make_temp_dir();

  // Gold alignment passthrough.
  auto r = run_cli({"align", "--corpus", geo_path(), "--align", "gold", "--out", aligned});
  REQUIRE(r.status == 0);
  const std::string aligned_corpus = aligned + "/aligned_geo_sample.jsonl";
  CHECK(count_lines(aligned_corpus) == 12);
  CHECK(count_lines(aligned + "/derivations_geo_sample.jsonl") == 12);

  // Train both stages with memorization-friendly thresholds.
  r = run_cli({"train", "--train", aligned_corpus, "--constants", constants_path(),
               "--min-support", "1", "--min-precision", "0.5", "--out", trained});
  REQUIRE(r.status == 0);
  REQUIRE(fs::exists(trained + "/translator.json"));
  REQUIRE(fs::exists(trained + "/reorderer.json"));

  // Parse with tag dumping.
  r = run_cli({"parse", "--corpus", geo_path(), "--translator", trained + "/translator.json",
               "--reorderer", trained + "/reorderer.json", "--dump-tags", "--out", parsed});
  REQUIRE(r.status == 0);
  CHECK(count_lines(parsed + "/predictions.jsonl") == 12);
  const std::string tags = slurp(parsed + "/tags.tsv");
  CHECK(tags.rfind("id\tposition\ttoken\ttag\tbackoff\n", 0) == 0);
  CHECK(tags.find("g01\t0\twhich\tanswer\t") != std::string::npos);

  // Evaluate the stored predictions.
  r = run_cli({"eval", "--test", aligned_corpus, "--translator", trained + "/translator.json",
               "--reorderer", trained + "/reorderer.json", "--predictions",
               parsed + "/predictions.jsonl", "--label", "gold", "--partition", "question",
               "--out", evaled});
  REQUIRE(r.status == 0);
  const json meta = json::parse(slurp(evaled + "/meta_eval.json"));
  CHECK(meta.at("overall_exact_match") == 1.0);
  const std::string csv = slurp(evaled + "/eval.csv");
  CHECK(csv.rfind("config,partition,language,metric,value,count\n", 0) == 0);
  CHECK(csv.find("gold,question,en,overall_exact_match,1.000000,12") != std::string::npos);

  // Merge into a report.
  r = run_cli({"report", evaled + "/eval.json", "--out", reported});
  REQUIRE(r.status == 0);
  const std::string report_csv = slurp(reported + "/report.csv");
  CHECK(report_csv.find("gold,question,en,accuracy_drop,0.000000,12") != std::string::npos);
  CHECK(slurp(reported + "/report.svg").rfind("<svg", 0) == 0);
}

TEST_CASE("cli: ibm alignment records the mean error against gold") {
  const std::string out = make_temp_dir();
  const auto r = run_cli({"align", "--corpus", geo_path(), "--align", "ibm1", "--iters", "5",
                          "--seed", "1", "--out", out});
  REQUIRE(r.status == 0);
  REQUIRE(fs::exists(out + "/model.json"));
  const json meta = json::parse(slurp(out + "/meta_align.json"));
  CHECK(meta.at("scored_records") == 12);
  const double err = meta.at("mean_alignment_error").get<double>();
  CHECK(err >= 0.0);
  CHECK(err <= 1.0);
  CHECK(meta.contains("final_loglik"));

  // Every rewritten record still satisfies the invariants.
  const tpol::Corpus c = tpol::load_corpus(out + "/aligned_geo_sample.jsonl");
  for (const auto& ex : c) tpol::validate_example(ex);

  // Reusing the saved model skips training and works on fresh output.
  const std::string reuse = make_temp_dir();
  const auto r2 = run_cli({"align", "--corpus", geo_path(), "--align", "ibm1", "--model",
                           out + "/model.json", "--out", reuse});
  REQUIRE(r2.status == 0);
  CHECK_FALSE(fs::exists(reuse + "/model.json"));
  CHECK(slurp(reuse + "/aligned_geo_sample.jsonl") == slurp(out + "/aligned_geo_sample.jsonl"));
}

TEST_CASE("cli: artifact errors are typed") {
  const auto silver = run_cli({"train", "--train", geo_path(), "--reorderer-mode", "silver",
                               "--out", make_temp_dir()});
  CHECK(silver.status == 1);
  CHECK(stderr_json(silver).at("error") == "missing_artifact");

  const auto missing = run_cli({"eval", "--test", "/nonexistent/test.jsonl", "--translator",
                                "/nonexistent/t.json", "--reorderer", "/nonexistent/r.json",
                                "--out", make_temp_dir()});
  CHECK(missing.status == 1);
  CHECK(stderr_json(missing).at("error") == "missing_artifact");

  const auto unaligned = run_cli({"align", "--corpus", geo_path(), "--align", "gold", "--out",
                                  make_temp_dir()});
  CHECK(unaligned.status == 0);  // geo carries gold alignments

  const std::string scan_out = make_temp_dir();
  REQUIRE(run_cli({"scan-gen", "--limit", "10", "--out", scan_out}).status == 0);
  const auto no_gold = run_cli({"align", "--corpus", scan_out + "/corpus.jsonl", "--align",
                                "gold", "--out", make_temp_dir()});
  CHECK(no_gold.status == 1);
  CHECK(stderr_json(no_gold).at("error") == "missing_alignment");
}

TEST_CASE("cli: config files feed defaults that explicit flags override") {
  const std::string dir = make_temp_dir();
  {
    std::ofstream cfg(dir + "/cfg.json");
    cfg << R"({"limit": 50, "seed": 4})" << "\n";
  }
  const std::string out1 = make_temp_dir();
  REQUIRE(run_cli({"scan-gen", "--config", dir + "/cfg.json", "--out", out1}).status == 0);
  CHECK(count_lines(out1 + "/corpus.jsonl") == 50);
  CHECK(json::parse(slurp(out1 + "/meta_scan-gen.json")).at("seed") == 4);

  const std::string out2 = make_temp_dir();
  REQUIRE(run_cli({"scan-gen", "--config", dir + "/cfg.json", "--limit", "10", "--out", out2})
              .status == 0);
  CHECK(count_lines(out2 + "/corpus.jsonl") == 10);

  {
    std::ofstream cfg(dir + "/bad.json");
    cfg << R"({"no_such_key": 1})" << "\n";
  }
  const auto bad = run_cli({"scan-gen", "--config", dir + "/bad.json"});
  CHECK(bad.status == 1);
  CHECK(stderr_json(bad).at("error") == "config_error");
}

TEST_CASE("cli: TPOL_OUT overrides the --out flag") {
  const std::string env_out = make_temp_dir();
  const std::string flag_out = make_temp_dir() + "/never_created";
  const auto r = run_cli({"scan-gen", "--limit", "20", "--out", flag_out},
                         "TPOL_OUT=" + testutil::shell_quote(env_out));
  REQUIRE(r.status == 0);
  CHECK(fs::exists(env_out + "/corpus.jsonl"));
  CHECK_FALSE(fs::exists(flag_out));
}
