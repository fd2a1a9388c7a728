#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tpol/align.hpp"
#include "tpol/errors.hpp"
#include "tpol/pipeline.hpp"
#include "tpol/types.hpp"

namespace tpol {

inline double exact_match(const std::vector<TokenSeq>& predictions,
                          const std::vector<TokenSeq>& golds) {
  if (predictions.size() != golds.size())
    throw LengthMismatch("prediction and gold lists differ in length");
  if (predictions.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i] == golds[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

struct EvalReport {
  // Per-class tallies: mn = examples whose gold alignment is monotone.
  std::size_t mn_count = 0, nmn_count = 0;
  std::size_t mn_correct = 0, nmn_correct = 0;
  double overall_exact_match = 0.0;
  double mn_accuracy = 0.0;   // meaningful only when mn_count > 0
  double nmn_accuracy = 0.0;  // meaningful only when nmn_count > 0
  // Stage isolation: translator vs gold z, reorderer fed gold z vs gold y.
  double translator_accuracy = 0.0;
  double reorderer_accuracy = 0.0;

  struct PerExample {
    std::string id;
    TokenSeq y_hat;
    bool correct = false;
    bool monotonic = false;
  };
  std::vector<PerExample> per_example;

  std::size_t total() const { return mn_count + nmn_count; }
};

// Scores a gold-aligned test corpus. `predictions` overrides the pipeline's
// own parses when given (id-order aligned with the corpus).
inline EvalReport evaluate(const Corpus& test, const Translator& translator,
                           const Reorderer& reorderer,
                           const std::vector<Prediction>* predictions = nullptr) {
  if (test.empty()) throw EmptyCorpus("evaluation corpus is empty");
  if (predictions && predictions->size() != test.size())
    throw LengthMismatch("prediction list does not cover the evaluation corpus");
  EvalReport rep;
  std::size_t translator_correct = 0, reorderer_correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const AlignedExample& ex = test[i];
    if (ex.bisymbols.empty())
      throw MissingAlignment("record '" + ex.id + "' has no alignment for evaluation");
    if (predictions && (*predictions)[i].id != ex.id)
      throw MismatchedSentence("prediction id '" + (*predictions)[i].id +
                               "' does not match corpus id '" + ex.id + "'");
    const TokenSeq y_hat =
        predictions ? (*predictions)[i].mr_pred : parse(ex.nl, translator, reorderer);
    const bool correct = y_hat == ex.mr;
    const bool monotonic = crossing_count(ex.bisymbols) == 0;
    if (monotonic) {
      ++rep.mn_count;
      if (correct) ++rep.mn_correct;
    } else {
      ++rep.nmn_count;
      if (correct) ++rep.nmn_correct;
    }
    const MonotoneDerivation d = monotonicize(ex);
    if (translator.translate(ex.nl) == d.z) ++translator_correct;
    if (reorderer.reorder(d.z) == ex.mr) ++reorderer_correct;
    rep.per_example.push_back({ex.id, y_hat, correct, monotonic});
  }
  rep.overall_exact_match = static_cast<double>(rep.mn_correct + rep.nmn_correct) /
                            static_cast<double>(rep.mn_count + rep.nmn_count);
  if (rep.mn_count > 0)
    rep.mn_accuracy = static_cast<double>(rep.mn_correct) / static_cast<double>(rep.mn_count);
  if (rep.nmn_count > 0)
    rep.nmn_accuracy = static_cast<double>(rep.nmn_correct) / static_cast<double>(rep.nmn_count);
  rep.translator_accuracy =
      static_cast<double>(translator_correct) / static_cast<double>(test.size());
  rep.reorderer_accuracy =
      static_cast<double>(reorderer_correct) / static_cast<double>(test.size());
  return rep;
}

// ---------------------------------------------------------------------------
// Report emission. One entry per evaluated configuration; CSV schema is
// config,partition,language,metric,value,count. Output is byte-deterministic:
// fixed decimal formatting, no timestamps, entry order preserved.

struct ReportEntry {
  std::string config;     // e.g. "gold", "ibm1", "ibm2"
  std::string partition;  // split strategy label
  std::string language;
  EvalReport report;
  std::optional<double> alignment_error;  // mean vs gold, when known
  std::optional<double> accuracy_drop;    // gold-config metric minus this one
};

namespace detail {

inline std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

inline void csv_row(std::string& out, const ReportEntry& e, const std::string& metric,
                    double value, std::size_t count, bool available = true) {
  out += e.config + ',' + e.partition + ',' + e.language + ',' + metric + ',';
  out += available ? fmt6(value) : std::string("n/a");
  out += ',' + std::to_string(count) + '\n';
}

}  // namespace detail

inline std::string render_report_csv(const std::vector<ReportEntry>& entries) {
  std::string out = "config,partition,language,metric,value,count\n";
  for (const ReportEntry& e : entries) {
    const EvalReport& r = e.report;
    detail::csv_row(out, e, "overall_exact_match", r.overall_exact_match, r.total());
    detail::csv_row(out, e, "mn_accuracy", r.mn_accuracy, r.mn_count, r.mn_count > 0);
    detail::csv_row(out, e, "nmn_accuracy", r.nmn_accuracy, r.nmn_count, r.nmn_count > 0);
    detail::csv_row(out, e, "translator_accuracy", r.translator_accuracy, r.total());
    detail::csv_row(out, e, "reorderer_accuracy", r.reorderer_accuracy, r.total());
    if (e.alignment_error)
      detail::csv_row(out, e, "alignment_error", *e.alignment_error, r.total());
    if (e.accuracy_drop) detail::csv_row(out, e, "accuracy_drop", *e.accuracy_drop, r.total());
  }
  return out;
}

// Scatter of alignment error (x, domain [0,1]) against exact-match drop
// relative to the gold-alignment run (y, domain [-1,1]); one point per entry
// carrying both values.
inline std::string render_report_svg(const std::vector<ReportEntry>& entries) {
  const double x0 = 60, x1 = 620, y0 = 440, y1 = 20;  // plot area (y grows up)
  auto px = [&](double v) { return x0 + v * (x1 - x0); };
  auto py = [&](double v) { return y0 + (v + 1.0) / 2.0 * (y1 - y0); };
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 480\" "
       "font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<rect x=\"60\" y=\"20\" width=\"560\" height=\"420\" fill=\"none\" "
       "stroke=\"#333333\"/>\n";
  s += "<line x1=\"" + detail::fmt6(x0) + "\" y1=\"" + detail::fmt6(py(0)) + "\" x2=\"" +
       detail::fmt6(x1) + "\" y2=\"" + detail::fmt6(py(0)) +
       "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";
  s += "<text x=\"300\" y=\"470\">alignment error</text>\n";
  s += "<text x=\"8\" y=\"240\" transform=\"rotate(-90 14 240)\">accuracy drop</text>\n";
  s += "<text x=\"56\" y=\"455\">0</text>\n<text x=\"612\" y=\"455\">1</text>\n";
  s += "<text x=\"36\" y=\"444\">-1</text>\n<text x=\"44\" y=\"26\">1</text>\n";
  s += "<text x=\"44\" y=\"" + detail::fmt6(py(0) + 4) + "\">0</text>\n";
  for (const ReportEntry& e : entries) {
    if (!e.alignment_error || !e.accuracy_drop) continue;
    const double cx = px(std::min(std::max(*e.alignment_error, 0.0), 1.0));
    const double cy = py(std::min(std::max(*e.accuracy_drop, -1.0), 1.0));
    s += "<circle cx=\"" + detail::fmt6(cx) + "\" cy=\"" + detail::fmt6(cy) +
         "\" r=\"4\" fill=\"#1f77b4\"/>\n";
    s += "<text x=\"" + detail::fmt6(cx + 6) + "\" y=\"" + detail::fmt6(cy - 6) + "\">" +
         e.config + "/" + e.partition + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write: " + path);
  out << content;
  if (!out) throw IoError("failed writing: " + path);
}

// JSON round trip for one entry, used to hand results from `eval` to
// `report`.
inline nlohmann::json report_entry_to_json(const ReportEntry& e) {
  nlohmann::json j;
  j["config"] = e.config;
  j["partition"] = e.partition;
  j["language"] = e.language;
  j["metrics"] = {{"overall_exact_match", e.report.overall_exact_match},
                  {"translator_accuracy", e.report.translator_accuracy},
                  {"reorderer_accuracy", e.report.reorderer_accuracy}};
  if (e.report.mn_count > 0) j["metrics"]["mn_accuracy"] = e.report.mn_accuracy;
  if (e.report.nmn_count > 0) j["metrics"]["nmn_accuracy"] = e.report.nmn_accuracy;
  j["counts"] = {{"mn", e.report.mn_count},
                 {"nmn", e.report.nmn_count},
                 {"mn_correct", e.report.mn_correct},
                 {"nmn_correct", e.report.nmn_correct}};
  if (e.alignment_error) j["alignment_error"] = *e.alignment_error;
  return j;
}

inline ReportEntry report_entry_from_json(const nlohmann::json& j) {
  ReportEntry e;
  e.config = j.at("config").get<std::string>();
  e.partition = j.at("partition").get<std::string>();
  e.language = j.at("language").get<std::string>();
  e.report.mn_count = j.at("counts").at("mn").get<std::size_t>();
  e.report.nmn_count = j.at("counts").at("nmn").get<std::size_t>();
  e.report.mn_correct = j.at("counts").at("mn_correct").get<std::size_t>();
  e.report.nmn_correct = j.at("counts").at("nmn_correct").get<std::size_t>();
  const auto& m = j.at("metrics");
  e.report.overall_exact_match = m.at("overall_exact_match").get<double>();
  e.report.translator_accuracy = m.at("translator_accuracy").get<double>();
  e.report.reorderer_accuracy = m.at("reorderer_accuracy").get<double>();
  if (m.contains("mn_accuracy")) e.report.mn_accuracy = m.at("mn_accuracy").get<double>();
  if (m.contains("nmn_accuracy")) e.report.nmn_accuracy = m.at("nmn_accuracy").get<double>();
  if (j.contains("alignment_error")) e.alignment_error = j.at("alignment_error").get<double>();
  return e;
}

// Fills accuracy_drop on every entry that shares (partition, language) with a
// baseline-config entry: drop = baseline exact match - entry exact match.
inline void compute_accuracy_drops(std::vector<ReportEntry>& entries,
                                   const std::string& baseline_config = "gold") {
  std::map<std::string, double> baseline;
  for (const ReportEntry& e : entries)
    if (e.config == baseline_config)
      baseline[e.partition + '\x1f' + e.language] = e.report.overall_exact_match;
  for (ReportEntry& e : entries) {
    const auto it = baseline.find(e.partition + '\x1f' + e.language);
    if (it != baseline.end())
      e.accuracy_drop = it->second - e.report.overall_exact_match;
  }
}

}  // namespace tpol
