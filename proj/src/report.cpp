#include "lapiths/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "lapiths/errors.hpp"
#include <json.hpp>

namespace lapiths::report {

using ordered_json = nlohmann::ordered_json;

Format format_from_string(const std::string& name) {
  if (name == "md" || name == "markdown") return Format::kMarkdown;
  if (name == "csv") return Format::kCsv;
  if (name == "json") return Format::kJson;
  throw ValidationError("unknown report format '" + name + "' (expected csv, json or md)");
}

std::string extension_for(Format format) {
  switch (format) {
    case Format::kMarkdown: return ".md";
    case Format::kCsv: return ".csv";
    case Format::kJson: return ".json";
  }
  return ".txt";
}

namespace {

std::string fmt(const char* spec, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, value);
  return buf;
}

std::string fmt_p(double p) {
  if (p != 0.0 && p < 1e-4) return fmt("%.3g", p);
  return fmt("%.4f", p);
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string escaped = "\"";
  for (char c : cell) {
    if (c == '"') escaped += '"';
    escaped += c;
  }
  escaped += '"';
  return escaped;
}

}  // namespace

namespace {

std::string md_escape(const std::string& cell) {
  std::string escaped;
  for (char c : cell) {
    if (c == '|') escaped += '\\';
    escaped += c;
  }
  return escaped;
}

}  // namespace

std::string render_markdown(const std::vector<Table>& tables) {
  std::ostringstream out;
  bool first = true;
  for (const auto& table : tables) {
    if (!first) out << "\n";
    first = false;
    if (!table.title.empty()) out << "## " << table.title << "\n\n";
    out << "|";
    for (const auto& h : table.header) out << " " << md_escape(h) << " |";
    out << "\n|";
    for (std::size_t i = 0; i < table.header.size(); ++i) out << " --- |";
    out << "\n";
    for (const auto& row : table.rows) {
      out << "|";
      for (const auto& cell : row) out << " " << md_escape(cell) << " |";
      out << "\n";
    }
  }
  return out.str();
}

std::string render_csv(const std::vector<Table>& tables) {
  std::ostringstream out;
  bool first = true;
  for (const auto& table : tables) {
    if (!first) out << "\n";
    first = false;
    if (!table.title.empty()) out << "# " << table.title << "\n";
    for (std::size_t i = 0; i < table.header.size(); ++i) {
      if (i) out << ",";
      out << csv_escape(table.header[i]);
    }
    out << "\n";
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ",";
        out << csv_escape(row[i]);
      }
      out << "\n";
    }
  }
  return out.str();
}

std::string format_score(double value, TieMode mode) {
  if (!std::isfinite(value)) return "/";
  const bool negative = value < 0.0;
  const double magnitude = std::abs(value);
  const long long milli = static_cast<long long>(std::floor(magnitude * 1000.0 + 0.5));
  long long centi;
  if (milli % 10 == 5 && mode == TieMode::kHalfTowardZero) {
    centi = milli / 10;
  } else {
    centi = (milli + 5) / 10;
  }
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%lld.%02lld", negative && centi != 0 ? "-" : "",
                centi / 100, centi % 100);
  return buf;
}

// ---------------------------------------------------------------------------
// MCG report
// ---------------------------------------------------------------------------

McgReport make_mcg_report(const mcg::McgBundle& bundle) {
  return {bundle, mcg::score_bundle(bundle)};
}

std::vector<Table> mcg_tables(const McgReport& report) {
  const auto& bundle = report.bundle;
  const auto& scores = report.scores;
  std::vector<Table> tables;

  // Functional/Structural Ratio.
  {
    Table t;
    t.title = "Functional/Structural Ratio";
    t.header = {"Constraint"};
    for (std::size_t i = 0; i < bundle.constraints.entries.size(); ++i) {
      t.header.push_back("C_" + std::to_string(i + 1));
    }
    t.header.insert(t.header.end(), {"S_M", "F_M", "F/S + eps", "FSR_M"});

    std::vector<std::string> weight_row{"Weight"};
    std::vector<std::string> structural_row{"Structural"};
    std::vector<std::string> functional_row{"Functional"};
    for (const auto& c : bundle.constraints.entries) {
      weight_row.push_back(format_score(c.weight));
      structural_row.push_back(format_score(c.structural ? 1.0 : 0.0));
      functional_row.push_back(format_score(c.structural ? 0.0 : 1.0));
    }
    weight_row.push_back(format_score(scores.fsr.structural_score));
    weight_row.push_back(format_score(scores.fsr.functional_score));
    weight_row.push_back(format_score(scores.fsr.raw_ratio));
    weight_row.push_back(format_score(scores.fsr.normalized));
    for (int i = 0; i < 4; ++i) {
      structural_row.push_back("/");
      functional_row.push_back("/");
    }
    t.rows = {weight_row, structural_row, functional_row};
    tables.push_back(std::move(t));
  }

  // Generality.
  {
    Table t;
    t.title = "Generality";
    t.header = {"Model",       "Quant. Know.", "Fluid Reas.", "Vis. Proc.",
                "Lan. & Verb.", "Sens./Mot.",   "G_M"};
    t.rows = {{bundle.model, format_score(bundle.domains.quantitative),
               format_score(bundle.domains.fluid), format_score(bundle.domains.visual),
               format_score(bundle.domains.language), format_score(bundle.domains.sensorimotor),
               format_score(scores.generality, TieMode::kHalfTowardZero)}};
    tables.push_back(std::move(t));
  }

  // Performance Match.
  {
    Table t;
    t.title = "Performance Match";
    t.header = {"Model",    "Task",        "Baseline",    "|Delta| NLL",
                "Accuracy", "Error Patt.", "Resp. Times", "PM_M"};
    const auto& pm = scores.performance;
    t.rows = {{bundle.model, bundle.task.empty() ? "/" : bundle.task,
               format_score(bundle.baseline),
               pm.accuracy ? format_score(scores.mean_abs_delta) : "/",
               pm.accuracy ? format_score(*pm.accuracy) : "/",
               pm.error_pattern ? format_score(*pm.error_pattern) : "/",
               pm.timing ? format_score(*pm.timing) : "/",
               format_score(pm.performance_match)}};
    tables.push_back(std::move(t));
  }

  // Overall plausibility.
  {
    Table t;
    t.title = "Cognitive Plausibility";
    t.header = {"Model", "FSR_M", "G_M", "PM_M", "P_M"};
    t.rows = {{bundle.model, format_score(scores.fsr.normalized),
               format_score(scores.generality, TieMode::kHalfTowardZero),
               format_score(scores.performance.performance_match),
               format_score(scores.plausibility.score)}};
    tables.push_back(std::move(t));
  }
  return tables;
}

namespace {

ordered_json timing_to_json(const mcg::TimingInput& timing) {
  if (const auto* pairs = std::get_if<mcg::TimingPairs>(&timing)) {
    ordered_json arr = ordered_json::array();
    for (const auto& [m, h] : pairs->model_human_seconds) arr.push_back({m, h});
    return ordered_json{{"pairs", arr}};
  }
  if (const auto* empirical = std::get_if<mcg::TimingEmpirical>(&timing)) {
    return ordered_json{{"empirical", empirical->value}};
  }
  return nullptr;
}

mcg::TimingInput timing_from_json(const ordered_json& value) {
  if (value.is_null()) return std::monostate{};
  if (value.contains("empirical")) return mcg::TimingEmpirical{value["empirical"].get<double>()};
  if (value.contains("pairs")) {
    mcg::TimingPairs pairs;
    for (const auto& p : value["pairs"]) {
      pairs.model_human_seconds.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    }
    return pairs;
  }
  throw ParseError("timing must be null or contain 'pairs'/'empirical'");
}

ordered_json optional_to_json(const std::optional<double>& value) {
  if (value) return *value;
  return nullptr;
}

std::optional<double> optional_from_json(const ordered_json& value) {
  if (value.is_null()) return std::nullopt;
  return value.get<double>();
}

}  // namespace

std::string mcg_report_json(const McgReport& report) {
  const auto& bundle = report.bundle;
  const auto& scores = report.scores;
  ordered_json doc;
  doc["report"] = "mcg";
  doc["model"] = bundle.model;
  doc["task"] = bundle.task;
  doc["baseline"] = bundle.baseline;
  doc["epsilon"] = bundle.epsilon;

  ordered_json constraints = ordered_json::array();
  for (const auto& c : bundle.constraints.entries) {
    constraints.push_back({{"id", c.id},
                           {"weight", c.weight},
                           {"structural", c.structural},
                           {"description", c.description}});
  }
  doc["constraints"] = std::move(constraints);
  doc["domain_scores"] = {{"quantitative", bundle.domains.quantitative},
                          {"fluid", bundle.domains.fluid},
                          {"visual", bundle.domains.visual},
                          {"language", bundle.domains.language},
                          {"sensorimotor", bundle.domains.sensorimotor}};

  ordered_json indicators = ordered_json::array();
  for (const auto e : bundle.performance.error_indicators) {
    switch (e) {
      case mcg::ErrorIndicator::kMatch: indicators.push_back(1); break;
      case mcg::ErrorIndicator::kMismatch: indicators.push_back(-1); break;
      case mcg::ErrorIndicator::kMissing: indicators.push_back(nullptr); break;
    }
  }
  doc["performance_inputs"] = {
      {"nll_deltas", bundle.performance.nll_deltas},
      {"error_indicators", std::move(indicators)},
      {"timing", timing_to_json(bundle.performance.timing)},
      {"sub_weights",
       {{"alpha", bundle.performance.sub_weights.alpha},
        {"beta", bundle.performance.sub_weights.beta},
        {"gamma", bundle.performance.sub_weights.gamma}}}};
  doc["weights"] = {{"lambda", bundle.weights.lambda},
                    {"mu", bundle.weights.mu},
                    {"nu", bundle.weights.nu}};

  doc["scores"] = {{"structural_score", scores.fsr.structural_score},
                   {"functional_score", scores.fsr.functional_score},
                   {"raw_ratio", scores.fsr.raw_ratio},
                   {"fsr_normalized", scores.fsr.normalized},
                   {"generality", scores.generality},
                   {"mean_abs_delta", scores.mean_abs_delta},
                   {"accuracy", optional_to_json(scores.performance.accuracy)},
                   {"error_pattern", optional_to_json(scores.performance.error_pattern)},
                   {"timing", optional_to_json(scores.performance.timing)},
                   {"performance_match", scores.performance.performance_match},
                   {"plausibility", scores.plausibility.score}};
  return doc.dump(2) + "\n";
}

McgReport mcg_report_from_json(const std::string& text) {
  McgReport report;
  try {
    const auto doc = ordered_json::parse(text);
    if (doc.value("report", "") != "mcg") throw ParseError("not an MCG report");
    auto& bundle = report.bundle;
    bundle.model = doc.at("model").get<std::string>();
    bundle.task = doc.value("task", std::string{});
    bundle.baseline = doc.value("baseline", 0.0);
    bundle.epsilon = doc.value("epsilon", mcg::kDefaultEpsilon);
    for (const auto& c : doc.at("constraints")) {
      bundle.constraints.entries.push_back({c.at("id").get<std::string>(),
                                            c.at("weight").get<double>(),
                                            c.at("structural").get<bool>(),
                                            c.value("description", std::string{})});
    }
    const auto& domains = doc.at("domain_scores");
    bundle.domains = {domains.at("quantitative").get<double>(), domains.at("fluid").get<double>(),
                      domains.at("visual").get<double>(), domains.at("language").get<double>(),
                      domains.at("sensorimotor").get<double>()};
    const auto& perf = doc.at("performance_inputs");
    bundle.performance.nll_deltas = perf.at("nll_deltas").get<std::vector<double>>();
    for (const auto& v : perf.at("error_indicators")) {
      if (v.is_null()) {
        bundle.performance.error_indicators.push_back(mcg::ErrorIndicator::kMissing);
      } else if (v.get<double>() == 1.0) {
        bundle.performance.error_indicators.push_back(mcg::ErrorIndicator::kMatch);
      } else {
        bundle.performance.error_indicators.push_back(mcg::ErrorIndicator::kMismatch);
      }
    }
    bundle.performance.timing = timing_from_json(perf.at("timing"));
    const auto& sw = perf.at("sub_weights");
    bundle.performance.sub_weights = {sw.at("alpha").get<double>(), sw.at("beta").get<double>(),
                                      sw.at("gamma").get<double>()};
    const auto& weights = doc.at("weights");
    bundle.weights = {weights.at("lambda").get<double>(), weights.at("mu").get<double>(),
                      weights.at("nu").get<double>()};

    const auto& scores = doc.at("scores");
    report.scores.fsr.structural_score = scores.at("structural_score").get<double>();
    report.scores.fsr.functional_score = scores.at("functional_score").get<double>();
    report.scores.fsr.raw_ratio = scores.at("raw_ratio").get<double>();
    report.scores.fsr.normalized = scores.at("fsr_normalized").get<double>();
    report.scores.fsr.epsilon = bundle.epsilon;
    report.scores.generality = scores.at("generality").get<double>();
    report.scores.mean_abs_delta = scores.at("mean_abs_delta").get<double>();
    report.scores.performance.accuracy = optional_from_json(scores.at("accuracy"));
    report.scores.performance.error_pattern = optional_from_json(scores.at("error_pattern"));
    report.scores.performance.timing = optional_from_json(scores.at("timing"));
    report.scores.performance.performance_match = scores.at("performance_match").get<double>();
    report.scores.plausibility.fsr_normalized = report.scores.fsr.normalized;
    report.scores.plausibility.generality = report.scores.generality;
    report.scores.plausibility.performance_match =
        report.scores.performance.performance_match;
    report.scores.plausibility.weights = bundle.weights;
    report.scores.plausibility.score = scores.at("plausibility").get<double>();
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("mcg report: ") + e.what());
  }
  return report;
}

// ---------------------------------------------------------------------------
// Welch report
// ---------------------------------------------------------------------------

std::vector<Table> welch_tables(const WelchReport& report) {
  Table t;
  t.title = "Welch Comparison (decision-level NLL)";
  t.header = {"Model"};
  for (const auto& name : report.baseline_names) {
    t.header.push_back(name + " Delta NLL");
    t.header.push_back(name + " p");
  }

  std::vector<std::string> row;
  for (const auto& comparison : report.rows) {
    if (row.empty() || row.front() != comparison.model) {
      if (!row.empty()) t.rows.push_back(row);
      row = {comparison.model};
    }
    row.push_back(fmt("%+.4f", comparison.mean_delta));
    row.push_back(fmt_p(comparison.p_value));
  }
  if (!row.empty()) t.rows.push_back(row);
  return {std::move(t)};
}

std::string welch_report_json(const WelchReport& report) {
  ordered_json doc;
  doc["report"] = "welch";
  doc["baselines"] = report.baseline_names;
  ordered_json rows = ordered_json::array();
  for (const auto& row : report.rows) {
    // A degenerate comparison (zero spread, unequal means) has infinite t,
    // which JSON cannot carry; null stands in for it.
    rows.push_back({{"model", row.model},
                    {"baseline", row.baseline},
                    {"delta_nll", row.mean_delta},
                    {"t", std::isfinite(row.t_statistic) ? ordered_json(row.t_statistic)
                                                         : ordered_json(nullptr)},
                    {"df", row.df},
                    {"p", row.p_value}});
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

WelchReport welch_report_from_json(const std::string& text) {
  WelchReport report;
  try {
    const auto doc = ordered_json::parse(text);
    if (doc.value("report", "") != "welch") throw ParseError("not a Welch report");
    report.baseline_names = doc.at("baselines").get<std::vector<std::string>>();
    for (const auto& row : doc.at("rows")) {
      const double delta = row.at("delta_nll").get<double>();
      const auto& t_value = row.at("t");
      const double t = t_value.is_null()
                           ? std::copysign(std::numeric_limits<double>::infinity(), delta)
                           : t_value.get<double>();
      report.rows.push_back({row.at("model").get<std::string>(),
                             row.at("baseline").get<std::string>(), delta, t,
                             row.at("df").get<double>(), row.at("p").get<double>()});
    }
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("welch report: ") + e.what());
  }
  return report;
}

// ---------------------------------------------------------------------------
// ROI report
// ---------------------------------------------------------------------------

std::vector<Table> roi_tables(const RoiReport& report) {
  Table t;
  t.title = "ROI Pattern Similarity vs " +
            (report.reference.empty() ? std::string("reference") : report.reference);
  t.header = {"Model",    "Mean Pearson", "Mean Cosine", "Mean MSE", "Mean RMSE",
              "Mean MAE", "Mean Euclid.", "Decisions",   "Excluded (r/cos)"};
  for (const auto& row : report.rows) {
    const auto& s = row.summary;
    t.rows.push_back({row.model, fmt("%.4f", s.mean_pearson), fmt("%.4f", s.mean_cosine),
                      fmt("%.4f", s.mean_mse), fmt("%.4f", s.mean_rmse), fmt("%.4f", s.mean_mae),
                      fmt("%.4f", s.mean_euclidean), std::to_string(s.n_decisions),
                      std::to_string(s.undefined_pearson) + "/" +
                          std::to_string(s.undefined_cosine)});
  }
  return {std::move(t)};
}

std::string roi_report_json(const RoiReport& report) {
  ordered_json doc;
  doc["report"] = "roi";
  doc["reference"] = report.reference;
  ordered_json rows = ordered_json::array();
  for (const auto& row : report.rows) {
    const auto& s = row.summary;
    rows.push_back({{"model", row.model},
                    {"mean_pearson", s.mean_pearson},
                    {"mean_cosine", s.mean_cosine},
                    {"mean_mse", s.mean_mse},
                    {"mean_rmse", s.mean_rmse},
                    {"mean_mae", s.mean_mae},
                    {"mean_euclidean", s.mean_euclidean},
                    {"n_decisions", s.n_decisions},
                    {"undefined_pearson", s.undefined_pearson},
                    {"undefined_cosine", s.undefined_cosine}});
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

RoiReport roi_report_from_json(const std::string& text) {
  RoiReport report;
  try {
    const auto doc = ordered_json::parse(text);
    if (doc.value("report", "") != "roi") throw ParseError("not a ROI report");
    report.reference = doc.value("reference", std::string{});
    for (const auto& row : doc.at("rows")) {
      RoiReportRow out;
      out.model = row.at("model").get<std::string>();
      out.summary.mean_pearson = row.at("mean_pearson").get<double>();
      out.summary.mean_cosine = row.at("mean_cosine").get<double>();
      out.summary.mean_mse = row.at("mean_mse").get<double>();
      out.summary.mean_rmse = row.at("mean_rmse").get<double>();
      out.summary.mean_mae = row.at("mean_mae").get<double>();
      out.summary.mean_euclidean = row.at("mean_euclidean").get<double>();
      out.summary.n_decisions = row.at("n_decisions").get<int>();
      out.summary.undefined_pearson = row.at("undefined_pearson").get<int>();
      out.summary.undefined_cosine = row.at("undefined_cosine").get<int>();
      report.rows.push_back(std::move(out));
    }
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("roi report: ") + e.what());
  }
  return report;
}

std::string render_report_json(const std::string& json_text, Format format) {
  std::string kind;
  try {
    const auto doc = ordered_json::parse(json_text);
    kind = doc.value("report", "");
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("report: ") + e.what());
  }

  std::vector<Table> tables;
  std::string normalized;
  if (kind == "mcg") {
    const auto report = mcg_report_from_json(json_text);
    tables = mcg_tables(report);
    normalized = mcg_report_json(report);
  } else if (kind == "welch") {
    const auto report = welch_report_from_json(json_text);
    tables = welch_tables(report);
    normalized = welch_report_json(report);
  } else if (kind == "roi") {
    const auto report = roi_report_from_json(json_text);
    tables = roi_tables(report);
    normalized = roi_report_json(report);
  } else {
    throw ParseError("unknown report type '" + kind + "'");
  }

  switch (format) {
    case Format::kMarkdown: return render_markdown(tables);
    case Format::kCsv: return render_csv(tables);
    case Format::kJson: return normalized;
  }
  return {};
}

}  // namespace lapiths::report
