#pragma once

#include <string>
#include <vector>

#include "lapiths/mcg.hpp"
#include "lapiths/roi.hpp"
#include "lapiths/stats.hpp"

namespace lapiths::report {

enum class Format { kMarkdown, kCsv, kJson };

Format format_from_string(const std::string& name);
std::string extension_for(Format format);

struct Table {
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string render_markdown(const std::vector<Table>& tables);
std::string render_csv(const std::vector<Table>& tables);

// Display rounding for score tables: two decimals after a three-decimal
// pre-round. Generality resolves exact .xx5 ties toward zero; every other
// score resolves them away from zero.
enum class TieMode { kHalfAway, kHalfTowardZero };
std::string format_score(double value, TieMode mode = TieMode::kHalfAway);

// ---------------------------------------------------------------------------
// MCG report (four-table layout)
// ---------------------------------------------------------------------------

struct McgReport {
  mcg::McgBundle bundle;
  mcg::McgScores scores;
};

McgReport make_mcg_report(const mcg::McgBundle& bundle);
std::vector<Table> mcg_tables(const McgReport& report);
std::string mcg_report_json(const McgReport& report);
McgReport mcg_report_from_json(const std::string& text);

// ---------------------------------------------------------------------------
// Welch comparison report
// ---------------------------------------------------------------------------

struct WelchReport {
  std::vector<std::string> baseline_names;
  std::vector<stats::ComparisonRow> rows;  // model-major order
};

std::vector<Table> welch_tables(const WelchReport& report);
std::string welch_report_json(const WelchReport& report);
WelchReport welch_report_from_json(const std::string& text);

// ---------------------------------------------------------------------------
// ROI similarity report
// ---------------------------------------------------------------------------

struct RoiReportRow {
  std::string model;
  roi::SimilaritySummary summary;
};

struct RoiReport {
  std::string reference;
  std::vector<RoiReportRow> rows;
};

std::vector<Table> roi_tables(const RoiReport& report);
std::string roi_report_json(const RoiReport& report);
RoiReport roi_report_from_json(const std::string& text);

// Re-render any report JSON ("report" field selects the type) as tables.
std::string render_report_json(const std::string& json_text, Format format);

}  // namespace lapiths::report
