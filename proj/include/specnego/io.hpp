#pragma once

// File formats: scenario JSON, TOPSIS CSV, run-report exports, metrics
// tables and SVG charts.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "specnego/domain.hpp"
#include "specnego/experiments.hpp"
#include "specnego/kernel.hpp"
#include "specnego/topsis.hpp"

namespace specnego::io {

/// Malformed document or schema violation; `what()` carries the JSON path.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Document parsed but the scenario fails validate().
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Parses without running validate(); unknown keys are rejected.
Scenario parse_scenario_unchecked(std::string_view json_text);

/// Parses and validates. Throws ParseError or ValidationError.
Scenario parse_scenario(std::string_view json_text);

std::string serialize_scenario(const Scenario& scenario);

/// Shortest decimal text that round-trips the double.
std::string format_number(double v);

/// TOPSIS matrix CSV: header row (corner cell, criterion labels), a weight
/// row, a sense row (`benefit`/`cost`), then one row per alternative.
mcdm::DecisionMatrix parse_decision_csv(std::string_view csv_text);

/// `alternative,closeness,rank` rows in input order; rank 1 is best.
std::string format_topsis_csv(const mcdm::DecisionMatrix& matrix,
                              const mcdm::TopsisResult& result);

std::string metrics_csv(const sim::RunReport& report);
std::string events_jsonl(const sim::RunReport& report);
std::string allocations_csv(const sim::RunReport& report);

/// Writes metrics.csv, events.jsonl and allocations.csv into `dir`
/// (created if missing). Returns the written paths.
std::vector<std::filesystem::path> export_report(const sim::RunReport& report,
                                                 const std::filesystem::path& dir);

std::string metrics_table_csv(const experiments::MetricsTable& table);

enum class PlotKind { Line, Bar };

struct PlotSpec {
  PlotKind kind = PlotKind::Line;
  /// Either "run_response" or "total_messages".
  std::string y_column = "run_response";
};

/// Default chart for each built-in study.
PlotSpec default_plot(experiments::ExperimentId id);

/// Self-contained SVG. Line charts draw one series per distinct row label
/// over the swept value; bar charts group rows by swept value with one bar
/// per label. Throws StructuralError for an empty table.
std::string render_svg(const experiments::MetricsTable& table, const PlotSpec& spec);
void emit_plot(const experiments::MetricsTable& table, const PlotSpec& spec,
               const std::filesystem::path& path);

/// Writes `text` to `path`, throwing std::runtime_error naming the path.
void write_file(const std::filesystem::path& path, std::string_view text);
std::string read_file(const std::filesystem::path& path);

}  // namespace specnego::io
