#pragma once

#include "ensreg/bench.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace ensreg {

/// "1.6758 (1)": value to four decimals, rank bracketed.
std::string format_ranked_cell(double value, double rank);
/// "*** 0.0011"; p values below 0.001 switch to "8e-05" style.
std::string format_p_value(double p);

std::string render_markdown(const ExperimentReport& report);
std::string render_metrics_csv(const ExperimentReport& report);
std::string render_significance_csv(const ExperimentReport& report);
std::string render_timings_csv(const ExperimentReport& report);

nlohmann::json report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& doc);

/// Writes report.md, metrics.csv + significance.csv, report.json (or all
/// of them) into dir, plus timings.csv. Throws IoFailure.
std::vector<std::filesystem::path> emit_report(const ExperimentReport& report, const std::string& format,
                                               const std::filesystem::path& dir);

} // namespace ensreg
