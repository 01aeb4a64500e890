#pragma once

#include <string>

#include "qstock/experiment.hpp"

namespace qstock {

enum class ReportFormat
{
  Csv,
  Markdown,
};

inline constexpr char const *kReportCsvHeader = "dataset,model,entanglement,reduction,accuracy,f_score";
inline constexpr char const *kReportTableHeader =
  "| Model | Entanglement Scheme | Dimensionality Reduction | Accuracy | F-Score |";
inline constexpr char const *kAverageTableHeader = "| Model | Dimensionality Reduction | AVG Accuracy | AVG F-Score |";

/// csv: one line per cell, ratios with 4 decimals, failed cells leave both
/// ratio fields empty. markdown: one table per dataset followed by the
/// averaged table, percentages truncated to 2 decimals.
std::string emit_report(EvalReport const &report, ReportFormat format);

/// Reads the csv form back. Confusion counts are not carried by the format;
/// only accuracy and f_score are restored.
EvalReport parse_report_csv(std::string const &text);

} // namespace qstock
