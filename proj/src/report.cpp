#include "qstock/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace qstock {

namespace {

std::string fixed(double v, int decimals)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

/// Truncated, not rounded, to two decimals: 59/95 prints as 62.10%.
std::string percent(double ratio)
{
  double const hundredths = std::floor(ratio * 10000.0 + 1e-7);
  return fixed(hundredths / 100.0, 2) + "%";
}

std::string emit_csv(EvalReport const &report)
{
  std::string out = std::string(kReportCsvHeader) + "\n";
  for (auto const &row : report.rows) {
    out += row.dataset + "," + std::string(to_string(row.model)) + "," +
           std::string(row.scheme ? to_string(*row.scheme) : "none") + "," + std::string(to_string(row.reduction)) + ",";
    if (row.metrics) out += fixed(row.metrics->accuracy, 4) + "," + fixed(row.metrics->f_score, 4);
    else out += ",";
    out += "\n";
  }
  return out;
}

std::string emit_markdown(EvalReport const &report)
{
  std::string out;
  std::vector<std::string> datasets;
  for (auto const &row : report.rows)
    if (std::find(datasets.begin(), datasets.end(), row.dataset) == datasets.end()) datasets.push_back(row.dataset);

  bool qsvm8 = false;
  for (auto const &dataset : datasets) {
    out += "## " + dataset + "\n\n" + kReportTableHeader + "\n|---|---|---|---|---|\n";
    for (auto const &row : report.rows) {
      if (row.dataset != dataset) continue;
      if (row.model == ModelKind::Qsvm && reduction_width(row.reduction) == 8) qsvm8 = true;
      out += "| " + std::string(display_name(row.model)) + " | " + std::string(display_name(row.scheme)) + " | " +
             std::string(display_name(row.reduction)) + " | ";
      if (row.metrics) {
        out += percent(row.metrics->accuracy) + " | " + percent(row.metrics->f_score) + " |\n";
      } else {
        out += "failed | " + (row.failure.empty() ? std::string("failed") : row.failure) + " |\n";
      }
    }
    out += "\n";
  }

  auto const averages = summarize_average(report);
  if (!averages.empty()) {
    out += "## Average Accuracy\n\n";
    out += "Means over datasets; the classical family also averages over its models and the QSVM family over "
           "entanglement schemes. Failed cells are excluded.\n\n";
    out += std::string(kAverageTableHeader) + "\n|---|---|---|---|\n";
    for (auto const &a : averages) {
      out += "| " + a.family + " | " + std::string(display_name(a.reduction)) + " | " + percent(a.accuracy) + " | " +
             percent(a.f_score) + " |\n";
    }
    out += "\n";
  }
  if (qsvm8) {
    out += "Note: Quantum SVM rows on 8-feature reductions use exact statevector simulation of 8 qubits.\n";
  }
  return out;
}

std::vector<std::string> fields_of(std::string const &line)
{
  std::vector<std::string> f;
  std::size_t start = 0;
  for (;;) {
    auto const pos = line.find(',', start);
    f.push_back(line.substr(start, pos == std::string::npos ? pos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return f;
}

} // namespace

std::string emit_report(EvalReport const &report, ReportFormat format)
{
  return format == ReportFormat::Csv ? emit_csv(report) : emit_markdown(report);
}

EvalReport parse_report_csv(std::string const &text)
{
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("report csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kReportCsvHeader) throw std::invalid_argument("report csv: unexpected header '" + line + "'");
  EvalReport report;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto const f = fields_of(line);
    if (f.size() != 6) throw std::invalid_argument("report csv: expected 6 fields at line " + std::to_string(lineno));
    ReportRow row;
    row.dataset = f[0];
    row.model = parse_model(f[1]);
    if (f[2] != "none") row.scheme = parse_entanglement(f[2]);
    row.reduction = parse_reduction(f[3]);
    if (f[4].empty() && f[5].empty()) {
      row.failure = "failed";
    } else {
      Metrics m;
      try {
        m.accuracy = std::stod(f[4]);
        m.f_score = std::stod(f[5]);
      } catch (std::exception const &) {
        throw std::invalid_argument("report csv: malformed ratio at line " + std::to_string(lineno));
      }
      row.metrics = m;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

} // namespace qstock
