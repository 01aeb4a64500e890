#include "qstock/dataset.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qstock {

std::string format_real(double v)
{
  char buf[64];
  auto const r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void Dataset::validate() const
{
  if (static_cast<Index>(feature_names.size()) != X.cols()) {
    throw std::invalid_argument("dataset: feature name count does not match column count");
  }
  if (y.size() != X.rows()) throw std::invalid_argument("dataset: label count does not match row count");
  if (!dates.empty() && static_cast<Index>(dates.size()) != X.rows()) {
    throw std::invalid_argument("dataset: date count does not match row count");
  }
}

Dataset Dataset::select_rows(Index first, Index count) const
{
  Dataset out;
  out.feature_names = feature_names;
  out.X = X.middleRows(first, count);
  out.y = y.segment(first, count);
  if (!dates.empty()) out.dates.assign(dates.begin() + first, dates.begin() + first + count);
  return out;
}

Dataset Dataset::select_columns(std::vector<Index> const &columns) const
{
  Dataset out;
  out.X.resize(X.rows(), static_cast<Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] < 0 || columns[c] >= X.cols()) throw std::out_of_range("dataset: column index out of range");
    out.X.col(static_cast<Index>(c)) = X.col(columns[c]);
    out.feature_names.push_back(feature_names[static_cast<std::size_t>(columns[c])]);
  }
  out.y = y;
  out.dates = dates;
  return out;
}

Dataset Dataset::with_features(MatrixXd newX, std::vector<std::string> names) const
{
  Dataset out;
  out.X = std::move(newX);
  out.feature_names = std::move(names);
  out.y = y;
  out.dates = dates;
  out.validate();
  return out;
}

std::pair<Dataset, Dataset> chronological_split(Dataset const &data, double test_fraction)
{
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test fraction must lie strictly between 0 and 1");
  }
  Index const n = data.rows();
  // Guard against products like 0.2 * 475 landing a hair above an integer.
  auto n_test = static_cast<Index>(std::ceil(test_fraction * static_cast<double>(n) - 1e-9));
  if (n_test <= 0) throw std::invalid_argument("empty test partition");
  if (n_test >= n) throw std::invalid_argument("empty train partition");
  return {data.select_rows(0, n - n_test), data.select_rows(n - n_test, n_test)};
}

std::string write_dataset_csv(Dataset const &data)
{
  data.validate();
  std::string out;
  for (auto const &name : data.feature_names) {
    out += name;
    out += ',';
  }
  out += "label\n";
  for (Index r = 0; r < data.rows(); ++r) {
    for (Index c = 0; c < data.cols(); ++c) {
      out += format_real(data.X(r, c));
      out += ',';
    }
    out += std::to_string(data.y[r]);
    out += '\n';
  }
  return out;
}

Dataset parse_dataset_csv(std::string const &text)
{
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("dataset csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) header.push_back(field);
  }
  if (header.empty() || header.back() != "label") throw std::invalid_argument("dataset csv: last column must be label");
  header.pop_back();

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> values;
    std::size_t start = 0;
    for (;;) {
      auto const pos = line.find(',', start);
      auto const field = line.substr(start, pos == std::string::npos ? pos : pos - start);
      double v = 0;
      auto const r = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || r.ec != std::errc{} || r.ptr != field.data() + field.size()) {
        throw std::invalid_argument("dataset csv: malformed number at row " + std::to_string(lineno));
      }
      values.push_back(v);
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (values.size() != header.size() + 1) {
      throw std::invalid_argument("dataset csv: wrong field count at row " + std::to_string(lineno));
    }
    double const label = values.back();
    if (label != 0.0 && label != 1.0) throw std::invalid_argument("dataset csv: non-binary label at row " + std::to_string(lineno));
    labels.push_back(static_cast<int>(label));
    values.pop_back();
    rows.push_back(std::move(values));
  }

  Dataset out;
  out.feature_names = header;
  out.X.resize(static_cast<Index>(rows.size()), static_cast<Index>(header.size()));
  out.y.resize(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < header.size(); ++c) out.X(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    out.y[static_cast<Index>(r)] = labels[r];
  }
  return out;
}

} // namespace qstock
