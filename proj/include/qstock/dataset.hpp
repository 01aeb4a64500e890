#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qstock/market_data.hpp"
#include "qstock/types.hpp"

namespace qstock {

/// Feature rows (one per trading day) with aligned direction labels.
struct Dataset
{
  std::vector<std::string> feature_names;
  MatrixXd X;
  LabelVector y;
  std::vector<Date> dates;

  Index rows() const { return X.rows(); }
  Index cols() const { return X.cols(); }

  /// Throws std::invalid_argument when shapes disagree.
  void validate() const;

  Dataset select_rows(Index first, Index count) const;
  Dataset select_columns(std::vector<Index> const &columns) const;
  /// Same rows, labels and dates with a new feature block.
  Dataset with_features(MatrixXd X, std::vector<std::string> names) const;
};

/// The last ceil(test_fraction * n) rows become the test partition.
std::pair<Dataset, Dataset> chronological_split(Dataset const &data, double test_fraction);

/// Header is the feature names followed by `label`.
std::string write_dataset_csv(Dataset const &data);
/// Inverse of write_dataset_csv; dates are not carried by the format and are left empty.
Dataset parse_dataset_csv(std::string const &text);

std::string format_real(double v);

} // namespace qstock
