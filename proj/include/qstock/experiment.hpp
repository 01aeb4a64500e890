#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qstock/market_data.hpp"
#include "qstock/metrics.hpp"
#include "qstock/quantum_kernel.hpp"
#include "qstock/qubo.hpp"

namespace qstock {

enum class Reduction
{
  None,
  Pca3,
  Pca5,
  Pca8,
  Qa3,
  Qa5,
  Qa8,
};

/// Classical models first, in the order they appear in report tables.
enum class ModelKind
{
  Svm,
  DecisionTree,
  RandomForest,
  Knn,
  LogisticRegression,
  NaiveBayes,
  GradientBoosting,
  XgBoost,
  Qsvm,
};

std::string_view to_string(Reduction r);
std::string_view to_string(ModelKind m);
Reduction parse_reduction(std::string_view text);
ModelKind parse_model(std::string_view text);

/// Display names used in report tables ("PCA-3", "Quantum Annealing-5", ...).
std::string_view display_name(Reduction r);
std::string_view display_name(ModelKind m);
std::string_view display_name(std::optional<Entanglement> scheme);

/// Output width of a reduction; `None` keeps the 13 canonical features.
Index reduction_width(Reduction r);
bool is_classical(ModelKind m);

struct DataSource
{
  enum class Kind
  {
    Csv,
    Fetch,
    Gbm,
    Momentum,
  };

  std::string name;
  Kind kind = Kind::Csv;
  std::string path;
  std::string symbol;
  Date start{};
  Date end{};
  GbmParams gbm;
  MomentumParams momentum;
};

struct ExperimentConfig
{
  std::vector<DataSource> datasets;
  std::vector<Reduction> reductions{Reduction::None, Reduction::Pca3, Reduction::Pca5, Reduction::Pca8,
                                    Reduction::Qa3,  Reduction::Qa5,  Reduction::Qa8};
  std::vector<ModelKind> models{ModelKind::Svm,        ModelKind::DecisionTree,       ModelKind::RandomForest,
                                ModelKind::Knn,        ModelKind::LogisticRegression, ModelKind::NaiveBayes,
                                ModelKind::GradientBoosting, ModelKind::XgBoost,      ModelKind::Qsvm};
  /// Reductions the quantum SVM runs on. The default includes the 8-feature sets.
  std::vector<Reduction> qsvm_reductions{Reduction::Pca3, Reduction::Pca5, Reduction::Pca8,
                                         Reduction::Qa3,  Reduction::Qa5,  Reduction::Qa8};
  std::vector<Entanglement> schemes{Entanglement::Linear, Entanglement::Circular, Entanglement::Full,
                                    Entanglement::Pairwise};
  int reps = 2;
  double test_fraction = 0.2;
  std::uint64_t seed = 42;
  double qubo_alpha = 0.5;
  QuboSolver solver = QuboSolver::Annealer;
  AnnealParams anneal;
  double svm_c = 1.0;
  int threads = 1;
  std::string endpoint;
  /// When set, every QSVM cell writes its train and test kernel matrices here.
  std::string kernel_dump_dir;

  void validate() const;
};

/// Flat `key = value` text with `#` comments and comma-separated lists.
/// Relative CSV paths resolve against `base_dir`.
ExperimentConfig parse_config(std::string const &text, std::string const &base_dir = ".");
ExperimentConfig load_config(std::string const &path);

/// Date ranges the scalers/reducers were fitted on and the cell was scored on.
struct Provenance
{
  Index fit_rows = 0;
  Index eval_rows = 0;
  std::optional<Date> fit_first;
  std::optional<Date> fit_last;
  std::optional<Date> eval_first;
  std::optional<Date> eval_last;
};

struct ReportRow
{
  std::string dataset;
  ModelKind model = ModelKind::Svm;
  std::optional<Entanglement> scheme;
  Reduction reduction = Reduction::None;
  /// Empty when the cell failed; `failure` then holds the reason.
  std::optional<Metrics> metrics;
  std::string failure;
  Provenance provenance;
  std::vector<std::string> features;
};

struct EvalReport
{
  std::vector<ReportRow> rows;
};

OhlcSeries load_source(DataSource const &source, std::string const &endpoint);

EvalReport run_experiment(ExperimentConfig const &config);

/// True when every scored cell was fitted strictly before its evaluation window.
bool audit_no_leakage(EvalReport const &report);

struct AverageRow
{
  std::string family;
  Reduction reduction = Reduction::None;
  double accuracy = 0;
  double f_score = 0;
  Index cells = 0;
};

/// Table-I style means: "Classical Machine Learning" averages over datasets and
/// classical models, "QSVM" over datasets and entanglement schemes. Failed
/// cells are skipped.
std::vector<AverageRow> summarize_average(EvalReport const &report);

} // namespace qstock
