#include "qstock/experiment.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qstock/baselines.hpp"
#include "qstock/features.hpp"
#include "qstock/pca.hpp"
#include "qstock/scaler.hpp"
#include "qstock/svm.hpp"

namespace qstock {

namespace {

constexpr std::array<Reduction, 7> kReductions{Reduction::None, Reduction::Pca3, Reduction::Pca5, Reduction::Pca8,
                                               Reduction::Qa3,  Reduction::Qa5,  Reduction::Qa8};
constexpr std::array<ModelKind, 9> kModels{ModelKind::Svm,        ModelKind::DecisionTree,       ModelKind::RandomForest,
                                           ModelKind::Knn,        ModelKind::LogisticRegression, ModelKind::NaiveBayes,
                                           ModelKind::GradientBoosting, ModelKind::XgBoost,      ModelKind::Qsvm};

std::string trim(std::string s)
{
  auto const b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split(std::string const &s, char sep)
{
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T, typename Parse> std::vector<T> parse_list(std::string const &value, Parse parse)
{
  std::vector<T> out;
  for (auto const &item : split(value, ',')) {
    T const v = parse(item);
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

double to_double(std::string const &key, std::string const &v)
{
  std::size_t pos = 0;
  double d = 0;
  try {
    d = std::stod(v, &pos);
  } catch (std::exception const &) {
    pos = 0;
  }
  if (pos != v.size()) throw std::invalid_argument("config: " + key + " expects a number, got '" + v + "'");
  return d;
}

long long to_integer(std::string const &key, std::string const &v)
{
  double const d = to_double(key, v);
  if (d != static_cast<double>(static_cast<long long>(d))) {
    throw std::invalid_argument("config: " + key + " expects an integer, got '" + v + "'");
  }
  return static_cast<long long>(d);
}

DataSource parse_source(std::string const &name, std::string const &spec, std::string const &base_dir)
{
  DataSource s;
  s.name = name;
  auto const parts = split(spec, ':');
  if (parts.empty()) throw std::invalid_argument("config: empty source for " + name);
  auto const &kind = parts[0];
  auto key = "source." + name;
  if (kind == "csv") {
    if (parts.size() != 2) throw std::invalid_argument("config: " + key + " expects csv:<path>");
    std::filesystem::path p(parts[1]);
    s.path = p.is_absolute() ? p.string() : (std::filesystem::path(base_dir) / p).lexically_normal().string();
  } else if (kind == "fetch") {
    if (parts.size() != 4) throw std::invalid_argument("config: " + key + " expects fetch:<symbol>:<start>:<end>");
    s.kind = DataSource::Kind::Fetch;
    s.symbol = parts[1];
    s.start = parse_date(parts[2]);
    s.end = parse_date(parts[3]);
  } else if (kind == "gbm") {
    if (parts.size() < 3 || parts.size() > 5) throw std::invalid_argument("config: " + key + " expects gbm:<days>:<seed>[:<drift>[:<vol>]]");
    s.kind = DataSource::Kind::Gbm;
    s.gbm.days = to_integer(key, parts[1]);
    s.gbm.seed = static_cast<std::uint64_t>(to_integer(key, parts[2]));
    if (parts.size() > 3) s.gbm.drift = to_double(key, parts[3]);
    if (parts.size() > 4) s.gbm.volatility = to_double(key, parts[4]);
  } else if (kind == "momentum") {
    if (parts.size() < 3 || parts.size() > 6) {
      throw std::invalid_argument("config: " + key + " expects momentum:<days>:<seed>[:<persistence>[:<strength>[:<vol>]]]");
    }
    s.kind = DataSource::Kind::Momentum;
    s.momentum.days = to_integer(key, parts[1]);
    s.momentum.seed = static_cast<std::uint64_t>(to_integer(key, parts[2]));
    if (parts.size() > 3) s.momentum.persistence = to_double(key, parts[3]);
    if (parts.size() > 4) s.momentum.trend_strength = to_double(key, parts[4]);
    if (parts.size() > 5) s.momentum.volatility = to_double(key, parts[5]);
  } else {
    throw std::invalid_argument("config: unknown source kind '" + kind + "' for " + name);
  }
  return s;
}

struct Reduced
{
  Dataset train;
  Dataset test;
};

struct PreparedDataset
{
  std::map<Reduction, Reduced> reduced;
  std::map<Reduction, std::string> failures;
  Provenance provenance;
};

std::uint64_t cell_seed(std::uint64_t seed, std::size_t dataset, Reduction r, ModelKind m)
{
  return mix_seed(mix_seed(mix_seed(seed, dataset), static_cast<std::uint64_t>(r)), static_cast<std::uint64_t>(m));
}

PreparedDataset prepare(ExperimentConfig const &config, std::size_t index, std::set<Reduction> const &needed)
{
  auto const &source = config.datasets[index];
  auto const series = load_source(source, config.endpoint);
  auto const data = build_feature_matrix(series);
  auto const [train_raw, test_raw] = chronological_split(data, config.test_fraction);
  auto const scaler = fit_scaler(train_raw, ScalerKind::Standardize);
  auto const train = apply_scaler(scaler, train_raw);
  auto const test = apply_scaler(scaler, test_raw);

  PreparedDataset out;
  out.provenance.fit_rows = train.rows();
  out.provenance.eval_rows = test.rows();
  if (!train.dates.empty()) {
    out.provenance.fit_first = train.dates.front();
    out.provenance.fit_last = train.dates.back();
  }
  if (!test.dates.empty()) {
    out.provenance.eval_first = test.dates.front();
    out.provenance.eval_last = test.dates.back();
  }

  for (auto r : needed) {
    try {
      Index const k = reduction_width(r);
      switch (r) {
      case Reduction::None: out.reduced[r] = {train, test}; break;
      case Reduction::Pca3:
      case Reduction::Pca5:
      case Reduction::Pca8: {
        auto const model = fit_pca<double>(train.X, k);
        std::vector<std::string> names;
        for (Index i = 0; i < k; ++i) names.push_back("pc" + std::to_string(i + 1));
        out.reduced[r] = {train.with_features(transform(model, train.X), names),
                          test.with_features(transform(model, test.X), names)};
        break;
      }
      case Reduction::Qa3:
      case Reduction::Qa5:
      case Reduction::Qa8: {
        AnnealParams params = config.anneal;
        params.seed = cell_seed(config.seed, index, r, ModelKind::Qsvm);
        auto const sel = select_features(train, k, config.solver, config.qubo_alpha, params);
        out.reduced[r] = {train.select_columns(sel.indices), test.select_columns(sel.indices)};
        break;
      }
      }
    } catch (std::exception const &e) {
      out.failures[r] = e.what();
    }
  }
  return out;
}

BaselineParams baseline_params(ModelKind m, std::uint64_t seed)
{
  BaselineParams p;
  p.seed = seed;
  if (m == ModelKind::XgBoost) {
    // Booster defaults of the XGBoost library, run through the same boosting engine.
    p.boost_depth = 6;
    p.boost_learning_rate = 0.3;
  }
  return p;
}

BaselineKind baseline_kind(ModelKind m)
{
  switch (m) {
  case ModelKind::DecisionTree: return BaselineKind::DecisionTree;
  case ModelKind::RandomForest: return BaselineKind::RandomForest;
  case ModelKind::Knn: return BaselineKind::Knn;
  case ModelKind::LogisticRegression: return BaselineKind::LogisticRegression;
  case ModelKind::NaiveBayes: return BaselineKind::GaussianNb;
  case ModelKind::GradientBoosting:
  case ModelKind::XgBoost: return BaselineKind::GradientBoosting;
  default: break;
  }
  throw std::logic_error("not a baseline model");
}

void dump_matrix(std::string const &path, MatrixXd const &K)
{
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write kernel dump " + path);
  for (Index r = 0; r < K.rows(); ++r) {
    for (Index c = 0; c < K.cols(); ++c) out << (c ? "," : "") << format_real(K(r, c));
    out << '\n';
  }
}

Metrics score_classical(ModelKind m, Reduced const &d, std::uint64_t seed, double svm_c)
{
  LabelVector predicted;
  if (m == ModelKind::Svm) {
    SvmParams p;
    p.C = svm_c;
    auto const model = train_svm(d.train.X, d.train.y, SvmKernel::rbf(default_rbf_gamma(d.train.X)), p);
    predicted = predict_svm(model, d.test.X);
  } else {
    auto const model = train_baseline(baseline_kind(m), d.train.X, d.train.y, baseline_params(m, seed));
    predicted = predict_baseline(model, d.test.X);
  }
  return compute_metrics(d.test.y, predicted);
}

Metrics score_qsvm(ExperimentConfig const &config, std::string const &dataset, Reduction r, Entanglement scheme,
                   Reduced const &d)
{
  auto const angles = fit_scaler(d.train, ScalerKind::MinMaxToAngle);
  MatrixXd const train = apply_scaler(angles, d.train.X);
  MatrixXd const test = apply_scaler(angles, d.test.X);
  KernelSpec const spec{static_cast<int>(train.cols()), config.reps, scheme};
  MatrixXd const K = gram_matrix(train, spec, config.threads);
  MatrixXd const K_test = kernel_matrix(test, train, spec, config.threads);
  if (!config.kernel_dump_dir.empty()) {
    std::filesystem::create_directories(config.kernel_dump_dir);
    auto const stem = config.kernel_dump_dir + "/" + dataset + "_" + std::string(to_string(r)) + "_" +
                      std::string(to_string(scheme));
    dump_matrix(stem + "_train.csv", K);
    dump_matrix(stem + "_test.csv", K_test);
  }
  SvmParams p;
  p.C = config.svm_c;
  auto const model = train_svm_precomputed(K, d.train.y, p);
  return compute_metrics(d.test.y, predict_svm_precomputed(model, K_test));
}

} // namespace

std::string_view to_string(Reduction r)
{
  switch (r) {
  case Reduction::None: return "none";
  case Reduction::Pca3: return "pca3";
  case Reduction::Pca5: return "pca5";
  case Reduction::Pca8: return "pca8";
  case Reduction::Qa3: return "qa3";
  case Reduction::Qa5: return "qa5";
  case Reduction::Qa8: return "qa8";
  }
  return "?";
}

std::string_view to_string(ModelKind m)
{
  switch (m) {
  case ModelKind::Svm: return "svm";
  case ModelKind::DecisionTree: return "decision_tree";
  case ModelKind::RandomForest: return "random_forest";
  case ModelKind::Knn: return "knn";
  case ModelKind::LogisticRegression: return "logistic_regression";
  case ModelKind::NaiveBayes: return "naive_bayes";
  case ModelKind::GradientBoosting: return "gradient_boosting";
  case ModelKind::XgBoost: return "xgboost";
  case ModelKind::Qsvm: return "qsvm";
  }
  return "?";
}

Reduction parse_reduction(std::string_view text)
{
  for (auto r : kReductions)
    if (to_string(r) == text) return r;
  throw std::invalid_argument("unknown reduction '" + std::string(text) + "'");
}

ModelKind parse_model(std::string_view text)
{
  for (auto m : kModels)
    if (to_string(m) == text) return m;
  throw std::invalid_argument("unknown model '" + std::string(text) + "'");
}

std::string_view display_name(Reduction r)
{
  switch (r) {
  case Reduction::None: return "None";
  case Reduction::Pca3: return "PCA-3";
  case Reduction::Pca5: return "PCA-5";
  case Reduction::Pca8: return "PCA-8";
  case Reduction::Qa3: return "Quantum Annealing-3";
  case Reduction::Qa5: return "Quantum Annealing-5";
  case Reduction::Qa8: return "Quantum Annealing-8";
  }
  return "?";
}

std::string_view display_name(ModelKind m)
{
  switch (m) {
  case ModelKind::Svm: return "SVM";
  case ModelKind::DecisionTree: return "Decision Tree";
  case ModelKind::RandomForest: return "Random Forest";
  case ModelKind::Knn: return "KNN";
  case ModelKind::LogisticRegression: return "Logistic Regression";
  case ModelKind::NaiveBayes: return "Naive Bayes";
  case ModelKind::GradientBoosting: return "Gradient Boosting";
  case ModelKind::XgBoost: return "XGBoost";
  case ModelKind::Qsvm: return "Quantum SVM";
  }
  return "?";
}

std::string_view display_name(std::optional<Entanglement> scheme)
{
  if (!scheme) return "None";
  switch (*scheme) {
  case Entanglement::Linear: return "Linear";
  case Entanglement::Circular: return "Circular";
  case Entanglement::Full: return "Full";
  case Entanglement::Pairwise: return "Pairwise";
  }
  return "?";
}

Index reduction_width(Reduction r)
{
  switch (r) {
  case Reduction::None: return static_cast<Index>(kCanonicalFeatures.size());
  case Reduction::Pca3:
  case Reduction::Qa3: return 3;
  case Reduction::Pca5:
  case Reduction::Qa5: return 5;
  case Reduction::Pca8:
  case Reduction::Qa8: return 8;
  }
  return 0;
}

bool is_classical(ModelKind m)
{
  return m != ModelKind::Qsvm;
}

void ExperimentConfig::validate() const
{
  if (datasets.empty()) throw std::invalid_argument("config: no datasets");
  std::set<std::string> names;
  for (auto const &d : datasets) {
    if (!names.insert(d.name).second) throw std::invalid_argument("config: duplicate dataset " + d.name);
  }
  if (models.empty()) throw std::invalid_argument("config: no models");
  if (!(test_fraction > 0 && test_fraction < 1)) throw std::invalid_argument("config: test_fraction must lie in (0, 1)");
  if (reps < 1) throw std::invalid_argument("config: reps must be at least 1");
  if (threads < 1) throw std::invalid_argument("config: threads must be at least 1");
  if (!(svm_c > 0)) throw std::invalid_argument("config: svm_c must be positive");
  bool const qsvm = std::find(models.begin(), models.end(), ModelKind::Qsvm) != models.end();
  if (qsvm) {
    if (schemes.empty()) throw std::invalid_argument("config: qsvm requires at least one entanglement scheme");
    for (auto r : qsvm_reductions) {
      if (reduction_width(r) > kMaxQubits) {
        throw std::invalid_argument("config: qsvm reduction " + std::string(to_string(r)) + " exceeds the qubit limit");
      }
    }
  }
}

ExperimentConfig parse_config(std::string const &text, std::string const &base_dir)
{
  ExperimentConfig c;
  std::vector<std::string> names;
  std::map<std::string, std::string> sources;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    auto const eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    auto const key = trim(line.substr(0, eq));
    auto const value = trim(line.substr(eq + 1));

    if (key == "datasets") names = split(value, ',');
    else if (key.starts_with("source.")) sources[key.substr(7)] = value;
    else if (key == "reductions") c.reductions = parse_list<Reduction>(value, parse_reduction);
    else if (key == "models") c.models = parse_list<ModelKind>(value, parse_model);
    else if (key == "qsvm_reductions") c.qsvm_reductions = parse_list<Reduction>(value, parse_reduction);
    else if (key == "schemes") c.schemes = parse_list<Entanglement>(value, parse_entanglement);
    else if (key == "reps") c.reps = static_cast<int>(to_integer(key, value));
    else if (key == "test_fraction") c.test_fraction = to_double(key, value);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_integer(key, value));
    else if (key == "qubo_alpha") c.qubo_alpha = to_double(key, value);
    else if (key == "solver") {
      if (value == "annealer") c.solver = QuboSolver::Annealer;
      else if (value == "exhaustive") c.solver = QuboSolver::Exhaustive;
      else throw std::invalid_argument("config: solver must be annealer or exhaustive");
    }
    else if (key == "sweeps") c.anneal.sweeps = static_cast<int>(to_integer(key, value));
    else if (key == "restarts") c.anneal.restarts = static_cast<int>(to_integer(key, value));
    else if (key == "t_hot") c.anneal.t_hot = to_double(key, value);
    else if (key == "t_cold") c.anneal.t_cold = to_double(key, value);
    else if (key == "svm_c") c.svm_c = to_double(key, value);
    else if (key == "threads") c.threads = static_cast<int>(to_integer(key, value));
    else if (key == "endpoint") c.endpoint = value;
    else throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  for (auto const &name : names) {
    auto it = sources.find(name);
    if (it == sources.end()) throw std::invalid_argument("config: dataset " + name + " has no source." + name + " entry");
    c.datasets.push_back(parse_source(name, it->second, base_dir));
    sources.erase(it);
  }
  if (!sources.empty()) throw std::invalid_argument("config: source." + sources.begin()->first + " is not listed in datasets");
  c.validate();
  return c;
}

ExperimentConfig load_config(std::string const &path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto const dir = std::filesystem::path(path).parent_path();
  return parse_config(ss.str(), dir.empty() ? "." : dir.string());
}

OhlcSeries load_source(DataSource const &source, std::string const &endpoint)
{
  switch (source.kind) {
  case DataSource::Kind::Csv: return read_ohlc_file(source.path);
  case DataSource::Kind::Fetch: {
    std::string ep = endpoint;
    if (ep.empty()) {
      if (char const *env = std::getenv("QSTOCK_ENDPOINT")) ep = env;
    }
    if (ep.empty()) throw std::invalid_argument("fetch source " + source.name + " needs an endpoint (QSTOCK_ENDPOINT)");
    return fetch_ohlc(source.symbol, source.start, source.end, ep);
  }
  case DataSource::Kind::Gbm: return generate_gbm_series(source.gbm);
  case DataSource::Kind::Momentum: return generate_momentum_series(source.momentum);
  }
  throw std::logic_error("unknown source kind");
}

EvalReport run_experiment(ExperimentConfig const &config)
{
  config.validate();
  auto sorted_unique = [](auto v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  auto const models = sorted_unique(config.models);
  auto const reductions = sorted_unique(config.reductions);
  auto const qsvm_reductions = sorted_unique(config.qsvm_reductions);
  auto const schemes = sorted_unique(config.schemes);
  bool const has_classical = std::any_of(models.begin(), models.end(), is_classical);
  bool const has_qsvm = std::find(models.begin(), models.end(), ModelKind::Qsvm) != models.end();

  std::set<Reduction> needed;
  if (has_classical) needed.insert(reductions.begin(), reductions.end());
  if (has_qsvm) needed.insert(qsvm_reductions.begin(), qsvm_reductions.end());

  EvalReport report;
  for (std::size_t di = 0; di < config.datasets.size(); ++di) {
    auto const &name = config.datasets[di].name;
    std::optional<PreparedDataset> prepared;
    std::string dataset_failure;
    try {
      prepared = prepare(config, di, needed);
    } catch (std::exception const &e) {
      dataset_failure = e.what();
    }

    auto run_cell = [&](ModelKind m, Reduction r, std::optional<Entanglement> scheme, auto &&score) {
      ReportRow row;
      row.dataset = name;
      row.model = m;
      row.reduction = r;
      row.scheme = scheme;
      if (!prepared) {
        row.failure = dataset_failure;
      } else if (auto f = prepared->failures.find(r); f != prepared->failures.end()) {
        row.failure = f->second;
      } else {
        auto const &d = prepared->reduced.at(r);
        row.provenance = prepared->provenance;
        row.features = d.train.feature_names;
        try {
          row.metrics = score(d);
        } catch (std::exception const &e) {
          row.failure = e.what();
        }
      }
      report.rows.push_back(std::move(row));
    };

    for (auto m : models) {
      if (is_classical(m)) {
        for (auto r : reductions) {
          run_cell(m, r, std::nullopt, [&](Reduced const &d) {
            return score_classical(m, d, cell_seed(config.seed, di, r, m), config.svm_c);
          });
        }
      } else {
        for (auto r : qsvm_reductions) {
          for (auto s : schemes) {
            run_cell(m, r, s, [&](Reduced const &d) { return score_qsvm(config, name, r, s, d); });
          }
        }
      }
    }
  }
  return report;
}

bool audit_no_leakage(EvalReport const &report)
{
  for (auto const &row : report.rows) {
    if (!row.metrics) continue;
    auto const &p = row.provenance;
    if (p.fit_rows <= 0 || p.eval_rows <= 0) return false;
    if (p.fit_last && p.eval_first && !(*p.fit_last < *p.eval_first)) return false;
  }
  return true;
}

std::vector<AverageRow> summarize_average(EvalReport const &report)
{
  std::vector<AverageRow> out;
  for (std::string const family : {"Classical Machine Learning", "QSVM"}) {
    bool const classical = family == "Classical Machine Learning";
    for (auto r : kReductions) {
      AverageRow avg{family, r, 0, 0, 0};
      for (auto const &row : report.rows) {
        if (!row.metrics || row.reduction != r || is_classical(row.model) != classical) continue;
        avg.accuracy += row.metrics->accuracy;
        avg.f_score += row.metrics->f_score;
        ++avg.cells;
      }
      if (avg.cells == 0) continue;
      avg.accuracy /= static_cast<double>(avg.cells);
      avg.f_score /= static_cast<double>(avg.cells);
      out.push_back(avg);
    }
  }
  return out;
}

} // namespace qstock
