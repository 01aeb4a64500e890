#include "qstock/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "qstock/dataset.hpp"
#include "qstock/experiment.hpp"
#include "qstock/features.hpp"
#include "qstock/pca.hpp"
#include "qstock/qubo.hpp"
#include "qstock/report.hpp"
#include "qstock/scaler.hpp"

namespace qstock {

namespace {

std::string read_file(std::string const &path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(std::string const &path, std::string const &text, std::ostream &out)
{
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

} // namespace

int cli_main(std::vector<std::string> const &args, std::ostream &out, std::ostream &err)
{
  CLI::App app{"Quantum-assisted stock direction laboratory"};
  app.require_subcommand(1);

  // fetch
  auto *fetch = app.add_subcommand("fetch", "Download daily OHLC rows from a chart endpoint into CSV");
  std::string symbol, start, end, endpoint, fetch_out;
  fetch->add_option("--symbol", symbol, "Ticker symbol")->required();
  fetch->add_option("--start", start, "First day, YYYY-MM-DD")->required();
  fetch->add_option("--end", end, "Last day, YYYY-MM-DD")->required();
  fetch->add_option("--endpoint", endpoint, "Base URL; defaults to $QSTOCK_ENDPOINT");
  fetch->add_option("--out", fetch_out, "Output CSV (default stdout)");

  // synth
  auto *synth = app.add_subcommand("synth", "Generate a synthetic OHLC series");
  GbmParams gbm;
  MomentumParams mom;
  long long days = 509;
  std::uint64_t seed = 0;
  double s0 = 100.0, drift = 0.0, vol = 0.01;
  bool momentum = false;
  std::string synth_out;
  synth->add_option("--days", days, "Trading days")->capture_default_str();
  synth->add_option("--seed", seed, "Random seed")->capture_default_str();
  synth->add_option("--s0", s0, "Initial price")->capture_default_str();
  synth->add_option("--drift", drift, "Per-day drift (GBM)")->capture_default_str();
  synth->add_option("--vol", vol, "Per-day volatility")->capture_default_str();
  synth->add_flag("--momentum", momentum, "Plant a persistent hidden trend instead of plain GBM");
  synth->add_option("--persistence", mom.persistence, "Trend AR(1) persistence (--momentum)")->capture_default_str();
  synth->add_option("--strength", mom.trend_strength, "Trend stddev in units of --vol (--momentum)")->capture_default_str();
  synth->add_option("--out", synth_out, "Output CSV (default stdout)");

  // features
  auto *features = app.add_subcommand("features", "Compute the canonical indicator dataset from an OHLC CSV");
  std::string features_in, features_out;
  features->add_option("--in", features_in, "OHLC CSV")->required();
  features->add_option("--out", features_out, "Output dataset CSV (default stdout)");

  // reduce
  auto *reduce = app.add_subcommand("reduce", "Reduce the indicator dataset by PCA or QUBO feature selection");
  std::string reduce_in, reduce_out, qubo_out, method, solver = "annealer";
  long long k = 5;
  double test_fraction = 0.2, alpha = 0.5;
  std::uint64_t reduce_seed = 42;
  reduce->add_option("--in", reduce_in, "OHLC CSV")->required();
  reduce->add_option("--method", method, "pca or qa")->required()->check(CLI::IsMember({"pca", "qa"}));
  reduce->add_option("--k", k, "Target feature count")->capture_default_str();
  reduce->add_option("--test-fraction", test_fraction, "Held-out tail excluded from fitting")->capture_default_str();
  reduce->add_option("--alpha", alpha, "Relevance/redundancy balance (qa)")->capture_default_str();
  reduce->add_option("--solver", solver, "annealer or exhaustive (qa)")->check(CLI::IsMember({"annealer", "exhaustive"}));
  reduce->add_option("--seed", reduce_seed, "Annealer seed (qa)")->capture_default_str();
  reduce->add_option("--out", reduce_out, "Reduced dataset CSV (default stdout)");
  reduce->add_option("--qubo-out", qubo_out, "Write the feature-selection QUBO here (qa)");

  // run
  auto *run = app.add_subcommand("run", "Execute an experiment grid from a config file");
  std::string config_path, run_out, markdown_out, dump_dir, run_endpoint;
  int threads = 0;
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--out", run_out, "Report CSV (default stdout)");
  run->add_option("--markdown", markdown_out, "Also write the markdown tables here");
  run->add_option("--dump-kernel", dump_dir, "Directory for QSVM kernel matrices");
  run->add_option("--endpoint", run_endpoint, "Fetch endpoint override");
  run->add_option("--threads", threads, "Kernel worker threads (overrides config)");

  // report
  auto *report = app.add_subcommand("report", "Render a report CSV as markdown tables");
  std::string report_in, report_out;
  report->add_option("--in", report_in, "Report CSV")->required();
  report->add_option("--out", report_out, "Markdown output (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (CLI::CallForHelp const &) {
    out << app.help();
    return 0;
  } catch (CLI::CallForAllHelp const &) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (CLI::ParseError const &e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (*fetch) {
      if (endpoint.empty()) {
        if (char const *env = std::getenv("QSTOCK_ENDPOINT")) endpoint = env;
      }
      if (endpoint.empty()) throw std::invalid_argument("no endpoint: pass --endpoint or set QSTOCK_ENDPOINT");
      auto const series = fetch_ohlc(symbol, parse_date(start), parse_date(end), endpoint);
      write_output(fetch_out, write_ohlc_csv(series), out);
    } else if (*synth) {
      OhlcSeries series;
      if (momentum) {
        mom.days = days;
        mom.seed = seed;
        mom.s0 = s0;
        mom.volatility = vol;
        series = generate_momentum_series(mom);
      } else {
        gbm.days = days;
        gbm.seed = seed;
        gbm.s0 = s0;
        gbm.drift = drift;
        gbm.volatility = vol;
        series = generate_gbm_series(gbm);
      }
      write_output(synth_out, write_ohlc_csv(series), out);
    } else if (*features) {
      write_output(features_out, write_dataset_csv(build_feature_matrix(read_ohlc_file(features_in))), out);
    } else if (*reduce) {
      auto const data = build_feature_matrix(read_ohlc_file(reduce_in));
      auto const [train_raw, test_raw] = chronological_split(data, test_fraction);
      auto const scaler = fit_scaler(train_raw, ScalerKind::Standardize);
      auto const train = apply_scaler(scaler, train_raw);
      auto const all = apply_scaler(scaler, data);
      Dataset reduced;
      if (method == "pca") {
        auto const model = fit_pca<double>(train.X, k);
        std::vector<std::string> names;
        for (long long i = 0; i < k; ++i) names.push_back("pc" + std::to_string(i + 1));
        reduced = all.with_features(transform(model, all.X), names);
      } else {
        AnnealParams params;
        params.seed = reduce_seed;
        auto const sel = select_features(train, k, solver == "exhaustive" ? QuboSolver::Exhaustive : QuboSolver::Annealer,
                                         alpha, params);
        reduced = all.select_columns(sel.indices);
        if (!qubo_out.empty()) write_output(qubo_out, serialize_qubo(sel.qubo), out);
      }
      write_output(reduce_out, write_dataset_csv(reduced), out);
    } else if (*run) {
      auto config = load_config(config_path);
      if (!dump_dir.empty()) config.kernel_dump_dir = dump_dir;
      if (!run_endpoint.empty()) config.endpoint = run_endpoint;
      if (threads > 0) config.threads = threads;
      auto const result = run_experiment(config);
      for (auto const &row : result.rows) {
        if (!row.metrics) {
          err << "warning: " << row.dataset << " " << to_string(row.model) << " " << to_string(row.reduction)
              << " failed: " << row.failure << "\n";
        }
      }
      write_output(run_out, emit_report(result, ReportFormat::Csv), out);
      if (!markdown_out.empty()) write_output(markdown_out, emit_report(result, ReportFormat::Markdown), out);
    } else if (*report) {
      write_output(report_out, emit_report(parse_report_csv(read_file(report_in)), ReportFormat::Markdown), out);
    }
  } catch (std::exception const &e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

} // namespace qstock
