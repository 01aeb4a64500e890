#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "qstock/experiment.hpp"
#include "qstock/metrics.hpp"
#include "qstock/report.hpp"

using namespace qstock;

namespace {

LabelVector labels(std::initializer_list<int> v)
{
  LabelVector y(static_cast<Index>(v.size()));
  Index i = 0;
  for (int x : v) y[i++] = x;
  return y;
}

std::vector<std::string> lines_of(std::string const &text)
{
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

ExperimentConfig small_config()
{
  return parse_config("datasets = walk\n"
                      "source.walk = gbm:300:7\n"
                      "reductions = none, pca3, qa3\n"
                      "models = knn, naive_bayes, decision_tree, qsvm\n"
                      "qsvm_reductions = pca3, qa3\n"
                      "schemes = linear, full\n"
                      "sweeps = 200\n"
                      "restarts = 4\n");
}

ReportRow scored(std::string dataset, ModelKind m, Reduction r, double acc, double f, std::optional<Entanglement> s = {})
{
  ReportRow row;
  row.dataset = std::move(dataset);
  row.model = m;
  row.reduction = r;
  row.scheme = s;
  Metrics mt;
  mt.accuracy = acc;
  mt.f_score = f;
  row.metrics = mt;
  return row;
}

} // namespace

TEST_CASE("metrics")
{
  auto const perfect = compute_metrics(labels({1, 0, 1, 1}), labels({1, 0, 1, 1}));
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.f_score == 1.0);

  // tp 3, fp 2, fn 1: precision 0.6, recall 0.75.
  auto const m = compute_metrics(labels({1, 1, 1, 1, 0, 0, 0}), labels({1, 1, 1, 0, 1, 1, 0}));
  CHECK(m.precision == doctest::Approx(0.6));
  CHECK(m.recall == doctest::Approx(0.75));
  CHECK(m.f_score == doctest::Approx(2 * 0.45 / 1.35).epsilon(1e-12));
  CHECK(std::round(m.f_score * 1e4) / 1e4 == 0.6667);

  LabelVector truth = LabelVector::Zero(95), pred = LabelVector::Zero(95);
  pred.tail(36).setOnes();
  auto const best = compute_metrics(truth, pred);
  CHECK(best.confusion.tn == 59);
  CHECK(best.accuracy == doctest::Approx(59.0 / 95));
  EvalReport table;
  table.rows.push_back(scored("HON", ModelKind::Knn, Reduction::Qa5, best.accuracy, best.f_score));
  CHECK(emit_report(table, ReportFormat::Markdown).find("62.10%") != std::string::npos);

  auto const none = compute_metrics(labels({0, 0}), labels({0, 0}));
  CHECK(none.f_score == 0.0);
  CHECK(none.precision == 0.0);
  CHECK_THROWS_AS(compute_metrics(labels({0, 1}), labels({0})), std::invalid_argument);
  CHECK_THROWS_AS(compute_metrics(LabelVector(), LabelVector()), std::invalid_argument);
  CHECK_THROWS_AS(compute_metrics(labels({0, 2}), labels({0, 1})), std::invalid_argument);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    Index const n = 1 + static_cast<Index>(rng() % 60);
    LabelVector a(n), b(n);
    for (Index i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng() & 1);
      b[i] = static_cast<int>(rng() & 1);
    }
    auto const r = compute_metrics(a, b);
    auto const &c = r.confusion;
    REQUIRE(c.total() == n);
    REQUIRE(std::abs(r.accuracy - static_cast<double>(c.tp + c.tn) / static_cast<double>(n)) < 1e-12);
    double const f = r.precision + r.recall == 0 ? 0.0 : 2 * r.precision * r.recall / (r.precision + r.recall);
    REQUIRE(std::abs(r.f_score - f) < 1e-12);
    auto const again = metrics_from_confusion(c);
    REQUIRE(again.accuracy == r.accuracy);
    REQUIRE(again.f_score == r.f_score);
  }
}

TEST_CASE("config parsing")
{
  auto const c = parse_config("# comment\n"
                              "datasets = a, b\n"
                              "source.a = gbm:400:3:0.001:0.02\n"
                              "source.b = momentum:509:4:0.9:1.5\n"
                              "reductions = qa5\n"
                              "models = knn\n"
                              "seed = 9  # trailing\n"
                              "test_fraction = 0.25\n"
                              "solver = exhaustive\n");
  REQUIRE(c.datasets.size() == 2);
  CHECK(c.datasets[0].kind == DataSource::Kind::Gbm);
  CHECK(c.datasets[0].gbm.days == 400);
  CHECK(c.datasets[0].gbm.seed == 3);
  CHECK(c.datasets[0].gbm.drift == 0.001);
  CHECK(c.datasets[0].gbm.volatility == 0.02);
  CHECK(c.datasets[1].kind == DataSource::Kind::Momentum);
  CHECK(c.datasets[1].momentum.persistence == 0.9);
  CHECK(c.datasets[1].momentum.trend_strength == 1.5);
  CHECK(c.reductions == std::vector<Reduction>{Reduction::Qa5});
  CHECK(c.models == std::vector<ModelKind>{ModelKind::Knn});
  CHECK(c.seed == 9);
  CHECK(c.test_fraction == 0.25);
  CHECK(c.solver == QuboSolver::Exhaustive);

  auto const csv = parse_config("datasets = x\nsource.x = csv:data/x.csv\n", "/tmp/cfg");
  CHECK(csv.datasets[0].path == "/tmp/cfg/data/x.csv");
  auto const f = parse_config("datasets = h\nsource.h = fetch:HON:2021-01-04:2022-12-30\n");
  CHECK(f.datasets[0].symbol == "HON");
  CHECK(format_date(f.datasets[0].end) == "2022-12-30");

  CHECK_THROWS_WITH_AS(parse_config("datasets = a\nsource.a = gbm:300:1\ncolour = blue\n"), doctest::Contains("colour"),
                       std::invalid_argument);
  CHECK_THROWS_AS(parse_config("datasets = a\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("datasets = a\nsource.a = gbm:300:1\nsource.b = gbm:300:2\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("datasets = a\nsource.a = gbm:300:1\nmodels = perceptron\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("datasets = a\nsource.a = gbm:300:1\nschemes = ring\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("datasets = a\nsource.a = gbm:300:1\nseed = x\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("datasets = a\nsource.a = tape:1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("datasets = a\nsource.a = gbm:300:1\nno equals sign\n"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(load_config("/nonexistent/dir/missing.cfg"), doctest::Contains("missing.cfg"), std::runtime_error);

  // 13 canonical features fit within the qubit limit.
  CHECK_NOTHROW(parse_config("datasets = a\nsource.a = gbm:300:1\nmodels = qsvm\nqsvm_reductions = none\n"));
}

TEST_CASE("grid size")
{
  auto c = parse_config("datasets = s\nsource.s = gbm:300:1\nreductions = qa5\nmodels = knn\n");
  auto const one = run_experiment(c);
  REQUIRE(one.rows.size() == 1);
  CHECK(one.rows[0].metrics.has_value());
  CHECK(one.rows[0].features.size() == 5);
  CHECK(!one.rows[0].scheme);

  auto const r = run_experiment(small_config());
  // 3 classical models x 3 reductions + qsvm x 2 reductions x 2 schemes
  CHECK(r.rows.size() == 3 * 3 + 2 * 2);
  for (auto const &row : r.rows) {
    CAPTURE(row.failure);
    CHECK(row.metrics.has_value());
    CHECK(row.scheme.has_value() == (row.model == ModelKind::Qsvm));
  }
}

TEST_CASE("determinism and leakage audit")
{
  auto const c = small_config();
  auto const a = run_experiment(c);
  auto const b = run_experiment(c);
  CHECK(emit_report(a, ReportFormat::Csv) == emit_report(b, ReportFormat::Csv));
  CHECK(emit_report(a, ReportFormat::Markdown) == emit_report(b, ReportFormat::Markdown));

  auto threaded = c;
  threaded.threads = 3;
  CHECK(emit_report(run_experiment(threaded), ReportFormat::Csv) == emit_report(a, ReportFormat::Csv));

  CHECK(audit_no_leakage(a));
  for (auto const &row : a.rows) {
    REQUIRE(row.provenance.fit_last.has_value());
    CHECK(*row.provenance.fit_last < *row.provenance.eval_first);
    CHECK(row.provenance.fit_rows + row.provenance.eval_rows == 300 - 34);
    CHECK(row.provenance.eval_rows == 54);
  }
  auto tampered = a;
  tampered.rows[2].provenance.fit_last = tampered.rows[2].provenance.eval_last;
  CHECK_FALSE(audit_no_leakage(tampered));
}

TEST_CASE("failed cells are reported, not fatal")
{
  auto c = parse_config("datasets = tiny, ok\nsource.tiny = gbm:50:1\nsource.ok = gbm:300:1\nreductions = none\n"
                        "models = knn\n");
  auto const r = run_experiment(c);
  REQUIRE(r.rows.size() == 2);
  CHECK_FALSE(r.rows[0].metrics.has_value());
  CHECK(r.rows[0].failure.find("too short") != std::string::npos);
  CHECK(r.rows[1].metrics.has_value());
  auto const csv = lines_of(emit_report(r, ReportFormat::Csv));
  CHECK(csv[1] == "tiny,knn,none,none,,");
}

TEST_CASE("averages")
{
  EvalReport one;
  one.rows.push_back(scored("a", ModelKind::Knn, Reduction::Qa5, 0.61, 0.62));
  auto const single = summarize_average(one);
  REQUIRE(single.size() == 1);
  CHECK(single[0].family == "Classical Machine Learning");
  CHECK(single[0].accuracy == 0.61);
  CHECK(single[0].f_score == 0.62);

  EvalReport two;
  two.rows.push_back(scored("a", ModelKind::Knn, Reduction::Qa5, 0.5, 0.4));
  two.rows.push_back(scored("b", ModelKind::Svm, Reduction::Qa5, 0.7, 0.6));
  two.rows.push_back(scored("a", ModelKind::Qsvm, Reduction::Qa5, 0.2, 0.1, Entanglement::Linear));
  two.rows.push_back(scored("a", ModelKind::Qsvm, Reduction::Qa5, 0.4, 0.3, Entanglement::Full));
  two.rows.push_back(scored("a", ModelKind::Knn, Reduction::Pca3, 0.3, 0.3));
  auto const avg = summarize_average(two);
  auto find = [&](std::string const &family, Reduction r) {
    auto it = std::find_if(avg.begin(), avg.end(), [&](auto const &a) { return a.family == family && a.reduction == r; });
    REQUIRE(it != avg.end());
    return *it;
  };
  auto const cl = find("Classical Machine Learning", Reduction::Qa5);
  CHECK(cl.accuracy == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(cl.f_score == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(cl.cells == 2);
  auto const q = find("QSVM", Reduction::Qa5);
  CHECK(q.accuracy == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(q.cells == 2);
  CHECK(find("Classical Machine Learning", Reduction::Pca3).cells == 1);
  CHECK(avg.size() == 3);
}

TEST_CASE("report emission")
{
  EvalReport one;
  one.rows.push_back(scored("HON", ModelKind::Knn, Reduction::Qa5, 0.6210526315789474, 0.6355));
  auto const csv = emit_report(one, ReportFormat::Csv);
  auto const lines = lines_of(csv);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == kReportCsvHeader);
  CHECK(lines[1] == "HON,knn,none,qa5,0.6211,0.6355");

  auto const md = emit_report(one, ReportFormat::Markdown);
  CHECK(md.find("## HON") != std::string::npos);
  CHECK(md.find("| Model | Entanglement Scheme | Dimensionality Reduction | Accuracy | F-Score |") != std::string::npos);
  CHECK(md.find("| KNN | None | Quantum Annealing-5 | 62.10% | 63.55% |") != std::string::npos);
  CHECK(md.find(kAverageTableHeader) != std::string::npos);
  CHECK(md.find("| Classical Machine Learning | Quantum Annealing-5 | 62.10% | 63.55% |") != std::string::npos);

  auto const r = run_experiment(small_config());
  auto const text = emit_report(r, ReportFormat::Csv);
  auto const back = parse_report_csv(text);
  REQUIRE(back.rows.size() == r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CHECK(back.rows[i].dataset == r.rows[i].dataset);
    CHECK(back.rows[i].model == r.rows[i].model);
    CHECK(back.rows[i].scheme == r.rows[i].scheme);
    CHECK(back.rows[i].reduction == r.rows[i].reduction);
    CHECK(std::abs(back.rows[i].metrics->accuracy - r.rows[i].metrics->accuracy) <= 0.5e-4 + 1e-12);
    CHECK(std::abs(back.rows[i].metrics->f_score - r.rows[i].metrics->f_score) <= 0.5e-4 + 1e-12);
  }
  CHECK(emit_report(back, ReportFormat::Csv) == text);
  CHECK_THROWS_AS(parse_report_csv("wrong,header\n"), std::invalid_argument);
}

TEST_CASE("kernel dumps")
{
  auto const dir = std::filesystem::temp_directory_path() / "qstock_kernel_dump_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  auto c = parse_config("datasets = s\nsource.s = gbm:200:2\nmodels = qsvm\nqsvm_reductions = pca3\nschemes = circular\n");
  c.kernel_dump_dir = dir.string();
  auto const r = run_experiment(c);
  REQUIRE(r.rows.size() == 1);
  auto const train = dir / "s_pca3_circular_train.csv";
  auto const test = dir / "s_pca3_circular_test.csv";
  REQUIRE(std::filesystem::exists(train));
  REQUIRE(std::filesystem::exists(test));
  std::ifstream in(train);
  std::string first;
  std::getline(in, first);
  CHECK(first.substr(0, 2) == "1,");
  CHECK(std::count(first.begin(), first.end(), ',') == r.rows[0].provenance.fit_rows - 1);
  std::filesystem::remove_all(dir);
}
