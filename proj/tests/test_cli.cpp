#include "doctest.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qstock/cli.hpp"
#include "qstock/dataset.hpp"
#include "qstock/market_data.hpp"
#include "qstock/qubo.hpp"
#include "qstock/report.hpp"

using namespace qstock;
namespace fs = std::filesystem;

namespace {

struct Result
{
  int status;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args)
{
  std::ostringstream out, err;
  int const status = cli_main(args, out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(fs::path const &p)
{
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir
{
  fs::path path;
  explicit TempDir(std::string const &name) : path(fs::temp_directory_path() / name)
  {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(std::string const &leaf) const { return (path / leaf).string(); }
};

} // namespace

TEST_CASE("usage and exit codes")
{
  auto const help = cli({"--help"});
  CHECK(help.status == 0);
  CHECK(help.out.find("synth") != std::string::npos);
  CHECK(help.out.find("reduce") != std::string::npos);

  auto const sub_help = cli({"run", "--help"});
  CHECK(sub_help.status == 0);
  CHECK(sub_help.out.find("--config") != std::string::npos);

  auto const unknown = cli({"frobnicate"});
  CHECK(unknown.status == 2);
  CHECK(unknown.err.find("error:") == 0);

  CHECK(cli({}).status == 2);
  CHECK(cli({"synth", "--bogus"}).status == 2);
  CHECK(cli({"reduce", "--in", "x.csv", "--method", "ica"}).status == 2);

  auto const missing = cli({"run", "--config", "missing.cfg"});
  CHECK(missing.status == 1);
  CHECK(missing.err.find("missing.cfg") != std::string::npos);
  CHECK(std::count(missing.err.begin(), missing.err.end(), '\n') == 1);
}

TEST_CASE("synth, features and reduce")
{
  TempDir dir("qstock_cli_pipeline");
  REQUIRE(cli({"synth", "--days", "300", "--seed", "7", "--out", dir / "s.csv"}).status == 0);
  auto const series = read_ohlc_file(dir / "s.csv");
  CHECK(series.size() == 300);

  auto const feats = cli({"features", "--in", dir / "s.csv"});
  REQUIRE(feats.status == 0);
  auto const data = parse_dataset_csv(feats.out);
  CHECK(data.cols() == 13);
  CHECK(data.rows() == 300 - 34);
  CHECK(feats.out.substr(0, feats.out.find('\n')).ends_with(",label"));

  // Same seed, same bytes.
  REQUIRE(cli({"synth", "--days", "300", "--seed", "7", "--out", dir / "t.csv"}).status == 0);
  CHECK(slurp(dir / "s.csv") == slurp(dir / "t.csv"));
  auto const mom = cli({"synth", "--momentum", "--days", "200", "--seed", "3"});
  CHECK(mom.status == 0);
  CHECK(parse_ohlc_csv_text(mom.out, "m").size() == 200);

  auto const pca = cli({"reduce", "--in", dir / "s.csv", "--method", "pca", "--k", "3"});
  REQUIRE(pca.status == 0);
  auto const reduced = parse_dataset_csv(pca.out);
  CHECK(reduced.feature_names == std::vector<std::string>{"pc1", "pc2", "pc3"});
  CHECK(reduced.rows() == data.rows());
  CHECK(reduced.y == data.y);

  auto const qa = cli({"reduce", "--in", dir / "s.csv", "--method", "qa", "--k", "5", "--solver", "exhaustive", "--out",
                       dir / "qa.csv", "--qubo-out", dir / "q.txt"});
  REQUIRE(qa.status == 0);
  auto const selected = parse_dataset_csv(slurp(dir / "qa.csv"));
  CHECK(selected.cols() == 5);
  auto const qubo = parse_qubo(slurp(dir / "q.txt"));
  CHECK(qubo.size() == 13);

  auto const bad_k = cli({"reduce", "--in", dir / "s.csv", "--method", "pca", "--k", "14"});
  CHECK(bad_k.status == 1);
  auto const no_file = cli({"features", "--in", dir / "absent.csv"});
  CHECK(no_file.status == 1);
  CHECK(no_file.err.find("absent.csv") != std::string::npos);

  std::ofstream(dir / "broken.csv") << "Date,Open,High,Low,Close,Volume\n2021-01-04,1,2,0.5,1.5,10\n2021-01-05,1,0.9,0.5,1,10\n";
  auto const broken = cli({"features", "--in", dir / "broken.csv"});
  CHECK(broken.status == 1);
  CHECK(broken.err.find("row 3") != std::string::npos);
}

TEST_CASE("run and report")
{
  TempDir dir("qstock_cli_run");
  REQUIRE(cli({"synth", "--days", "260", "--seed", "1", "--out", dir / "alpha.csv"}).status == 0);
  std::ofstream(dir / "grid.cfg") << "datasets = alpha\n"
                                     "source.alpha = csv:alpha.csv\n"
                                     "reductions = none, qa3\n"
                                     "models = knn, qsvm\n"
                                     "qsvm_reductions = qa3\n"
                                     "schemes = linear\n";
  auto const r = cli({"run", "--config", dir / "grid.cfg", "--out", dir / "report.csv", "--markdown", dir / "report.md",
                      "--dump-kernel", dir.path.string()});
  REQUIRE(r.status == 0);
  auto const csv = slurp(dir / "report.csv");
  CHECK(csv.substr(0, csv.find('\n')) == kReportCsvHeader);
  CHECK(parse_report_csv(csv).rows.size() == 3);
  CHECK(fs::exists(dir.path / "alpha_qa3_linear_train.csv"));
  CHECK(slurp(dir / "report.md").find(kReportTableHeader) != std::string::npos);

  auto const rendered = cli({"report", "--in", dir / "report.csv"});
  REQUIRE(rendered.status == 0);
  CHECK(rendered.out.find("## alpha") != std::string::npos);
  CHECK(rendered.out.find(kAverageTableHeader) != std::string::npos);

  std::ofstream(dir / "bad.cfg") << "datasets = alpha\nsource.alpha = csv:alpha.csv\nflavour = mild\n";
  auto const bad = cli({"run", "--config", dir / "bad.cfg"});
  CHECK(bad.status == 1);
  CHECK(bad.err.find("flavour") != std::string::npos);
}

TEST_CASE("fetch without an endpoint")
{
  auto const r = cli({"fetch", "--symbol", "HON", "--start", "2021-01-04", "--end", "2021-02-01", "--endpoint", ""});
  if (std::getenv("QSTOCK_ENDPOINT") == nullptr) {
    CHECK(r.status == 1);
    CHECK(r.err.find("QSTOCK_ENDPOINT") != std::string::npos);
  }
  CHECK(cli({"fetch", "--symbol", "HON", "--start", "2021-13-04", "--end", "2021-02-01", "--endpoint", "http://127.0.0.1:9"})
          .status == 1);
}
