#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"
#include "cudir/io.hpp"
#include "cudir/synthetic.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cudir::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "cudir_cli_tests" / name;
  fs::remove_all(p);
  return p;
}

json read_json(const fs::path& p) { return json::parse(cudir::io::read_text_file(p)); }

std::size_t csv_rows(const fs::path& p) {
  const auto text = cudir::io::read_text_file(p);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) - 1;  // minus header
}

std::string mu10_arg() { return "@" + (testing::data_dir() / "mu10.csv").string(); }

fs::path write_panel(const fs::path& dir, cudir::SyntheticPanelSpec spec) {
  fs::create_directories(dir);
  const auto path = dir / "panel.csv";
  cudir::io::write_text_file(path, cudir::synthetic_panel_csv(spec));
  return path;
}

}  // namespace

TEST_CASE("cli: moments") {
  auto r = cli({"moments", "--mu", "1,0", "--sigma", "1", "--rho", "0"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(std::abs(j["mrl"].get<double>() - 0.5205) < 5e-5);

  r = cli({"moments", "--mu", mu10_arg(), "--sigma", "0.0224", "--rho", "0.1243"});
  REQUIRE(r.code == 0);
  j = json::parse(r.out);
  CHECK(j["md"].size() == 10);
  // the exact mean has ||P mu|| = 0.002679, so this lands below the 4 dp chain's 0.0417
  CHECK(std::abs(j["mrl"].get<double>() - 0.0414109376) < 1e-9);
  CHECK(j["cov_chi"].size() == 10);

  r = cli({"moments", "--mu", "1,0,0", "--sigma", "1", "--rho", "0", "--theta", "2,0,0"});
  REQUIRE(r.code == 0);
  j = json::parse(r.out);
  CHECK(std::abs(j["expectation_T"].get<double>() - j["mrl"].get<double>()) < 1e-15);
}

TEST_CASE("cli: exit codes") {
  CHECK(cli({"moments", "--mu", "1,1,1", "--sigma", "1", "--rho", "0"}).code == 1);
  CHECK(cli({"moments", "--mu", "1,0,0", "--sigma", "1", "--rho", "-0.6"}).code == 2);
  CHECK(cli({"moments", "--mu", "1,x", "--sigma", "1", "--rho", "0"}).code == 2);
  CHECK(cli({"moments", "--sigma", "1"}).code == 2);
  CHECK(cli({"no-such-command"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({}).code == 2);
  CHECK(cli({"simulate", "ic-pdf", "--model", "11", "--output-dir", scratch("bad_model").string()}).code == 2);
}

TEST_CASE("cli: mrl-check") {
  const auto dir = scratch("mrl_check");
  const auto r = cli({"simulate", "mrl-check", "--count", "1000000", "--seed", "7", "--output-dir", dir.string()});
  REQUIRE(r.code == 0);
  const auto j = read_json(dir / "mrl_check.json");
  const double mc = j["mc_mrl"].get<double>();
  CHECK(mc >= 0.039);
  CHECK(mc <= 0.044);
  CHECK(std::abs(j["closed_form_mrl"].get<double>() - 0.0417) < 5e-5);
  CHECK(j["fit_4dp"]["concentration"].get<double>() == 0.1288);

  const auto manifest = read_json(dir / "manifest.json");
  CHECK(manifest["command"] == "simulate mrl-check");
  CHECK(manifest["seed"] == 7);
  CHECK(manifest["artifacts"].size() == 1);
}

TEST_CASE("cli: md-perturb and ic-pdf") {
  const auto dir = scratch("md_perturb");
  REQUIRE(cli({"simulate", "md-perturb", "--axis", "sigma1", "--factors", "1,2,5,10", "--count", "20000", "--seed",
               "3", "--output-dir", dir.string()})
              .code == 0);
  CHECK(csv_rows(dir / "md_perturb.csv") == 4);

  const auto ic = scratch("ic_pdf");
  REQUIRE(cli({"simulate", "ic-pdf", "--model", "3", "--count", "10", "--seed", "1", "--output-dir", ic.string()})
              .code == 0);
  CHECK(csv_rows(ic / "ic_pdf.csv") == cudir::kDensityGridPoints);
  CHECK(read_json(ic / "ic_summary.json")["count"] == 10);
}

TEST_CASE("cli: oracle") {
  const auto dir = scratch("oracle");
  const auto r = cli({"oracle", "--suite", "all", "--count", "20000", "--seed", "5", "--output-dir", dir.string()});
  CHECK(r.code == 0);
  const auto j = read_json(dir / "oracle.json");
  CHECK(j["pass"] == true);
  CHECK(j["checks"].size() > 10);
  CHECK(cli({"oracle", "--suite", "nope", "--output-dir", dir.string()}).code == 2);
}

TEST_CASE("cli: empirical pipeline") {
  const auto dir = scratch("empirical");
  cudir::SyntheticPanelSpec spec;
  spec.cols = 50;
  spec.sparse_cols = 3;
  spec.stream = {11, 0};
  const auto panel = write_panel(dir, spec);

  const auto out = dir / "out";
  auto r = cli({"empirical", "--input", panel.string(), "--windows", "yearly", "--output-dir", out.string()});
  REQUIRE(r.code == 0);
  CHECK(r.err.find("dropped 3") != std::string::npos);
  std::size_t reports = 0;
  for (const auto& e : fs::directory_iterator(out))
    if (e.path().filename().string().rfind("report_", 0) == 0) ++reports;
  CHECK(reports == 5 + 1);  // five years plus the full sample
  CHECK(csv_rows(out / "rolling.csv") == 1220 - 20 + 1);

  const auto rep = read_json(out / "report_full.json");
  CHECK(std::abs(rep["projected_stats"]["mean"].get<double>() - rep["mrl"].get<double>()) < 1e-12);
  CHECK(rep["sample_size"] == 1220);

  const auto range = dir / "range";
  REQUIRE(cli({"empirical", "--input", panel.string(), "--windows", "2015-01-01:2015-06-30", "--rolling", "0",
               "--output-dir", range.string()})
              .code == 0);
  CHECK(fs::exists(range / "report_2015-01-01_2015-06-30.json"));
  CHECK_FALSE(fs::exists(range / "rolling.csv"));

  CHECK(cli({"empirical", "--input", panel.string(), "--rolling", "5000", "--output-dir", (dir / "x").string()}).code ==
        2);
  CHECK(cli({"empirical", "--input", (dir / "missing.csv").string(), "--output-dir", (dir / "y").string()}).code == 2);

  cudir::io::write_text_file(dir / "bad.csv", "date,A,B\n2020-01-01,0.1,zz\n2020-01-02,0.1,0.2\n");
  CHECK(cli({"empirical", "--input", (dir / "bad.csv").string(), "--output-dir", (dir / "z").string()}).code == 2);
  cudir::io::write_text_file(dir / "thin.csv", "date,A,B\n2020-01-01,0.1,\n2020-01-02,0.1,\n");
  CHECK(cli({"empirical", "--input", (dir / "thin.csv").string(), "--output-dir", (dir / "w").string()}).code == 1);
}

TEST_CASE("cli: replay reproduces artifacts byte for byte") {
  const auto first = scratch("replay_a");
  REQUIRE(cli({"simulate", "md-perturb", "--count", "50000", "--seed", "42", "--threads", "1", "--output-dir",
               first.string()})
              .code == 0);
  const auto second = scratch("replay_b");
  REQUIRE(cli({"replay", "--manifest", (first / "manifest.json").string(), "--output-dir", second.string()}).code == 0);
  CHECK(cudir::io::read_text_file(first / "md_perturb.csv") == cudir::io::read_text_file(second / "md_perturb.csv"));

  // worker count changes who computes a block, never the result
  const auto threaded = scratch("replay_c");
  REQUIRE(cli({"simulate", "md-perturb", "--count", "50000", "--seed", "42", "--threads", "3", "--output-dir",
               threaded.string()})
              .code == 0);
  CHECK(cudir::io::read_text_file(first / "md_perturb.csv") == cudir::io::read_text_file(threaded / "md_perturb.csv"));

  const auto other = scratch("replay_d");
  REQUIRE(cli({"simulate", "md-perturb", "--count", "50000", "--seed", "43", "--output-dir", other.string()}).code == 0);
  CHECK(cudir::io::read_text_file(first / "md_perturb.csv") != cudir::io::read_text_file(other / "md_perturb.csv"));
}
