#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hyperdiff/cli.hpp"
#include "hyperdiff/coeff_io.hpp"
#include "hyperdiff/right_inverse.hpp"
#include "test_util.hpp"

using namespace hyperdiff;
using namespace hyperdiff::testing;

namespace {

namespace fs = std::filesystem;

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / "hyperdiff_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Result {
  int code;
  std::string log;
  std::string err;
};

Result run_args(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"hyperdiff"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream log, err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), log, err);
  return {code, log.str(), err.str()};
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = RunConfig::from_args({"synthesize", "family=F4", "--K", "3", "--mode=exact"});
  CHECK(cfg.command == "synthesize");
  CHECK(cfg.get("family", "") == "F4");
  CHECK(cfg.get_long("K", 0) == 3);
  CHECK(cfg.get("mode", "") == "exact");

  const auto text = RunConfig::from_text("# comment\ncommand = unicity\n\npoints=linear  # trailing\n");
  CHECK(text.command == "unicity");
  CHECK(text.get("points", "") == "linear");

  const auto path = scratch() / "run.cfg";
  std::ofstream(path) << "command=build-inverse\nfamily=F4\nn=6\nk=1\n";
  const auto merged = RunConfig::from_args({"--config", path.string(), "k=2"});
  CHECK(merged.command == "build-inverse");
  CHECK(merged.get_long("k", 0) == 2);

  CHECK_THROWS_AS(RunConfig::from_args({"unicity", "colour=red"}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_args({"unicity", "--r_max"}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_args({"unicity", "extra"}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_text("family F4\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_args({"--config", (scratch() / "missing.cfg").string()}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_args({"unicity", "K=x"}).get_long("K", 0), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_args({"unicity", "r=1e"}).get_double("r", 0), ConfigError);
}

TEST_CASE("exit codes") {
  CHECK(run_args({}).code == 2);
  CHECK(run_args({"frobnicate"}).code == 2);
  CHECK(run_args({"unicity", "bogus=1"}).code == 2);
  CHECK(run_args({"build-inverse", "n=3"}).code == 2);
  CHECK(run_args({"build-inverse", "family=F4", "mode=fuzzy"}).code == 2);
  CHECK(run_args({"build-inverse", "family=F4", "n=0"}).code == 3);
  CHECK(run_args({"verify-criterion", "family=F3", "route=P"}).code == 3);
  CHECK(run_args({"build-m0", "family=F4", "J=3", "n_start=3", "n_cap=2"}).code == 4);
  CHECK(run_args({"synthesize", "family=F4", "K=4", "n_cap=1"}).code == 4);
  CHECK(InvariantViolation("x").exit_code() == 5);
  const auto r = run_args({"check-properties", "family=F9"});
  CHECK(r.code == 2);
  CHECK(r.err.find("error:") == 0);
}

TEST_CASE("check-properties") {
  const auto out = scratch() / "f1.csv";
  const auto r = run_args({"check-properties", "family=F1", "r=2", "n_max=40", "property=R", "out=" + out.string()});
  CHECK(r.code == 0);
  CHECK(r.log == "property R: supports\n");
  const auto csv = slurp(out);
  CHECK(csv.rfind("#property R n=1..40 verdict=supports\n", 0) == 0);
  CHECK(csv.find("\n40,") != std::string::npos);
}

TEST_CASE("build-inverse writes the exact f_{n,k}") {
  const auto out = scratch() / "f62.txt";
  const auto r = run_args({"build-inverse", "family=F4", "n=6", "k=2", "mode=exact", "out=" + out.string()});
  CHECK(r.code == 0);
  CHECK(r.log.find("identity: exact") != std::string::npos);
  std::ifstream in(out);
  CoeffFileHeader header;
  const auto f = read_taylor<ExactComplex>(in, &header);
  CHECK(f == build_f_nk(make_family("F4").operator_at<ExactComplex>(6), 2).f);
  CHECK(f == XPoly::monomial(8, Exact(mpq_class(1, 20160))));
  CHECK(header.fields.at("route") == "polynomial");
  CHECK(header.fields.at("n") == "6");
}

TEST_CASE("round trip and idempotence of emitted files") {
  const auto dir = scratch();
  for (const std::string mode : {"exact", "float"}) {
    const auto out = dir / ("f1_" + mode + ".txt");
    REQUIRE(run_args({"build-inverse", "family=F1", "n=7", "k=3", "mode=" + mode, "out=" + out.string()}).code == 0);
    const auto first = slurp(out);
    std::istringstream in(first);
    CoeffFileHeader header;
    std::ostringstream again;
    std::vector<std::string> extra{"right_inverse n=7 k=3 route=polynomial"};
    if (mode == "exact") write_taylor(again, read_taylor<ExactComplex>(in, &header), extra);
    else write_taylor(again, read_taylor<ExtComplex>(in, &header), extra);
    CHECK(again.str() == first);
    REQUIRE(run_args({"build-inverse", "family=F1", "n=7", "k=3", "mode=" + mode, "out=" + out.string()}).code == 0);
    CHECK(slurp(out) == first);
  }

  const auto trace = dir / "trace.jsonl", x = dir / "x.txt";
  const std::vector<std::string> args{"synthesize", "family=F4", "K=5", "out=" + trace.string(),
                                      "coeff_out=" + x.string()};
  REQUIRE(run_args(args).code == 0);
  const auto t1 = slurp(trace), x1 = slurp(x);
  REQUIRE(run_args(args).code == 0);
  CHECK(slurp(trace) == t1);
  CHECK(slurp(x) == x1);
  std::istringstream xin(x1);
  std::ostringstream xout;
  write_taylor(xout, read_taylor<ExactComplex>(xin), {"synthesis K=5 family=F4"});
  CHECK(xout.str() == x1);
}

TEST_CASE("remaining subcommands") {
  const auto dir = scratch();
  auto r = run_args({"unicity", "points=linear", "r_max=1e5"});
  CHECK(r.code == 0);
  CHECK(r.log.find("chi: 1") != std::string::npos);

  r = run_args({"build-m0", "family=F4", "J=4", "n_start=3", "out=" + (dir / "b.csv").string(),
                "decay_out=" + (dir / "d.csv").string()});
  CHECK(r.code == 0);
  CHECK(r.log.find("indices: 3 10 59 535") != std::string::npos);
  CHECK(slurp(dir / "d.csv").rfind("k,measured_log", 0) == 0);

  r = run_args({"verify-criterion", "family=F4", "route=Q", "out=" + (dir / "c.jsonl").string()});
  CHECK(r.code == 0);
  CHECK(r.log.find("overall: supports") != std::string::npos);

  r = run_args({"perturb", "family=F4", "K=6", "n_start=5", "g=0:0:0:1"});
  CHECK(r.code == 0);
  CHECK(r.log.find("unchanged residuals: 6/6") != std::string::npos);
  CHECK(run_args({"perturb", "family=F4", "K=6"}).code == 2);

  r = run_args({"augment", "family=F4", "K=6", "lambdas=-1,1,2", "extra=1;0:1"});
  CHECK(r.code == 0);
  CHECK(r.log.find("rows within tolerance: 6/6") != std::string::npos);

  r = run_args({"joint", "family=F4", "combos=1,0;0,1;1,-1", "target_list=1;0"});
  CHECK(r.code == 0);
  CHECK(r.log.find("rows within tolerance: 6/6") != std::string::npos);
  CHECK(run_args({"joint", "family=F4", "mode=float"}).code == 2);
}
