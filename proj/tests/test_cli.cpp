#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gammaent/cli.hpp"
#include "gammaent/error.hpp"
#include "gammaent/random.hpp"

using namespace gammaent;
using Json = nlohmann::json;

namespace {

const std::string kSource = GAMMAENT_SOURCE_DIR;
const std::string kSugarcaneFile = kSource + "/data/sugarcane.txt";

struct Outcome {
  int code;
  std::string out;
  std::string err;
  Json json() const { return Json::parse(out); }
};

Outcome run(std::vector<std::string> args, const std::string& stdin_text = "") {
  std::istringstream in(stdin_text);
  std::ostringstream out, err;
  const int code = cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("gammaent_test_" + name)).string();
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = temp_path(name);
  std::ofstream(path) << text;
  return path;
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Domain;
}

}  // namespace

TEST_CASE("number parsing") {
  CHECK(cli::parse_numbers("1 2\n3,4\t5\r\n\n6e-1") == std::vector<double>{1, 2, 3, 4, 5, 0.6});
  CHECK(cli::parse_numbers("time\n1\n2\n") == std::vector<double>{1, 2});
  CHECK(cli::parse_numbers("\n\n\"days\"\n1.5\n") == std::vector<double>{1.5});
  CHECK(kind_of([] { cli::parse_numbers("1\n2\nx3\n"); }) == ErrorKind::Parse);
  try {
    cli::parse_numbers("1\n2\nabc\n");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  try {
    cli::parse_numbers("1, -2, 3");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
    CHECK(std::string(e.what()).find("-2") != std::string::npos);
  }
  CHECK(kind_of([] { cli::parse_numbers("1 0 3"); }) == ErrorKind::Domain);
  CHECK(kind_of([] { cli::parse_numbers("1 inf"); }) == ErrorKind::Domain);
}

TEST_CASE("ingestion") {
  std::ifstream f(kSugarcaneFile);
  std::stringstream buf;
  buf << f.rdbuf();
  const auto s = cli::ingest_text(buf.str());
  CHECK(s.n() == 21);
  CHECK(s.sum_x() == 747.0);
  std::istringstream none;
  CHECK(cli::ingest(kSugarcaneFile, none).n() == 21);
  std::istringstream piped("3 4 5");
  CHECK(cli::ingest("-", piped).sum_x() == 12.0);
  CHECK(kind_of([] { cli::ingest_text("5\n5\n5"); }) == ErrorKind::Degenerate);
  CHECK(kind_of([] { cli::ingest_text("5"); }) == ErrorKind::Size);
  CHECK(kind_of([&] { cli::ingest("/nonexistent/file.txt", none); }) == ErrorKind::Parse);
}

TEST_CASE("seven significant digits") {
  CHECK(cli::round_sig7(4.556358978644604) == 4.556359);
  CHECK(cli::round_sig7(0.000123456789) == 0.0001234568);
  CHECK(cli::round_sig7(-1234567.89) == -1234568.0);
  CHECK(std::isnan(cli::round_sig7(NAN)));
}

TEST_CASE("entropy command") {
  auto r = run({"entropy", "--alpha", "4", "--beta", "2"});
  CHECK(r.code == 0);
  CHECK(r.json()["H"].get<double>() == doctest::Approx(1.3303).epsilon(5e-5));
  CHECK(run({"entropy", "--alpha", "2", "--beta", "0.5"}).json()["H"].get<double>() == doctest::Approx(2.2704).epsilon(5e-5));
  CHECK(run({"entropy", "--alpha", "1", "--beta", "1"}).json()["H"].get<double>() == 1.0);
  const auto bad = run({"entropy", "--alpha", "-1", "--beta", "1"});
  CHECK(bad.code != 0);
  CHECK(bad.json()["error"]["kind"] == "domain");
}

TEST_CASE("fit command") {
  const auto r = run({"fit", kSugarcaneFile});
  REQUIRE(r.code == 0);
  const auto j = r.json();
  CHECK(j["H"].get<double>() == 4.564789);
  CHECK(j["LCI_H"].get<double>() == 4.103069);
  CHECK(j["UCI_H"].get<double>() == 5.026509);
  CHECK(j["extra"]["full"]["H"].get<double>() == doctest::Approx(4.5647893152).epsilon(1e-10));
  CHECK(j["extra"]["data"]["n"] == 21);

  Rng rng(8);
  std::string text;
  for (int i = 0; i < 40; ++i) text += std::to_string(rng.gamma(2.0) * 2.0) + "\n";
  const auto a = run({"fit", "--level", "0.9"}, text);
  const auto b = run({"fit", "-", "--level", "0.9"}, text);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);

  const auto degenerate = run({"fit"}, "5\n5\n5\n");
  CHECK(degenerate.code == 1);
  CHECK(degenerate.json()["error"]["kind"] == "degenerate_sample");
  const auto negative = run({"fit"}, "1, -2, 3");
  CHECK(negative.code == 1);
  CHECK(negative.json()["error"]["message"].get<std::string>().find("-2") != std::string::npos);
}

TEST_CASE("bayes command") {
  const auto r = run({"bayes", kSugarcaneFile, "--R", "20000", "--seed", "11", "--oracle"});
  REQUIRE(r.code == 0);
  const auto j = r.json();
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  // nlohmann::json sorts keys; the fields match the reference record names.
  CHECK(keys == std::vector<std::string>{"Geweke_statistics", "H", "LCI_H", "UCI_H", "acep", "extra"});
  CHECK(r.out.find("\"acep\"") < r.out.find("\"H\""));
  CHECK(std::fabs(j["H"].get<double>() - 4.55) < 0.1);
  CHECK(std::fabs(j["LCI_H"].get<double>() - 4.04) < 0.15);
  CHECK(std::fabs(j["UCI_H"].get<double>() - 5.09) < 0.15);
  CHECK(std::fabs(j["extra"]["oracle"]["H_full"].get<double>() - j["extra"]["full"]["H"].get<double>()) < 0.05);
  CHECK(j["extra"]["prior"] == "matching");
  CHECK(j["extra"]["seed"] == 11);
  CHECK(j["extra"]["config"]["R"] == 20000);
  CHECK(j["extra"]["interval_warning"] == false);

  const auto again = run({"bayes", kSugarcaneFile, "--R", "20000", "--seed", "11", "--oracle"});
  CHECK(again.out == r.out);
  CHECK(run({"bayes", kSugarcaneFile, "--seed", "12"}).out != run({"bayes", kSugarcaneFile, "--seed", "13"}).out);
}

TEST_CASE("bayes defaults, seed from the environment and chain dump") {
  ::setenv("GAMMAENT_SEED", "4321", 1);
  const auto r = run({"bayes", kSugarcaneFile, "--prior", "jeffreys"});
  ::unsetenv("GAMMAENT_SEED");
  REQUIRE(r.code == 0);
  const auto j = r.json();
  CHECK(j["extra"]["seed"] == 4321);
  CHECK(j["extra"]["prior"] == "jeffreys");
  CHECK(j["extra"]["config"]["R"] == 2000);
  CHECK(j["extra"]["config"]["burn"] == 500);
  CHECK(j["extra"]["config"]["jump"] == 5);
  CHECK(j["extra"]["draws"] == 301);
  CHECK(run({"bayes", kSugarcaneFile, "--prior", "jeffreys", "--seed", "4321"}).out == r.out);

  const auto path = temp_path("chain.csv");
  REQUIRE(run({"bayes", kSugarcaneFile, "--dump-chain", path}).code == 0);
  std::ifstream f(path);
  std::string line;
  std::getline(f, line);
  CHECK(line == "draw,W,H");
  int rows = 0;
  while (std::getline(f, line)) ++rows;
  CHECK(rows == 301);

  const auto bad_prior = run({"bayes", kSugarcaneFile, "--prior", "flat"});
  CHECK(bad_prior.code == 2);
  CHECK(bad_prior.json()["error"]["kind"] == "usage");
  const auto bad_burn = run({"bayes", kSugarcaneFile, "--burn", "5000"});
  CHECK(bad_burn.code == 1);
  CHECK(bad_burn.json()["error"]["kind"] == "config");
}

TEST_CASE("gof command") {
  const auto r = run({"gof", kSugarcaneFile});
  REQUIRE(r.code == 0);
  CHECK(std::fabs(r.json()["D"].get<double>() - 0.12) < 0.03);

  Rng rng(55);
  std::string text;
  for (int i = 0; i < 20000; ++i) text += std::to_string(rng.gamma(0.87) / 0.0244) + "\n";
  const auto big = run({"gof"}, text);
  CHECK(big.json()["D"].get<double>() < 1.63 / std::sqrt(20000.0));

  const auto one = run({"gof"}, "3.5\n");
  CHECK(one.code == 1);
  CHECK(one.json()["error"]["kind"] == "size");
}

TEST_CASE("study configuration files") {
  std::ifstream f(kSource + "/configs/study_desk.cfg");
  std::stringstream buf;
  buf << f.rdbuf();
  const auto cfgs = cli::parse_study_config(buf.str(), 1);
  REQUIRE(cfgs.size() == 2);
  CHECK(cfgs[0].true_params.alpha == 4.0);
  CHECK(cfgs[0].true_params.beta == 2.0);
  CHECK(cfgs[1].true_params.alpha == 2.0);
  CHECK(cfgs[1].true_params.beta == 0.5);
  CHECK(cfgs[0].sample_sizes == std::vector<int>{20, 60, 120});
  CHECK(cfgs[0].replicates == 1000);
  CHECK(cfgs[0].estimators.size() == 5);
  CHECK(cfgs[0].mcmc.R == 5500);
  CHECK(cfgs[0].master_seed == 20210101);

  const auto defaults = cli::parse_study_config("alpha = 3\nbeta = 1 # rate\n", 99);
  CHECK(defaults[0].master_seed == 99);
  CHECK(defaults[0].init_at_truth);

  auto message_of = [](const std::string& text) {
    try {
      cli::parse_study_config(text, 1);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Config);
      return std::string(e.what());
    }
    FAIL("expected a configuration error");
    return std::string();
  };
  CHECK(message_of("alpha = 4\nbeta = 2\nreplicas = 10\n").find("replicas") != std::string::npos);
  CHECK(message_of("alpha = 4\nbeta = 2\nR = lots\n").find("'R'") != std::string::npos);
  CHECK(message_of("alpha = 4\n").find("beta") != std::string::npos);
  CHECK(message_of("alpha = 4, 2\nbeta = 2\n").find("beta") != std::string::npos);
  CHECK(message_of("alpha = 4\nbeta = 2\nsample_sizes = 3\n").find("sample_sizes") != std::string::npos);
  CHECK(message_of("alpha = 4\nbeta = 2\nestimators = mle, bootstrap\n").find("estimators") != std::string::npos);
  CHECK(message_of("alpha = 4\nbeta = 2\ninit = random\n").find("init") != std::string::npos);
  CHECK(message_of("alpha 4\n").find("line 1") != std::string::npos);
  CHECK(message_of("alpha = 4\nalpha = 5\nbeta = 1\n").find("duplicate") != std::string::npos);
}

TEST_CASE("simulate command") {
  const auto start = std::chrono::steady_clock::now();
  const auto smoke = run({"simulate", "--config", kSource + "/configs/smoke.cfg"});
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  REQUIRE(smoke.code == 0);
  CHECK(seconds < 5.0);
  CHECK(smoke.out.rfind("estimator,n,alpha,beta,true_H,bias,mse,cp,mean_width,failures\n", 0) == 0);
  CHECK(run({"simulate", "--config", kSource + "/configs/smoke.cfg", "--serial"}).out == smoke.out);

  const auto json = run({"simulate", "--config", kSource + "/configs/smoke.cfg", "--format", "json"});
  REQUIRE(json.code == 0);
  const auto rows = json.json()["rows"];
  CHECK(rows.size() == 5);
  CHECK(rows[0]["estimator"] == "mle");
  CHECK(rows[0]["n"] == 20);

  const auto out_path = temp_path("report.csv");
  const auto written = run({"simulate", "--config", kSource + "/configs/smoke.cfg", "--out", out_path});
  CHECK(written.code == 0);
  std::ifstream f(out_path);
  std::stringstream buf;
  buf << f.rdbuf();
  CHECK(buf.str() == smoke.out);

  const auto bad = write_temp("bad.cfg", "alpha = 4\nbeta = 2\nreplicates = many\n");
  const auto err = run({"simulate", "--config", bad});
  CHECK(err.code == 1);
  CHECK(err.json()["error"]["kind"] == "config");
  CHECK(err.json()["error"]["message"].get<std::string>().find("replicates") != std::string::npos);
  CHECK(run({"simulate", "--config", "/nonexistent.cfg"}).code == 1);
}

TEST_CASE("usage errors and help") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"entropy", "--alpha", "2"}).code == 2);
  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("simulate") != std::string::npos);
}
