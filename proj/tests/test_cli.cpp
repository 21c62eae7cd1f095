#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = doomsday::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json header_of(const std::string& csv) {
  REQUIRE(csv.rfind("# ", 0) == 0);
  return json::parse(csv.substr(2, csv.find('\n') - 2));
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("doomsday_cli_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("urn: default fixtures give 5:1 odds") {
  const auto r = run({"urn"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 5);
  CHECK(ls[1] == "candidate,urns,balls,m_r,likelihood,posterior,posterior_value,odds,posterior_mc,mc_sigma");
  CHECK(ls[2].rfind("fig2_a,10,20,0,0,0,0,", 0) == 0);
  CHECK(ls[3].rfind("fig2_b,10,20,5,1/4,5/6,0.8333333333333334,5.0,", 0) == 0);
  CHECK(ls[4].rfind("fig2_c,10,20,1,1/20,1/6,0.16666666666666666,1.0,", 0) == 0);

  const auto exact = run({"urn", "--trials", "0"});
  REQUIRE(exact.code == 0);
  CHECK(lines(exact.out)[1] == "candidate,urns,balls,m_r,likelihood,posterior,posterior_value,odds");

  const auto j = json::parse(run({"urn", "--format", "json", "--trials", "1e5"}).out);
  CHECK(j["candidates"][1]["posterior"] == "5/6");
  CHECK(j["candidates"][1]["odds"].get<double>() == 5.0);
  CHECK(j["source_urn_posterior"]["11"] == "1/6");
}

TEST_CASE("urn: scan") {
  const auto r = run({"urn", "--scan", "--total", "1e6", "--rank", "20", "--mu-max", "40"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 42);
  CHECK(ls[1] == "mean_size,urns,likelihood,likelihood_value,relative");
  CHECK(ls[20] == "19,52632,0,0,0");
  CHECK(ls[21] == "20,50000,1/20,0.05,1");
  CHECK(ls[41].rfind("40,25000,1/40,0.025,0.5", 0) == 0);
}

TEST_CASE("urn: candidate files and data directory override") {
  const auto dir = scratch("urns");
  std::filesystem::create_directories(dir / "urns");
  for (const char* name : {"fig2_a.txt", "fig2_b.txt", "fig2_c.txt"}) std::ofstream(dir / "urns" / name) << "3\n";
  setenv("DOOMSDAY_DATA_DIR", dir.c_str(), 1);
  const auto r = run({"urn", "--trials", "0"});
  unsetenv("DOOMSDAY_DATA_DIR");
  REQUIRE(r.code == 0);
  CHECK(lines(r.out)[2].rfind("fig2_a,1,3,1,1/3,1/3,", 0) == 0);

  std::ofstream(dir / "one.txt") << "4\n1\n";
  const auto two = run({"urn", "--trials", "0", "--rank", "1", "--candidate", (dir / "one.txt").string(),
                        "--candidate", (dir / "urns" / "fig2_a.txt").string()});
  REQUIRE(two.code == 0);
  CHECK(lines(two.out)[2].rfind("one,2,5,2,2/5,6/11,", 0) == 0);

  const auto missing = run({"urn", "--candidate", (dir / "nope.txt").string()});
  CHECK(missing.code != 0);
  CHECK(json::parse(missing.err)["error"] == "IoError");
}

TEST_CASE("posterior command") {
  const auto n = run({"posterior", "--rank", "1e11", "--over", "N"});
  REQUIRE(n.code == 0);
  CHECK(header_of(n.out)["median"].get<double>() == 2e11 - 1);
  CHECK(header_of(n.out)["quantiles"].contains("0.05"));
  CHECK(header_of(n.out)["quantiles"].contains("0.95"));

  const auto b = run({"posterior", "--rank", "100", "--over", "B", "--cdf-at", "100"});
  REQUIRE(b.code == 0);
  CHECK(header_of(b.out)["cdf_at"][0]["cdf"].get<double>() == doctest::Approx(0.5).epsilon(1e-14));

  const auto one = run({"posterior", "--over", "N", "--rank", "1"});
  REQUIRE(one.code == 0);
  const auto ls = lines(one.out);
  CHECK(ls[1] == "N,density");
  CHECK(ls[2] == "0.5,2");

  const auto lu = run({"posterior", "--rank", "1e11", "--rank-prior", "log-uniform", "--format", "json"});
  REQUIRE(lu.code == 0);
  const auto j = json::parse(lu.out);
  CHECK(j["summary"]["normalization"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(j["N"].size() == j["density"].size());

  const auto bad = run({"posterior", "--rank", "0"});
  CHECK(bad.code == 1);
  CHECK(json::parse(bad.err)["error"] == "InvalidParameter");
}

TEST_CASE("forecast command") {
  const auto r = run({"forecast"});
  REQUIRE(r.code == 0);
  const auto h = header_of(r.out);
  const auto& m = h["milestones"];
  CHECK(m["p_2100"].get<double>() >= 0.11);
  CHECK(m["p_2100"].get<double>() <= 0.15);
  CHECK(m["odds_against"].get<double>() == doctest::Approx(7.0).epsilon(0.1));
  CHECK(m["fitted_hazard"].get<double>() >= 0.0012);
  CHECK(m["fitted_hazard"].get<double>() <= 0.0025);
  const auto ls = lines(r.out);
  CHECK(ls[1] == "year,p_doomsday,p_h0002,p_h00002,hazard_doomsday");
  CHECK(ls.size() == 2 + 1001);

  const auto one = run({"forecast", "--hazard", "0.002", "--until", "2020"});
  REQUIRE(one.code == 0);
  const auto ol = lines(one.out);
  CHECK(ol[1] == "year,p_doomsday,p_h0002,hazard_doomsday");
  CHECK(ol[3].rfind("2017,", 0) == 0);
  CHECK(ol[3].find(",0.002,") != std::string::npos);

  const auto exact = run({"forecast", "--rank-exact", "1e11"});
  REQUIRE(exact.code == 0);
  CHECK(header_of(exact.out)["milestones"]["median_year"].get<double>() == doctest::Approx(2730.0).epsilon(1e-3));

  const auto births = run({"forecast", "--axis", "births", "--births-points", "11"});
  REQUIRE(births.code == 0);
  const auto bl = lines(births.out);
  CHECK(bl[1] == "births,density_doomsday,cdf_doomsday,density_h0002,cdf_h0002,density_h00002,cdf_h00002");
  CHECK(bl.size() == 13);

  CHECK(run({"forecast", "--hazard", "1.5"}).code == 1);
}

TEST_CASE("fermi command") {
  const auto r = run({"fermi", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  REQUIRE(j["reports"].size() == 3);
  for (const auto& rep : j["reports"]) CHECK(rep["m_group"].get<double>() < 1e6);

  const auto p = json::parse(run({"fermi", "--model", "pareto", "--format", "json"}).out);
  CHECK(p["reports"][0]["spec"]["alpha"].get<double>() == doctest::Approx(1.048).epsilon(1e-3));

  const auto l = json::parse(
      run({"fermi", "--target-mi", "7e9", "--model", "lognormal", "--sigma", "3.7", "--format", "json"}).out);
  const double frac = l["reports"][0]["frac_exceeding"].get<double>();
  CHECK(frac > 5e-5);
  CHECK(frac < 5e-4);

  const auto dir = scratch("fermi");
  const auto w = run({"fermi", "--output-dir", (dir / "out").string(), "--points", "16"});
  REQUIRE(w.code == 0);
  for (const char* f : {"fermi_pareto.csv", "fermi_lognormal.csv", "fermi_bimodal.csv", "fermi_report.json"})
    CHECK(std::filesystem::exists(dir / "out" / f));
  std::ifstream curves(dir / "out" / "fermi_pareto.csv");
  std::string all((std::istreambuf_iterator<char>(curves)), {});
  CHECK(lines(all).size() == 18);

  CHECK(run({"fermi", "--model", "pareto", "--n-min", "1e10"}).code == 1);
}

TEST_CASE("medians command") {
  const auto r = run({"medians"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  CHECK(ls[2] == "groups,233");
  CHECK(ls[4] == "m_group,5429418");

  const auto j = json::parse(run({"medians", "--between", "5.4e6", "1.92e8", "--format", "json"}).out);
  CHECK(j["report"]["between"]["fraction"].get<double>() == doctest::Approx(0.48).epsilon(0.1));

  const auto dir = scratch("medians");
  std::ofstream(dir / "tiny.csv") << "name,population\na,1\nb,2\nc,3\nd,10\n";
  const auto t = json::parse(run({"medians", "--table", (dir / "tiny.csv").string(), "--format", "json"}).out);
  CHECK(t["report"]["medians"]["m_group"] == 2);
  CHECK(t["report"]["medians"]["m_individual"] == 10);
  CHECK(t["report"]["counts"]["between"] == 13);

  std::ofstream(dir / "bad.csv") << "name,population\na,1\nb,many\n";
  const auto bad = run({"medians", "--table", (dir / "bad.csv").string()});
  CHECK(bad.code == 1);
  CHECK(json::parse(bad.err)["error"] == "ParseError");
  CHECK(json::parse(bad.err)["message"].get<std::string>().find("line 3") != std::string::npos);
}

TEST_CASE("determinism, output files and usage errors") {
  CHECK(run({"urn", "--seed", "9"}).out == run({"urn", "--seed", "9"}).out);
  CHECK(run({"forecast"}).out == run({"forecast"}).out);
  CHECK(run({"urn", "--seed", "9"}).out != run({"urn", "--seed", "10"}).out);

  const auto dir = scratch("output");
  const auto file = dir / "posterior.csv";
  const auto r = run({"posterior", "--rank", "10", "--output", file.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(file);
  std::string first;
  std::getline(in, first);
  CHECK(json::parse(first.substr(2))["median"].get<double>() == 19.0);

  const auto none = run({});
  CHECK(none.code == 2);
  CHECK(json::parse(none.err)["error"] == "UsageError");
  CHECK(run({"posterior", "--over", "Q"}).code == 2);
  CHECK(run({"urn", "--no-such-flag"}).code == 2);
  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("forecast") != std::string::npos);
}
