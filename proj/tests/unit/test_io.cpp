#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ndig/error.hpp"
#include "ndig/io.hpp"
#include "support.hpp"

using namespace ndig;
namespace t = ndig::testing;

namespace {

PriceLoad parse(const std::string& text) {
  std::istringstream in(text);
  return parse_prices(in, "prices.csv");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const DataError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("prices load into log-returns") {
  const PriceLoad p = parse("date,close\n2020-01-01,100\n2020-01-02,110\n");
  CHECK(p.warnings.empty());
  const ReturnSeries r = p.series.log_returns();
  REQUIRE(r.size() == 1);
  CHECK(r.returns[0] == doctest::Approx(std::log(1.1)).epsilon(1e-15));
  CHECK(r.dates[0] == parse_date("2020-01-02"));
}

TEST_CASE("comments and blank lines are skipped") {
  const PriceLoad p = parse("# source: test\ndate,close\n\n2020-01-01,1\n# note\n2020-01-02,2\n");
  CHECK(p.series.size() == 2);
}

TEST_CASE("malformed price files name the line") {
  CHECK(error_of("date,close\n2020-01-01,100\n2020-01-01,101\n").find("prices.csv:3") != std::string::npos);
  CHECK(error_of("date,close\n2020-01-01,100\n2020-01-01,101\n").find("duplicate") != std::string::npos);
  CHECK(error_of("date,close\n2020-01-01,0\n").find("prices.csv:2") != std::string::npos);
  CHECK(error_of("date,close\n2020-01-01,-3\n").find("positive") != std::string::npos);
  CHECK(error_of("date,close\n2020-01-02,1\n2020-01-01,1\n").find("earlier") != std::string::npos);
  CHECK(error_of("date,close\n2020-02-30,1\n").find("prices.csv:2") != std::string::npos);
  CHECK(error_of("date,close\n2020-01-01,abc\n").find("cannot parse") != std::string::npos);
  CHECK(error_of("day,price\n2020-01-01,1\n").find("header") != std::string::npos);
  CHECK(error_of("date,close\n2020-01-01,1,2\n").find("two") != std::string::npos);
  CHECK(error_of("").find("empty") != std::string::npos);
  CHECK_THROWS_AS(load_prices("/nonexistent/prices.csv"), DataError);
}

TEST_CASE("calendar gaps are reported, not filled") {
  const PriceLoad p = parse("date,close\n2020-01-01,1\n2020-01-05,1.1\n2020-01-06,1.2\n");
  REQUIRE(p.warnings.size() == 1);
  CHECK(p.warnings[0].find("gap of 3 day(s)") != std::string::npos);
  CHECK(p.series.size() == 3);
}

TEST_CASE("rates") {
  std::istringstream in("date,rate_annual\n2020-01-01,0.01\n2020-03-01,0.015\n");
  const RateSeries r = parse_rates(in);
  CHECK(r.rates.size() == 2);
  CHECK(*r.as_of(parse_date("2020-02-01")) == 0.01);
  std::istringstream bad("date,rate_annual\n2020-03-01,0.01\n2020-01-01,0.015\n");
  CHECK_THROWS_AS(parse_rates(bad), DataError);
}

TEST_CASE("run configuration") {
  RunConfig c;
  const std::string base = c.hash();
  CHECK(base.size() == 16);
  CHECK(RunConfig{}.hash() == base);
  c.set("window", "500");
  CHECK(c.window == 500);
  CHECK(c.hash() != base);
  c.set("window", "1008");
  CHECK(c.hash() == base);
  c.set("maturities", "0.1,0.5");
  CHECK(c.maturities == std::vector<double>{0.1, 0.5});
  c.set("warm_start", "false");
  CHECK_FALSE(c.warm_start);
  CHECK_THROWS_AS(c.set("no_such_key", "1"), DataError);
  CHECK_THROWS_AS(c.set("window", "ten"), DataError);
  CHECK_THROWS_AS(c.set("normalize", "rank"), DataError);

  std::istringstream file("# comment\nseed = 42\ndamping=0.3\n");
  RunConfig f;
  f.apply_stream(file, "run.cfg");
  CHECK(f.seed == 42);
  CHECK(f.damping == 0.3);
  std::istringstream broken("seed\n");
  CHECK_THROWS_AS(f.apply_stream(broken, "run.cfg"), DataError);

  // Canonical form round-trips through the parser.
  std::istringstream canon(f.canonical());
  RunConfig g;
  g.apply_stream(canon, "canonical");
  CHECK(g.hash() == f.hash());
  CHECK(g.canonical() == f.canonical());
}

TEST_CASE("derived configurations") {
  RunConfig c;
  c.set("rho", "0.001");
  CHECK(c.params().rho() == 0.001);
  CHECK(c.grid().n == 1024);
  CHECK(c.fit_config().seed == c.seed);
  CHECK(c.rolling_config().window == 1008);
  CHECK(c.bvix_config().strikes == 40);
}

TEST_CASE("provenance header") {
  RunConfig c;
  const std::string h = provenance_header(c);
  CHECK(h.rfind("# ndig ", 0) == 0);
  CHECK(h.find("config_hash=" + c.hash()) != std::string::npos);
  CHECK(h.find("seed=20240607") != std::string::npos);
}

TEST_CASE("atomic writes replace whole files") {
  const auto dir = t::scratch_dir("io_atomic");
  const auto path = (dir / "out.csv").string();
  write_atomic(path, "first\n");
  write_atomic(path, "second\n");
  CHECK(t::read_file(path) == "second\n");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  CHECK_THROWS_AS(write_atomic((dir / "missing" / "x.csv").string(), "x"), DataError);
}

TEST_CASE("number formatting round-trips") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125}) CHECK(std::stod(format_number(x)) == x);
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(INFINITY) == "inf");
}

TEST_CASE("CSV schemas") {
  VolatilitySeries v;
  v.kind = VolKind::ndig_it;
  v.dates = {parse_date("2020-01-02")};
  v.values = {55.5};
  CHECK(volatility_csv(v) == "date,kind,value_percent\n2020-01-02,NDIG_IT,55.5\n");

  RollingFitSeries f;
  f.window_end = {10};
  f.fits.push_back(FitResult{});
  CHECK(fits_csv(f).rfind("window_end,mu3,sigma3,rho,lambda_T,lambda_U,objective,converged\n10,0.0040000000000000001,", 0) == 0);

  OptionChain ch;
  ch.s0 = 100.0;
  ch.strikes = {100.0};
  ch.maturities = {0.5};
  ch.calls = {5.0};
  ch.puts = {4.0};
  ch.implied_vols = {0.25};
  ch.flags = {kPutFloored};
  CHECK(chain_csv(ch) == "maturity_years,strike,call,put,implied_vol,moneyness,bound_flag\n0.5,100,5,4,0.25,1,2\n");

  PathSet p = simulate_paths(NdigParams::reference(), std::vector<double>{0.0, 1.0}, 2, 0.0, 1);
  const std::string csv = paths_csv(p);
  CHECK(csv.rfind("path_id,time,x\n0,0,0\n0,1,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}

}  // TEST_SUITE
