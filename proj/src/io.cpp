#include "ndig/io.hpp"

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

#include "ndig/error.hpp"

#ifndef NDIG_VERSION
#define NDIG_VERSION "0.0.0"
#endif

namespace ndig {

std::string_view version() noexcept { return NDIG_VERSION; }

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

template <class Int>
bool parse_uint(std::string_view s, Int& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string where(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line) + ": ";
}

// Splits a two-column data row; returns false if the column count is wrong.
bool split2(std::string_view line, std::string_view& a, std::string_view& b) {
  const auto comma = line.find(',');
  if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) return false;
  a = trim(line.substr(0, comma));
  b = trim(line.substr(comma + 1));
  return true;
}

template <class Row>
void read_two_column(std::istream& in, std::string_view source, std::string_view expected_header, Row&& row) {
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != expected_header) {
        throw DataError(where(source, line_no) + "expected header '" + std::string(expected_header) + "', got '" +
                        std::string(line) + "'");
      }
      header_seen = true;
      continue;
    }
    std::string_view a, b;
    if (!split2(line, a, b)) throw DataError(where(source, line_no) + "expected two comma-separated fields");
    row(a, b, line_no);
  }
  if (!header_seen) throw DataError(std::string(source) + ": empty file, missing header");
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

}  // namespace

PriceLoad parse_prices(std::istream& in, std::string_view source) {
  PriceLoad out;
  read_two_column(in, source, "date,close", [&](std::string_view a, std::string_view b, std::size_t line) {
    Date d;
    try {
      d = parse_date(a);
    } catch (const DataError& e) {
      throw DataError(where(source, line) + e.what());
    }
    double close = 0.0;
    if (!parse_double(b, close) || !std::isfinite(close)) {
      throw DataError(where(source, line) + "cannot parse price '" + std::string(b) + "'");
    }
    if (!(close > 0.0)) throw DataError(where(source, line) + "price must be positive, got " + std::string(b));
    auto& s = out.series;
    if (!s.dates.empty()) {
      const Date prev = s.dates.back();
      if (d == prev) throw DataError(where(source, line) + "duplicate date " + format_date(d));
      if (d < prev) throw DataError(where(source, line) + "date " + format_date(d) + " is earlier than the previous row");
      const auto gap = (d - prev).count();
      if (gap > 1) {
        out.warnings.push_back(where(source, line) + "gap of " + std::to_string(gap - 1) + " day(s) after " +
                               format_date(prev));
      }
    }
    s.dates.push_back(d);
    s.closes.push_back(close);
  });
  return out;
}

PriceLoad load_prices(const std::string& path) {
  auto in = open_input(path);
  return parse_prices(in, path);
}

RateSeries parse_rates(std::istream& in, std::string_view source) {
  RateSeries out;
  read_two_column(in, source, "date,rate_annual", [&](std::string_view a, std::string_view b, std::size_t line) {
    Date d;
    try {
      d = parse_date(a);
    } catch (const DataError& e) {
      throw DataError(where(source, line) + e.what());
    }
    double r = 0.0;
    if (!parse_double(b, r) || !std::isfinite(r)) {
      throw DataError(where(source, line) + "cannot parse rate '" + std::string(b) + "'");
    }
    if (!out.dates.empty() && !(d > out.dates.back())) {
      throw DataError(where(source, line) + "dates must be strictly increasing");
    }
    out.dates.push_back(d);
    out.rates.push_back(r);
  });
  return out;
}

RateSeries load_rates(const std::string& path) {
  auto in = open_input(path);
  return parse_rates(in, path);
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

struct Field {
  std::string_view name;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw DataError("config: bad value '" + std::string(value) + "' for key '" + std::string(key) + "'");
}

template <class T>
Field uint_field(std::string_view name, T RunConfig::*member) {
  return {name,
          [name, member](RunConfig& c, std::string_view v) {
            T x{};
            if (!parse_uint(v, x)) bad_value(name, v);
            c.*member = x;
          },
          [member](const RunConfig& c) { return std::to_string(c.*member); }};
}

Field real_field(std::string_view name, double RunConfig::*member) {
  return {name,
          [name, member](RunConfig& c, std::string_view v) {
            double x = 0.0;
            if (!parse_double(v, x) || !std::isfinite(x)) bad_value(name, v);
            c.*member = x;
          },
          [member](const RunConfig& c) { return format_number(c.*member); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = [] {
    std::vector<Field> v{
        uint_field("window", &RunConfig::window),
        uint_field("step", &RunConfig::step),
        real_field("annualization", &RunConfig::annualization),
        real_field("damping", &RunConfig::damping),
        uint_field("fft_n", &RunConfig::fft_n),
        real_field("fft_dv", &RunConfig::fft_dv),
        real_field("strike_lo", &RunConfig::strike_lo),
        real_field("strike_hi", &RunConfig::strike_hi),
        uint_field("strike_count", &RunConfig::strike_count),
        real_field("quad_v_max", &RunConfig::quad_v_max),
        uint_field("quad_nodes", &RunConfig::quad_nodes),
        uint_field("seed", &RunConfig::seed),
        real_field("rate", &RunConfig::rate),
        uint_field("restarts", &RunConfig::restarts),
        uint_field("max_evaluations", &RunConfig::max_evaluations),
        uint_field("threads", &RunConfig::threads),
        real_field("mu3", &RunConfig::mu3),
        real_field("sigma3", &RunConfig::sigma3),
        real_field("rho", &RunConfig::rho),
        real_field("lambda_T", &RunConfig::lambda_T),
        real_field("lambda_U", &RunConfig::lambda_U),
        uint_field("paths", &RunConfig::paths),
        uint_field("steps", &RunConfig::steps),
        real_field("dt", &RunConfig::dt),
        real_field("x0", &RunConfig::x0),
        real_field("spot", &RunConfig::spot),
        real_field("maturity", &RunConfig::maturity),
    };
    v.push_back({"warm_start",
                 [](RunConfig& c, std::string_view s) {
                   s = trim(s);
                   if (s == "true" || s == "1") {
                     c.warm_start = true;
                   } else if (s == "false" || s == "0") {
                     c.warm_start = false;
                   } else {
                     bad_value("warm_start", s);
                   }
                 },
                 [](const RunConfig& c) { return std::string(c.warm_start ? "true" : "false"); }});
    v.push_back({"normalize",
                 [](RunConfig& c, std::string_view s) {
                   s = trim(s);
                   if (s != "zscore" && s != "min") bad_value("normalize", s);
                   c.normalize = std::string(s);
                 },
                 [](const RunConfig& c) { return c.normalize; }});
    v.push_back({"maturities",
                 [](RunConfig& c, std::string_view s) {
                   std::vector<double> out;
                   while (!s.empty()) {
                     const auto comma = s.find(',');
                     const std::string_view item = s.substr(0, comma);
                     double x = 0.0;
                     if (!parse_double(item, x) || !(x > 0.0)) bad_value("maturities", item);
                     out.push_back(x);
                     if (comma == std::string_view::npos) break;
                     s.remove_prefix(comma + 1);
                   }
                   if (out.empty()) bad_value("maturities", s);
                   c.maturities = std::move(out);
                 },
                 [](const RunConfig& c) {
                   std::string s;
                   for (std::size_t i = 0; i < c.maturities.size(); ++i) {
                     if (i) s += ',';
                     s += format_number(c.maturities[i]);
                   }
                   return s;
                 }});
    std::sort(v.begin(), v.end(), [](const Field& a, const Field& b) { return a.name < b.name; });
    return v;
  }();
  return f;
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
  key = trim(key);
  for (const Field& f : fields()) {
    if (f.name == key) {
      f.set(*this, trim(value));
      return;
    }
  }
  throw DataError("config: unknown key '" + std::string(key) + "'");
}

void RunConfig::apply_stream(std::istream& in, std::string_view source) {
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw DataError(where(source, line_no) + "expected key=value");
    try {
      set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const DataError& e) {
      throw DataError(where(source, line_no) + e.what());
    }
  }
}

void RunConfig::apply_file(const std::string& path) {
  auto in = open_input(path);
  apply_stream(in, path);
}

std::string RunConfig::canonical() const {
  std::string s;
  for (const Field& f : fields()) {
    s += f.name;
    s += '=';
    s += f.get(*this);
    s += '\n';
  }
  return s;
}

std::string RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const Field& f : fields()) {
    // Thread count never changes results, so it stays out of the hash.
    if (std::string_view(f.name) == "threads") continue;
    for (unsigned char c : std::string(f.name) + '=' + f.get(*this) + '\n') {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

NdigParams RunConfig::params() const { return {mu3, sigma3, rho, lambda_T, lambda_U}; }

FFTGridConfig RunConfig::grid() const {
  FFTGridConfig g;
  g.n = fft_n;
  g.dv = fft_dv;
  g.damping = damping;
  return g;
}

FitConfig RunConfig::fit_config() const {
  FitConfig f;
  f.restarts = restarts;
  f.max_evaluations = max_evaluations;
  f.seed = seed;
  f.quadrature.v_max = quad_v_max;
  f.quadrature.nodes = quad_nodes;
  return f;
}

RollingConfig RunConfig::rolling_config() const {
  RollingConfig r;
  r.window = window;
  r.step = step;
  r.warm_start = warm_start;
  r.threads = threads;
  r.fit = fit_config();
  return r;
}

BvixConfig RunConfig::bvix_config() const {
  BvixConfig b;
  b.strike_lo = strike_lo;
  b.strike_hi = strike_hi;
  b.strikes = strike_count;
  b.grid = grid();
  return b;
}

std::string provenance_header(const RunConfig& config) {
  return "# ndig " + std::string(version()) + " config_hash=" + config.hash() + " seed=" + std::to_string(config.seed);
}

void write_atomic(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw DataError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw DataError("cannot move output into place at '" + path + "': " + ec.message());
  }
}

std::string paths_csv(const PathSet& paths) {
  std::string s = "path_id,time,x\n";
  for (std::size_t i = 0; i < paths.n_paths; ++i) {
    for (std::size_t k = 0; k < paths.times.size(); ++k) {
      s += std::to_string(i);
      s += ',';
      s += format_number(paths.times[k]);
      s += ',';
      s += format_number(paths.at(i, k));
      s += '\n';
    }
  }
  return s;
}

std::string fits_csv(const RollingFitSeries& fits) {
  std::string s = "window_end,mu3,sigma3,rho,lambda_T,lambda_U,objective,converged\n";
  for (std::size_t i = 0; i < fits.size(); ++i) {
    const FitResult& f = fits.fits[i];
    s += fits.end_dates.empty() ? std::to_string(fits.window_end[i]) : format_date(fits.end_dates[i]);
    for (double x : {f.params.mu3(), f.params.sigma3(), f.params.rho(), f.params.lambda_T(), f.params.lambda_U(),
                     f.objective}) {
      s += ',';
      s += format_number(x);
    }
    s += f.converged ? ",true\n" : ",false\n";
  }
  return s;
}

std::string chain_csv(const OptionChain& chain) {
  std::string s = "maturity_years,strike,call,put,implied_vol,moneyness,bound_flag\n";
  for (std::size_t m = 0; m < chain.maturities.size(); ++m) {
    for (std::size_t k = 0; k < chain.strikes.size(); ++k) {
      const std::size_t i = chain.index(m, k);
      for (double x : {chain.maturities[m], chain.strikes[k], chain.calls[i], chain.puts[i], chain.implied_vols[i],
                       chain.moneyness(k)}) {
        s += format_number(x);
        s += ',';
      }
      s += std::to_string(chain.flags[i]);
      s += '\n';
    }
  }
  return s;
}

std::string volatility_csv(const VolatilitySeries& series) {
  std::string s = "date,kind,value_percent\n";
  const std::string kind(vol_kind_name(series.kind));
  for (std::size_t i = 0; i < series.size(); ++i) {
    s += i < series.dates.size() ? format_date(series.dates[i]) : std::to_string(i);
    s += ',';
    s += kind;
    s += ',';
    s += format_number(series.values[i]);
    s += '\n';
  }
  return s;
}

}  // namespace ndig
