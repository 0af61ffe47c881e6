#include "ndig/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "ndig/error.hpp"

namespace ndig {

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "usage"; }
};

struct Context {
  const RunConfig& config;
  const CommandInputs& inputs;
  std::ostream& err;
  std::vector<std::string> written;

  std::string emit(const std::string& name, const std::string& body) {
    namespace fs = std::filesystem;
    fs::create_directories(inputs.output_dir);
    const std::string path = (fs::path(inputs.output_dir) / name).string();
    write_atomic(path, provenance_header(config) + "\n" + body);
    written.push_back(path);
    return path;
  }

  void warn(const std::string& msg) { err << "warning: " << msg << '\n'; }

  PriceSeries prices() {
    if (inputs.input.empty()) throw UsageError("missing --input price file");
    PriceLoad load = load_prices(inputs.input);
    for (const auto& w : load.warnings) warn(w);
    return std::move(load.series);
  }

  void require_window(const PriceSeries& prices) {
    if (config.window < 10) throw UsageError("window must be at least 10");
    if (prices.size() < config.window + 1) {
      throw DegenerateSeriesError("price series has " + std::to_string(prices.size()) + " rows, need at least " +
                                  std::to_string(config.window + 1) + " for one window of " +
                                  std::to_string(config.window) + " returns");
    }
  }

  // Checks that do not depend on fitted parameters, run before any fitting.
  void check_pricing_setup() {
    FFTGridConfig g = config.grid();
    if (g.n < 16 || (g.n & (g.n - 1)) != 0) throw UsageError("fft_n must be a power of two >= 16");
    if (!(g.dv > 0.0)) throw UsageError("fft_dv must be positive");
    if (!(g.damping > 0.0)) throw InfeasibleError("damping must be positive");
    bvix_strikes(1.0, config.bvix_config());
  }

  BvixSeriesConfig bvix_series_config() {
    BvixSeriesConfig b;
    b.bvix = config.bvix_config();
    b.default_rate = config.rate;
    if (!inputs.rate_file.empty()) b.rates = load_rates(inputs.rate_file);
    return b;
  }

  NormalizeMode normalize_mode() const {
    return config.normalize == "min" ? NormalizeMode::min_shift : NormalizeMode::z_score;
  }

  std::vector<double> surface_strikes() const {
    BvixConfig b = config.bvix_config();
    return bvix_strikes(config.spot, b);
  }
};

RollingFitSeries rollfit(Context& c, const PriceSeries& prices) {
  return rolling_fit(prices.log_returns(), c.config.rolling_config());
}

VolatilitySeries bvix_of(Context& c, const PriceSeries& prices, const RollingFitSeries& fits,
                         const BvixSeriesConfig& cfg) {
  VolatilitySeries s = bvix_from_fits(prices, fits, cfg);
  for (const auto& d : s.diagnostics) c.warn("bvix: " + d);
  return s;
}

void cmd_fit(Context& c) {
  const PriceSeries prices = c.prices();
  const ReturnSeries r = prices.log_returns();
  RollingFitSeries one;
  one.window_length = r.size();
  one.step = 1;
  one.window_end.push_back(r.size());
  if (!r.dates.empty()) one.end_dates.push_back(r.dates.back());
  one.fits.push_back(fit(r.returns, c.config.fit_config()));
  c.emit("fit.csv", fits_csv(one));
}

void cmd_rollfit(Context& c) {
  const PriceSeries prices = c.prices();
  c.require_window(prices);
  c.emit("fits.csv", fits_csv(rollfit(c, prices)));
}

void cmd_simulate(Context& c) {
  const RunConfig& cfg = c.config;
  if (cfg.paths == 0 || cfg.steps == 0 || !(cfg.dt > 0.0)) throw UsageError("paths, steps and dt must be positive");
  std::vector<double> times(cfg.steps + 1);
  for (std::size_t k = 0; k < times.size(); ++k) times[k] = cfg.dt * static_cast<double>(k);
  const PathSet paths = simulate_paths(cfg.params(), times, cfg.paths, cfg.x0, cfg.seed, cfg.threads);
  c.emit("paths.csv", paths_csv(paths));
}

void cmd_price(Context& c, bool surface) {
  const RunConfig& cfg = c.config;
  const NdigParams p = cfg.params();
  cfg.grid().validate(p);
  const std::vector<double> strikes = c.surface_strikes();
  const std::vector<double> maturities = surface ? cfg.maturities : std::vector<double>{cfg.maturity};
  const OptionChain chain = price_surface(p, cfg.spot, cfg.rate, strikes, maturities, cfg.grid());
  c.emit(surface ? "surface.csv" : "chain.csv", chain_csv(chain));
}

void cmd_bvix(Context& c) {
  const PriceSeries prices = c.prices();
  c.require_window(prices);
  c.check_pricing_setup();
  const BvixSeriesConfig cfg = c.bvix_series_config();
  c.emit("bvix.csv", volatility_csv(bvix_of(c, prices, rollfit(c, prices), cfg)));
}

void cmd_itvol(Context& c) {
  const PriceSeries prices = c.prices();
  c.require_window(prices);
  c.emit("itvol.csv", volatility_csv(ndig_it_series(rollfit(c, prices), c.config.annualization)));
}

void cmd_histvol(Context& c) {
  const PriceSeries prices = c.prices();
  c.require_window(prices);
  c.emit("histvol.csv", volatility_csv(rolling_std_vol(prices.log_returns(), c.config.window, c.config.annualization)));
}

void cmd_pipeline(Context& c) {
  const PriceSeries prices = c.prices();
  c.require_window(prices);
  c.check_pricing_setup();
  const BvixSeriesConfig bcfg = c.bvix_series_config();
  const RollingFitSeries fits = rollfit(c, prices);
  c.emit("fits.csv", fits_csv(fits));
  const VolatilitySeries hist = rolling_std_vol(prices.log_returns(), c.config.window, c.config.annualization);
  const VolatilitySeries bv = bvix_of(c, prices, fits, bcfg);
  const VolatilitySeries it = ndig_it_series(fits, c.config.annualization);
  const std::pair<const char*, const VolatilitySeries*> all[] = {{"histvol", &hist}, {"bvix", &bv}, {"itvol", &it}};
  for (const auto& [name, s] : all) c.emit(std::string(name) + ".csv", volatility_csv(*s));
  for (const auto& [name, s] : all) {
    c.emit(std::string(name) + "_normalized.csv", volatility_csv(normalize(*s, c.normalize_mode())));
  }
}

int exit_code_for(const Error& e) {
  const std::string_view k = e.kind();
  if (k == "usage" || k == "domain") return kExitUsage;
  if (k == "data" || k == "degenerate_series") return kExitData;
  if (k == "infeasible") return kExitInfeasible;
  if (k == "numerical") return kExitNumerical;
  return kExitInternal;
}

void report(std::ostream& err, std::string_view command, std::string_view kind, std::string_view message, int code) {
  nlohmann::json j;
  j["status"] = "error";
  j["command"] = command;
  j["kind"] = kind;
  j["message"] = message;
  j["exit_code"] = code;
  err << j.dump() << '\n';
}

}  // namespace

const std::vector<std::string_view>& command_names() {
  static const std::vector<std::string_view> names{"fit",    "rollfit", "simulate", "price",   "surface",
                                                   "bvix",   "itvol",   "histvol",  "pipeline"};
  return names;
}

int run_command(std::string_view name, const RunConfig& config, const CommandInputs& inputs, std::ostream& err,
                std::vector<std::string>* written) {
  static const std::vector<std::pair<std::string_view, std::function<void(Context&)>>> table{
      {"fit", cmd_fit},
      {"rollfit", cmd_rollfit},
      {"simulate", cmd_simulate},
      {"price", [](Context& c) { cmd_price(c, false); }},
      {"surface", [](Context& c) { cmd_price(c, true); }},
      {"bvix", cmd_bvix},
      {"itvol", cmd_itvol},
      {"histvol", cmd_histvol},
      {"pipeline", cmd_pipeline},
  };
  Context ctx{config, inputs, err, {}};
  try {
    const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == name; });
    if (it == table.end()) throw UsageError("unknown command '" + std::string(name) + "'");
    it->second(ctx);
  } catch (const Error& e) {
    const int code = exit_code_for(e);
    report(err, name, e.kind(), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    report(err, name, "internal", e.what(), kExitInternal);
    return kExitInternal;
  }
  if (written != nullptr) written->insert(written->end(), ctx.written.begin(), ctx.written.end());
  return kExitOk;
}

}  // namespace ndig
