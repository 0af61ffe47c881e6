// Batch command-line front end: ndig <command> [options].

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ndig/commands.hpp"
#include "ndig/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"NDIG model toolkit: fitting, simulation, option pricing and volatility indices"};
  app.set_version_flag("--version", std::string(ndig::version()));

  std::string command;
  std::string config_file;
  ndig::CommandInputs inputs;
  std::optional<std::size_t> window;
  std::optional<std::uint64_t> seed;
  std::optional<double> damping;
  std::optional<double> annualization;
  std::vector<std::string> overrides;

  std::string names;
  for (auto n : ndig::command_names()) names += (names.empty() ? "" : "|") + std::string(n);
  app.add_option("command", command, names)->required();
  app.add_option("--config", config_file, "flat key=value configuration file");
  app.add_option("--input", inputs.input, "price CSV with header date,close");
  app.add_option("--output-dir", inputs.output_dir, "directory for output CSV files");
  app.add_option("--window", window, "rolling window length in returns");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--damping", damping, "Carr-Madan damping factor");
  app.add_option("--annualization", annualization, "periods per year for volatility");
  app.add_option("--rate-file", inputs.rate_file, "rate CSV with header date,rate_annual");
  app.add_option("--set", overrides, "any configuration key as key=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : ndig::kExitUsage;
  }

  ndig::RunConfig config;
  try {
    if (!config_file.empty()) config.apply_file(config_file);
    if (window) config.window = *window;
    if (seed) config.seed = *seed;
    if (damping) config.damping = *damping;
    if (annualization) config.annualization = *annualization;
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ndig::DataError("--set expects key=value, got '" + kv + "'");
      config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
  } catch (const ndig::Error& e) {
    const nlohmann::json report{{"status", "error"}, {"command", "config"}, {"kind", e.kind()},
                                {"message", e.what()}, {"exit_code", ndig::kExitUsage}};
    std::cerr << report.dump() << '\n';
    return ndig::kExitUsage;
  }

  std::vector<std::string> written;
  const int code = ndig::run_command(command, config, inputs, std::cerr, &written);
  for (const auto& path : written) std::cout << path << '\n';
  return code;
}
