#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ndig/io.hpp"

namespace ndig {

struct CommandInputs {
  std::string input;       // price CSV
  std::string rate_file;   // optional rate CSV
  std::string output_dir = ".";
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitInfeasible = 4;
inline constexpr int kExitNumerical = 5;
inline constexpr int kExitInternal = 70;

const std::vector<std::string_view>& command_names();

/// Runs one of fit, rollfit, simulate, price, surface, bvix, itvol, histvol, pipeline.
/// Output files go to inputs.output_dir; warnings and, on failure, a one-line JSON
/// error report go to `err`. Returns the exit status; paths of the files written are
/// appended to `written` when given.
int run_command(std::string_view name, const RunConfig& config, const CommandInputs& inputs, std::ostream& err,
                std::vector<std::string>* written = nullptr);

}  // namespace ndig
