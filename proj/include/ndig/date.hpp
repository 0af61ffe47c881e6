#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace ndig {

using Date = std::chrono::sys_days;

/// Parses YYYY-MM-DD; throws DataError on malformed or invalid dates.
Date parse_date(std::string_view text);
std::string format_date(Date d);

}  // namespace ndig
