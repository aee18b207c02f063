#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace convtact::csv {

// Shortest text that parses back to the same double; "inf", "-inf", "nan".
std::string format_real(double v);
double parse_real(std::string_view text);
long long parse_int(std::string_view text);

std::vector<std::string> split(std::string_view line);

// Reads a comma-separated file whose first line must equal `header`.
// Blank lines are skipped. Throws FormatError on a header or field-count mismatch.
std::vector<std::vector<std::string>> read(const std::filesystem::path& path, std::string_view header);

}  // namespace convtact::csv
