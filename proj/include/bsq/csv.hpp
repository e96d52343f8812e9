#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace bsq {

/// 17 significant digits, '.' decimal point, "nan" for NaN.
std::string csv_number(double v);

/// Joins cells with ',' and terminates the row with LF.
std::string csv_row(const std::vector<std::string>& cells);

/// Writes through a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace bsq
