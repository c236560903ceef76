#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace warpdirac {

using Json = nlohmann::json;

// Deterministic JSON text: keys sorted, two-space indentation, floating point
// values as "%.16e" (17 significant digits, lowercase exponent), non-finite
// values as the strings "inf", "-inf" and "nan". Ends with a newline.
std::string to_json_text(const Json& value);

// Formats a double the same way the JSON emitter does.
std::string format_double(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  [[nodiscard]] std::string text() const;  // LF line endings

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Writes to a temporary file in the same directory, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace warpdirac
