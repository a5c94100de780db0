#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fvpkit/types.hpp"

namespace fvpkit {

/// 17 significant digits, '.' decimal separator.
std::string fmt_g17(double x);

/// Complex cell without commas: "re" when the imaginary part is 0, else
/// "re+imi" / "re-imi".
std::string fmt_complex(const Complex& z);

/// RFC-4180 writer: comma-separated, CRLF line endings, fields quoted only
/// when they contain a comma, quote, or line break.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);

  void write_row(const std::vector<std::string>& fields);

 private:
  std::ofstream out_;
};

}  // namespace fvpkit
