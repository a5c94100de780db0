#include "fvpkit/csv.hpp"

#include <cstdio>

#include "fvpkit/errors.hpp"

namespace fvpkit {

std::string fmt_g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt_complex(const Complex& z) {
  if (z.imag() == 0.0) return fmt_g17(z.real());
  std::string s = fmt_g17(z.real());
  if (z.imag() >= 0.0 || std::isnan(z.imag())) s += "+";
  s += fmt_g17(z.imag());
  s += "i";
  return s;
}

CsvWriter::CsvWriter(const std::filesystem::path& path)
    : out_(path, std::ios::binary) {
  if (!out_) throw ValidationError("cannot open CSV file: " + path.string());
}

void CsvWriter::write_row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\r\n") != std::string::npos) {
      out_ << '"';
      for (char c : f) {
        if (c == '"') out_ << '"';
        out_ << c;
      }
      out_ << '"';
    } else {
      out_ << f;
    }
  }
  out_ << "\r\n";
}

}  // namespace fvpkit
