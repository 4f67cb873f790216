#pragma once

// Field images (16-bit binary PGM) and RFC 4180 CSV tables.

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "pcsr/grid.hpp"

namespace pcsr {

struct GrayMapping {
  double vmin = 0.0;
  double vmax = 1.0;
};

/// Writes `path` as P5 with maxval 65535 (big-endian samples) using the affine
/// map vmin -> 0, vmax -> 65535, and `path` + ".txt" holding vmin and vmax.
/// With no mapping the field's own min/max are used (a constant field maps to 0).
GrayMapping write_pgm(const std::filesystem::path& path, const Field2D& f,
                      const GrayMapping* mapping = nullptr);

/// Reads a file written by write_pgm back to values using its sidecar.
std::vector<double> read_pgm_values(const std::filesystem::path& path, std::size_t* nx = nullptr,
                                    std::size_t* ny = nullptr);

/// Formats a double for CSV: "inf"/"-inf"/"nan" for non-finite values,
/// otherwise the shortest round-trip representation.
std::string csv_number(double v);
/// Quotes a field when it contains a comma, quote or line break.
std::string csv_escape(const std::string& s);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);
  /// Throws ArgumentError when the row width differs from the header.
  void row(const std::vector<std::string>& cells);
  std::size_t columns() const noexcept { return width_; }

 private:
  std::ostream& out_;
  std::size_t width_;
};

}  // namespace pcsr
