#include "pcsr/image_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "pcsr/errors.hpp"

namespace pcsr {

GrayMapping write_pgm(const std::filesystem::path& path, const Field2D& f, const GrayMapping* mapping) {
  GrayMapping m;
  if (mapping) {
    m = *mapping;
  } else {
    const auto [lo, hi] = std::minmax_element(f.values().begin(), f.values().end());
    m = {*lo, *hi};
  }
  const double span = m.vmax - m.vmin;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArgumentError("cannot write " + path.string());
  out << "P5\n" << f.nx() << " " << f.ny() << "\n65535\n";
  for (double v : f.values()) {
    const double t = span > 0.0 ? (v - m.vmin) / span : 0.0;
    const auto g = static_cast<unsigned>(std::lround(std::clamp(t, 0.0, 1.0) * 65535.0));
    const char be[2] = {static_cast<char>(g >> 8), static_cast<char>(g & 0xff)};
    out.write(be, 2);
  }
  std::ofstream side(path.string() + ".txt", std::ios::trunc);
  side << "vmin " << csv_number(m.vmin) << "\nvmax " << csv_number(m.vmax) << "\n";
  return m;
}

std::vector<double> read_pgm_values(const std::filesystem::path& path, std::size_t* nx_out,
                                    std::size_t* ny_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path.string());
  std::string magic;
  std::size_t nx = 0, ny = 0, maxval = 0;
  in >> magic >> nx >> ny >> maxval;
  in.get();
  if (magic != "P5" || maxval != 65535) throw ArgumentError(path.string() + " is not a 16-bit P5 image");
  std::ifstream side(path.string() + ".txt");
  std::string key;
  double vmin = 0.0, vmax = 0.0;
  side >> key >> vmin >> key >> vmax;
  std::vector<double> vals(nx * ny);
  for (double& v : vals) {
    const int hi = in.get();
    const int lo = in.get();
    if (!in) throw ArgumentError(path.string() + " is truncated");
    v = vmin + (vmax - vmin) * static_cast<double>((hi << 8) | lo) / 65535.0;
  }
  if (nx_out) *nx_out = nx;
  if (ny_out) *ny_out = ny;
  return vals;
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header) : out_(out), width_(header.size()) {
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw ArgumentError("CSV row width does not match the header");
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) out_ << ',';
    out_ << csv_escape(cells[k]);
  }
  out_ << "\r\n";
}

}  // namespace pcsr
