#include "pcsr/series_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "pcsr/errors.hpp"

namespace pcsr {
namespace {

constexpr std::uint16_t kFlagMainTextInterface = 1u << 0;

class Writer {
 public:
  void bytes(const char* p, std::size_t n) { out_.insert(out_.end(), p, p + n); }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void f32(float v) { le(std::bit_cast<std::uint32_t>(v), 4); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  std::vector<std::uint8_t> take() { return std::move(out_); }
  void reserve(std::size_t n) { out_.reserve(n); }

 private:
  void le(std::uint64_t v, int n) {
    for (int k = 0; k < n; ++k) out_.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return b_.size() - pos_; }
  std::uint64_t le(int n) {
    if (remaining() < static_cast<std::size_t>(n)) throw FormatError("truncated series header", b_.size());
    std::uint64_t v = 0;
    for (int k = 0; k < n; ++k) v |= static_cast<std::uint64_t>(b_[pos_ + k]) << (8 * k);
    pos_ += n;
    return v;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  double f64() { return std::bit_cast<double>(le(8)); }
  float f32() { return std::bit_cast<float>(static_cast<std::uint32_t>(le(4))); }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_series(const TimeSeries& ts) {
  if (ts.frames.empty()) throw ArgumentError("write_series: empty frame list");
  const GridSpec& g = ts.frames.front().grid();
  for (const Field2D& f : ts.frames) {
    if (!f.grid().same_shape(g)) throw ArgumentError("write_series: frames differ in shape");
  }
  Writer w;
  w.reserve(kSeriesHeaderSize + ts.frames.size() * g.size() * 4);
  w.bytes("PCRS", 4);
  w.u16(kSeriesFormatVersion);
  w.u16(ts.problem.interface == InterfaceVariant::MainText ? kFlagMainTextInterface : 0);
  w.u32(static_cast<std::uint32_t>(g.nx));
  w.u32(static_cast<std::uint32_t>(g.ny));
  w.u32(static_cast<std::uint32_t>(ts.frames.size()));
  w.f64(ts.tau);
  w.f64(ts.t0);
  w.u8(static_cast<std::uint8_t>(ts.problem.problem));
  w.u8(static_cast<std::uint8_t>(ts.problem.boundary));
  w.f64(ts.problem.epsilon);
  w.f64(ts.problem.K);
  w.f64(ts.problem.r);
  w.f64(ts.problem.theta);
  for (const Field2D& f : ts.frames)
    for (double v : f.values()) w.f32(static_cast<float>(v));
  return w.take();
}

TimeSeries decode_series(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "PCRS", 4) != 0) {
    throw FormatError("bad magic, expected PCRS", 0);
  }
  r.le(4);
  const std::uint16_t version = r.u16();
  if (version != kSeriesFormatVersion) {
    throw FormatError("unsupported series version " + std::to_string(version), 4);
  }
  const std::uint16_t flags = r.u16();
  if ((flags & ~kFlagMainTextInterface) != 0) throw FormatError("unknown flag bits", 6);
  const std::uint32_t nx = r.u32();
  const std::uint32_t ny = r.u32();
  if (nx < 3 || ny < 3) throw FormatError("grid smaller than 3x3", 8);
  const std::uint32_t n_frames = r.u32();
  if (n_frames == 0) throw FormatError("series has no frames", 16);
  TimeSeries ts;
  ts.tau = r.f64();
  ts.t0 = r.f64();
  const std::uint8_t problem = r.u8();
  if (problem > 1) throw FormatError("invalid problem id " + std::to_string(problem), 36);
  const std::uint8_t boundary = r.u8();
  if (boundary > 2) throw FormatError("invalid boundary id " + std::to_string(boundary), 37);
  ts.problem.problem = static_cast<ProblemKind>(problem);
  ts.problem.boundary = static_cast<BoundaryKind>(boundary);
  ts.problem.domain = default_domain(ts.problem.problem);
  ts.problem.interface =
      (flags & kFlagMainTextInterface) ? InterfaceVariant::MainText : InterfaceVariant::Appendix;
  ts.problem.epsilon = r.f64();
  ts.problem.K = r.f64();
  ts.problem.r = r.f64();
  ts.problem.theta = r.f64();

  const std::size_t per_frame = static_cast<std::size_t>(nx) * ny;
  const std::size_t expected = per_frame * n_frames * 4;
  if (r.remaining() < expected) throw FormatError("truncated frame payload", bytes.size());
  if (r.remaining() > expected) throw FormatError("trailing bytes after frames", kSeriesHeaderSize + expected);

  const GridSpec grid = canonical_grid(ts.problem.problem, ts.problem.domain, nx, ny);
  ts.frames.reserve(n_frames);
  for (std::uint32_t k = 0; k < n_frames; ++k) {
    std::vector<double> data(per_frame);
    for (std::size_t p = 0; p < per_frame; ++p) {
      const std::size_t at = r.pos();
      const float v = r.f32();
      if (!std::isfinite(v)) throw FormatError("non-finite sample", at);
      data[p] = v;
    }
    ts.frames.emplace_back(grid, std::move(data));
  }
  return ts;
}

void write_series(const std::filesystem::path& path, const TimeSeries& ts) {
  const std::vector<std::uint8_t> bytes = encode_series(ts);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArgumentError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ArgumentError("failed writing " + path.string());
}

TimeSeries read_series(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return decode_series(bytes);
}

Field2D quantize_f32(const Field2D& f) {
  Field2D out = f;
  for (double& v : out.values()) v = static_cast<double>(static_cast<float>(v));
  return out;
}

TimeSeries quantize_f32(const TimeSeries& ts) {
  TimeSeries out = ts;
  for (Field2D& f : out.frames) f = quantize_f32(f);
  return out;
}

}  // namespace pcsr
