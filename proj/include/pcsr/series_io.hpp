#pragma once

// Binary time-series format (little endian):
//
//   offset  size  field
//   0       4     magic "PCRS"
//   4       2     u16 version (1)
//   6       2     u16 flags (bit 0: main-text interface constant)
//   8       4     u32 nx
//   12      4     u32 ny
//   16      4     u32 n_frames
//   20      8     f64 tau
//   28      8     f64 t0
//   36      1     u8 problem   (0 Allen-Cahn, 1 Eriksson-Johnson)
//   37      1     u8 boundary  (0 Dirichlet, 1 Neumann, 2 Periodic)
//   38      32    4 x f64 epsilon, K, r, theta
//   70      ...   n_frames * ny * nx f32, row-major, frame-major

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pcsr/solver.hpp"

namespace pcsr {

inline constexpr std::uint16_t kSeriesFormatVersion = 1;
inline constexpr std::size_t kSeriesHeaderSize = 70;

/// Throws ArgumentError for an empty frame list or frames on different grids.
std::vector<std::uint8_t> encode_series(const TimeSeries& ts);
/// Throws FormatError (with byte offset) on bad magic, version, ids, sizes or
/// non-finite samples.
TimeSeries decode_series(std::span<const std::uint8_t> bytes);

void write_series(const std::filesystem::path& path, const TimeSeries& ts);
TimeSeries read_series(const std::filesystem::path& path);

/// Rounds every value through float, i.e. what a write/read round trip yields.
Field2D quantize_f32(const Field2D& f);
TimeSeries quantize_f32(const TimeSeries& ts);

}  // namespace pcsr
