#include <doctest.h>

#include <cstring>
#include <fstream>

#include "helpers.hpp"
#include "pcsr/errors.hpp"
#include "pcsr/series_io.hpp"
#include "pcsr/solver.hpp"

using namespace pcsr;
using namespace pcsr::test;

namespace {

TimeSeries sample_series(std::size_t frames = 3, ProblemSpec p = ac_problem()) {
  const GridSpec g = canonical_grid(p, 8, 6);
  TimeSeries ts{p, 0.25, 1.5, {}};
  for (std::size_t k = 0; k < frames; ++k) ts.frames.push_back(random_field(g, 100 + k, -0.9, 0.9));
  return ts;
}

std::size_t format_offset(const std::vector<std::uint8_t>& bytes) {
  try {
    decode_series(bytes);
  } catch (const FormatError& e) {
    return e.offset();
  }
  return static_cast<std::size_t>(-1);
}

}  // namespace

TEST_SUITE("series_io") {
  TEST_CASE("header layout") {
    const TimeSeries ts = sample_series();
    const auto b = encode_series(ts);
    CHECK(b.size() == kSeriesHeaderSize + 3 * 48 * 4);
    CHECK(std::memcmp(b.data(), "PCRS", 4) == 0);
    CHECK(b[4] == 1);
    CHECK(b[5] == 0);
    CHECK(b[8] == 8);
    CHECK(b[12] == 6);
    CHECK(b[16] == 3);
    double tau = 0;
    std::memcpy(&tau, b.data() + 20, 8);
    CHECK(tau == 0.25);
    CHECK(b[36] == 0);
    CHECK(b[37] == 2);
    double eps = 0;
    std::memcpy(&eps, b.data() + 38, 8);
    CHECK(eps == ts.problem.epsilon);
    float first = 0;
    std::memcpy(&first, b.data() + 70, 4);
    CHECK(first == static_cast<float>(ts.frames[0][0]));
  }

  TEST_CASE("round trip is exact after f32 quantisation") {
    for (const ProblemSpec& p : {ac_problem(), ac_problem(BoundaryKind::Neumann), ej_problem()}) {
      const TimeSeries ts = sample_series(4, p);
      const TimeSeries back = decode_series(encode_series(ts));
      const TimeSeries q = quantize_f32(ts);
      REQUIRE(back.frames.size() == 4);
      for (std::size_t k = 0; k < 4; ++k) CHECK(field_linf_diff(back.frames[k], q.frames[k]) == 0.0);
      CHECK(back.tau == ts.tau);
      CHECK(back.t0 == ts.t0);
      CHECK(back.problem.problem == p.problem);
      CHECK(back.problem.boundary == p.boundary);
      CHECK(back.problem.K == p.K);
      CHECK(back.problem.theta == p.theta);
      CHECK(back.grid() == ts.grid());
      CHECK(encode_series(back) == encode_series(ts));
    }
  }

  TEST_CASE("interface variant survives via the flag bit") {
    ProblemSpec p = ac_problem();
    p.interface = InterfaceVariant::MainText;
    const auto b = encode_series(sample_series(3, p));
    CHECK(b[6] == 1);
    CHECK(decode_series(b).problem.interface == InterfaceVariant::MainText);
  }

  TEST_CASE("file round trip") {
    const auto dir = scratch_dir("series_io");
    const TimeSeries ts = sample_series();
    write_series(dir / "a.pcrs", ts);
    const TimeSeries back = read_series(dir / "a.pcrs");
    for (std::size_t k = 0; k < 3; ++k) CHECK(field_linf_diff(back.frames[k], quantize_f32(ts.frames[k])) == 0.0);
    CHECK_THROWS_AS(read_series(dir / "missing.pcrs"), Error);
  }

  TEST_CASE("malformed input reports byte offsets") {
    const auto good = encode_series(sample_series());
    auto b = good;
    b[0] = 'X';
    CHECK(format_offset(b) == 0);
    b = good;
    b[4] = 2;
    CHECK(format_offset(b) == 4);
    b = good;
    b[6] = 4;
    CHECK(format_offset(b) == 6);
    b = good;
    b[8] = 2;
    CHECK(format_offset(b) == 8);
    b = good;
    b[16] = 0;
    CHECK(format_offset(b) == 16);
    b = good;
    b[36] = 7;
    CHECK(format_offset(b) == 36);
    b = good;
    b[37] = 3;
    CHECK(format_offset(b) == 37);
    b.assign(good.begin(), good.begin() + 40);
    CHECK(format_offset(b) == 40);
    b.assign(good.begin(), good.end() - 1);
    CHECK(format_offset(b) == good.size() - 1);
    b = good;
    b.push_back(0);
    CHECK(format_offset(b) == good.size());
    b = good;
    const float nan = std::numeric_limits<float>::quiet_NaN();
    std::memcpy(b.data() + 70 + 4 * 50, &nan, 4);
    CHECK(format_offset(b) == 70 + 4 * 50);
  }

  TEST_CASE("writer rejects invalid series") {
    TimeSeries empty{ac_problem(), 0.1, 0.0, {}};
    CHECK_THROWS_AS(encode_series(empty), ArgumentError);
    TimeSeries mixed = sample_series();
    mixed.frames.push_back(random_field(unit_grid(5), 1));
    CHECK_THROWS_AS(encode_series(mixed), ArgumentError);
  }
}
