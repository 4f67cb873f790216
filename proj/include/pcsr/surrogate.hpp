#pragma once

// Restart experiment: rebuild a fine state from coarse frames, continue the
// fine solver from it and track the drift from a reference fine run.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "pcsr/solver.hpp"
#include "pcsr/sr_optim.hpp"

namespace pcsr {

enum class RestartMethod { Oracle, Bicubic, Variational };
std::string_view to_string(RestartMethod m);
RestartMethod restart_method_from_string(std::string_view s);

struct RestartOptions {
  std::size_t warmup_steps = 150;
  std::size_t n_continue = 100;
  std::vector<RestartMethod> methods{RestartMethod::Bicubic, RestartMethod::Variational};
  SrOptions sr;
  /// Number of frames up to the warmup step that are super-resolved in
  /// sequence, each using the previous upscaled frames as history. 0 means
  /// every frame from 2 on; 2 means only frames warmup-1 and warmup.
  std::size_t sr_rollout = 0;
  DerivativeMode mode = DerivativeMode::StandardFD;
};

/// Shrinks (warmup, n_continue) when a series has fewer than
/// warmup + n_continue + 1 frames: warmup becomes (n_frames - 1) / 2 and
/// n_continue takes the rest.
RestartOptions fit_restart_window(RestartOptions opts, std::size_t n_frames);

struct ErrorSnapshot {
  std::size_t k = 0;
  Field2D error;  // restarted minus reference
};

struct RestartReport {
  std::string method;
  std::vector<double> l2;    // entry k-1 is step k
  std::vector<double> linf;
  std::vector<ErrorSnapshot> snapshots;  // k in {10, 50, 100} that fit
};

/// L2 norm over the domain: sqrt(sum e^2 hx hy).
double domain_l2(const Field2D& e);

/// The restart state at warmup step w:
///   oracle       fine[w-1], fine[w]
///   bicubic      upsampled coarse[w-1], coarse[w]
///   variational  sequential SR of coarse frames up to w (see sr_rollout),
///                each using the two previous upscaled frames as history;
///                frames before the rollout window are bicubic.
/// Throws ArgumentError when the series are too short (w >= 3 and
/// w + n_continue frames needed).
std::vector<RestartReport> restart_experiment(const TimeSeries& coarse, const TimeSeries& fine,
                                              const RestartOptions& opts);

std::string restart_reports_to_json(const std::vector<RestartReport>& reports);
/// Throws ConfigError on malformed input.
std::vector<RestartReport> restart_reports_from_json(std::string_view text);

}  // namespace pcsr
