#pragma once

// Command-line front end: generate, evaluate, superres, restart, analyze.

#include <iosfwd>
#include <string>
#include <string_view>

#include "pcsr/dataset.hpp"
#include "pcsr/integrators.hpp"
#include "pcsr/losses.hpp"

namespace pcsr {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,   // bad flags, malformed or invalid config
  kExitRuntime = 2,  // solver failure, missing or unreadable files
  kExitPartial = 3,  // some series failed, the rest were written
};

/// Generation config plus the evaluation settings, read from JSON. Keys:
///   problem          "allen_cahn" | "eriksson_johnson"   (allen_cahn)
///   boundary         "periodic" | "neumann" | "dirichlet" (per problem)
///   n_series         count                 (AC 40, EJ 20)
///   n_steps          count                 (AC 50, EJ 100)
///   t_final          time                  (AC 20, EJ 0.5)
///   coarse_n, fine_n grid sizes            (8, 64)
///   seed             master seed           (0)
///   ic_mode          "nested" | "independent" (nested)
///   ic_amplitude     AC noise amplitude    (0.1)
///   ranges           {epsilon, K, r, theta, reaction_ratio}: [lo, hi] pairs
///                    (AC epsilon [3e-3, 6e-3], EJ epsilon [1e-3, 1e-2],
///                     K [0.5, 2], r [0.5, 2], theta [0, pi/2],
///                     reaction_ratio [0.5, 0.6])
///   interface        "appendix" | "main_text" (appendix)
///   derivative_mode  "standard_fd" | "paper_kernel" (standard_fd)
///   output_dir       path                  ("dataset")
///   threads          count, 0 = all cores  (0)
///   scheme           "bdf2" | "cn" | "ee"  (bdf2)
///   weights          {w1, w2, w3, w4, w5}  (per problem)
struct RunConfig {
  DatasetConfig dataset;
  SchemeKind scheme = SchemeKind::BDF2;
  LossWeights weights;
};

/// Throws ConfigError naming the offending key, or with line and column for
/// malformed JSON.
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::string& path);

DerivativeMode derivative_mode_from_string(std::string_view s);
std::string_view to_string(DerivativeMode m);

/// Parses argv and dispatches to a subcommand. Returns an ExitCode.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pcsr
