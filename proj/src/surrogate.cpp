#include "pcsr/surrogate.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <json.hpp>

#include "pcsr/errors.hpp"

namespace pcsr {
namespace {

using nlohmann::json;

constexpr std::size_t kSnapshotSteps[] = {10, 50, 100};

Field2D upsample_to(const Field2D& coarse, const GridSpec& fine, bool clamp) {
  Field2D u = bicubic_upsample(coarse, fine.nx / coarse.nx()).with_grid(fine);
  return clamp ? clamp_allen_cahn(std::move(u)) : u;
}

Field2D super_resolve(const Field2D& coarse, std::vector<Field2D> history, double tau, double t,
                      const ProblemSpec& problem, const SrOptions& opts) {
  SrInputs in{coarse, std::move(history), tau, t, problem};
  return variational_sr(in, opts).u_hr;
}

}  // namespace

std::string_view to_string(RestartMethod m) {
  switch (m) {
    case RestartMethod::Oracle: return "oracle";
    case RestartMethod::Bicubic: return "bicubic";
    case RestartMethod::Variational: return "variational";
  }
  return "unknown";
}

RestartMethod restart_method_from_string(std::string_view s) {
  if (s == "oracle") return RestartMethod::Oracle;
  if (s == "bicubic") return RestartMethod::Bicubic;
  if (s == "variational" || s == "variational_sr") return RestartMethod::Variational;
  throw ArgumentError("unknown restart method '" + std::string(s) + "'");
}

RestartOptions fit_restart_window(RestartOptions opts, std::size_t n_frames) {
  if (n_frames == 0) return opts;
  if (opts.warmup_steps + opts.n_continue + 1 > n_frames) {
    opts.warmup_steps = (n_frames - 1) / 2;
    opts.n_continue = n_frames - 1 - opts.warmup_steps;
  }
  return opts;
}

double domain_l2(const Field2D& e) {
  double acc = 0.0;
  for (double v : e.values()) acc += v * v;
  return std::sqrt(acc * e.grid().hx * e.grid().hy);
}

std::vector<RestartReport> restart_experiment(const TimeSeries& coarse, const TimeSeries& fine,
                                              const RestartOptions& opts) {
  const std::size_t w = opts.warmup_steps;
  if (w < 3) throw ArgumentError("restart needs warmup_steps >= 3");
  if (opts.n_continue == 0) throw ArgumentError("restart needs n_continue >= 1");
  if (coarse.frames.size() <= w) {
    throw ArgumentError("coarse series has " + std::to_string(coarse.frames.size()) +
                        " frames, warmup needs " + std::to_string(w + 1));
  }
  if (fine.frames.size() <= w + opts.n_continue) {
    throw ArgumentError("fine series has " + std::to_string(fine.frames.size()) +
                        " frames, restart needs " + std::to_string(w + opts.n_continue + 1));
  }
  if (coarse.tau != fine.tau) throw ArgumentError("coarse and fine series use different time steps");

  const ProblemSpec& problem = fine.problem;
  const GridSpec& fg = fine.grid();
  const bool ac = problem.problem == ProblemKind::AllenCahn;
  const double tau = fine.tau;

  std::vector<RestartReport> reports;
  for (RestartMethod method : opts.methods) {
    std::array<Field2D, 2> start;
    switch (method) {
      case RestartMethod::Oracle:
        start = {fine.frames[w - 1], fine.frames[w]};
        break;
      case RestartMethod::Bicubic:
        start = {upsample_to(coarse.frames[w - 1], fg, ac), upsample_to(coarse.frames[w], fg, ac)};
        break;
      case RestartMethod::Variational: {
        // Frames before the rollout window are bicubic; inside it every frame
        // is super-resolved with the two previous upscaled frames as history.
        const std::size_t first =
            opts.sr_rollout == 0 ? 2 : std::max<std::size_t>(2, w + 1 - std::min(opts.sr_rollout, w + 1));
        Field2D older = upsample_to(coarse.frames[first - 2], fg, ac);
        Field2D newer = upsample_to(coarse.frames[first - 1], fg, ac);
        for (std::size_t n = first; n <= w; ++n) {
          Field2D next = super_resolve(coarse.frames[n], {newer, older}, tau, fine.time(n), problem, opts.sr);
          older = std::move(newer);
          newer = std::move(next);
        }
        start = {std::move(older), std::move(newer)};
        break;
      }
    }
    const std::vector<Field2D> run =
        continue_run(problem, start, tau, fine.time(w), opts.n_continue, opts.mode);

    RestartReport rep;
    rep.method = std::string(to_string(method));
    for (std::size_t k = 1; k <= opts.n_continue; ++k) {
      const Field2D e = run[k - 1] - fine.frames[w + k].with_grid(fg);
      rep.l2.push_back(domain_l2(e));
      double m = 0.0;
      for (double v : e.values()) m = std::max(m, std::abs(v));
      rep.linf.push_back(m);
      if (std::find(std::begin(kSnapshotSteps), std::end(kSnapshotSteps), k) != std::end(kSnapshotSteps)) {
        rep.snapshots.push_back({k, e});
      }
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

std::string restart_reports_to_json(const std::vector<RestartReport>& reports) {
  json arr = json::array();
  for (const RestartReport& r : reports) {
    json snaps = json::array();
    for (const ErrorSnapshot& s : r.snapshots) {
      const GridSpec& g = s.error.grid();
      snaps.push_back({{"k", s.k},
                       {"grid", {{"nx", g.nx}, {"ny", g.ny}, {"hx", g.hx}, {"hy", g.hy}, {"x0", g.x0}, {"y0", g.y0}}},
                       {"values", std::vector<double>(s.error.values().begin(), s.error.values().end())}});
    }
    arr.push_back({{"method", r.method}, {"l2", r.l2}, {"linf", r.linf}, {"snapshots", std::move(snaps)}});
  }
  return arr.dump(1) + "\n";
}

std::vector<RestartReport> restart_reports_from_json(std::string_view text) {
  std::vector<RestartReport> out;
  try {
    const json arr = json::parse(text);
    for (const json& jr : arr) {
      RestartReport r;
      r.method = jr.at("method").get<std::string>();
      r.l2 = jr.at("l2").get<std::vector<double>>();
      r.linf = jr.at("linf").get<std::vector<double>>();
      if (r.l2.size() != r.linf.size()) throw ConfigError("restart report curves differ in length");
      for (const json& js : jr.at("snapshots")) {
        const json& jg = js.at("grid");
        GridSpec g{jg.at("nx").get<std::size_t>(), jg.at("ny").get<std::size_t>(), jg.at("hx").get<double>(),
                   jg.at("hy").get<double>(),      jg.at("x0").get<double>(),        jg.at("y0").get<double>()};
        r.snapshots.push_back({js.at("k").get<std::size_t>(), Field2D(g, js.at("values").get<std::vector<double>>())});
      }
      out.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed restart report: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("malformed restart report: ") + e.what());
  }
  return out;
}

}  // namespace pcsr
