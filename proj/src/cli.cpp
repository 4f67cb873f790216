#include "pcsr/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pcsr/errors.hpp"
#include "pcsr/image_io.hpp"
#include "pcsr/metrics.hpp"
#include "pcsr/parallel.hpp"
#include "pcsr/series_io.hpp"
#include "pcsr/sr_optim.hpp"
#include "pcsr/surrogate.hpp"

namespace pcsr {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

double get_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("key '" + key + "' must be a number");
  return v.get<double>();
}

std::uint64_t get_count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
    throw ConfigError("key '" + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("key '" + key + "' must be a string");
  return v.get<std::string>();
}

ParamRange get_range(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 2) throw ConfigError("key '" + key + "' must be a [lo, hi] pair");
  return {get_number(v[0], key), get_number(v[1], key)};
}

template <typename Fn>
auto config_value(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

unsigned resolve_threads(unsigned requested) {
  if (const char* env = std::getenv("PC_RESOLVE_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (*end != '\0') throw ConfigError("PC_RESOLVE_THREADS must be a non-negative integer");
    return static_cast<unsigned>(v);
  }
  return requested;
}

std::vector<const ManifestEntry*> select_entries(const DatasetManifest& m, const std::string& split,
                                                 std::optional<std::size_t> series) {
  std::vector<const ManifestEntry*> out;
  for (const ManifestEntry& e : m.entries) {
    if (e.split == "failed") continue;
    if (series && e.id != *series) continue;
    if (!series && split != "all" && e.split != split) continue;
    out.push_back(&e);
  }
  if (out.empty()) throw ArgumentError("no series selected (split '" + split + "')");
  return out;
}

Field2D bicubic_candidate(const Field2D& coarse, const GridSpec& fine, ProblemKind problem) {
  Field2D u = bicubic_upsample(coarse, fine.nx / coarse.nx()).with_grid(fine);
  return problem == ProblemKind::AllenCahn ? clamp_allen_cahn(std::move(u)) : u;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw ArgumentError("cannot write " + p.string());
  return f;
}

// ---- generate -------------------------------------------------------------

struct GenerateArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  unsigned threads = 0;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig rc = load_run_config(a.config);
  if (a.seed) rc.dataset.seed = *a.seed;
  if (a.output) rc.dataset.output_dir = *a.output;
  rc.dataset.threads = resolve_threads(a.threads ? a.threads : rc.dataset.threads);
  const DatasetManifest m = generate_dataset(rc.dataset);
  std::size_t failed = 0;
  for (const ManifestEntry& e : m.entries) {
    if (e.split == "failed") {
      ++failed;
      err << "series " << e.id << " failed\n";
    }
  }
  const std::size_t ok = m.entries.size() - failed;
  out << "generated " << ok << " of " << m.entries.size() << " series, " << ok * (rc.dataset.n_steps + 1)
      << " frames per resolution, in " << rc.dataset.output_dir.string() << "\n";
  if (failed == 0) return kExitOk;
  return ok == 0 ? kExitRuntime : kExitPartial;
}

// ---- evaluate -------------------------------------------------------------

struct EvaluateArgs {
  std::string manifest;
  std::string split = "test";
  std::string scheme = "bdf2";
  std::string mode = "standard_fd";
  std::string candidate = "gt";
  std::optional<double> w1, w4, w5;
  double range = 2.0;
  std::string output = "evaluate.csv";
  unsigned threads = 0;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream&) {
  const SchemeSpec scheme = config_value([&] { return scheme_spec(scheme_from_string(a.scheme)); });
  const DerivativeMode mode = derivative_mode_from_string(a.mode);
  if (a.candidate != "gt" && a.candidate != "bicubic") throw ConfigError("candidate must be gt or bicubic");
  const DynamicRange range{a.range};
  config_value([&] { range.validate(); return 0; });
  const DatasetManifest m = read_manifest(a.manifest);
  LossWeights w = LossWeights::defaults_for(m.problem);
  if (a.w1) w.w1 = *a.w1;
  if (a.w4) w.w4 = *a.w4;
  if (a.w5) w.w5 = *a.w5;
  config_value([&] { w.validate(); return 0; });
  const auto entries = select_entries(m, a.split, std::nullopt);

  std::vector<std::vector<std::vector<double>>> rows(entries.size());
  parallel_for(entries.size(), resolve_threads(a.threads), [&](std::size_t k) {
    const ManifestEntry& e = *entries[k];
    const TimeSeries fine = read_series(m.fine_path(e));
    std::optional<TimeSeries> coarse;
    if (a.candidate == "bicubic") coarse = read_series(m.coarse_path(e));
    const GridSpec& g = fine.grid();
    for (std::size_t n = scheme.steps; n < fine.frames.size(); ++n) {
      const Field2D& gt = fine.frames[n];
      const Field2D cand = coarse ? bicubic_candidate(coarse->frames[n], g, m.problem) : gt;
      const std::vector<Field2D> hist{fine.frames[n - 1], n >= 2 ? fine.frames[n - 2] : fine.frames[n - 1]};
      const LossReport lr = composite_loss(cand, gt, hist, fine.tau, fine.problem, scheme, w, mode);
      const MetricReport mr = evaluate_metrics(gt, cand, range, mode, fine.problem.boundary);
      rows[k].push_back({static_cast<double>(e.id), static_cast<double>(n), lr.pixel, lr.inner, lr.boundary,
                         lr.composite, mr.mse, mr.psnr_db, mr.ssim, mr.msge, mr.gsnr_db});
    }
  });

  std::ofstream file;
  std::ostream* os = &out;
  if (a.output != "-") {
    file = open_out(a.output);
    os = &file;
  }
  CsvWriter csv(*os, {"series_id", "frame", "pixel", "inner", "boundary", "composite", "mse", "psnr",
                      "ssim", "msge", "gsnr"});
  std::vector<double> sum(11, 0.0);
  std::size_t count = 0;
  for (const auto& block : rows) {
    for (const auto& r : block) {
      std::vector<std::string> cells{std::to_string(static_cast<std::size_t>(r[0])),
                                     std::to_string(static_cast<std::size_t>(r[1]))};
      for (std::size_t c = 2; c < r.size(); ++c) {
        cells.push_back(csv_number(r[c]));
        sum[c] += r[c];
      }
      csv.row(cells);
      ++count;
    }
  }
  std::vector<std::string> agg{"aggregate", std::to_string(count)};
  for (std::size_t c = 2; c < sum.size(); ++c) agg.push_back(csv_number(sum[c] / static_cast<double>(count)));
  csv.row(agg);
  if (a.output != "-") {
    out << "evaluated " << count << " frames from " << entries.size() << " series; mean inner "
        << csv_number(sum[3] / static_cast<double>(count)) << " -> " << a.output << "\n";
  }
  return kExitOk;
}

// ---- superres -------------------------------------------------------------

struct SuperresArgs {
  std::string manifest;
  std::string split = "test";
  std::optional<std::size_t> series;
  std::optional<std::size_t> frame;
  std::size_t max_frames = 0;
  std::string output = "superres";
  int iters = 2000;
  double lr = 1e-2;
  double lambda_data = 1.0;
  std::optional<double> w4, w5;
  std::string scheme = "bdf2";
  std::string mode = "standard_fd";
  double range = 2.0;
  unsigned threads = 0;
};

SrOptions sr_options(ProblemKind problem, int iters, double lr, double lambda, std::optional<double> w4,
                     std::optional<double> w5, const std::string& scheme, const std::string& mode) {
  SrOptions o = SrOptions::defaults_for(problem);
  o.max_iters = iters;
  o.learning_rate = lr;
  o.lambda_data = lambda;
  if (w4) o.weights.w4 = *w4;
  if (w5) o.weights.w5 = *w5;
  o.scheme = config_value([&] { return scheme_spec(scheme_from_string(scheme)); });
  o.mode = derivative_mode_from_string(mode);
  config_value([&] { o.validate(); return 0; });
  return o;
}

int cmd_superres(const SuperresArgs& a, std::ostream& out, std::ostream&) {
  const DatasetManifest m = read_manifest(a.manifest);
  const SrOptions opts = sr_options(m.problem, a.iters, a.lr, a.lambda_data, a.w4, a.w5, a.scheme, a.mode);
  const DynamicRange range{a.range};
  config_value([&] { range.validate(); return 0; });
  const auto entries = select_entries(m, a.split, a.series);

  struct Job {
    const ManifestEntry* entry;
    std::size_t frame;
  };
  std::vector<Job> jobs;
  for (const ManifestEntry* e : entries) {
    const std::size_t first = std::max<std::size_t>(opts.scheme.steps, 2);
    if (a.frame) {
      if (*a.frame < first || *a.frame >= e->n_frames) {
        throw ConfigError("frame " + std::to_string(*a.frame) + " needs two previous frames and must exist");
      }
      jobs.push_back({e, *a.frame});
      continue;
    }
    for (std::size_t n = first; n < e->n_frames; ++n) jobs.push_back({e, n});
  }
  if (a.max_frames > 0 && jobs.size() > a.max_frames) {
    // Evenly spaced subset, deterministic.
    std::vector<Job> picked;
    for (std::size_t k = 0; k < a.max_frames; ++k) picked.push_back(jobs[k * jobs.size() / a.max_frames]);
    jobs = std::move(picked);
  }

  fs::create_directories(a.output);
  std::vector<std::vector<std::string>> rows(jobs.size());
  parallel_for(jobs.size(), resolve_threads(a.threads), [&](std::size_t k) {
    const Job& j = jobs[k];
    const TimeSeries fine = read_series(m.fine_path(*j.entry));
    const TimeSeries coarse = read_series(m.coarse_path(*j.entry));
    const std::size_t n = j.frame;
    SrInputs in{coarse.frames[n], {fine.frames[n - 1], fine.frames[n - 2]}, fine.tau, fine.time(n), fine.problem};
    const SrResult res = variational_sr(in, opts);
    const Field2D& gt = fine.frames[n];
    const Field2D bic = bicubic_candidate(coarse.frames[n], gt.grid(), m.problem);
    const MetricReport ms = evaluate_metrics(gt, res.u_hr, range, opts.mode, fine.problem.boundary);
    const MetricReport mb = evaluate_metrics(gt, bic, range, opts.mode, fine.problem.boundary);
    char name[64];
    std::snprintf(name, sizeof name, "sr_%04zu_%04zu.pgm", j.entry->id, n);
    write_pgm(fs::path(a.output) / name, res.u_hr);
    rows[k] = {std::to_string(j.entry->id), std::to_string(n), csv_number(ms.mse), csv_number(ms.psnr_db),
               csv_number(ms.ssim), csv_number(ms.msge), csv_number(ms.gsnr_db), csv_number(mb.mse),
               csv_number(mb.psnr_db), csv_number(mb.ssim), csv_number(mb.msge), csv_number(mb.gsnr_db),
               std::to_string(res.iters_used), res.converged ? "1" : "0",
               csv_number(res.objective_trace.back())};
  });
  std::ofstream f = open_out(fs::path(a.output) / "superres.csv");
  CsvWriter csv(f, {"series_id", "frame", "mse", "psnr", "ssim", "msge", "gsnr", "bicubic_mse",
                    "bicubic_psnr", "bicubic_ssim", "bicubic_msge", "bicubic_gsnr", "iterations",
                    "converged", "objective"});
  for (const auto& r : rows) csv.row(r);
  out << "super-resolved " << jobs.size() << " frames -> " << a.output << "\n";
  return kExitOk;
}

// ---- restart --------------------------------------------------------------

struct RestartArgs {
  std::string manifest;
  std::size_t entry = 0;
  std::size_t warmup = 150;
  std::size_t n_continue = 100;
  std::string methods = "bicubic,variational";
  std::size_t rollout = 0;
  int iters = 2000;
  double lr = 1e-2;
  std::optional<double> w4, w5;
  std::string output = "restart";
};

bool same_frames(const TimeSeries& a, const TimeSeries& b) {
  if (a.frames.size() != b.frames.size()) return false;
  for (std::size_t k = 0; k < a.frames.size(); ++k) {
    if (field_linf_diff(a.frames[k], b.frames[k]) != 0.0) return false;
  }
  return true;
}

// Double-precision copy of a stored pair, rebuilt from generation.json. Only
// used when its f32 quantisation matches the files bit for bit.
std::optional<SeriesPair> regenerate_pair(const DatasetManifest& m, const ManifestEntry& e,
                                          const TimeSeries& coarse, const TimeSeries& fine) {
  std::ifstream in(m.root / "generation.json", std::ios::binary);
  if (!in) return std::nullopt;
  try {
    json j = json::parse(in);
    j.erase("tau");
    j.erase("failed");
    SeriesPair p = generate_series_pair(parse_run_config(j.dump()).dataset, e.id);
    if (!same_frames(quantize_f32(p.fine), fine) || !same_frames(quantize_f32(p.coarse), coarse)) {
      return std::nullopt;
    }
    return p;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

int cmd_restart(const RestartArgs& a, std::ostream& out, std::ostream&) {
  const DatasetManifest m = read_manifest(a.manifest);
  const ManifestEntry& e = config_value([&]() -> const ManifestEntry& { return m.entry(a.entry); });
  if (e.split == "failed") throw ArgumentError("series " + std::to_string(e.id) + " failed during generation");
  RestartOptions ro;
  ro.warmup_steps = a.warmup;
  ro.n_continue = a.n_continue;
  ro.sr_rollout = a.rollout;
  ro.sr = sr_options(m.problem, a.iters, a.lr, 1.0, a.w4, a.w5, "bdf2", "standard_fd");
  ro.methods.clear();
  std::stringstream ss(a.methods);
  for (std::string tok; std::getline(ss, tok, ',');) {
    ro.methods.push_back(config_value([&] { return restart_method_from_string(tok); }));
  }
  if (ro.methods.empty()) throw ConfigError("no restart methods given");

  TimeSeries fine = read_series(m.fine_path(e));
  TimeSeries coarse = read_series(m.coarse_path(e));
  if (auto pair = regenerate_pair(m, e, coarse, fine)) {
    fine = std::move(pair->fine);
    coarse = std::move(pair->coarse);
    out << "reference series regenerated in double precision\n";
  }
  ro = fit_restart_window(ro, std::min(fine.frames.size(), coarse.frames.size()));
  const auto reports = restart_experiment(coarse, fine, ro);

  fs::create_directories(a.output);
  const fs::path dir(a.output);
  std::ofstream f = open_out(dir / "restart.csv");
  CsvWriter csv(f, {"step", "method", "l2", "linf"});
  for (const RestartReport& r : reports) {
    for (std::size_t k = 0; k < r.l2.size(); ++k) {
      csv.row({std::to_string(k + 1), r.method, csv_number(r.l2[k]), csv_number(r.linf[k])});
    }
    for (const ErrorSnapshot& s : r.snapshots) {
      write_pgm(dir / ("error_" + r.method + "_k" + std::to_string(s.k) + ".pgm"), s.error);
    }
  }
  open_out(dir / "restart.json") << restart_reports_to_json(reports);
  out << "restart of series " << e.id << " at step " << ro.warmup_steps << ", " << ro.n_continue
      << " steps\n";
  for (const RestartReport& r : reports) {
    out << "  " << r.method << ": final l2 " << csv_number(r.l2.back()) << ", linf "
        << csv_number(r.linf.back()) << "\n";
  }
  return kExitOk;
}

// ---- analyze --------------------------------------------------------------

struct AnalyzeArgs {
  std::string scheme = "all";
  double delta = -1.0;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream&) {
  std::vector<SchemeKind> kinds;
  if (a.scheme == "all") {
    kinds = {SchemeKind::BDF2, SchemeKind::CN, SchemeKind::EE};
  } else {
    kinds.push_back(config_value([&] { return scheme_from_string(a.scheme); }));
  }
  CsvWriter csv(out, {"scheme", "tau", "defect"});
  std::vector<std::pair<SchemeKind, double>> slopes;
  for (SchemeKind k : kinds) {
    const OrderFit fit = consistency_fit(scheme_spec(k), a.delta);
    for (std::size_t i = 0; i < fit.taus.size(); ++i) {
      csv.row({std::string(to_string(k)), csv_number(fit.taus[i]), csv_number(fit.defects[i])});
    }
    slopes.emplace_back(k, fit.slope);
  }
  for (const auto& [k, s] : slopes) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s slope %.4f\n", std::string(to_string(k)).c_str(), s);
    out << buf;
  }
  return kExitOk;
}

}  // namespace

DerivativeMode derivative_mode_from_string(std::string_view s) {
  if (s == "standard_fd") return DerivativeMode::StandardFD;
  if (s == "paper_kernel") return DerivativeMode::PaperKernel;
  throw ConfigError("unknown derivative mode '" + std::string(s) + "'");
}

std::string_view to_string(DerivativeMode m) {
  return m == DerivativeMode::StandardFD ? "standard_fd" : "paper_kernel";
}

RunConfig parse_run_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string what = e.what();
    if (const auto p = what.find("syntax error"); p != std::string::npos) what = what.substr(p);
    throw ConfigError("malformed JSON at " + line_col(text, e.byte) + ": " + what);
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  ProblemKind problem = ProblemKind::AllenCahn;
  if (j.contains("problem")) {
    problem = config_value([&] { return problem_from_string(get_string(j["problem"], "problem")); });
  }
  RunConfig rc;
  rc.dataset = DatasetConfig::defaults_for(problem);
  rc.weights = LossWeights::defaults_for(problem);
  DatasetConfig& d = rc.dataset;

  for (const auto& [key, v] : j.items()) {
    if (key == "problem") {
      continue;
    } else if (key == "boundary") {
      d.boundary = config_value([&] { return boundary_from_string(get_string(v, key)); });
    } else if (key == "n_series") {
      d.n_series = get_count(v, key);
    } else if (key == "n_steps") {
      d.n_steps = get_count(v, key);
    } else if (key == "t_final") {
      d.t_final = get_number(v, key);
    } else if (key == "coarse_n") {
      d.coarse_n = get_count(v, key);
    } else if (key == "fine_n") {
      d.fine_n = get_count(v, key);
    } else if (key == "seed") {
      d.seed = get_count(v, key);
    } else if (key == "ic_mode") {
      d.ic_mode = ic_mode_from_string(get_string(v, key));
    } else if (key == "ic_amplitude") {
      d.ic_amplitude = get_number(v, key);
    } else if (key == "ranges") {
      if (!v.is_object()) throw ConfigError("key 'ranges' must be an object");
      for (const auto& [rk, rv] : v.items()) {
        const std::string name = "ranges." + rk;
        if (rk == "epsilon") d.epsilon = get_range(rv, name);
        else if (rk == "K") d.K = get_range(rv, name);
        else if (rk == "r") d.r = get_range(rv, name);
        else if (rk == "theta") d.theta = get_range(rv, name);
        else if (rk == "reaction_ratio") d.reaction_ratio = get_range(rv, name);
        else throw ConfigError("unknown key '" + name + "'");
      }
    } else if (key == "interface") {
      const std::string s = get_string(v, key);
      if (s == "appendix") d.interface = InterfaceVariant::Appendix;
      else if (s == "main_text") d.interface = InterfaceVariant::MainText;
      else throw ConfigError("unknown interface '" + s + "'");
    } else if (key == "derivative_mode") {
      d.mode = derivative_mode_from_string(get_string(v, key));
    } else if (key == "output_dir") {
      d.output_dir = get_string(v, key);
    } else if (key == "threads") {
      d.threads = static_cast<unsigned>(get_count(v, key));
    } else if (key == "scheme") {
      rc.scheme = config_value([&] { return scheme_from_string(get_string(v, key)); });
    } else if (key == "weights") {
      if (!v.is_object()) throw ConfigError("key 'weights' must be an object");
      for (const auto& [wk, wv] : v.items()) {
        const std::string name = "weights." + wk;
        double* slot = wk == "w1" ? &rc.weights.w1
                     : wk == "w2" ? &rc.weights.w2
                     : wk == "w3" ? &rc.weights.w3
                     : wk == "w4" ? &rc.weights.w4
                     : wk == "w5" ? &rc.weights.w5
                                  : nullptr;
        if (!slot) throw ConfigError("unknown key '" + name + "'");
        *slot = get_number(wv, name);
      }
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  d.validate();
  config_value([&] { rc.weights.validate(); return 0; });
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_run_config(text);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Physics-consistent super-resolution toolkit"};
  app.name("pcsr");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Generate a paired coarse/fine dataset from a JSON config");
  gen->add_option("--config", ga.config, "JSON config file")->required();
  gen->add_option("--seed", ga.seed, "Override the master seed (default: config seed)");
  gen->add_option("--output", ga.output, "Override the output directory (default: config output_dir)");
  gen->add_option("--threads", ga.threads, "Worker threads, 0 = config value or all cores; PC_RESOLVE_THREADS overrides");

  EvaluateArgs ea;
  auto* ev = app.add_subcommand("evaluate", "Per-frame losses and metrics over a dataset split");
  ev->add_option("--manifest", ea.manifest, "Dataset manifest")->required();
  ev->add_option("--split", ea.split, "train | val | test | all");
  ev->add_option("--scheme", ea.scheme, "bdf2 | cn | ee");
  ev->add_option("--mode", ea.mode, "standard_fd | paper_kernel");
  ev->add_option("--candidate", ea.candidate, "Field scored against the fine frame: gt | bicubic");
  ev->add_option("--w1", ea.w1, "Pixel weight (default: problem default, 1)");
  ev->add_option("--w4", ea.w4, "Physics inner weight (default: AC 1e-8, EJ 1e-2)");
  ev->add_option("--w5", ea.w5, "Physics boundary weight (default: AC 5, EJ 100)");
  ev->add_option("--range", ea.range, "Dynamic range for PSNR, SSIM and GSNR");
  ev->add_option("--output", ea.output, "CSV path, - for stdout");
  ev->add_option("--threads", ea.threads, "Worker threads, 0 = all cores; PC_RESOLVE_THREADS overrides");

  SuperresArgs sa;
  auto* sr = app.add_subcommand("superres", "Variational super-resolution of dataset frames");
  sr->add_option("--manifest", sa.manifest, "Dataset manifest")->required();
  sr->add_option("--split", sa.split, "train | val | test | all");
  sr->add_option("--series", sa.series, "Only this series id (default: whole split)");
  sr->add_option("--frame", sa.frame, "Only this frame index (default: every frame with history)");
  sr->add_option("--max-frames", sa.max_frames, "Evenly spaced subset of this many frames, 0 = all");
  sr->add_option("--output", sa.output, "Output directory");
  sr->add_option("--iters", sa.iters, "Maximum Adam iterations");
  sr->add_option("--lr", sa.lr, "Adam learning rate");
  sr->add_option("--lambda-data", sa.lambda_data, "Data fidelity weight");
  sr->add_option("--w4", sa.w4, "Physics inner weight (default: AC 1e5, EJ 1e-2)");
  sr->add_option("--w5", sa.w5, "Physics boundary weight (default: AC 5, EJ 100)");
  sr->add_option("--scheme", sa.scheme, "bdf2 | cn | ee");
  sr->add_option("--mode", sa.mode, "standard_fd | paper_kernel");
  sr->add_option("--range", sa.range, "Dynamic range for the metrics");
  sr->add_option("--threads", sa.threads, "Worker threads, 0 = all cores; PC_RESOLVE_THREADS overrides");

  RestartArgs ra;
  auto* rs = app.add_subcommand("restart", "Restart the fine solver from upscaled coarse frames");
  rs->add_option("--manifest", ra.manifest, "Dataset manifest")->required();
  rs->add_option("--entry", ra.entry, "Series id");
  rs->add_option("--warmup", ra.warmup, "Restart step (shrunk to fit shorter series)");
  rs->add_option("--continue", ra.n_continue, "Steps after the restart (shrunk to fit shorter series)");
  rs->add_option("--methods", ra.methods, "Comma list of oracle, bicubic, variational");
  rs->add_option("--rollout", ra.rollout, "Frames super-resolved in sequence up to the restart, 0 = all");
  rs->add_option("--iters", ra.iters, "Maximum Adam iterations per frame");
  rs->add_option("--lr", ra.lr, "Adam learning rate");
  rs->add_option("--w4", ra.w4, "Physics inner weight (default: AC 1e5, EJ 1e-2)");
  rs->add_option("--w5", ra.w5, "Physics boundary weight (default: AC 5, EJ 100)");
  rs->add_option("--output", ra.output, "Output directory");

  AnalyzeArgs aa;
  auto* an = app.add_subcommand("analyze", "Consistency order of the time integrators");
  an->add_option("--scheme", aa.scheme, "bdf2 | cn | ee | all");
  an->add_option("--delta", aa.delta, "Model-problem coefficient in rho(e^tau) + tau delta sigma(e^tau)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen) return cmd_generate(ga, out, err);
    if (*ev) return cmd_evaluate(ea, out, err);
    if (*sr) return cmd_superres(sa, out, err);
    if (*rs) return cmd_restart(ra, out, err);
    if (*an) return cmd_analyze(aa, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace pcsr
