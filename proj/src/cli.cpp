#include "pdmp/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pdmp/approx_study.hpp"
#include "pdmp/diagnostics.hpp"
#include "pdmp/errors.hpp"
#include "pdmp/functionals.hpp"
#include "pdmp/io.hpp"
#include "pdmp/kernels.hpp"
#include "pdmp/parallel.hpp"

#ifndef PDMP_VERSION
#define PDMP_VERSION "unknown"
#endif

namespace pdmp {

namespace fs = std::filesystem;

std::string version_string() { return PDMP_VERSION; }

namespace {

struct Invocation {
  std::string command;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

struct Context {
  ExperimentConfig config;
  fs::path out;
  unsigned threads;
  std::string command;
  std::chrono::steady_clock::time_point started;
  std::string started_utc;
};

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Metadata base_metadata(const Context& ctx) {
  Metadata m;
  m.set("command", ctx.command);
  m.set("study", ctx.config.study.type);
  m.set("seed", std::to_string(ctx.config.run.seed));
  m.set("version", version_string());
  m.set("kernel_backend", std::string(kernels::backend_name(kernels::active_backend())));
  m.set("threads", std::to_string(ctx.threads));
  m.set("started_utc", ctx.started_utc);
  if (ctx.config.target.name == "bridge") m.set("quad_points", std::to_string(ctx.config.target.quad_points));
  std::istringstream cfg(serialize_config(ctx.config));
  std::string line, section;
  while (std::getline(cfg, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find(" = ");
    m.set("config." + section + "." + line.substr(0, eq), line.substr(eq + 3));
  }
  return m;
}

void finish_metadata(Metadata& m, const Context& ctx) {
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.started).count();
  m.set("wall_clock_seconds", secs);
}

PhaseState initial_state(const SamplerAssembly& sampler, const std::string& mode, RandomSource& rng) {
  if (mode == "zero") {
    PhaseState z;
    z.x.assign(sampler.basis.n_modes(), 0.0);
    z.v = sampler.velocity.sample(rng);
    return z;
  }
  if (mode == "stationary") return resample_stationary(sampler, 1, 64, rng).front();
  return sampler.sample_reference(rng);
}

std::vector<std::string> battery_or(const StudyConfig& s) {
  return s.functions.empty() ? default_battery() : s.functions;
}

std::string cmd_run(const Context& ctx, const SamplerAssembly& sampler) {
  const RunConfig& run = ctx.config.run;
  std::vector<std::size_t> counts(run.chains);
  parallel_for(run.chains, ctx.threads, [&](std::size_t k) {
    RandomStream rng(run.seed, k);
    const PhaseState z0 = initial_state(sampler, run.init, rng);
    const EventSkeleton skel = sampler.run(z0, run.t_end, rng, run.max_events);
    counts[k] = skel.events.size();
    Metadata m = base_metadata(ctx);
    m.set("chain", std::to_string(k));
    m.set("t_end", skel.t_end);
    m.set("event_count", std::to_string(skel.events.size()));
    m.set_vector("initial.x", skel.initial.x);
    m.set_vector("initial.v", skel.initial.v);
    finish_metadata(m, ctx);
    const std::string stem = "chain_" + std::to_string(k);
    write_skeleton_csv(ctx.out / (stem + ".csv"), skel);
    atomic_write(ctx.out / (stem + ".meta"), m.str());
  });
  std::size_t total = 0;
  for (auto c : counts) total += c;
  return "run: " + std::to_string(run.chains) + " chain(s), " + std::to_string(total) + " events, t_end " +
         format_double(run.t_end) + ", output " + ctx.out.string();
}

void write_study(const Context& ctx, const CsvTable& table, Metadata& meta) {
  finish_metadata(meta, ctx);
  const std::string stem = ctx.config.study.type;
  atomic_write(ctx.out / (stem + ".csv"), table.str());
  atomic_write(ctx.out / (stem + ".meta"), meta.str());
}

std::string study_invariance(const Context& ctx, const SamplerAssembly& sampler) {
  const StudyConfig& s = ctx.config.study;
  const auto funcs = make_functionals(battery_or(s), sampler.basis);
  RandomStream rng(ctx.config.run.seed, 0);
  InvarianceOptions opt;
  opt.nested = s.nested;
  opt.threads = ctx.threads;
  const InvarianceResult res = invariance_residual(sampler, funcs, s.samples, rng, opt);
  CsvTable t({"function", "estimate", "std_error", "z_score"});
  double worst = 0.0;
  for (const auto& r : res.residuals) {
    t.add_row({r.name, format_double(r.estimate), format_double(r.std_error), format_double(r.z_score())});
    worst = std::max(worst, std::abs(r.z_score()));
  }
  Metadata m = base_metadata(ctx);
  m.set("ess", res.ess);
  m.set("n_samples", std::to_string(res.n_samples));
  write_study(ctx, t, m);
  return "invariance: " + std::to_string(res.residuals.size()) + " functions, max |z| " + format_double(worst) +
         ", ess " + format_double(res.ess);
}

std::string study_variance(const Context& ctx, const SamplerAssembly& sampler) {
  const StudyConfig& s = ctx.config.study;
  const RunConfig& run = ctx.config.run;
  const std::vector<std::string> names = s.functions.empty() ? std::vector<std::string>{s.function} : s.functions;
  const auto funcs = make_functionals(names, sampler.basis);
  std::vector<std::vector<VarianceEstimate>> per_chain(run.chains);
  parallel_for(run.chains, ctx.threads, [&](std::size_t k) {
    RandomStream rng(run.seed, k);
    const PhaseState z0 = initial_state(sampler, run.init, rng);
    const EventSkeleton skel = sampler.run(z0, run.t_end, rng, run.max_events);
    for (const auto& f : funcs)
      per_chain[k].push_back(batch_means_variance(skel, sampler.flow, f.value, s.batches, f.name));
  });
  CsvTable t({"chain", "function", "time_average", "asym_variance", "asym_variance_se", "std_error", "batches",
              "events_per_unit_time"});
  for (std::size_t k = 0; k < run.chains; ++k)
    for (const auto& e : per_chain[k])
      t.add_row({std::to_string(k), e.functional_name, format_double(e.time_average), format_double(e.asym_variance),
                 format_double(e.asym_variance_se), format_double(e.std_error), std::to_string(e.batches),
                 format_double(e.events_per_unit_time)});
  Metadata m = base_metadata(ctx);
  m.set("t_end", run.t_end);
  write_study(ctx, t, m);
  const VarianceEstimate& first = per_chain[0][0];
  return "variance: " + first.functional_name + " asym_variance " + format_double(first.asym_variance) + " +- " +
         format_double(first.asym_variance_se) + " (chain 0)";
}

std::string study_decay(const Context& ctx, const SamplerAssembly& sampler) {
  const StudyConfig& s = ctx.config.study;
  const Functional f = make_functional(s.function, sampler.basis);
  RandomStream rng(ctx.config.run.seed, 0);
  DecayOptions opt;
  opt.threads = ctx.threads;
  opt.fit_from = s.fit_from;
  const DecayFit fit = decay_rate_fit(sampler, f.value, s.ensemble, s.t_grid, rng, opt);
  CsvTable t({"t", "acov", "acov_se"});
  for (std::size_t i = 0; i < fit.times.size(); ++i)
    t.add_row(std::vector<double>{fit.times[i], fit.acov[i], fit.acov_se[i]});
  Metadata m = base_metadata(ctx);
  m.set("kappa", fit.kappa);
  m.set("intercept", fit.intercept);
  m.set("r_squared", fit.r_squared);
  write_study(ctx, t, m);
  return "decay: " + f.name + " kappa " + format_double(fit.kappa) + ", r_squared " + format_double(fit.r_squared);
}

std::string study_approx(const Context& ctx, const SamplerSpec& spec, const TargetPotential& target,
                         const SpectralBasis& basis) {
  const StudyConfig& s = ctx.config.study;
  const Functional f = make_functional(s.function, basis);
  ApproxStudyOptions opt;
  opt.threads = ctx.threads;
  opt.band_height = s.band_height;
  opt.max_events = ctx.config.run.max_events;
  const auto rows = approx_error_study(spec, target, basis, f, s.levels, s.t_horizon, s.ensemble,
                                       ctx.config.run.seed, opt);
  CsvTable t({"n_approx", "t_horizon", "error_l2mu", "error_se", "error_sq", "error_sq_se", "predicted_bound",
              "bound_constant", "tail_sqrt", "finite_tail_sqrt"});
  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    t.add_row({std::to_string(r.n_approx), format_double(r.t_horizon), format_double(r.error_l2mu),
               format_double(r.error_se), format_double(r.error_sq), format_double(r.error_sq_se),
               format_double(r.predicted_bound), format_double(r.bound_constant), format_double(r.tail_sqrt),
               format_double(r.finite_tail_sqrt)});
    if (r.error_l2mu > 0.0) {
      xs.push_back(r.tail_sqrt);
      ys.push_back(r.error_l2mu);
    }
  }
  Metadata m = base_metadata(ctx);
  std::string summary = "approx: " + std::to_string(rows.size()) + " levels";
  if (xs.size() >= 2) {
    const double slope = loglog_slope(xs, ys);
    m.set("loglog_slope", slope);
    summary += ", log-log slope " + format_double(slope);
  }
  write_study(ctx, t, m);
  return summary;
}

std::string study_tuning(const Context& ctx, const SpectralBasis& basis) {
  const ZigZagTuning tun = optimal_zz_velocities(basis, ctx.config.study.tuning_r);
  CsvTable t({"mode", "gamma2", "a"});
  for (std::size_t i = 0; i < tun.speeds.size(); ++i)
    t.add_row({std::to_string(i + 1), format_double(basis.eigenvalue(i)), format_double(tun.speeds[i])});
  Metadata m = base_metadata(ctx);
  m.set("r", ctx.config.study.tuning_r);
  m.set("predicted_sigma2", tun.predicted_sigma2);
  m.set("switch_rate_factor", tun.switch_rate_factor);
  m.set("smoothness_sum", tun.smoothness_sum);
  m.set("smoothness_suspect", tun.smoothness_suspect ? "true" : "false");
  write_study(ctx, t, m);
  return "tuning: " + std::to_string(tun.speeds.size()) + " speeds, predicted sigma2 " +
         format_double(tun.predicted_sigma2);
}

std::string execute(const Invocation& inv, std::ostream& err) {
  Context ctx;
  ctx.started = std::chrono::steady_clock::now();
  ctx.started_utc = utc_now();
  ctx.command = inv.command;
  ctx.config = load_config(inv.config_path);
  if (inv.seed) ctx.config.run.seed = *inv.seed;
  validate_config(ctx.config);
  ctx.threads = inv.threads == 0 ? default_threads() : inv.threads;
  std::string out = inv.out_dir;
  if (out.empty())
    if (const char* env = std::getenv("PDMP_OUT_DIR")) out = env;
  if (out.empty()) throw InvalidArgument("no output directory: pass --out or set PDMP_OUT_DIR", "out");
  ctx.out = out;

  const SpectralBasis basis = build_basis(ctx.config);
  const std::string type = inv.command == "run" ? "run" : ctx.config.study.type;
  if (type == "tuning") {
    fs::create_directories(ctx.out);
    return study_tuning(ctx, basis);
  }
  const TargetPotential target = build_target(ctx.config, basis);
  const SamplerSpec spec = build_sampler_spec(ctx.config);
  const SamplerAssembly sampler = assemble_sampler(spec, target, basis);
  for (const auto& w : sampler.warnings) err << "warning: " << w << '\n';
  fs::create_directories(ctx.out);
  if (type == "run") return cmd_run(ctx, sampler);
  if (type == "invariance") return study_invariance(ctx, sampler);
  if (type == "variance") return study_variance(ctx, sampler);
  if (type == "decay") return study_decay(ctx, sampler);
  if (type == "approx") return study_approx(ctx, spec, target, basis);
  throw InvalidArgument("unknown study type '" + type + "'", "study.type");
}

}  // namespace

ExperimentConfig config_from_metadata(const std::map<std::string, std::string>& metadata) {
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
  for (const auto& [k, v] : metadata) {
    if (k.rfind("config.", 0) != 0) continue;
    const std::string rest = k.substr(7);
    const auto dot = rest.find('.');
    if (dot == std::string::npos) throw InvalidArgument("malformed config key in metadata", k);
    sections[rest.substr(0, dot)].emplace_back(rest.substr(dot + 1), v);
  }
  std::string text;
  for (const auto& [sec, kvs] : sections) {
    text += "[" + sec + "]\n";
    for (const auto& [k, v] : kvs) text += k + " = " + v + "\n";
  }
  return parse_config_string(text);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"PDMP samplers on truncated Gaussian bases", "pdmp"};
  app.require_subcommand(1);
  Invocation inv;
  std::uint64_t seed = 0;
  for (const char* name : {"run", "study"}) {
    CLI::App* sub = app.add_subcommand(name, std::string(name) == "run" ? "Simulate trajectories"
                                                                         : "Run the configured study");
    sub->add_option("--config", inv.config_path, "Experiment config file")->required();
    sub->add_option("--out", inv.out_dir, "Output directory (fallback: PDMP_OUT_DIR)");
    sub->add_option("--seed", seed, "Master seed, overrides run.seed");
    sub->add_option("--threads", inv.threads, "Worker threads (default: logical cores)");
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  for (CLI::App* sub : app.get_subcommands()) {
    inv.command = sub->get_name();
    if (sub->count("--seed") > 0) inv.seed = seed;
  }
  try {
    out << execute(inv, err) << '\n';
    return kExitOk;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ExplosionSuspected& e) {
    err << "explosion guard: " << e.what() << '\n';
    return kExitExplosion;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace pdmp
