#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "levydc/config.hpp"
#include "levydc/error_harness.hpp"
#include "levydc/manifest.hpp"
#include "levydc/svg_plot.hpp"
#include "levydc/validation.hpp"

namespace levydc::cli {

enum ExitCode { ok = 0, check_failed = 1, bad_config = 2 };

inline std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string short_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

struct Invocation {
  std::string command;
  std::string config_path;
  unsigned jobs = 1;
  bool synthetic = false;
  std::string inject_fault;
  std::vector<std::pair<std::string, std::string>> overrides;
};

inline const char* usage =
    "usage: levy_dc <simulate|validate|compare|convergence> [--config FILE] [--jobs N]\n"
    "               [--synthetic] [--inject-fault ks] [--key value ...]\n";

inline Invocation parse_args(int argc, const char* const* argv) {
  Invocation inv;
  if (argc < 2) throw config_error("", 0, "missing subcommand");
  inv.command = argv[1];
  if (inv.command != "simulate" && inv.command != "validate" && inv.command != "compare" &&
      inv.command != "convergence")
    throw config_error("", 0, "unknown subcommand '" + inv.command + "'");
  for (int i = 2; i < argc; ++i) {
    std::string a = argv[i];
    if (a.rfind("--", 0) != 0) throw config_error("", 0, "unexpected argument '" + a + "'");
    a = a.substr(2);
    std::string value;
    if (const auto eq = a.find('='); eq != std::string::npos) {
      value = a.substr(eq + 1);
      a = a.substr(0, eq);
    } else if (a == "synthetic") {
      inv.synthetic = true;
      continue;
    } else {
      if (i + 1 >= argc) throw config_error(a, 0, "missing value");
      value = argv[++i];
    }
    if (a == "config") {
      inv.config_path = value;
    } else if (a == "jobs") {
      char* end = nullptr;
      const long j = std::strtol(value.c_str(), &end, 10);
      if (*end != '\0' || j < 1) throw config_error("jobs", 0, "must be a positive integer");
      inv.jobs = static_cast<unsigned>(j);
    } else if (a == "inject-fault") {
      if (value != "ks") throw config_error("inject-fault", 0, "only 'ks' is supported");
      inv.inject_fault = value;
    } else {
      inv.overrides.emplace_back(a, value);
    }
  }
  return inv;
}

inline Config resolve_config(const Invocation& inv) {
  Config c = inv.config_path.empty() ? Config{} : Config::load(inv.config_path);
  for (const auto& [k, v] : inv.overrides) c.set(k, v, 0);
  return c;
}

inline std::uint64_t master_seed(const Config& c) {
  if (const char* env = std::getenv("LEVY_DC_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long s = std::strtoull(env, &end, 10);
    if (*end != '\0') throw config_error("LEVY_DC_SEED", 0, "not an unsigned integer");
    return s;
  }
  const long long s = c.get_int("seed", 20240917);
  if (s < 0) throw config_error("seed", c.line_of("seed"), "must be nonnegative");
  return static_cast<std::uint64_t>(s);
}

inline std::vector<double> alphas_of(const Config& c) {
  if (!c.has("levy.alpha")) throw config_error("levy.alpha", 0, "required key is missing");
  const auto as = c.get_doubles("levy.alpha", {});
  for (double a : as)
    if (!(a > 0.0 && a < 2.0)) throw config_error("levy.alpha", c.line_of("levy.alpha"), "alpha must lie in (0, 2)");
  return as;
}

inline std::vector<Method> methods_of(const Config& c, std::vector<std::string> fallback) {
  std::vector<Method> out;
  for (const auto& s : c.get_list("method", fallback)) {
    if (s == "dc" || s == "DC")
      out.push_back(Method::dc);
    else if (s == "ar" || s == "AR")
      out.push_back(Method::ar);
    else
      throw config_error("method", c.line_of("method"), "expected dc or ar, got '" + s + "'");
  }
  return out;
}

template <class Enum>
Enum choice(const Config& c, const std::string& key, const std::map<std::string, Enum>& options, Enum fallback) {
  if (!c.has(key)) return fallback;
  const std::string v = c.get_string(key, "");
  const auto it = options.find(v);
  if (it == options.end()) {
    std::string allowed;
    for (const auto& [name, _] : options) allowed += (allowed.empty() ? "" : ", ") + name;
    throw config_error(key, c.line_of(key), "unknown value '" + v + "' (expected " + allowed + ")");
  }
  return it->second;
}

inline void check_model_kind(const Config& c) {
  const std::string kind = c.get_string("levy.kind", "truncated-stable");
  if (kind != "truncated-stable") throw config_error("levy.kind", c.line_of("levy.kind"), "unsupported model '" + kind + "'");
  const std::string ex = c.get_string("sde.example", "sin-cos");
  if (ex != "sin-cos") throw config_error("sde.example", c.line_of("sde.example"), "unsupported example '" + ex + "'");
}

inline unsigned exponent(const Config& c, const std::string& key, long long v) {
  if (v < 1 || v > 24) throw config_error(key, c.line_of(key), "exponent must lie in [1, 24]");
  return static_cast<unsigned>(v);
}

/// Everything the harness needs, read from the flat config.
inline ExperimentConfig experiment_config(const Config& c) {
  check_model_kind(c);
  ExperimentConfig e;
  e.alphas = alphas_of(c);
  e.scheme = static_cast<int>(c.get_int("scheme", 2));
  e.methods = methods_of(c, {"ar", "dc"});
  e.eps_dc = c.get_double("cut.epsilon", 0.1);
  e.eps_ar = c.get_double("ar.threshold_eps", 0.01);
  e.horizon = c.get_double("cut.T", 1.0);
  e.h_mode = choice<HMode>(c, "cut.h_mode", {{"match-ar-variance", HMode::match_ar_variance},
                                             {"n-power", HMode::n_power}, {"fixed", HMode::fixed}},
                           c.has("cut.h") ? HMode::fixed : HMode::match_ar_variance);
  e.h_fixed = c.get_double("cut.h", 0.0);
  e.benchmark_k = exponent(c, "grid.benchmark_k", c.get_int("grid.benchmark_k", 14));
  e.coarse_ks.clear();
  for (double k : c.get_doubles("grid.coarse_ks", {9, 10, 11, 12})) {
    if (k != std::floor(k)) throw config_error("grid.coarse_ks", c.line_of("grid.coarse_ks"), "exponents must be integers");
    e.coarse_ks.push_back(exponent(c, "grid.coarse_ks", static_cast<long long>(k)));
  }
  e.ps = c.get_doubles("error.ps", {2, 4, 6, 8, 10});
  const long long loops = c.get_int("mc.loops", 20), traj = c.get_int("mc.trajectories", 100);
  if (loops < 1) throw config_error("mc.loops", c.line_of("mc.loops"), "must be positive");
  if (traj < 1) throw config_error("mc.trajectories", c.line_of("mc.trajectories"), "must be positive");
  e.loops = static_cast<std::size_t>(loops);
  e.trajectories = static_cast<std::size_t>(traj);
  e.seed = master_seed(c);
  e.x0 = c.get_double("sde.x0", 0.0);
  e.sigma_mode = choice<SigmaMode>(c, "sde.sigma_mode",
                                   {{"closed-form", SigmaMode::closed_form}, {"quadrature", SigmaMode::quadrature}},
                                   SigmaMode::closed_form);
  e.size_law = choice<SizeLaw>(c, "cut.size_law",
                               {{"time-mixture", SizeLaw::time_mixture}, {"conditional", SizeLaw::conditional}},
                               SizeLaw::time_mixture);
  e.coupling = choice<SmallJumpCoupling>(
      c, "sde.coupling", {{"brownian", SmallJumpCoupling::brownian}, {"independent", SmallJumpCoupling::independent}},
      SmallJumpCoupling::brownian);
  e.compensate_large_jumps = choice<bool>(c, "sde.compensate", {{"true", true}, {"false", false}}, true);
  try {
    e.validate();
  } catch (const domain_error& ex) {
    throw config_error("", 0, ex.what());
  }
  return e;
}

inline std::filesystem::path out_dir(const Config& c) {
  std::filesystem::path p = c.get_string("out.dir", "levy_dc_out");
  std::filesystem::create_directories(p);
  return p;
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::filesystem::create_directories(p.parent_path().empty() ? "." : p.parent_path());
  std::ofstream f(p, std::ios::binary);
  f << s;
}

inline int cmd_simulate(const Config& c, unsigned jobs, std::ostream& out) {
  ExperimentConfig e = experiment_config(c);
  if (e.alphas.size() != 1) throw config_error("levy.alpha", c.line_of("levy.alpha"), "simulate takes a single alpha");
  if (e.methods.size() != 1 && c.has("method"))
    throw config_error("method", c.line_of("method"), "simulate takes a single method");
  const Method method = c.has("method") ? e.methods.front() : Method::dc;
  const long long n_raw = c.get_int("grid.n", 512);
  if (n_raw < 1 || (n_raw & (n_raw - 1)) != 0 || n_raw > (1LL << 24))
    throw config_error("grid.n", c.line_of("grid.n"), "n must be a power of two up to 2^24");
  const auto n = static_cast<std::size_t>(n_raw);
  unsigned k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  if (c.has("grid.benchmark_k")) {
    if (e.benchmark_k < k) throw config_error("grid.benchmark_k", c.line_of("grid.benchmark_k"), "must be at least log2 n");
    k = e.benchmark_k;
  }
  const long long count = c.get_int("sim.trajectories", 1);
  if (count < 1) throw config_error("sim.trajectories", c.line_of("sim.trajectories"), "must be positive");

  const auto model = make_truncated_stable(e.alphas.front());
  const CoefficientSet coeffs = sin_cos_example(*model);
  double h = 0.0;
  if (method == Method::dc) {
    ExperimentConfig hcfg = e;
    hcfg.benchmark_k = k;
    h = resolve_h(hcfg, *model);
    if (e.h_mode == HMode::n_power) h = std::pow(static_cast<double>(n), -1.0 / e.eps_dc);
  }
  const CutRule cut = cut_rule_for(e, method, h);

  const auto dir = out_dir(c);
  RunManifest manifest(dir, "simulate", c.dump(), e.seed);
  manifest.set("alpha", e.alphas.front());
  manifest.set("method", to_string(method));
  manifest.set("n", n);
  manifest.set("h", h);
  char name[64];
  for (long long i = 0; i < count; ++i) {
    std::snprintf(name, sizeof name, "paths/path_%04lld.csv", i);
    manifest.plan(name);
  }
  manifest.write();

  EngineOptions eopt;
  eopt.x0 = e.x0;
  eopt.sigma_mode = e.sigma_mode;
  eopt.coupling = e.coupling;
  eopt.compensate_large_jumps = e.compensate_large_jumps;
  NoiseOptions nopt{!coeffs.diffusion_free, e.size_law};
  const SeedNode root = SeedNode(e.seed).child("simulate");
  std::vector<std::string> bodies(static_cast<std::size_t>(count));
  parallel_for(bodies.size(), jobs, [&](std::size_t i) {
    const DrivingNoise noise = prepare_noise(root.child(i), k, cut, *model, nopt);
    const PathRecord path = simulate_path(e.scheme, coeffs, *model, cut, noise, n, eopt);
    std::string s = "t,x\n";
    for (std::size_t j = 0; j < path.times.size(); ++j) s += num(path.times[j]) + "," + num(path.values[j]) + "\n";
    bodies[i] = std::move(s);
  });
  for (std::size_t i = 0; i < bodies.size(); ++i) write_text(dir / manifest.planned()[i], bodies[i]);
  manifest.finish("ok");
  out << "wrote " << count << " path(s) to " << (dir / "paths").string() << "\n";
  return ok;
}

inline int cmd_validate(const Config& c, const Invocation& inv, std::ostream& out) {
  check_model_kind(c);
  const auto as = alphas_of(c);
  ValidationSettings s;
  s.cut.epsilon = c.get_double("cut.epsilon", 0.1);
  s.cut.h = c.get_double("cut.h", 1e-3);
  s.cut.horizon = c.get_double("cut.T", 1.0);
  try {
    s.cut.validate();
  } catch (const domain_error& ex) {
    throw config_error("", 0, ex.what());
  }
  s.size_law = choice<SizeLaw>(c, "cut.size_law",
                               {{"time-mixture", SizeLaw::time_mixture}, {"conditional", SizeLaw::conditional}},
                               SizeLaw::time_mixture);
  s.ks_samples = static_cast<std::size_t>(std::max(10LL, c.get_int("validate.ks_samples", 10000)));
  s.count_runs = static_cast<std::size_t>(std::max(10LL, c.get_int("validate.count_runs", 2000)));
  s.laplace_samples = static_cast<std::size_t>(std::max(10LL, c.get_int("validate.laplace_samples", 100000)));
  s.laplace_t = c.get_double("validate.laplace_t", 1.0);
  s.seed = master_seed(c);
  s.corrupt_inverse_cdf = inv.inject_fault == "ks";

  const auto dir = out_dir(c);
  RunManifest manifest(dir, "validate", c.dump(), s.seed);
  manifest.plan("validation.csv");
  manifest.write();

  bool all = true;
  std::string csv = "alpha,check,passed,statistic,threshold\n";
  for (double a : as) {
    const auto model = make_truncated_stable(a);
    for (const auto& r : run_validation(*model, s)) {
      all = all && r.passed;
      out << (r.passed ? "PASS " : "FAIL ") << "alpha=" << short_num(a) << " " << r.name << " statistic=" << num(r.statistic)
          << " threshold=" << num(r.threshold) << "  (" << r.detail << ")\n";
      csv += short_num(a) + "," + r.name + "," + (r.passed ? "1" : "0") + "," + num(r.statistic) + "," +
             num(r.threshold) + "\n";
    }
  }
  write_text(dir / "validation.csv", csv);
  manifest.finish(all ? "ok" : "check-failed");
  return all ? ok : check_failed;
}

inline std::string error_csv(const ErrorTable& t) {
  std::string s = "alpha,method,scheme,k,p,error,stderr,loops,excluded\n";
  for (const auto& r : t.rows)
    s += short_num(r.alpha) + "," + to_string(r.method) + "," + std::to_string(r.scheme) + "," + std::to_string(r.k) +
         "," + short_num(r.p) + "," + num(r.error) + "," + num(r.stderr_) + "," + std::to_string(r.loops) + "," +
         std::to_string(r.excluded) + "\n";
  return s;
}

/// AR - DC regardless of the configured method order.
inline std::string difference_csv(const ErrorTable& t) {
  const double sign = t.methods.front() == Method::ar ? 1.0 : -1.0;
  std::string s = "alpha,k,p,ar_minus_dc,stderr\n";
  for (const auto& d : t.differences)
    s += short_num(d.alpha) + "," + std::to_string(d.k) + "," + short_num(d.p) + "," + num(sign * d.difference) + "," +
         num(d.stderr_) + "\n";
  return s;
}

inline std::string alpha_plot(const ErrorTable& t, double alpha) {
  std::vector<svg::Series> series;
  for (Method m : t.methods) {
    std::map<double, svg::Series> by_p;
    for (const auto& r : t.rows) {
      if (r.alpha != alpha || r.method != m) continue;
      auto& s = by_p[r.p];
      s.label = std::string(to_string(m)) + " p=" + short_num(r.p);
      s.dashed = m == Method::ar;
      s.x.push_back(r.k);
      s.y.push_back(r.error);
    }
    for (auto& [_, s] : by_p) series.push_back(std::move(s));
  }
  return svg::line_chart("Strong errors, alpha = " + short_num(alpha), series);
}

inline int cmd_compare(const Config& c, unsigned jobs, std::ostream& out) {
  const ExperimentConfig e = experiment_config(c);
  const auto dir = out_dir(c);
  RunManifest manifest(dir, "compare", c.dump(), e.seed);
  manifest.plan("errors.csv");
  const bool diff = e.methods.size() == 2;
  if (diff) manifest.plan("differences.csv");
  for (double a : e.alphas) manifest.plan("errors_alpha_" + short_num(a) + ".svg");
  manifest.write();

  const ErrorTable t = run_comparison(e, jobs);
  write_text(dir / "errors.csv", error_csv(t));
  if (diff) write_text(dir / "differences.csv", difference_csv(t));
  for (double a : e.alphas) write_text(dir / ("errors_alpha_" + short_num(a) + ".svg"), alpha_plot(t, a));
  nlohmann::json hs;
  for (const auto& [a, h] : t.h_used) hs[short_num(a)] = h;
  manifest.set("h", hs);
  manifest.set("warnings", t.warnings);
  manifest.finish("ok");
  for (const auto& w : t.warnings) out << "warning: " << w << "\n";
  out << "wrote " << t.rows.size() << " error rows to " << dir.string() << "\n";
  return ok;
}

inline int cmd_convergence(const Config& c, const Invocation& inv, unsigned jobs, std::ostream& out) {
  if (inv.synthetic) {
    // Self-test of the fitter: per-loop errors c n^{-1/2} with 10% multiplicative noise.
    std::vector<unsigned> ks;
    for (double k : c.get_doubles("grid.coarse_ks", {9, 10, 11, 12})) ks.push_back(static_cast<unsigned>(k));
    if (ks.size() < 3) throw config_error("grid.coarse_ks", c.line_of("grid.coarse_ks"), "need at least 3 resolutions");
    const std::uint64_t seed = master_seed(c);
    const auto loops = static_cast<std::size_t>(std::max(2LL, c.get_int("mc.loops", 20)));
    Engine rng = SeedNode(seed).child("synthetic").engine();
    std::normal_distribution<double> z;
    std::vector<std::vector<double>> est(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i)
      for (std::size_t l = 0; l < loops; ++l)
        est[i].push_back(0.3 * std::pow(2.0, -0.5 * ks[i]) * std::exp(0.1 * z(rng)));
    const auto fit = fit_convergence_order(ks, est, seed);
    const bool pass = fit.ci_low <= -0.5 && -0.5 <= fit.ci_high && std::abs(fit.slope + 0.5) < 0.05;
    out << (pass ? "PASS" : "FAIL") << " synthetic slope=" << num(fit.slope) << " ci=[" << num(fit.ci_low) << ", "
        << num(fit.ci_high) << "] target=-0.5\n";
    return pass ? ok : check_failed;
  }

  const ExperimentConfig e = experiment_config(c);
  if (e.coarse_ks.size() < 3)
    throw config_error("grid.coarse_ks", c.line_of("grid.coarse_ks"), "convergence needs at least 3 resolutions");
  const auto dir = out_dir(c);
  RunManifest manifest(dir, "convergence", c.dump(), e.seed);
  manifest.plan("errors.csv");
  manifest.plan("slopes.csv");
  manifest.write();

  const ErrorTable t = run_comparison(e, jobs);
  write_text(dir / "errors.csv", error_csv(t));
  std::string csv = "alpha,method,scheme,p,slope,ci_low,ci_high,theoretical_slope,resolutions\n";
  for (double a : e.alphas)
    for (Method m : e.methods)
      for (double p : e.ps) {
        std::vector<std::vector<double>> est;
        for (unsigned k : e.coarse_ks) est.push_back(t.loop_estimates.at({a, m, k, p}));
        const auto fit = fit_convergence_order(e.coarse_ks, est, e.seed);
        csv += short_num(a) + "," + to_string(m) + "," + std::to_string(e.scheme) + "," + short_num(p) + "," +
               num(fit.slope) + "," + num(fit.ci_low) + "," + num(fit.ci_high) + "," +
               num(-theoretical_rate(e.scheme, a, p)) + "," + std::to_string(fit.resolutions_used) + "\n";
        out << "alpha=" << short_num(a) << " " << to_string(m) << " p=" << short_num(p) << " slope=" << num(fit.slope)
            << " ci=[" << num(fit.ci_low) << ", " << num(fit.ci_high) << "]\n";
      }
  write_text(dir / "slopes.csv", csv);
  manifest.finish("ok");
  return ok;
}

/// Entry point shared by the executable and the tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    const Invocation inv = parse_args(argc, argv);
    const Config c = resolve_config(inv);
    if (inv.command == "simulate") return cmd_simulate(c, inv.jobs, out);
    if (inv.command == "validate") return cmd_validate(c, inv, out);
    if (inv.command == "compare") return cmd_compare(c, inv.jobs, out);
    return cmd_convergence(c, inv, inv.jobs, out);
  } catch (const config_error& ex) {
    err << "config error: " << ex.what() << "\n" << usage;
    return bad_config;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return check_failed;
  }
}

}  // namespace levydc::cli
