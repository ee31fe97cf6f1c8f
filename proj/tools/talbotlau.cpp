#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "talbotlau/errors.hpp"
#include "talbotlau/runner.hpp"
#include "talbotlau/svg.hpp"

namespace {

using namespace talbot;

constexpr int exit_config = 2;
constexpr int exit_oracle = 3;

struct Options {
  std::string config;
  std::string out = "out";
  bool svg = false;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

RunConfig load(const Options& o) {
  RunConfig cfg = o.config.empty() ? default_config() : load_config(o.config);
  if (o.seed) {
    cfg.seed = *o.seed;
    cfg.rays.seed = *o.seed;
  }
  if (o.threads) cfg.ifm.numerics.threads = *o.threads;
  cfg.validate();
  return cfg;
}

int sweep(const Options& o) {
  const RunConfig cfg = load(o);
  const SweepResult r = run_visibility_sweep(cfg);
  write_text(o.out, "sweep.csv", sweep_csv(r));
  write_text(o.out, "sweep_contrast.csv", sweep_contrast_csv(r));
  if (o.svg) {
    std::vector<svg::Series> series;
    for (const auto& c : r.columns)
      if (c.name != "flux_rel") series.push_back({c.name.substr(4), r.centers, c.values});
    write_text(o.out, "sweep.svg",
               svg::line_plot("Fringe visibility", "mean velocity (m/s)", "visibility", series));
  }
  for (const auto& c : r.columns) {
    if (c.name == "flux_rel") continue;
    const auto top = std::max_element(c.values.begin(), c.values.end()) - c.values.begin();
    std::printf("%-22s max %.4f at %g m/s\n", c.name.c_str(), c.values[static_cast<std::size_t>(top)],
                r.centers[static_cast<std::size_t>(top)]);
  }
  return 0;
}

int scan(const Options& o) {
  const RunConfig cfg = load(o);
  const ScanResult r = run_scan_sim(cfg);
  for (std::size_t i = 0; i < r.scans.size(); ++i) {
    const std::string name = r.scans.size() == 1 ? "scan.csv" : "scan_" + std::to_string(i) + ".csv";
    write_text(o.out, name, to_csv(r.scans[i]));
  }
  write_text(o.out, "scan_summary.csv", scan_summary_csv(r));
  if (o.svg) {
    const auto& s = r.scans.front();
    std::vector<double> x, y;
    for (std::size_t i = 0; i < s.positions.size(); ++i) {
      x.push_back(s.positions[i] * 1e9);
      y.push_back(static_cast<double>(s.counts[i]));
    }
    write_text(o.out, "scan.svg", svg::line_plot("Detector scan", "grating 3 position (nm)", "counts", {{"counts", x, y}}));
  }
  const auto& f = r.fits.front();
  std::printf("V = %.4f +- %.4f  phase = %.4f +- %.4f rad  SNR = %.1f\n", f.visibility, f.sigma_visibility,
              f.phase, f.sigma_phase, r.snr.front());
  if (r.drift)
    std::printf("drift = %.3f +- %.3f nm/min%s\n", r.drift->nm_per_minute(), r.drift->sigma * 6e10,
                r.drift->ambiguous ? " (phase unwrapping ambiguous)" : "");
  return 0;
}

int gravity(const Options& o) {
  const RunConfig cfg = load(o);
  const GravityResult r = run_gravity_sweep(cfg);
  write_text(o.out, "gravity.csv", gravity_csv(r));
  if (o.svg) {
    std::vector<double> a, p, v;
    for (const auto& row : r.rows) {
      a.push_back(row.alpha / units::mrad);
      p.push_back(row.phase);
      v.push_back(row.visibility);
    }
    write_text(o.out, "gravity.svg",
               svg::line_plot("Gravity shift", "tilt (mrad)", "rad / visibility", {{"phase", a, p}, {"visibility", a, v}}));
  }
  std::printf("phase slope %.4f rad/mrad\n", r.slope_per_mrad);
  return 0;
}

int scale(const Options& o) {
  const RunConfig cfg = load(o);
  const ScaleResult r = run_scale_study(cfg);
  write_text(o.out, "scale.csv", scale_csv(r));
  write_text(o.out, "scale_summary.csv", scale_summary_csv(r));
  if (o.svg)
    write_text(o.out, "scale.svg",
               svg::line_plot("Scaled interferometer", "velocity (m/s)", "visibility",
                              {{"baseline", r.baseline.velocities, r.baseline.visibility},
                               {"scaled", r.scaled.velocities, r.scaled.visibility}}));
  for (const auto* c : {&r.baseline, &r.scaled})
    std::printf("%-8s peak %.4f at %.1f m/s  dv/v = %.4f\n", c->name.c_str(), c->peak.visibility, c->peak.v_peak,
                c->peak.relative());
  return 0;
}

int oracle(const Options& o) {
  const RunConfig cfg = load(o);
  const OracleCheckResult r = run_oracle_check(cfg);
  write_text(o.out, "oracle.csv", oracle_csv(r));
  for (const auto& row : r.rows) {
    const auto& c = row.comparison;
    if (!row.converged)
      std::printf("v=%g vdw=%s  %s\n", c.velocity, c.vdw ? "on" : "off", row.failure.c_str());
    else
      std::printf("v=%g vdw=%-3s fourier %.5f oracle %.5f diff %.5f  %s\n", c.velocity, c.vdw ? "on" : "off",
                  c.fourier_visibility, c.oracle_visibility, c.difference(), row.pass ? "pass" : "FAIL");
  }
  return r.pass ? 0 : exit_oracle;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Talbot-Lau interferometer simulator"};
  Options o;
  bool print_defaults = false;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  app.add_option("--config", o.config, "Run configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "Output directory")->capture_default_str();
  app.add_flag("--svg", o.svg, "Also write SVG plots");
  auto* seed_opt = app.add_option("--seed", seed, "Random seed (overrides run.seed)");
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads (overrides run.threads)")
                          ->check(CLI::PositiveNumber);
  app.add_flag("--print-defaults", print_defaults, "Print the default configuration and exit");

  int (*action)(const Options&) = nullptr;
  const std::pair<const char*, int (*)(const Options&)> commands[] = {
      {"sweep", sweep}, {"scan", scan}, {"gravity", gravity}, {"scale", scale}, {"oracle-check", oracle}};
  const char* help[] = {"Visibility versus mean velocity for the four models",
                        "Simulated detector scan with fringe fit",
                        "Fringe phase and visibility versus table tilt",
                        "Peak width for a heavier molecule and finer grating",
                        "Compare the Fourier method with the direct Fresnel integral"};
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    auto* sub = app.add_subcommand(commands[i].first, help[i]);
    auto fn = commands[i].second;
    sub->fallthrough();
    sub->callback([&action, fn] { action = fn; });
  }
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config;
  }
  if (*seed_opt) o.seed = seed;
  if (*threads_opt) o.threads = threads;

  try {
    if (print_defaults) {
      std::cout << default_config_text();
      return 0;
    }
    if (action == nullptr) {
      std::cerr << app.help();
      return exit_config;
    }
    return action(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const OracleFailure& e) {
    std::cerr << "oracle failure: " << e.what() << "\n";
    return exit_oracle;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
