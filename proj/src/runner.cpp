#include "talbotlau/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "talbotlau/errors.hpp"
#include "talbotlau/parallel.hpp"
#include "text.hpp"

namespace talbot {

namespace {

using constants::pi;

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::string out = "# schema=1\n";
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
    out += "\n";
  }
  return out;
}

DistributionModel sweep_model(const RunConfig& cfg) {
  DistributionModel m = cfg.distribution;
  m.source = cfg.ifm.source();
  return m;
}

double open_product(const Interferometer& ifm) {
  double p = 1.0;
  for (const auto& g : ifm.gratings) p *= g.effective_open_fraction();
  return p;
}

}  // namespace

const SweepColumn* SweepResult::column(const std::string& name) const {
  for (const auto& c : columns)
    if (c.name == name) return &c;
  return nullptr;
}

SweepResult run_visibility_sweep(const RunConfig& cfg) {
  cfg.validate();
  const DistributionModel model = sweep_model(cfg);
  SweepResult r;
  r.centers = cfg.sweep.centers;

  auto add = [&](const std::string& name, auto&& eval) {
    SweepColumn col;
    col.name = name;
    for (double c : r.centers) {
      const AveragedFringe f = eval(model.at(c));
      col.values.push_back(f.visibility);
      col.contrast.push_back(f.spectrum.contrast());
    }
    r.columns.push_back(std::move(col));
  };
  if (cfg.sweep.quantum_vdw)
    add("vis_quantum_vdw", [&](const VelocityDistribution& d) { return velocity_averaged(cfg.ifm, d, true); });
  if (cfg.sweep.quantum_novdw)
    add("vis_quantum_novdw", [&](const VelocityDistribution& d) { return velocity_averaged(cfg.ifm, d, false); });
  if (cfg.sweep.classical_vdw)
    add("vis_classical_vdw", [&](const VelocityDistribution& d) {
      return classical_velocity_averaged(cfg.ifm, d, true, cfg.rays);
    });
  if (cfg.sweep.classical_novdw)
    add("vis_classical_novdw", [&](const VelocityDistribution& d) {
      return classical_velocity_averaged(cfg.ifm, d, false, cfg.rays);
    });
  if (cfg.sweep.flux) {
    SweepColumn col;
    col.name = "flux_rel";
    const double open = open_product(cfg.ifm);
    for (double c : r.centers)
      col.values.push_back(open * relative_flux(model.at(c), cfg.ifm.numerics.velocity_nodes));
    r.columns.push_back(std::move(col));
  }
  return r;
}

std::string sweep_csv(const SweepResult& r) {
  std::vector<std::string> header{"v_center_mps"};
  for (const auto& c : r.columns) header.push_back(c.name);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < r.centers.size(); ++i) {
    std::vector<std::string> row{text::num(r.centers[i])};
    for (const auto& c : r.columns) row.push_back(text::num(c.values[i]));
    rows.push_back(std::move(row));
  }
  return csv_table(header, rows);
}

std::string sweep_contrast_csv(const SweepResult& r) {
  std::vector<std::string> header{"v_center_mps"};
  std::vector<const SweepColumn*> cols;
  for (const auto& c : r.columns)
    if (!c.contrast.empty()) {
      header.push_back("contrast_" + c.name.substr(4));
      cols.push_back(&c);
    }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < r.centers.size(); ++i) {
    std::vector<std::string> row{text::num(r.centers[i])};
    for (const auto* c : cols) row.push_back(text::num(c->contrast[i]));
    rows.push_back(std::move(row));
  }
  return csv_table(header, rows);
}

ScanResult run_scan_sim(const RunConfig& cfg) {
  cfg.validate();
  const auto& s = cfg.scan;
  const double d = cfg.ifm.period();
  ScanResult r;
  r.model_visibility = s.visibility ? *s.visibility
                                    : velocity_averaged(cfg.ifm, sweep_model(cfg).at(s.velocity), true).visibility;
  const auto positions = uniform_positions(s.points, s.periods, d);
  const std::optional<double> dark = s.subtract_dark ? std::optional<double>(s.dark_rate) : std::nullopt;
  for (std::size_t i = 0; i < s.repeats; ++i) {
    const double t0 = s.interval * static_cast<double>(i);
    const double phase = s.phase - 2.0 * pi * s.drift * t0 / d;
    auto scan = synthesize_scan(s.rate, r.model_visibility, phase, d, positions, s.dwell, s.dark_rate,
                                cfg.seed + i, t0);
    r.fits.push_back(extract_fringe(scan, d, dark));
    r.snr.push_back(r.fits.back().sigma_amplitude > 0.0
                        ? r.fits.back().amplitude / r.fits.back().sigma_amplitude
                        : 0.0);
    r.peaks.push_back(periodogram_peak(scan));
    r.scans.push_back(std::move(scan));
  }
  if (r.scans.size() >= 2) r.drift = drift_rate(r.scans, d);
  return r;
}

std::string scan_summary_csv(const ScanResult& r) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < r.scans.size(); ++i) {
    const auto& f = r.fits[i];
    rows.push_back({text::num(static_cast<std::uint64_t>(i)), text::num(r.scans[i].timestamp),
                    text::num(r.scans[i].seed), text::num(r.model_visibility), text::num(f.visibility),
                    text::num(f.sigma_visibility), text::num(f.phase), text::num(f.sigma_phase),
                    text::num(f.mean_rate), text::num(r.snr[i]), text::num(r.peaks[i].period)});
  }
  std::string out = csv_table({"scan", "t0_s", "seed", "input_visibility", "visibility", "sigma_visibility",
                               "phase_rad", "sigma_phase_rad", "mean_rate_hz", "snr", "periodogram_period_m"},
                              rows);
  if (r.drift)
    out += "# drift_nm_per_min=" + text::num(r.drift->nm_per_minute()) +
           " sigma_nm_per_min=" + text::num(r.drift->sigma * 1e9 * 60.0) +
           " ambiguous=" + (r.drift->ambiguous ? "true" : "false") + "\n";
  return out;
}

GravityResult run_gravity_sweep(const RunConfig& cfg) {
  cfg.validate();
  const VelocityDistribution dist = sweep_model(cfg).at(cfg.gravity.velocity);
  auto at_tilt = [&](double alpha) {
    Interferometer ifm = cfg.ifm;
    ifm.geometry.tilt_alpha = alpha;
    return velocity_averaged(ifm, dist, true);
  };
  const complex ref = at_tilt(0.0).spectrum.harmonics.at(1);
  GravityResult r;
  double prev = 0.0;
  for (std::size_t i = 0; i < cfg.gravity.tilts.size(); ++i) {
    const double alpha = cfg.gravity.tilts[i];
    const AveragedFringe f = at_tilt(alpha);
    double phase = std::arg(f.spectrum.harmonics.at(1) * std::conj(ref));
    if (i > 0) phase = prev + std::remainder(phase - prev, 2.0 * pi);
    prev = phase;
    GravityRow row;
    row.alpha = alpha;
    row.phase = phase;
    row.phase_per_mrad = alpha == 0.0 ? std::nan("") : phase / (alpha / units::mrad);
    row.visibility = f.visibility;
    r.rows.push_back(row);
  }
  if (r.rows.size() >= 2) {
    double sx = 0, sy = 0;
    for (const auto& row : r.rows) sx += row.alpha / units::mrad, sy += row.phase;
    const double n = static_cast<double>(r.rows.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (const auto& row : r.rows) {
      const double x = row.alpha / units::mrad - mx;
      sxx += x * x;
      sxy += x * (row.phase - my);
    }
    r.slope_per_mrad = sxx > 0.0 ? sxy / sxx : std::nan("");
  } else {
    const auto& row = r.rows.front();
    r.slope_per_mrad = row.phase_per_mrad;
  }
  return r;
}

std::string gravity_csv(const GravityResult& r) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : r.rows)
    rows.push_back({text::num(row.alpha), text::num(row.phase), text::num(row.phase_per_mrad),
                    text::num(row.visibility)});
  return csv_table({"alpha_rad", "phase_rad", "phase_per_mrad", "visibility"}, rows);
}

PeakWidth peak_width(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw DomainError("peak_width: need at least three points");
  const auto top = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  PeakWidth p;
  p.v_peak = x[top];
  p.visibility = y[top];
  const double half = 0.5 * y[top];
  auto crossing = [&](std::size_t inside, std::size_t outside) {
    const double t = (y[inside] - half) / (y[inside] - y[outside]);
    return x[inside] + t * (x[outside] - x[inside]);
  };
  double lo = x.front(), hi = x.back();
  std::size_t i = top;
  while (i > 0 && y[i - 1] >= half) --i;
  if (i == 0)
    p.bounded = false;
  else
    lo = crossing(i, i - 1);
  std::size_t j = top;
  while (j + 1 < y.size() && y[j + 1] >= half) ++j;
  if (j + 1 == y.size())
    p.bounded = false;
  else
    hi = crossing(j, j + 1);
  p.fwhm = hi - lo;
  return p;
}

ScaleResult run_scale_study(const RunConfig& cfg) {
  cfg.validate();
  const auto& sc = cfg.scale;
  std::vector<double> vs;
  const auto n = static_cast<std::size_t>(std::floor((sc.v_max - sc.v_min) / sc.v_step + 1e-9)) + 1;
  for (std::size_t i = 0; i < n; ++i) vs.push_back(sc.v_min + sc.v_step * static_cast<double>(i));

  auto run_case = [&](const std::string& name, const Interferometer& ifm) {
    ScaleCase c;
    c.name = name;
    c.mass = ifm.species.mass;
    c.period = ifm.period();
    c.velocities = vs;
    c.visibility = parallel_map<double>(vs.size(), ifm.numerics.threads, [&](std::size_t i) {
      return monochromatic_visibility(ifm, vs[i], true);
    });
    c.peak = peak_width(c.velocities, c.visibility);
    c.talbot_length = talbot_length(c.period, de_broglie_wavelength(c.mass, c.peak.v_peak));
    return c;
  };

  ScaleResult r;
  r.baseline = run_case("baseline", cfg.ifm);
  Interferometer scaled = cfg.ifm;
  scaled.species.mass *= sc.mass_factor;
  for (auto& g : scaled.gratings) g.period *= sc.period_factor;
  r.scaled = run_case("scaled", scaled);
  return r;
}

std::string scale_csv(const ScaleResult& r) {
  std::vector<std::vector<std::string>> rows;
  for (const auto* c : {&r.baseline, &r.scaled})
    for (std::size_t i = 0; i < c->velocities.size(); ++i)
      rows.push_back({c->name, text::num(c->velocities[i]), text::num(c->visibility[i])});
  return csv_table({"case", "v_mps", "visibility"}, rows);
}

std::string scale_summary_csv(const ScaleResult& r) {
  std::vector<std::vector<std::string>> rows;
  for (const auto* c : {&r.baseline, &r.scaled})
    rows.push_back({c->name, text::num(c->mass), text::num(c->period), text::num(c->talbot_length),
                    text::num(c->peak.v_peak), text::num(c->peak.visibility), text::num(c->peak.fwhm),
                    text::num(c->peak.relative()), c->peak.bounded ? "true" : "false"});
  return csv_table({"case", "mass_kg", "period_m", "talbot_length_at_peak_m", "peak_v_mps", "peak_visibility",
                    "fwhm_mps", "relative_width", "bounded"},
                   rows);
}

OracleCheckResult run_oracle_check(const RunConfig& cfg) {
  cfg.validate();
  OracleCheckResult r;
  for (bool vdw : {true, false})
    for (double v : cfg.oracle.velocities) {
      OracleRow row;
      try {
        row.comparison = compare_with_oracle(cfg.ifm, v, vdw, cfg.oracle.oracle);
      } catch (const OracleFailure& e) {
        row.converged = false;
        row.failure = e.what();
        row.comparison.velocity = v;
        row.comparison.vdw = vdw;
      }
      row.pass = row.converged && row.comparison.difference() <= cfg.oracle.tolerance;
      r.pass = r.pass && row.pass;
      r.rows.push_back(std::move(row));
    }
  return r;
}

std::string oracle_csv(const OracleCheckResult& r) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : r.rows) {
    const auto& c = row.comparison;
    rows.push_back({text::num(c.velocity), c.vdw ? "on" : "off", text::num(c.fourier_visibility),
                    text::num(c.oracle_visibility), text::num(c.doubled_visibility), text::num(c.difference()),
                    text::num(c.doubling_change()), row.converged ? "true" : "false", row.pass ? "pass" : "fail"});
  }
  return csv_table({"v_mps", "vdw", "fourier_visibility", "oracle_visibility", "doubled_visibility", "difference",
                    "doubling_change", "converged", "result"},
                   rows);
}

void write_text(const std::filesystem::path& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + (dir / name).string() + "'");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + (dir / name).string() + "'");
}

}  // namespace talbot
