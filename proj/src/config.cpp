#include "talbotlau/config.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "talbotlau/errors.hpp"
#include "text.hpp"

namespace talbot {

namespace {

struct ParseState {
  RunConfig cfg;
  std::array<bool, 3> c3_from_species{true, true, true};
  bool centers_from_range = true;
  double v_min = 80.0, v_max = 215.0, v_step = 5.0;
};

using Setter = std::function<void(ParseState&, std::string_view, const std::string&)>;

struct Entry {
  std::string key;
  std::string default_value;
  Setter set;
};

[[noreturn]] void bad(const std::string& key, const std::string& what, std::string_view got) {
  throw ConfigError(key + ": " + what + ", got '" + std::string(got) + "'");
}

double number(std::string_view v, const std::string& key) {
  double x = 0.0;
  if (!text::parse_double(v, x) || !std::isfinite(x)) bad(key, "expected a number", v);
  return x;
}

std::size_t count(std::string_view v, const std::string& key) {
  std::uint64_t x = 0;
  if (!text::parse_u64(v, x)) bad(key, "expected a non-negative integer", v);
  return static_cast<std::size_t>(x);
}

bool boolean(std::string_view v, const std::string& key) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  bad(key, "expected true or false", v);
}

std::vector<double> number_list(std::string_view v, const std::string& key, double scale) {
  std::vector<double> out;
  if (text::trim(v).empty()) throw ConfigError(key + ": empty list");
  while (true) {
    const auto comma = v.find(',');
    out.push_back(number(v.substr(0, comma), key) * scale);
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<std::string_view> word_list(std::string_view v) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = v.find(',');
    const auto w = text::trim(v.substr(0, comma));
    if (!w.empty()) out.push_back(w);
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

template <class F>
Setter num(F&& f) {
  return [f](ParseState& s, std::string_view v, const std::string& k) { f(s, number(v, k)); };
}

template <class F>
Setter cnt(F&& f) {
  return [f](ParseState& s, std::string_view v, const std::string& k) { f(s, count(v, k)); };
}

std::vector<Entry> grating_entries(int i) {
  const std::string p = "grating" + std::to_string(i + 1) + ".";
  const auto g = [i](ParseState& s) -> GratingSpec& { return s.cfg.ifm.gratings[static_cast<std::size_t>(i)]; };
  return {
      {p + "period_nm", "991.25", num([g](ParseState& s, double x) { g(s).period = x * units::nm; })},
      {p + "open_fraction", "0.48", num([g](ParseState& s, double x) { g(s).open_fraction = x; })},
      {p + "thickness_nm", "500", num([g](ParseState& s, double x) { g(s).thickness = x * units::nm; })},
      {p + "c3_eVnm3", "species",
       [g, i](ParseState& s, std::string_view v, const std::string& k) {
         const auto idx = static_cast<std::size_t>(i);
         s.c3_from_species[idx] = v == "species";
         if (!s.c3_from_species[idx]) g(s).c3 = number(v, k) * units::eV_nm3;
       }},
      {p + "edge_cutoff_nm", "1", num([g](ParseState& s, double x) { g(s).edge_cutoff = x * units::nm; })},
  };
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t = {
        {"species.name", "C70",
         [](ParseState& s, std::string_view v, const std::string&) { s.cfg.ifm.species.name = std::string(v); }},
        {"species.mass_amu", "840.77",
         num([](ParseState& s, double x) { s.cfg.ifm.species.mass = x * constants::amu; })},
        {"species.polarizability_A3", "97",
         num([](ParseState& s, double x) { s.cfg.ifm.species.dc_polarizability = x; })},
    };
    for (int i = 0; i < 3; ++i)
      for (auto& e : grating_entries(i)) t.push_back(std::move(e));
    const std::vector<Entry> rest = {
        {"geometry.L1_m", "0.22", num([](ParseState& s, double x) { s.cfg.ifm.geometry.L1 = x; })},
        {"geometry.L2_m", "0.22", num([](ParseState& s, double x) { s.cfg.ifm.geometry.L2 = x; })},
        {"geometry.tilt_mrad", "0",
         num([](ParseState& s, double x) { s.cfg.ifm.geometry.tilt_alpha = x * units::mrad; })},
        {"geometry.g_mps2", "9.80665", num([](ParseState& s, double x) { s.cfg.ifm.geometry.g = x; })},
        {"source.temperature_K", "923.15",
         num([](ParseState& s, double x) { s.cfg.ifm.oven_temperature = x; })},
        {"distribution.kind", "gaussian",
         [](ParseState& s, std::string_view v, const std::string& k) {
           if (v == "delta")
             s.cfg.distribution.kind = DistributionKind::delta;
           else if (v == "gaussian")
             s.cfg.distribution.kind = DistributionKind::gaussian;
           else if (v == "effusive_weighted_gaussian")
             s.cfg.distribution.kind = DistributionKind::effusive_weighted_gaussian;
           else
             bad(k, "expected delta, gaussian or effusive_weighted_gaussian", v);
         }},
        {"distribution.fwhm_fraction", "model",
         [](ParseState& s, std::string_view v, const std::string& k) {
           if (v == "model")
             s.cfg.distribution.fwhm_fraction.reset();
           else
             s.cfg.distribution.fwhm_fraction = number(v, k);
         }},
        {"numerics.samples_per_period", "65536",
         cnt([](ParseState& s, std::size_t x) { s.cfg.ifm.numerics.samples_per_period = x; })},
        {"numerics.n_max", "512",
         cnt([](ParseState& s, std::size_t x) { s.cfg.ifm.numerics.n_max = static_cast<int>(x); })},
        {"numerics.k_max", "8",
         cnt([](ParseState& s, std::size_t x) { s.cfg.ifm.numerics.k_max = static_cast<int>(x); })},
        {"numerics.velocity_nodes", "65",
         cnt([](ParseState& s, std::size_t x) { s.cfg.ifm.numerics.velocity_nodes = x; })},
        {"classical.mode", "quadrature",
         [](ParseState& s, std::string_view v, const std::string& k) {
           if (v == "quadrature")
             s.cfg.rays.mode = RayIntegration::quadrature;
           else if (v == "monte_carlo")
             s.cfg.rays.mode = RayIntegration::monte_carlo;
           else
             bad(k, "expected quadrature or monte_carlo", v);
         }},
        {"classical.max_panel_nm", text::num(RayBundleSpec{}.max_panel_width / units::nm),
         num([](ParseState& s, double x) { s.cfg.rays.max_panel_width = x * units::nm; })},
        {"classical.phase_step_rad", "0.5", num([](ParseState& s, double x) { s.cfg.rays.phase_step = x; })},
        {"classical.tail_tolerance", "0.0001",
         num([](ParseState& s, double x) { s.cfg.rays.tail_tolerance = x; })},
        {"classical.shifts", "64", cnt([](ParseState& s, std::size_t x) { s.cfg.rays.shifts = x; })},
        {"classical.mc_rays", "1048576", cnt([](ParseState& s, std::size_t x) { s.cfg.rays.mc_rays = x; })},
        {"sweep.v_min_mps", "80", num([](ParseState& s, double x) { s.v_min = x; })},
        {"sweep.v_max_mps", "215", num([](ParseState& s, double x) { s.v_max = x; })},
        {"sweep.v_step_mps", "5", num([](ParseState& s, double x) { s.v_step = x; })},
        {"sweep.centers_mps", "range",
         [](ParseState& s, std::string_view v, const std::string& k) {
           s.centers_from_range = v == "range";
           if (!s.centers_from_range) s.cfg.sweep.centers = number_list(v, k, 1.0);
         }},
        {"sweep.columns", "quantum_vdw,quantum_novdw,classical_vdw,classical_novdw,flux",
         [](ParseState& s, std::string_view v, const std::string& k) {
           auto& w = s.cfg.sweep;
           w.quantum_vdw = w.quantum_novdw = w.classical_vdw = w.classical_novdw = w.flux = false;
           for (auto c : word_list(v)) {
             if (c == "quantum_vdw")
               w.quantum_vdw = true;
             else if (c == "quantum_novdw")
               w.quantum_novdw = true;
             else if (c == "classical_vdw")
               w.classical_vdw = true;
             else if (c == "classical_novdw")
               w.classical_novdw = true;
             else if (c == "flux")
               w.flux = true;
             else
               bad(k, "unknown column", c);
           }
         }},
        {"scan.velocity_mps", "115", num([](ParseState& s, double x) { s.cfg.scan.velocity = x; })},
        {"scan.rate_hz", "225", num([](ParseState& s, double x) { s.cfg.scan.rate = x; })},
        {"scan.visibility", "model",
         [](ParseState& s, std::string_view v, const std::string& k) {
           if (v == "model")
             s.cfg.scan.visibility.reset();
           else
             s.cfg.scan.visibility = number(v, k);
         }},
        {"scan.phase_rad", "0", num([](ParseState& s, double x) { s.cfg.scan.phase = x; })},
        {"scan.points", "100", cnt([](ParseState& s, std::size_t x) { s.cfg.scan.points = x; })},
        {"scan.dwell_s", "1.5", num([](ParseState& s, double x) { s.cfg.scan.dwell = x; })},
        {"scan.periods", "3", num([](ParseState& s, double x) { s.cfg.scan.periods = x; })},
        {"scan.dark_rate_hz", "0.2", num([](ParseState& s, double x) { s.cfg.scan.dark_rate = x; })},
        {"scan.subtract_dark", "false",
         [](ParseState& s, std::string_view v, const std::string& k) { s.cfg.scan.subtract_dark = boolean(v, k); }},
        {"scan.repeats", "1", cnt([](ParseState& s, std::size_t x) { s.cfg.scan.repeats = x; })},
        {"scan.interval_s", "300", num([](ParseState& s, double x) { s.cfg.scan.interval = x; })},
        {"scan.drift_nm_per_min", "0",
         num([](ParseState& s, double x) { s.cfg.scan.drift = x * units::nm / 60.0; })},
        {"gravity.velocity_mps", "115", num([](ParseState& s, double x) { s.cfg.gravity.velocity = x; })},
        {"gravity.tilts_mrad", "-2,-1,0,1,2",
         [](ParseState& s, std::string_view v, const std::string& k) {
           s.cfg.gravity.tilts = number_list(v, k, units::mrad);
         }},
        {"scale.mass_factor", "16", num([](ParseState& s, double x) { s.cfg.scale.mass_factor = x; })},
        {"scale.period_factor", "0.25", num([](ParseState& s, double x) { s.cfg.scale.period_factor = x; })},
        {"scale.v_min_mps", "80", num([](ParseState& s, double x) { s.cfg.scale.v_min = x; })},
        {"scale.v_max_mps", "215", num([](ParseState& s, double x) { s.cfg.scale.v_max = x; })},
        {"scale.v_step_mps", "0.2", num([](ParseState& s, double x) { s.cfg.scale.v_step = x; })},
        {"oracle.velocities_mps", "90,115,160",
         [](ParseState& s, std::string_view v, const std::string& k) {
           s.cfg.oracle.velocities = number_list(v, k, 1.0);
         }},
        {"oracle.tolerance", "0.01", num([](ParseState& s, double x) { s.cfg.oracle.tolerance = x; })},
        {"oracle.grating_samples", "32768",
         cnt([](ParseState& s, std::size_t x) { s.cfg.oracle.oracle.grating_samples = x; })},
        {"oracle.source_samples", "64",
         cnt([](ParseState& s, std::size_t x) { s.cfg.oracle.oracle.source_samples = x; })},
        {"oracle.screen_samples", "1024",
         cnt([](ParseState& s, std::size_t x) { s.cfg.oracle.oracle.screen_samples = x; })},
        {"oracle.shifts", "64", cnt([](ParseState& s, std::size_t x) { s.cfg.oracle.oracle.shifts = x; })},
        {"oracle.aperture_orders", "1024",
         cnt([](ParseState& s, std::size_t x) { s.cfg.oracle.oracle.aperture_orders = static_cast<int>(x); })},
        {"oracle.doubling_tolerance", "0.005",
         num([](ParseState& s, double x) { s.cfg.oracle.oracle.doubling_tolerance = x; })},
        {"run.seed", "1",
         [](ParseState& s, std::string_view v, const std::string& k) {
           std::uint64_t x = 0;
           if (!text::parse_u64(v, x)) bad(k, "expected an unsigned 64-bit integer", v);
           s.cfg.seed = x;
         }},
        {"run.threads", "1",
         cnt([](ParseState& s, std::size_t x) { s.cfg.ifm.numerics.threads = static_cast<unsigned>(x); })},
    };
    for (const auto& e : rest) t.push_back(e);
    return t;
  }();
  return table;
}

void finish(ParseState& s) {
  auto& cfg = s.cfg;
  cfg.ifm.species.c3_gold = c3_from_polarizability(cfg.ifm.species.dc_polarizability);
  for (std::size_t i = 0; i < 3; ++i)
    if (s.c3_from_species[i]) cfg.ifm.gratings[i].c3 = cfg.ifm.species.c3_gold;
  if (s.centers_from_range) {
    if (!(s.v_step > 0.0)) throw ConfigError("sweep.v_step_mps: must be positive");
    if (!(s.v_max >= s.v_min)) throw ConfigError("sweep.v_max_mps: must be >= sweep.v_min_mps");
    cfg.sweep.centers.clear();
    const auto n = static_cast<std::size_t>(std::floor((s.v_max - s.v_min) / s.v_step + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i) cfg.sweep.centers.push_back(s.v_min + s.v_step * static_cast<double>(i));
  }
  cfg.rays.seed = cfg.seed;
}

template <class F>
void checked(const std::string& prefix, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(prefix + ": " + e.what());
  }
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key + ": " + what);
}

}  // namespace

void RunConfig::validate() const {
  checked("species", [&] { ifm.species.validate(); });
  for (std::size_t i = 0; i < 3; ++i)
    checked("grating" + std::to_string(i + 1), [&] { ifm.gratings[i].validate(); });
  checked("geometry", [&] {
    ifm.geometry.validate();
    ifm.geometry.require_symmetric();
  });
  const double d = ifm.gratings[1].period;
  for (std::size_t i = 0; i < 3; ++i)
    require(std::abs(ifm.gratings[i].period - d) <= 1e-12 * d,
            "grating" + std::to_string(i + 1) + ".period_nm", "all gratings must share one period");
  require(ifm.oven_temperature > 0.0, "source.temperature_K", "must be positive");
  const auto& n = ifm.numerics;
  require(n.samples_per_period >= 4096 && (n.samples_per_period & (n.samples_per_period - 1)) == 0,
          "numerics.samples_per_period", "must be a power of two >= 4096");
  require(n.k_max >= 1, "numerics.k_max", "must be >= 1");
  require(n.n_max >= 2 * n.k_max, "numerics.n_max", "must be >= 2 * numerics.k_max");
  require(static_cast<std::size_t>(n.n_max) < n.samples_per_period / 2, "numerics.n_max",
          "must be below samples_per_period / 2");
  require(n.velocity_nodes >= 3 && n.velocity_nodes % 2 == 1, "numerics.velocity_nodes",
          "must be odd and >= 3");
  require(n.threads >= 1, "run.threads", "must be >= 1");
  if (distribution.fwhm_fraction)
    require(*distribution.fwhm_fraction >= 0.0 && *distribution.fwhm_fraction < 1.0,
            "distribution.fwhm_fraction", "must be in [0, 1)");
  checked("classical", [&] { rays.validate(); });
  require(rays.shifts > static_cast<std::size_t>(2 * n.k_max), "classical.shifts",
          "must exceed 2 * numerics.k_max");

  require(!sweep.centers.empty(), "sweep.centers_mps", "empty velocity list");
  for (double c : sweep.centers) require(c > 0.0, "sweep.centers_mps", "velocities must be positive");
  require(sweep.quantum_vdw || sweep.quantum_novdw || sweep.classical_vdw || sweep.classical_novdw ||
              sweep.flux,
          "sweep.columns", "select at least one column");

  require(scan.velocity > 0.0, "scan.velocity_mps", "must be positive");
  require(scan.rate >= 0.0, "scan.rate_hz", "must be non-negative");
  if (scan.visibility)
    require(*scan.visibility >= 0.0 && *scan.visibility <= 1.0, "scan.visibility", "must be in [0, 1]");
  require(scan.points >= 16, "scan.points", "must be >= 16");
  require(scan.dwell > 0.0, "scan.dwell_s", "must be positive");
  require(scan.periods >= 2.0, "scan.periods", "must be >= 2");
  require(static_cast<double>(scan.points) / scan.periods >= 8.0, "scan.points",
          "need at least 8 points per period");
  require(scan.dark_rate >= 0.0, "scan.dark_rate_hz", "must be non-negative");
  require(scan.repeats >= 1, "scan.repeats", "must be >= 1");
  require(scan.interval > 0.0, "scan.interval_s", "must be positive");

  require(gravity.velocity > 0.0, "gravity.velocity_mps", "must be positive");
  require(!gravity.tilts.empty(), "gravity.tilts_mrad", "empty list");

  require(scale.mass_factor > 0.0, "scale.mass_factor", "must be positive");
  require(scale.period_factor > 0.0, "scale.period_factor", "must be positive");
  require(scale.v_min > 0.0, "scale.v_min_mps", "must be positive");
  require(scale.v_max > scale.v_min, "scale.v_max_mps", "must exceed scale.v_min_mps");
  require(scale.v_step > 0.0, "scale.v_step_mps", "must be positive");
  require(scale.period_factor * d * 0.5 * ifm.gratings[1].open_fraction > ifm.gratings[1].edge_cutoff,
          "scale.period_factor", "scaled slit is narrower than the edge cutoff");

  require(!oracle.velocities.empty(), "oracle.velocities_mps", "empty list");
  for (double v : oracle.velocities) require(v > 0.0, "oracle.velocities_mps", "velocities must be positive");
  require(oracle.tolerance > 0.0, "oracle.tolerance", "must be positive");
  checked("oracle", [&] { oracle.oracle.validate(); });
  require(oracle.oracle.shifts > static_cast<std::size_t>(2 * n.k_max), "oracle.shifts",
          "must exceed 2 * numerics.k_max");
}

std::string default_config_text() {
  std::string out = "# talbotlau run configuration\n";
  std::string section;
  for (const auto& e : entries()) {
    const std::string s = e.key.substr(0, e.key.find('.'));
    if (s != section) {
      if (!section.empty()) out += "\n";
      section = s;
    }
    out += e.key + " = " + e.default_value + "\n";
  }
  return out;
}

RunConfig default_config() { return parse_config(""); }

RunConfig parse_config(std::string_view input) {
  ParseState state;
  std::map<std::string, std::string> values;
  for (const auto& e : entries()) values[e.key] = e.default_value;

  std::map<std::string, std::size_t> seen;
  std::size_t line_no = 0;
  while (!input.empty()) {
    const auto nl = input.find('\n');
    std::string_view line = input.substr(0, nl);
    input.remove_prefix(nl == std::string_view::npos ? input.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string at = "line " + std::to_string(line_no);
    if (eq == std::string_view::npos) throw ConfigError(at + ": expected 'key = value'");
    const std::string key(text::trim(line.substr(0, eq)));
    if (!values.count(key)) throw ConfigError(key + ": unknown key (" + at + ")");
    if (auto it = seen.find(key); it != seen.end())
      throw ConfigError(key + ": repeated on " + at + " (first set on line " +
                        std::to_string(it->second) + ")");
    seen[key] = line_no;
    values[key] = std::string(text::trim(line.substr(eq + 1)));
  }
  for (const auto& e : entries()) e.set(state, values[e.key], e.key);
  finish(state);
  state.cfg.validate();
  return state.cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace talbot
