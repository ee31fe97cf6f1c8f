#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "talbotlau/errors.hpp"
#include "talbotlau/runner.hpp"

using namespace talbot;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

std::string first_data_header(const std::string& csv) {
  std::size_t pos = 0;
  while (pos < csv.size() && csv[pos] == '#') pos = csv.find('\n', pos) + 1;
  return csv.substr(pos, csv.find('\n', pos) - pos);
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults parse back to the built-in configuration") {
  const RunConfig a = default_config();
  const RunConfig b = parse_config(default_config_text());
  const RunConfig c = parse_config("");
  for (const RunConfig* r : {&b, &c}) {
    CHECK(r->ifm.species.mass == doctest::Approx(a.ifm.species.mass).epsilon(1e-15));
    CHECK(r->ifm.gratings[1].c3 == doctest::Approx(0.09 * units::eV_nm3).epsilon(1e-12));
    CHECK(r->ifm.gratings[0].period == a.ifm.gratings[0].period);
    CHECK(r->sweep.centers.size() == 28);
    CHECK(r->sweep.centers.front() == 80.0);
    CHECK(r->sweep.centers.back() == 215.0);
    CHECK(r->gravity.tilts.size() == 5);
    CHECK(r->gravity.tilts[3] == doctest::Approx(1e-3));
    CHECK(r->scan.points == 100);
    CHECK(r->scan.dwell * r->scan.points == doctest::Approx(150.0));
    CHECK(r->oracle.velocities == std::vector<double>{90.0, 115.0, 160.0});
    CHECK_NOTHROW(r->validate());
  }
}

TEST_CASE("values are converted to SI") {
  const RunConfig r = parse_config(
      "grating2.period_nm = 500\ngrating1.period_nm = 500\ngrating3.period_nm = 500\n"
      "grating2.c3_eVnm3 = 0.045\ngeometry.tilt_mrad = 1.5\nscan.drift_nm_per_min = 2\n"
      "sweep.centers_mps = 90, 100 ,110\n# comment\n\n");
  CHECK(r.ifm.gratings[1].period == doctest::Approx(500e-9));
  CHECK(r.ifm.gratings[1].c3 == doctest::Approx(0.045 * units::eV_nm3));
  CHECK(r.ifm.gratings[0].c3 == doctest::Approx(0.09 * units::eV_nm3));
  CHECK(r.ifm.geometry.tilt_alpha == doctest::Approx(1.5e-3));
  CHECK(r.scan.drift == doctest::Approx(2e-9 / 60.0));
  CHECK(r.sweep.centers == std::vector<double>{90.0, 100.0, 110.0});
}

TEST_CASE("errors name the key") {
  CHECK(contains(config_error("sweep.centers_mps = \n"), "sweep.centers_mps"));
  CHECK(contains(config_error("sweep.centers_mps = \n"), "empty"));
  CHECK(contains(config_error("foo.bar = 1\n"), "foo.bar: unknown key"));
  CHECK(contains(config_error("grating2.open_fraction = 1.5\n"), "grating2"));
  CHECK(contains(config_error("scan.points = many\n"), "scan.points"));
  CHECK(contains(config_error("run.seed = 1\nrun.seed = 2\n"), "run.seed"));
  CHECK(contains(config_error("geometry.L2_m = 0.3\n"), "geometry"));
  CHECK(contains(config_error("distribution.kind = lorentzian\n"), "distribution.kind"));
  CHECK(contains(config_error("no equals sign\n"), "line 1"));
  CHECK(contains(config_error("sweep.columns = quantum_vdw,bogus\n"), "sweep.columns"));
  CHECK_THROWS_AS(load_config("/nonexistent/talbot.cfg"), ConfigError);
}

TEST_CASE("config file loading") {
  const auto path = std::filesystem::temp_directory_path() / "talbotlau_unit.cfg";
  std::ofstream(path) << "run.seed = 17\n";
  CHECK(load_config(path).seed == 17);
  std::filesystem::remove(path);
}

}

TEST_SUITE("runner") {

TEST_CASE("peak width of a triangle") {
  std::vector<double> x, y;
  for (int i = 0; i <= 200; ++i) {
    x.push_back(i);
    y.push_back(std::max(0.0, 1.0 - std::abs(i - 120.0) / 20.0));
  }
  const auto p = peak_width(x, y);
  CHECK(p.v_peak == 120.0);
  CHECK(p.visibility == 1.0);
  CHECK(p.fwhm == doctest::Approx(20.0));
  CHECK(p.bounded);
  CHECK(p.relative() == doctest::Approx(20.0 / 120.0));

  const std::vector<double> edge{1.0, 0.9, 0.2};
  CHECK_FALSE(peak_width({1.0, 2.0, 3.0}, edge).bounded);
}

TEST_CASE("sweep subset and CSV layout") {
  RunConfig cfg = parse_config("sweep.centers_mps = 90,115\nsweep.columns = quantum_vdw,flux\n");
  const auto r = run_visibility_sweep(cfg);
  const std::string csv = sweep_csv(r);
  CHECK(csv.rfind("# schema=1\n", 0) == 0);
  CHECK(first_data_header(csv) == "v_center_mps,vis_quantum_vdw,flux_rel");
  REQUIRE(r.column("vis_quantum_vdw") != nullptr);
  CHECK(r.column("vis_classical_vdw") == nullptr);
  CHECK(r.column("vis_quantum_vdw")->values[1] == doctest::Approx(0.3736).epsilon(0.002));
  CHECK(first_data_header(sweep_contrast_csv(r)) == "v_center_mps,contrast_quantum_vdw");
  CHECK(r.column("flux_rel")->values[1] > r.column("flux_rel")->values[0]);
}

TEST_CASE("sweep does not depend on the thread count") {
  RunConfig cfg = parse_config("sweep.centers_mps = 80,100,120,140\n");
  const std::string one = sweep_csv(run_visibility_sweep(cfg));
  cfg.ifm.numerics.threads = 4;
  CHECK(sweep_csv(run_visibility_sweep(cfg)) == one);
}

TEST_CASE("gravity sweep") {
  const auto r = run_gravity_sweep(default_config());
  REQUIRE(r.rows.size() == 5);
  CHECK(r.rows[2].alpha == 0.0);
  CHECK(r.rows[2].phase == 0.0);
  CHECK(std::isnan(r.rows[2].phase_per_mrad));
  CHECK(r.slope_per_mrad == doctest::Approx(0.2).epsilon(0.15));
  CHECK(r.rows[3].phase == doctest::Approx(-r.rows[1].phase).epsilon(1e-9));
  CHECK(first_data_header(gravity_csv(r)) == "alpha_rad,phase_rad,phase_per_mrad,visibility");

  // Broad distribution: visibility falls off with |alpha|.
  RunConfig broad = parse_config("distribution.fwhm_fraction = 0.35\ngravity.tilts_mrad = 0,1,2,3,4\n");
  const auto b = run_gravity_sweep(broad);
  for (std::size_t i = 1; i < b.rows.size(); ++i) CHECK(b.rows[i].visibility < b.rows[i - 1].visibility);
}

TEST_CASE("scan simulation is reproducible") {
  RunConfig cfg = default_config();
  const auto a = run_scan_sim(cfg);
  const auto b = run_scan_sim(cfg);
  REQUIRE(a.scans.size() == 1);
  CHECK(to_csv(a.scans[0]) == to_csv(b.scans[0]));
  CHECK(scan_summary_csv(a) == scan_summary_csv(b));
  CHECK(a.fits[0].visibility > 0.3);
  CHECK(a.fits[0].visibility < 0.45);
  CHECK(a.snr[0] == doctest::Approx(50.0).epsilon(0.3));
  cfg.seed = 2;
  CHECK(to_csv(run_scan_sim(cfg).scans[0]) != to_csv(a.scans[0]));

  RunConfig drift = parse_config("scan.repeats = 5\nscan.drift_nm_per_min = 2\n");
  const auto d = run_scan_sim(drift);
  REQUIRE(d.drift.has_value());
  CHECK(d.drift->nm_per_minute() == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("scale study") {
  RunConfig cfg = parse_config("scale.v_min_mps = 95\nscale.v_max_mps = 125\n");
  const auto r = run_scale_study(cfg);
  CHECK(r.scaled.mass == doctest::Approx(16.0 * r.baseline.mass));
  CHECK(r.scaled.period == doctest::Approx(0.25 * r.baseline.period));
  // L_T = d^2 / lambda at equal velocity is unchanged.
  CHECK(talbot_length(r.scaled.period, de_broglie_wavelength(r.scaled.mass, 110.0)) ==
        doctest::Approx(talbot_length(r.baseline.period, de_broglie_wavelength(r.baseline.mass, 110.0))));
  CHECK(r.scaled.peak.bounded);
  CHECK(r.scaled.peak.relative() > 0.005);
  CHECK(r.scaled.peak.relative() < 0.02);
  CHECK(first_data_header(scale_summary_csv(r)).rfind("case,", 0) == 0);
}

TEST_CASE("output files") {
  const auto dir = std::filesystem::temp_directory_path() / "talbotlau_unit_out";
  std::filesystem::remove_all(dir);
  write_text(dir / "nested", "a.csv", "x\n");
  std::ifstream in(dir / "nested" / "a.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "x");
  std::filesystem::remove_all(dir);
}

}
