#include "talbotlau/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <stdexcept>

namespace talbot::fft {

namespace {

// The FFTW planner is not reentrant; plan execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Plans are cached per (size, direction, alignment) and executed on new
// arrays. FFTW_ESTIMATE keeps the chosen algorithm, and so every rounding,
// identical from run to run.
fftw_plan cached_plan(std::span<std::complex<double>> data, Direction dir) {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  const auto key = std::make_tuple(data.size(), dir == Direction::forward,
                                   fftw_alignment_of(reinterpret_cast<double*>(p)));
  std::lock_guard lock(planner_mutex());
  static std::map<decltype(key), fftw_plan> plans;
  if (auto it = plans.find(key); it != plans.end()) return it->second;
  // Planning with FFTW_ESTIMATE does not touch the array contents.
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(data.size()), p, p,
                                    dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                    FFTW_ESTIMATE);
  if (plan == nullptr) throw std::runtime_error("fftw: planning failed");
  plans.emplace(key, plan);
  return plan;
}

}  // namespace

void transform(std::span<std::complex<double>> data, Direction dir) {
  if (data.empty()) return;
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(cached_plan(data, dir), p, p);
}

std::vector<std::complex<double>> circular_convolve(
    std::vector<std::complex<double>> a, std::vector<std::complex<double>> b) {
  if (a.size() != b.size()) throw std::invalid_argument("circular_convolve: size mismatch");
  transform(a, Direction::forward);
  transform(b, Direction::forward);
  const double scale = 1.0 / static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i] * scale;
  transform(a, Direction::backward);
  return a;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace talbot::fft
