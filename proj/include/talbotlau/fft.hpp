#pragma once

#include <complex>
#include <span>
#include <vector>

namespace talbot::fft {

enum class Direction { forward, backward };

/// Unnormalized in-place DFT. Forward uses exp(-2 pi i k j / n).
void transform(std::span<std::complex<double>> data, Direction dir);

/// Circular convolution of two equally sized sequences.
std::vector<std::complex<double>> circular_convolve(
    std::vector<std::complex<double>> a, std::vector<std::complex<double>> b);

bool is_power_of_two(std::size_t n);

std::size_t next_power_of_two(std::size_t n);

}  // namespace talbot::fft
