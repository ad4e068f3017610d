#pragma once

#include <cstdint>
#include <random>

#include "cho/spacetime.hpp"

/// Seeded smooth random data. Draws come straight from the mt19937_64 bit
/// stream so a seed reproduces the same fields on every platform.
namespace cho::random {

using Engine = std::mt19937_64;

/// Uniform on [-1, 1).
[[nodiscard]] double symmetric_unit(Engine& rng);

/// Cosine series over modes j, k <= max_mode with coefficients decaying like
/// 1/(1 + j^2 + k^2), rescaled so that max |f| = amplitude.
/// With zero_mean the constant mode is dropped.
[[nodiscard]] Field smooth_field(const Grid& grid, Engine& rng, int max_mode, double amplitude,
                                 bool zero_mean = false);

/// Space-time series: sum over r < time_modes of cos(r pi t / T) times a
/// smooth field, rescaled so that the sup over Q equals amplitude.
[[nodiscard]] FieldSeries smooth_series(const Grid& grid, const TimeGrid& time, Engine& rng, int max_mode,
                                        int time_modes, double amplitude);

}  // namespace cho::random
