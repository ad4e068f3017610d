#include "cho/random.hpp"

#include <cmath>
#include <numbers>

namespace cho::random {

namespace sp = cho::spectral;

double symmetric_unit(Engine& rng) {
    return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

Field smooth_field(const Grid& grid, Engine& rng, int max_mode, double amplitude, bool zero_mean) {
    if (max_mode < 0) throw InvalidArgument("max_mode must be >= 0");
    sp::SpectralField s(grid);
    const int jmax = std::min(max_mode, grid.nx() - 1);
    const int kmax = std::min(max_mode, grid.ny() - 1);
    for (int k = 0; k <= kmax; ++k) {
        for (int j = 0; j <= jmax; ++j) {
            const double a = symmetric_unit(rng) / (1.0 + j * j + k * k);
            if (zero_mean && j == 0 && k == 0) continue;
            s[grid.index(j, k)] = a;
        }
    }
    Field f = sp::from_spectral(s);
    const double m = sp::max_abs(f);
    if (m > 0.0) f *= amplitude / m;
    return f;
}

FieldSeries smooth_series(const Grid& grid, const TimeGrid& time, Engine& rng, int max_mode, int time_modes,
                          double amplitude) {
    if (time_modes < 1) throw InvalidArgument("time_modes must be >= 1");
    std::vector<Field> shapes;
    for (int r = 0; r < time_modes; ++r) shapes.push_back(smooth_field(grid, rng, max_mode, 1.0 / (1.0 + r)));
    FieldSeries out = zero_series(grid, time);
    for (int n = 0; n <= time.steps(); ++n) {
        for (int r = 0; r < time_modes; ++r) {
            out[n].axpy(std::cos(r * std::numbers::pi * time.t(n) / time.final_time()), shapes[r]);
        }
    }
    const double m = linf(out);
    if (m > 0.0) {
        for (Field& f : out) f *= amplitude / m;
    }
    return out;
}

}  // namespace cho::random
