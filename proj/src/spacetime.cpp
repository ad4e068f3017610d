#include "cho/spacetime.hpp"

#include <algorithm>
#include <cmath>

namespace cho {

TimeGrid::TimeGrid(double final_time, int steps) : T_(final_time), nt_(steps) {
    if (!(final_time > 0.0) || !std::isfinite(final_time)) throw InvalidArgument("final time must be > 0");
    if (steps < 1) throw InvalidArgument("need at least one time step");
}

FieldSeries zero_series(const Grid& grid, const TimeGrid& time) {
    return FieldSeries(static_cast<std::size_t>(time.steps()) + 1, Field(grid));
}

FieldSeries constant_series(const Grid& grid, const TimeGrid& time, double value) {
    return FieldSeries(static_cast<std::size_t>(time.steps()) + 1, Field(grid, value));
}

void check_series(const FieldSeries& s, const Grid& grid, const TimeGrid& time, const char* what) {
    if (s.size() != static_cast<std::size_t>(time.steps()) + 1) {
        throw ShapeMismatch(std::string(what) + ": expected " + std::to_string(time.steps() + 1) +
                            " time slices, got " + std::to_string(s.size()));
    }
    for (const Field& f : s) {
        if (!(f.grid() == grid)) throw ShapeMismatch(std::string(what) + ": slice lives on a different grid");
    }
}

double inner_Q(const FieldSeries& a, const FieldSeries& b, const TimeGrid& time) {
    if (a.size() != b.size() || a.size() != static_cast<std::size_t>(time.steps()) + 1) {
        throw ShapeMismatch("inner_Q: series lengths differ");
    }
    double sum = 0.0;
    for (int n = 0; n <= time.steps(); ++n) sum += time.weight(n) * spectral::inner(a[n], b[n]);
    return sum * time.tau();
}

double norm_Q(const FieldSeries& a, const TimeGrid& time) { return std::sqrt(inner_Q(a, a, time)); }

double linf(const FieldSeries& a) {
    double m = 0.0;
    for (const Field& f : a) m = std::max(m, spectral::max_abs(f));
    return m;
}

double dt_norm(const FieldSeries& a, const TimeGrid& time) {
    const double tau = time.tau();
    double sum = 0.0;
    for (std::size_t n = 0; n + 1 < a.size(); ++n) {
        const Field d = a[n + 1] - a[n];
        sum += spectral::inner(d, d) / (tau * tau) * tau;
    }
    return std::sqrt(sum);
}

double max_norm_H(const FieldSeries& a) {
    double m = 0.0;
    for (const Field& f : a) m = std::max(m, spectral::norm_H(f));
    return m;
}

FieldSeries axpy(const FieldSeries& a, double s, const FieldSeries& b) {
    if (a.size() != b.size()) throw ShapeMismatch("axpy: series lengths differ");
    FieldSeries out = a;
    for (std::size_t n = 0; n < a.size(); ++n) out[n].axpy(s, b[n]);
    return out;
}

}  // namespace cho
