#pragma once

#include <vector>

#include "cho/spectral.hpp"

namespace cho {

using spectral::Field;
using spectral::Grid;

/// Uniform time grid t_n = n T / nt, n = 0..nt.
class TimeGrid {
public:
    TimeGrid(double final_time, int steps);

    [[nodiscard]] double final_time() const noexcept { return T_; }
    [[nodiscard]] int steps() const noexcept { return nt_; }
    [[nodiscard]] double tau() const noexcept { return T_ / nt_; }
    [[nodiscard]] double t(int n) const noexcept { return n * tau(); }
    /// Trapezoid weight of slice n (1/2 at the end points, 1 inside).
    [[nodiscard]] double weight(int n) const noexcept { return (n == 0 || n == nt_) ? 0.5 : 1.0; }

    friend bool operator==(const TimeGrid& a, const TimeGrid& b) noexcept {
        return a.T_ == b.T_ && a.nt_ == b.nt_;
    }

private:
    double T_;
    int nt_;
};

/// One Field per time slice t_0..t_nt.
using FieldSeries = std::vector<Field>;

[[nodiscard]] FieldSeries zero_series(const Grid& grid, const TimeGrid& time);
[[nodiscard]] FieldSeries constant_series(const Grid& grid, const TimeGrid& time, double value);

/// Throws ShapeMismatch unless the series has nt+1 slices on `grid`.
void check_series(const FieldSeries& s, const Grid& grid, const TimeGrid& time, const char* what);

/// L2(Q) inner product: trapezoid in time, midpoint rule in space.
[[nodiscard]] double inner_Q(const FieldSeries& a, const FieldSeries& b, const TimeGrid& time);
[[nodiscard]] double norm_Q(const FieldSeries& a, const TimeGrid& time);
[[nodiscard]] double linf(const FieldSeries& a);
/// ||d_t u||_{L2(Q)} with forward differences.
[[nodiscard]] double dt_norm(const FieldSeries& a, const TimeGrid& time);
/// max_n ||a^n||_H
[[nodiscard]] double max_norm_H(const FieldSeries& a);

/// a + s b, slice by slice
[[nodiscard]] FieldSeries axpy(const FieldSeries& a, double s, const FieldSeries& b);

}  // namespace cho
