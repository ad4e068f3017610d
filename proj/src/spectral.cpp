#include "cho/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>

namespace cho::spectral {

template <class Tag>
bool GridArray<Tag>::is_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

template class GridArray<NodalTag>;
template class GridArray<ModalTag>;

Grid::Grid(int nx, int ny, double lx, double ly) : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
    if (nx < 2) throw InvalidArgument("grid needs nx >= 2");
    if (ny < 1) throw InvalidArgument("grid needs ny >= 1 (ny == 1 encodes d = 1)");
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
        throw InvalidArgument("grid side lengths must be positive and finite");
    }
    eigenvalues_.resize(size());
    for (int k = 0; k < ny_; ++k) {
        for (int j = 0; j < nx_; ++j) eigenvalues_[index(j, k)] = eigenvalue(j, k);
    }
}

double Grid::eigenvalue(int j, int k) const noexcept {
    const double a = j * std::numbers::pi / lx_;
    const double b = ny_ == 1 ? 0.0 : k * std::numbers::pi / ly_;
    return a * a + b * b;
}

namespace {

// REDFT10 (DCT-II) and REDFT01 (DCT-III) plans plus the per-axis scale
// factors that turn FFTW's unnormalized transforms into coefficients against
// the normalized eigenfunctions.
struct Transform {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;
    std::vector<double> fwd_x, fwd_y, inv_x, inv_y;

    Transform(const Transform&) = delete;
    Transform& operator=(const Transform&) = delete;
    Transform(int nx, int ny, double lx, double ly);
    ~Transform() {
        fftw_destroy_plan(forward);
        fftw_destroy_plan(inverse);
    }
};

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void axis_scales(int n, double l, std::vector<double>& fwd, std::vector<double>& inv) {
    fwd.resize(n);
    inv.resize(n);
    const double h = l / n;
    for (int j = 0; j < n; ++j) {
        const double c = j == 0 ? 1.0 : 2.0;
        fwd[j] = 0.5 * h * std::sqrt(c / l);
        inv[j] = j == 0 ? std::sqrt(1.0 / l) : 0.5 * std::sqrt(2.0 / l);
    }
}

Transform::Transform(int nx, int ny, double lx, double ly) {
    axis_scales(nx, lx, fwd_x, inv_x);
    axis_scales(ny, ly, fwd_y, inv_y);
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    double* in = fftw_alloc_real(n);
    double* out = fftw_alloc_real(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (ny == 1) {
        // no transform along y: the single coefficient is the plain integral
        fwd_y[0] = ly * std::sqrt(1.0 / ly);
        forward = fftw_plan_r2r_1d(nx, in, out, FFTW_REDFT10, flags);
        inverse = fftw_plan_r2r_1d(nx, in, out, FFTW_REDFT01, flags);
    } else {
        forward = fftw_plan_r2r_2d(ny, nx, in, out, FFTW_REDFT10, FFTW_REDFT10, flags);
        inverse = fftw_plan_r2r_2d(ny, nx, in, out, FFTW_REDFT01, FFTW_REDFT01, flags);
    }
    fftw_free(in);
    fftw_free(out);
}

// Plans depend on (nx, ny) and the scales on (lx, ly); both are cached for
// the life of the process. FFTW planning is not thread safe, execution with
// the new-array interface is.
const Transform& transform_for(const Grid& g) {
    using Key = std::pair<std::pair<int, int>, std::pair<double, double>>;
    static std::map<Key, std::unique_ptr<Transform>> cache;
    std::lock_guard lock(planner_mutex());
    Key key{{g.nx(), g.ny()}, {g.lx(), g.ly()}};
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache.emplace(key, std::make_unique<Transform>(g.nx(), g.ny(), g.lx(), g.ly())).first;
    }
    return *it->second;
}

}  // namespace

SpectralField to_spectral(const Field& f) {
    const Grid& g = f.grid();
    const Transform& t = transform_for(g);
    SpectralField s(g);
    fftw_execute_r2r(t.forward, const_cast<double*>(f.data()), s.data());
    for (int k = 0; k < g.ny(); ++k) {
        for (int j = 0; j < g.nx(); ++j) s.at(j, k) *= t.fwd_x[j] * t.fwd_y[k];
    }
    return s;
}

Field from_spectral(const SpectralField& s) {
    const Grid& g = s.grid();
    const Transform& t = transform_for(g);
    SpectralField scaled = s;
    for (int k = 0; k < g.ny(); ++k) {
        for (int j = 0; j < g.nx(); ++j) scaled.at(j, k) *= t.inv_x[j] * t.inv_y[k];
    }
    Field f(g);
    fftw_execute_r2r(t.inverse, scaled.data(), f.data());
    return f;
}

SpectralField laplacian(const SpectralField& s) {
    SpectralField out = s;
    const auto& lam = s.grid().eigenvalues();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= -lam[i];
    return out;
}

Field laplacian(const Field& f) {
    return apply_multiplier(f, [](double lam) { return -lam; });
}

Field eigenfunction(const Grid& grid, int j, int k) {
    Field e(grid);
    const double cx = std::sqrt((j == 0 ? 1.0 : 2.0) / grid.lx());
    const double cy = std::sqrt((k == 0 ? 1.0 : 2.0) / grid.ly());
    for (int iy = 0; iy < grid.ny(); ++iy) {
        const double ey = grid.ny() == 1 ? cy : cy * std::cos(k * std::numbers::pi * grid.y(iy) / grid.ly());
        for (int ix = 0; ix < grid.nx(); ++ix) {
            e.at(ix, iy) = cx * std::cos(j * std::numbers::pi * grid.x(ix) / grid.lx()) * ey;
        }
    }
    return e;
}

double integral(const Field& f) {
    double sum = 0.0;
    for (double v : f.values()) sum += v;
    return sum * f.grid().cell_measure();
}

double mean(const Field& f) { return integral(f) / f.grid().area(); }

double inner(const Field& a, const Field& b) {
    if (!(a.grid() == b.grid())) throw ShapeMismatch("inner product of fields on different grids");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum * a.grid().cell_measure();
}

Field solve_N(const Field& f) {
    const double m = mean(f);
    if (std::abs(m) > 1e-10 * norm_H(f)) {
        throw NonzeroMean("solve_N requires zero-mean data (mean = " + std::to_string(m) + ")");
    }
    return apply_multiplier(f, [](double lam) { return lam > 0.0 ? 1.0 / lam : 0.0; });
}

double norm_H(const Field& f) { return std::sqrt(inner(f, f)); }

double norm_grad(const Field& f) {
    const SpectralField s = to_spectral(f);
    const auto& lam = f.grid().eigenvalues();
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) sum += lam[i] * s[i] * s[i];
    return std::sqrt(sum);
}

double norm_V(const Field& f) {
    const double h = norm_H(f);
    const double g = norm_grad(f);
    return std::sqrt(h * h + g * g);
}

double norm_Vstar(const Field& f) {
    const SpectralField s = to_spectral(f);
    const auto& lam = f.grid().eigenvalues();
    // ||grad N v||^2 = sum_{lambda > 0} c^2 / lambda
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (lam[i] > 0.0) sum += s[i] * s[i] / lam[i];
    }
    const double m = mean(f);
    return std::sqrt(sum + m * m);
}

double max_abs(const Field& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace cho::spectral
