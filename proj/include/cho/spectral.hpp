#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cho/errors.hpp"

/// Tensor-product rectangle with homogeneous Neumann conditions, its cosine
/// eigenbasis and the norms built on it.
///
/// Nodes sit at cell midpoints x_i = (i + 1/2) lx / nx, so the discrete
/// cosine transform is exactly orthonormal with respect to the midpoint-rule
/// inner product <f, g> = sum_i f_i g_i |cell|. Coefficients are the
/// L2-coefficients against the normalized eigenfunctions
///
///     e_{jk}(x, y) = sqrt(c_j / lx) cos(j pi x / lx) sqrt(c_k / ly) cos(k pi y / ly),
///
/// with c_0 = 1 and c_j = 2 otherwise; -Laplace e_{jk} = lambda_{jk} e_{jk}.
namespace cho::spectral {

class Grid {
public:
    /// A one-dimensional grid is encoded as ny == 1.
    Grid(int nx, int ny, double lx, double ly);

    [[nodiscard]] int nx() const noexcept { return nx_; }
    [[nodiscard]] int ny() const noexcept { return ny_; }
    [[nodiscard]] double lx() const noexcept { return lx_; }
    [[nodiscard]] double ly() const noexcept { return ly_; }
    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }
    [[nodiscard]] int dimension() const noexcept { return ny_ == 1 ? 1 : 2; }
    [[nodiscard]] double cell_measure() const noexcept { return (lx_ / nx_) * (ly_ / ny_); }
    [[nodiscard]] double area() const noexcept { return lx_ * ly_; }

    [[nodiscard]] double x(int i) const noexcept { return (i + 0.5) * lx_ / nx_; }
    [[nodiscard]] double y(int j) const noexcept { return (j + 0.5) * ly_ / ny_; }

    /// Row-major flat index; x varies fastest.
    [[nodiscard]] std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(j) * nx_ + i;
    }

    /// lambda_{jk} = (j pi / lx)^2 + (k pi / ly)^2
    [[nodiscard]] double eigenvalue(int j, int k) const noexcept;

    /// Eigenvalues laid out like the coefficient array.
    [[nodiscard]] const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }

    friend bool operator==(const Grid& a, const Grid& b) noexcept {
        return a.nx_ == b.nx_ && a.ny_ == b.ny_ && a.lx_ == b.lx_ && a.ly_ == b.ly_;
    }

private:
    int nx_;
    int ny_;
    double lx_;
    double ly_;
    std::vector<double> eigenvalues_;
};

struct NodalTag {};
struct ModalTag {};

/// Grid-shaped array of reals. The tag keeps nodal values and cosine
/// coefficients from being mixed up.
template <class Tag>
class GridArray {
public:
    explicit GridArray(Grid grid) : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}
    GridArray(Grid grid, double fill) : grid_(std::move(grid)), values_(grid_.size(), fill) {}
    GridArray(Grid grid, std::vector<double> values)
        : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.size() != grid_.size()) {
            throw ShapeMismatch("value count does not match grid size");
        }
    }

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<double> values() noexcept { return values_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double* data() noexcept { return values_.data(); }
    [[nodiscard]] const double* data() const noexcept { return values_.data(); }

    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& at(int i, int j) noexcept { return values_[grid_.index(i, j)]; }
    [[nodiscard]] double at(int i, int j) const noexcept { return values_[grid_.index(i, j)]; }

    [[nodiscard]] bool is_finite() const noexcept;

    GridArray& operator+=(const GridArray& o) {
        check_same(o);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
        return *this;
    }
    GridArray& operator-=(const GridArray& o) {
        check_same(o);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
        return *this;
    }
    GridArray& operator*=(double s) noexcept {
        for (double& v : values_) v *= s;
        return *this;
    }
    /// this += s * o
    GridArray& axpy(double s, const GridArray& o) {
        check_same(o);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * o.values_[i];
        return *this;
    }

    friend GridArray operator+(GridArray a, const GridArray& b) { return a += b; }
    friend GridArray operator-(GridArray a, const GridArray& b) { return a -= b; }
    friend GridArray operator*(double s, GridArray a) { return a *= s; }
    friend GridArray operator*(GridArray a, double s) { return a *= s; }

private:
    void check_same(const GridArray& o) const {
        if (!(grid_ == o.grid_)) throw ShapeMismatch("grid arrays live on different grids");
    }

    Grid grid_;
    std::vector<double> values_;
};

using Field = GridArray<NodalTag>;
using SpectralField = GridArray<ModalTag>;

extern template class GridArray<NodalTag>;
extern template class GridArray<ModalTag>;

[[nodiscard]] SpectralField to_spectral(const Field& f);
[[nodiscard]] Field from_spectral(const SpectralField& s);

/// Multiplies coefficient (j,k) by -lambda_{jk}.
[[nodiscard]] SpectralField laplacian(const SpectralField& s);
[[nodiscard]] Field laplacian(const Field& f);

/// Applies a diagonal multiplier m(lambda_{jk}) in the eigenbasis.
template <class Multiplier>
[[nodiscard]] Field apply_multiplier(const Field& f, Multiplier&& m) {
    SpectralField s = to_spectral(f);
    const auto& lam = f.grid().eigenvalues();
    for (std::size_t i = 0; i < s.size(); ++i) s[i] *= m(lam[i]);
    return from_spectral(s);
}

/// Sampled normalized eigenfunction e_{jk}.
[[nodiscard]] Field eigenfunction(const Grid& grid, int j, int k);

[[nodiscard]] double mean(const Field& f);
[[nodiscard]] double integral(const Field& f);
/// Midpoint-rule L2 inner product.
[[nodiscard]] double inner(const Field& a, const Field& b);

/// Inverse Neumann Laplacian on zero-mean data: the zero-mean solution of
/// -Laplace w = f. Throws NonzeroMean when |mean(f)| > 1e-10 ||f||.
[[nodiscard]] Field solve_N(const Field& f);

[[nodiscard]] double norm_H(const Field& f);
/// ||grad f||
[[nodiscard]] double norm_grad(const Field& f);
/// (||f||^2 + ||grad f||^2)^{1/2}
[[nodiscard]] double norm_V(const Field& f);
/// Dual norm: (||grad N(f - mean f)||^2 + mean(f)^2)^{1/2}.
[[nodiscard]] double norm_Vstar(const Field& f);

[[nodiscard]] double max_abs(const Field& f);

}  // namespace cho::spectral
