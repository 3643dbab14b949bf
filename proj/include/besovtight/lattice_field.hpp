#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "besovtight/geometry.hpp"

namespace besovtight {

enum class FieldProvenance { magnetization, synthetic };

/// Grid geometry of a piecewise-constant field: nx * ny square cells of side
/// `spacing`, cell (i, j) = [origin.x + i a, origin.x + (i+1) a) x [...].
struct CellGrid {
    Point origin;
    double spacing = 1.0;
    int nx = 0;
    int ny = 0;

    std::size_t size() const noexcept { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    Rect extent() const noexcept {
        return {origin.x, origin.y, origin.x + nx * spacing, origin.y + ny * spacing};
    }
    double x_edge(int i) const noexcept { return origin.x + i * spacing; }
    double y_edge(int j) const noexcept { return origin.y + j * spacing; }
    Point center(int i, int j) const noexcept {
        return {origin.x + (i + 0.5) * spacing, origin.y + (j + 0.5) * spacing};
    }

    friend bool operator==(const CellGrid& a, const CellGrid& b) {
        return a.origin.x == b.origin.x && a.origin.y == b.origin.y && a.spacing == b.spacing && a.nx == b.nx &&
               a.ny == b.ny;
    }
};

/// Piecewise-constant field f = sum_c value_c 1_{cell c}; zero outside the grid.
/// Values are stored row-major: index j * nx + i.
class LatticeField {
public:
    LatticeField() = default;

    LatticeField(CellGrid grid, std::vector<double> values, FieldProvenance provenance = FieldProvenance::synthetic)
        : grid_(grid), values_(std::move(values)), provenance_(provenance) {
        if (grid_.nx <= 0 || grid_.ny <= 0) throw std::invalid_argument("lattice field needs a nonempty grid");
        if (!(grid_.spacing > 0)) throw std::invalid_argument("lattice spacing must be positive");
        if (values_.size() != grid_.size()) throw std::invalid_argument("lattice field: value count does not match grid");
    }

    static LatticeField constant(CellGrid grid, double c) {
        return LatticeField(grid, std::vector<double>(grid.size(), c));
    }

    const CellGrid& grid() const noexcept { return grid_; }
    double spacing() const noexcept { return grid_.spacing; }
    int nx() const noexcept { return grid_.nx; }
    int ny() const noexcept { return grid_.ny; }
    FieldProvenance provenance() const noexcept { return provenance_; }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    double at(int i, int j) const { return values_[index(i, j)]; }
    double& at(int i, int j) { return values_[index(i, j)]; }
    std::span<const double> row(int j) const noexcept {
        return std::span<const double>(values_).subspan(static_cast<std::size_t>(j) * grid_.nx, grid_.nx);
    }

    /// Same values on a grid translated by v.
    LatticeField shifted(Point v) const {
        CellGrid g = grid_;
        g.origin = {g.origin.x + v.x, g.origin.y + v.y};
        return LatticeField(g, values_, provenance_);
    }

    LatticeField scaled(double c) const {
        LatticeField out = *this;
        for (double& v : out.values_) v *= c;
        return out;
    }

    LatticeField& operator+=(const LatticeField& other) {
        require_same_grid(other);
        for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
        return *this;
    }
    LatticeField& operator-=(const LatticeField& other) {
        require_same_grid(other);
        for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
        return *this;
    }
    friend LatticeField operator+(LatticeField a, const LatticeField& b) { return a += b; }
    friend LatticeField operator-(LatticeField a, const LatticeField& b) { return a -= b; }

    void require_same_grid(const LatticeField& other) const {
        if (!(grid_ == other.grid_)) throw std::invalid_argument("lattice fields live on different grids");
    }

    /// Integral of |f|^p (p finite) or sup |f| (p = inf).
    double lp_norm(double p) const {
        const double cell = grid_.spacing * grid_.spacing;
        if (std::isinf(p)) {
            double m = 0.0;
            for (double v : values_) m = std::max(m, std::abs(v));
            return m;
        }
        double s = 0.0;
        for (double v : values_) s += std::pow(std::abs(v), p);
        return std::pow(s * cell, 1.0 / p);
    }

private:
    std::size_t index(int i, int j) const {
        if (i < 0 || j < 0 || i >= grid_.nx || j >= grid_.ny) throw std::out_of_range("lattice field index");
        return static_cast<std::size_t>(j) * grid_.nx + i;
    }

    CellGrid grid_;
    std::vector<double> values_;
    FieldProvenance provenance_ = FieldProvenance::synthetic;
};

}  // namespace besovtight
