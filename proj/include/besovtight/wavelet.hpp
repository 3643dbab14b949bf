#pragma once

// Compactly supported orthonormal wavelets (Haar / Daubechies DB-N, N <= 4):
// filters, cascade tabulation on dyadic grids, 2D tensor wavelets, and exact
// pairing of tabulated wavelets against piecewise-constant lattice fields.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/filters/daubechies.hpp>

#include "besovtight/binio.hpp"
#include "besovtight/geometry.hpp"
#include "besovtight/lattice_field.hpp"

namespace besovtight {

struct FilterCoefficients {
    std::vector<double> taps;  // low-pass h_0 .. h_{2N-1}
    int vanishing_moments = 0;

    /// Quadrature-mirror high-pass filter g_k = (-1)^k h_{2N-1-k}.
    std::vector<double> highpass() const {
        const std::size_t m = taps.size();
        std::vector<double> g(m);
        for (std::size_t k = 0; k < m; ++k) g[k] = ((k % 2) ? -1.0 : 1.0) * taps[m - 1 - k];
        return g;
    }
};

struct FilterResiduals {
    double dc_gain = 0.0;          // |sum h - sqrt 2|
    double energy = 0.0;           // |sum h^2 - 1|
    double shift_orthogonality = 0.0;  // max_{m != 0} |sum_k h_k h_{k+2m}|
};

inline FilterResiduals filter_residuals(const FilterCoefficients& f) {
    FilterResiduals r;
    double s = 0.0, s2 = 0.0;
    for (double h : f.taps) {
        s += h;
        s2 += h * h;
    }
    r.dc_gain = std::abs(s - std::numbers::sqrt2);
    r.energy = std::abs(s2 - 1.0);
    const int m = static_cast<int>(f.taps.size());
    for (int shift = 2; shift < m; shift += 2) {
        double acc = 0.0;
        for (int k = 0; k + shift < m; ++k) acc += f.taps[k] * f.taps[k + shift];
        r.shift_orthogonality = std::max(r.shift_orthogonality, std::abs(acc));
    }
    return r;
}

namespace detail {
template <unsigned N>
FilterCoefficients boost_filter() {
    const auto h = boost::math::filters::daubechies_scaling_filter<double, N>();
    return FilterCoefficients{std::vector<double>(h.begin(), h.end()), static_cast<int>(N)};
}
}  // namespace detail

/// Orthonormal Daubechies low-pass filter with N vanishing moments (N = 1 is Haar).
inline FilterCoefficients daubechies_filter(int n) {
    switch (n) {
        case 1: return detail::boost_filter<1>();
        case 2: return detail::boost_filter<2>();
        case 3: return detail::boost_filter<3>();
        case 4: return detail::boost_filter<4>();
        default:
            throw std::invalid_argument("daubechies_filter: N = " + std::to_string(n) +
                                        " is unsupported; vanishing moments must be in {1, 2, 3, 4}");
    }
}

/// A function on [0, support] sampled at step 2^-depth, with its running integral.
/// `cumulative[m]` is the integral over [0, m h] of the interpolant: piecewise
/// constant (sample-and-hold) for the discontinuous Haar functions, piecewise
/// linear otherwise.
struct TabulatedFunction1D {
    double support = 1.0;
    int depth = 0;
    bool piecewise_constant = false;
    std::vector<double> values;
    std::vector<double> cumulative;

    double step() const noexcept { return std::ldexp(1.0, -depth); }
    double total() const noexcept { return cumulative.back(); }

    double value(double u) const noexcept {
        const double t = u / step();
        if (t < 0 || t >= static_cast<double>(values.size() - 1)) return 0.0;
        const auto i = static_cast<std::size_t>(t);
        if (piecewise_constant) return values[i];
        const double frac = t - static_cast<double>(i);
        return values[i] + frac * (values[i + 1] - values[i]);
    }

    /// Integral of the interpolant over (-inf, u].
    double integral_to(double u) const noexcept {
        const double h = step();
        const double t = u / h;
        if (t <= 0) return 0.0;
        const std::size_t last = values.size() - 1;
        if (t >= static_cast<double>(last)) return cumulative[last];
        const auto i = static_cast<std::size_t>(t);
        const double delta = (t - static_cast<double>(i)) * h;
        if (piecewise_constant) return cumulative[i] + values[i] * delta;
        return cumulative[i] + values[i] * delta + (values[i + 1] - values[i]) * delta * delta / (2.0 * h);
    }

    void fill_cumulative() {
        const double h = step();
        cumulative.assign(values.size(), 0.0);
        for (std::size_t m = 1; m < values.size(); ++m) {
            const double inc = piecewise_constant ? values[m - 1] : 0.5 * (values[m - 1] + values[m]);
            cumulative[m] = cumulative[m - 1] + inc * h;
        }
    }
};

class CascadeError : public std::runtime_error {
public:
    CascadeError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

struct CascadeResult {
    TabulatedFunction1D phi;
    TabulatedFunction1D psi;
    double max_residual = 0.0;  // largest change at already-computed points over all refinements
};

inline constexpr double kCascadeTolerance = 1e-6;

namespace detail {

// Solves A v = b in place (small dense systems, partial pivoting).
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-14) throw std::runtime_error("cascade: singular integer-value system");
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
    return b;
}

}  // namespace detail

/// Tabulates phi and psi on [0, 2N-1] at step 2^-J. Integer values come from the
/// eigenvector of the two-scale operator; each of the J cascade iterations then
/// re-applies the refinement equation on the next dyadic level. The change of
/// values at points known from the previous iteration is the convergence residual.
inline CascadeResult tabulate_basis(const FilterCoefficients& filter, int depth) {
    if (depth < 6) throw std::invalid_argument("tabulate_basis: depth J must be >= 6");
    if (depth > 24) throw std::invalid_argument("tabulate_basis: depth J must be <= 24");
    const auto& h = filter.taps;
    const int taps = static_cast<int>(h.size());
    if (taps < 2 || taps % 2 != 0) throw std::invalid_argument("tabulate_basis: filter must have an even tap count");
    const int len = taps - 1;  // support length 2N - 1
    const std::int64_t scale = std::int64_t{1} << depth;
    const std::int64_t points = len * scale + 1;
    const double sqrt2 = std::numbers::sqrt2;

    std::vector<double> phi(static_cast<std::size_t>(points), 0.0);
    if (len == 1) {
        phi[0] = 1.0;  // Haar, right-continuous: phi(0) = 1, phi(1) = 0
    } else {
        // phi(m) = sqrt2 sum_l h_{2m-l} phi(l), m = 1..len-1, normalized by sum phi(m) = 1.
        const int n = len - 1;
        std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
        std::vector<double> b(n, 0.0);
        for (int m = 1; m <= n; ++m)
            for (int l = 1; l <= n; ++l) {
                const int k = 2 * m - l;
                a[m - 1][l - 1] = (k >= 0 && k < taps ? sqrt2 * h[k] : 0.0) - (m == l ? 1.0 : 0.0);
            }
        for (int l = 0; l < n; ++l) a[n - 1][l] = 1.0;
        b[n - 1] = 1.0;
        const auto v = detail::solve_dense(a, b);
        for (int m = 1; m <= n; ++m) phi[static_cast<std::size_t>(m * scale)] = v[m - 1];
    }

    auto refine_at = [&](std::int64_t m) {
        double acc = 0.0;
        for (int k = 0; k < taps; ++k) {
            const std::int64_t idx = 2 * m - k * scale;
            if (idx >= 0 && idx < points) acc += h[k] * phi[static_cast<std::size_t>(idx)];
        }
        return sqrt2 * acc;
    };

    double max_residual = 0.0;
    std::vector<double> next(phi.size());
    for (int j = 1; j <= depth; ++j) {
        const std::int64_t stride = std::int64_t{1} << (depth - j);
        double residual = 0.0;
        for (std::int64_t m = 0; m < points; m += stride) {
            const double val = refine_at(m);
            if (m % (2 * stride) == 0) residual = std::max(residual, std::abs(val - phi[static_cast<std::size_t>(m)]));
            next[static_cast<std::size_t>(m)] = val;
        }
        for (std::int64_t m = 0; m < points; m += stride) phi[static_cast<std::size_t>(m)] = next[static_cast<std::size_t>(m)];
        max_residual = std::max(max_residual, residual);
        if (!(residual <= kCascadeTolerance))
            throw CascadeError("cascade did not converge at iteration " + std::to_string(j) +
                                   ": residual " + std::to_string(residual),
                               residual);
    }

    const auto g = filter.highpass();
    std::vector<double> psi(phi.size(), 0.0);
    for (std::int64_t m = 0; m < points; ++m) {
        double acc = 0.0;
        for (int k = 0; k < taps; ++k) {
            const std::int64_t idx = 2 * m - k * scale;
            if (idx >= 0 && idx < points) acc += g[k] * phi[static_cast<std::size_t>(idx)];
        }
        psi[static_cast<std::size_t>(m)] = sqrt2 * acc;
    }

    CascadeResult out;
    for (auto* t : {&out.phi, &out.psi}) {
        t->support = len;
        t->depth = depth;
        t->piecewise_constant = (len == 1);
    }
    out.phi.values = std::move(phi);
    out.psi.values = std::move(psi);
    out.phi.fill_cumulative();
    out.psi.fill_cumulative();
    out.max_residual = max_residual;
    return out;
}

/// 2D kinds: father phi (x) phi and the three mothers phi (x) psi, psi (x) phi, psi (x) psi.
enum class WaveletKind : int { father = 0, mother1 = 1, mother2 = 2, mother3 = 3 };

inline constexpr std::array<WaveletKind, 3> kMotherKinds{WaveletKind::mother1, WaveletKind::mother2,
                                                        WaveletKind::mother3};

/// Immutable tensor-product basis. Supports sit at [0, 2N-1]^2 (corner at the
/// origin), so every function is supported in B(0, R) with R = (2N-1) sqrt 2.
class WaveletBasis2D {
public:
    WaveletBasis2D(FilterCoefficients filter, TabulatedFunction1D phi, TabulatedFunction1D psi)
        : filter_(std::move(filter)), phi_(std::move(phi)), psi_(std::move(psi)) {
        if (phi_.values.size() != psi_.values.size() || phi_.values.size() < 2)
            throw std::invalid_argument("basis tables have inconsistent sizes");
    }

    static WaveletBasis2D daubechies(int n, int depth = 14) {
        auto filter = daubechies_filter(n);
        auto tab = tabulate_basis(filter, depth);
        return WaveletBasis2D(std::move(filter), std::move(tab.phi), std::move(tab.psi));
    }

    const FilterCoefficients& filter() const noexcept { return filter_; }
    const TabulatedFunction1D& phi1d() const noexcept { return phi_; }
    const TabulatedFunction1D& psi1d() const noexcept { return psi_; }
    int vanishing_moments() const noexcept { return filter_.vanishing_moments; }
    /// Regularity / vanishing-moment budget r used to bound |alpha|.
    int regularity() const noexcept { return filter_.vanishing_moments; }
    int depth() const noexcept { return phi_.depth; }
    double support_length() const noexcept { return phi_.support; }
    double support_radius() const noexcept { return phi_.support * std::numbers::sqrt2; }

    std::string id() const {
        const std::string fam = vanishing_moments() == 1 ? "haar" : "db" + std::to_string(vanishing_moments());
        return fam + "-J" + std::to_string(depth());
    }

    /// (x-factor, y-factor) of a 2D kind.
    std::pair<const TabulatedFunction1D&, const TabulatedFunction1D&> factors(WaveletKind kind) const noexcept {
        switch (kind) {
            case WaveletKind::father: return {phi_, phi_};
            case WaveletKind::mother1: return {phi_, psi_};
            case WaveletKind::mother2: return {psi_, phi_};
            case WaveletKind::mother3: return {psi_, psi_};
        }
        return {phi_, phi_};
    }

    /// Unscaled 2D function g(y).
    double value(WaveletKind kind, Point y) const noexcept {
        auto [fx, fy] = factors(kind);
        return fx.value(y.x) * fy.value(y.y);
    }

    /// Integral over [l, r] of t -> 2^{n/2} g(2^n (t - x)).
    static double cell_integral(const TabulatedFunction1D& g, int n, double x, double l, double r) noexcept {
        const double s = std::ldexp(1.0, n);
        return (g.integral_to(s * (r - x)) - g.integral_to(s * (l - x))) / std::sqrt(s);
    }

private:
    FilterCoefficients filter_;
    TabulatedFunction1D phi_;
    TabulatedFunction1D psi_;
};

/// Dyadic position x = (i, j) / 2^n as integer indices.
struct DyadicIndex {
    long i = 0;
    long j = 0;
};

inline Point dyadic_point(int n, DyadicIndex idx) {
    return {std::ldexp(static_cast<double>(idx.i), -n), std::ldexp(static_cast<double>(idx.j), -n)};
}

/// Inclusive index box of positions on Lambda_n.
struct IndexBox {
    long i0 = 0, i1 = -1, j0 = 0, j1 = -1;
    bool empty() const noexcept { return i1 < i0 || j1 < j0; }
    long ni() const noexcept { return empty() ? 0 : i1 - i0 + 1; }
    long nj() const noexcept { return empty() ? 0 : j1 - j0 + 1; }
    std::size_t count() const noexcept { return static_cast<std::size_t>(ni()) * static_cast<std::size_t>(nj()); }
};

/// Lambda_n intersected with a closed rectangle.
inline IndexBox lattice_points_in(const Rect& k, int n) {
    const double s = std::ldexp(1.0, n);
    IndexBox b;
    b.i0 = static_cast<long>(std::ceil(k.x0 * s - 1e-9));
    b.i1 = static_cast<long>(std::floor(k.x1 * s + 1e-9));
    b.j0 = static_cast<long>(std::ceil(k.y0 * s - 1e-9));
    b.j1 = static_cast<long>(std::floor(k.y1 * s + 1e-9));
    return b;
}

/// Coefficients of one kind at one level over an index box, row-major (j - j0) * ni + (i - i0).
struct LevelGrid {
    int n = 0;
    WaveletKind kind = WaveletKind::father;
    IndexBox box;
    std::vector<double> values;

    double at(long i, long j) const { return values[static_cast<std::size_t>((j - box.j0) * box.ni() + (i - box.i0))]; }
    double& at(long i, long j) { return values[static_cast<std::size_t>((j - box.j0) * box.ni() + (i - box.i0))]; }
};

namespace detail {

// Sparse 1D weights of one scaled function over a run of cells.
struct CellWeights {
    int first = 0;
    std::vector<double> w;
};

inline CellWeights cell_weights(const TabulatedFunction1D& g, int n, double x, double origin, double spacing,
                                int ncells) {
    const double len = std::ldexp(g.support, -n);
    int lo = static_cast<int>(std::floor((x - origin) / spacing));
    int hi = static_cast<int>(std::ceil((x + len - origin) / spacing)) - 1;
    lo = std::max(lo, 0);
    hi = std::min(hi, ncells - 1);
    CellWeights cw;
    cw.first = lo;
    if (hi < lo) return cw;
    cw.w.resize(static_cast<std::size_t>(hi - lo + 1));
    for (int c = lo; c <= hi; ++c)
        cw.w[static_cast<std::size_t>(c - lo)] =
            WaveletBasis2D::cell_integral(g, n, x, origin + c * spacing, origin + (c + 1) * spacing);
    return cw;
}

}  // namespace detail

/// <field, g_{n,x}> with g_{n,x}(y) = 2^{dn/2} g(2^n (y - x)). Exact for the
/// tabulated interpolant: each cell contributes the product of two 1D
/// cumulative-table differences. Supports outside the field's cells give 0.
inline double pair_with_field(const WaveletBasis2D& basis, const LatticeField& field, WaveletKind kind, int n,
                              Point x) {
    const auto& grid = field.grid();
    auto [gx, gy] = basis.factors(kind);
    const auto wx = detail::cell_weights(gx, n, x.x, grid.origin.x, grid.spacing, grid.nx);
    const auto wy = detail::cell_weights(gy, n, x.y, grid.origin.y, grid.spacing, grid.ny);
    double acc = 0.0;
    for (std::size_t b = 0; b < wy.w.size(); ++b) {
        const auto row = field.row(wy.first + static_cast<int>(b));
        double racc = 0.0;
        for (std::size_t a = 0; a < wx.w.size(); ++a) racc += row[static_cast<std::size_t>(wx.first) + a] * wx.w[a];
        acc += racc * wy.w[b];
    }
    return acc;
}

/// All coefficients of one kind at level n over an index box (separable two-pass evaluation).
inline LevelGrid pair_level(const WaveletBasis2D& basis, const LatticeField& field, WaveletKind kind, int n,
                            const IndexBox& box) {
    LevelGrid out{n, kind, box, std::vector<double>(box.count(), 0.0)};
    if (box.empty()) return out;
    const auto& grid = field.grid();
    auto [gx, gy] = basis.factors(kind);
    const long ni = box.ni(), nj = box.nj();
    std::vector<detail::CellWeights> wx(static_cast<std::size_t>(ni)), wy(static_cast<std::size_t>(nj));
    for (long a = 0; a < ni; ++a)
        wx[static_cast<std::size_t>(a)] = detail::cell_weights(gx, n, std::ldexp(static_cast<double>(box.i0 + a), -n),
                                                               grid.origin.x, grid.spacing, grid.nx);
    for (long b = 0; b < nj; ++b)
        wy[static_cast<std::size_t>(b)] = detail::cell_weights(gy, n, std::ldexp(static_cast<double>(box.j0 + b), -n),
                                                               grid.origin.y, grid.spacing, grid.ny);
    // rows[a][row] = sum_col f[row][col] wx_a[col]
    std::vector<double> rows(static_cast<std::size_t>(ni) * grid.ny, 0.0);
    for (int r = 0; r < grid.ny; ++r) {
        const auto frow = field.row(r);
        for (long a = 0; a < ni; ++a) {
            const auto& cw = wx[static_cast<std::size_t>(a)];
            double acc = 0.0;
            for (std::size_t t = 0; t < cw.w.size(); ++t) acc += frow[static_cast<std::size_t>(cw.first) + t] * cw.w[t];
            rows[static_cast<std::size_t>(a) * grid.ny + r] = acc;
        }
    }
    for (long b = 0; b < nj; ++b) {
        const auto& cw = wy[static_cast<std::size_t>(b)];
        for (long a = 0; a < ni; ++a) {
            const double* col = &rows[static_cast<std::size_t>(a) * grid.ny];
            double acc = 0.0;
            for (std::size_t t = 0; t < cw.w.size(); ++t) acc += col[static_cast<std::size_t>(cw.first) + t] * cw.w[t];
            out.values[static_cast<std::size_t>(b * ni + a)] = acc;
        }
    }
    return out;
}

/// Adds sum_x c_x * (cell average of g_{n,x}) to `values` laid out on `grid`.
inline void synthesize_level(const WaveletBasis2D& basis, const LevelGrid& coeffs, const CellGrid& grid,
                             std::vector<double>& values) {
    if (values.size() != grid.size()) throw std::invalid_argument("synthesize_level: output size mismatch");
    if (coeffs.box.empty()) return;
    auto [gx, gy] = basis.factors(coeffs.kind);
    const int n = coeffs.n;
    const long ni = coeffs.box.ni(), nj = coeffs.box.nj();
    const double inv = 1.0 / grid.spacing;
    std::vector<detail::CellWeights> wx(static_cast<std::size_t>(ni)), wy(static_cast<std::size_t>(nj));
    for (long a = 0; a < ni; ++a)
        wx[static_cast<std::size_t>(a)] = detail::cell_weights(
            gx, n, std::ldexp(static_cast<double>(coeffs.box.i0 + a), -n), grid.origin.x, grid.spacing, grid.nx);
    for (long b = 0; b < nj; ++b)
        wy[static_cast<std::size_t>(b)] = detail::cell_weights(
            gy, n, std::ldexp(static_cast<double>(coeffs.box.j0 + b), -n), grid.origin.y, grid.spacing, grid.ny);
    // tmp[b][col] = sum_a c[a][b] wx_a[col] / a
    std::vector<double> tmp(static_cast<std::size_t>(nj) * grid.nx, 0.0);
    for (long b = 0; b < nj; ++b) {
        double* line = &tmp[static_cast<std::size_t>(b) * grid.nx];
        for (long a = 0; a < ni; ++a) {
            const double c = coeffs.values[static_cast<std::size_t>(b * ni + a)];
            if (c == 0.0) continue;
            const auto& cw = wx[static_cast<std::size_t>(a)];
            for (std::size_t t = 0; t < cw.w.size(); ++t) line[static_cast<std::size_t>(cw.first) + t] += c * cw.w[t] * inv;
        }
    }
    for (long b = 0; b < nj; ++b) {
        const auto& cw = wy[static_cast<std::size_t>(b)];
        const double* line = &tmp[static_cast<std::size_t>(b) * grid.nx];
        for (std::size_t t = 0; t < cw.w.size(); ++t) {
            const double wyv = cw.w[t] * inv;
            double* out = &values[static_cast<std::size_t>(cw.first + static_cast<int>(t)) * grid.nx];
            for (int col = 0; col < grid.nx; ++col) out[col] += wyv * line[col];
        }
    }
}

struct MomentResidual {
    WaveletKind kind;
    int bx = 0;
    int by = 0;
    double residual = 0.0;
};

namespace detail {
// Midpoint-rule moment of a tabulated function: int u^b g(u) du.
inline double moment1d(const TabulatedFunction1D& g, int b) {
    const double h = g.step();
    double acc = 0.0;
    for (std::size_t m = 0; m + 1 < g.values.size(); ++m) {
        const double mid = (static_cast<double>(m) + 0.5) * h;
        const double val = g.piecewise_constant ? g.values[m] : 0.5 * (g.values[m] + g.values[m + 1]);
        acc += std::pow(mid, b) * val;
    }
    return acc * h;
}
}  // namespace detail

/// |int x^beta psi^(i)(x) dx| for every |beta| < r and i in {1, 2, 3}.
inline std::vector<MomentResidual> check_vanishing_moments(const WaveletBasis2D& basis) {
    std::vector<MomentResidual> out;
    const int r = basis.regularity();
    for (WaveletKind kind : kMotherKinds) {
        auto [gx, gy] = basis.factors(kind);
        for (int total = 0; total < r; ++total)
            for (int bx = 0; bx <= total; ++bx) {
                const int by = total - bx;
                out.push_back({kind, bx, by, std::abs(detail::moment1d(gx, bx) * detail::moment1d(gy, by))});
            }
    }
    return out;
}

// Flat binary blob: "BTWB", int32 N, int32 J, double R, then taps, phi values,
// phi cumulative, psi values, psi cumulative as length-prefixed double arrays.
inline void write_basis_blob(std::ostream& os, const WaveletBasis2D& basis) {
    binio::put_magic(os, "BTWB");
    binio::put<std::int32_t>(os, basis.vanishing_moments());
    binio::put<std::int32_t>(os, basis.depth());
    binio::put<double>(os, basis.support_radius());
    binio::put_doubles(os, basis.filter().taps);
    binio::put_doubles(os, basis.phi1d().values);
    binio::put_doubles(os, basis.phi1d().cumulative);
    binio::put_doubles(os, basis.psi1d().values);
    binio::put_doubles(os, basis.psi1d().cumulative);
}

inline WaveletBasis2D read_basis_blob(std::istream& is) {
    binio::expect_magic(is, "BTWB");
    const auto n = binio::get<std::int32_t>(is);
    const auto depth = binio::get<std::int32_t>(is);
    const auto radius = binio::get<double>(is);
    if (n < 1 || n > 4 || depth < 6 || depth > 24) throw std::runtime_error("basis blob: header out of range");
    FilterCoefficients filter{binio::get_doubles(is), n};
    if (filter.taps.size() != static_cast<std::size_t>(2 * n)) throw std::runtime_error("basis blob: tap count");
    auto make = [&](std::vector<double> v, std::vector<double> c) {
        TabulatedFunction1D t;
        t.support = 2 * n - 1;
        t.depth = depth;
        t.piecewise_constant = (n == 1);
        t.values = std::move(v);
        t.cumulative = std::move(c);
        const std::size_t expect = static_cast<std::size_t>(t.support * std::ldexp(1.0, depth)) + 1;
        if (t.values.size() != expect || t.cumulative.size() != expect)
            throw std::runtime_error("basis blob: table length does not match header");
        return t;
    };
    auto phi_v = binio::get_doubles(is);
    auto phi_c = binio::get_doubles(is);
    auto psi_v = binio::get_doubles(is);
    auto psi_c = binio::get_doubles(is);
    WaveletBasis2D basis(std::move(filter), make(std::move(phi_v), std::move(phi_c)),
                         make(std::move(psi_v), std::move(psi_c)));
    if (std::abs(basis.support_radius() - radius) > 1e-12) throw std::runtime_error("basis blob: radius mismatch");
    return basis;
}

}  // namespace besovtight
