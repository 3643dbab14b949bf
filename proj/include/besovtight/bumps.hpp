#pragma once

// Test functions supported in the unit disc: polynomial bumps for the Hölder
// dictionary, the smooth radial step used by the converse diagnostic, and
// cellwise quadrature pairing of such functions with lattice fields.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "besovtight/geometry.hpp"
#include "besovtight/lattice_field.hpp"

namespace besovtight {

/// Bivariate polynomial sum c[i][j] x^i y^j.
class Poly2 {
public:
    explicit Poly2(int degree = 0) : deg_(degree), c_((degree + 1) * (degree + 1), 0.0) {}

    int degree() const noexcept { return deg_; }
    double& coef(int i, int j) { return c_[static_cast<std::size_t>(i * (deg_ + 1) + j)]; }
    double coef(int i, int j) const { return c_[static_cast<std::size_t>(i * (deg_ + 1) + j)]; }

    double operator()(double x, double y) const noexcept {
        double acc = 0.0;
        for (int i = deg_; i >= 0; --i) {
            double row = 0.0;
            for (int j = deg_; j >= 0; --j) row = row * y + c_[static_cast<std::size_t>(i * (deg_ + 1) + j)];
            acc = acc * x + row;
        }
        return acc;
    }

    Poly2 dx() const {
        Poly2 out(deg_);
        for (int i = 1; i <= deg_; ++i)
            for (int j = 0; j <= deg_; ++j) out.coef(i - 1, j) = i * coef(i, j);
        return out;
    }
    Poly2 dy() const {
        Poly2 out(deg_);
        for (int i = 0; i <= deg_; ++i)
            for (int j = 1; j <= deg_; ++j) out.coef(i, j - 1) = j * coef(i, j);
        return out;
    }
    Poly2 scaled(double s) const {
        Poly2 out = *this;
        for (double& v : out.c_) v *= s;
        return out;
    }

    /// (1 - x^2 - y^2)^m
    static Poly2 radial_bump(int m) {
        Poly2 out(2 * m);
        // binomial expansion of (1 - x^2 - y^2)^m = sum_{a+b+c=m} m!/(a!b!c!) (-x^2)^b (-y^2)^c
        auto fact = [](int n) {
            double f = 1.0;
            for (int t = 2; t <= n; ++t) f *= t;
            return f;
        };
        for (int b = 0; b <= m; ++b)
            for (int c = 0; b + c <= m; ++c) {
                const int a = m - b - c;
                const double sign = ((b + c) % 2) ? -1.0 : 1.0;
                out.coef(2 * b, 2 * c) += sign * fact(m) / (fact(a) * fact(b) * fact(c));
            }
        return out;
    }

private:
    int deg_;
    std::vector<double> c_;
};

/// Polynomial restricted to the closed unit disc, with its sampled C^r norm
/// sum_{|beta| <= r} sup |d^beta eta|.
struct DictionaryBump {
    std::string name;
    Poly2 poly;
    double value(Point y) const noexcept { return y.x * y.x + y.y * y.y <= 1.0 ? poly(y.x, y.y) : 0.0; }
};

/// Sampled C^r norm of a disc-restricted polynomial on a (2 m + 1)^2 grid.
inline double sampled_cr_norm(const Poly2& p, int r, int m = 200) {
    std::vector<Poly2> layer{p};
    double total = 0.0;
    for (int order = 0; order <= r; ++order) {
        for (const auto& d : layer) {
            double sup = 0.0;
            for (int a = -m; a <= m; ++a)
                for (int b = -m; b <= m; ++b) {
                    const double x = static_cast<double>(a) / m, y = static_cast<double>(b) / m;
                    if (x * x + y * y <= 1.0) sup = std::max(sup, std::abs(d(x, y)));
                }
            total += sup;
        }
        if (order == r) break;
        std::vector<Poly2> next;
        // multi-indices of the next order: differentiate each by x, and only the pure-y one by y
        for (const auto& d : layer) next.push_back(d.dx());
        next.push_back(layer.back().dy());
        layer = std::move(next);
    }
    return total;
}

/// Smoothness order r0 = -floor(alpha) needed for the C^alpha test class (alpha < 0).
inline int holder_test_order(double alpha) {
    if (!(alpha < 0)) throw std::invalid_argument("Hölder dictionary needs alpha < 0");
    if (alpha < -2) throw std::invalid_argument("Hölder dictionary supports alpha >= -2");
    return static_cast<int>(-std::floor(alpha));
}

/// Default dictionary: (1 - |y|^2)^4 and its two first partials, each divided by
/// its sampled C^{r0} norm (inflated by 1e-3 to absorb sampling error) so that
/// every member lies in the unit C^{r0} ball.
inline std::vector<DictionaryBump> default_holder_dictionary(double alpha) {
    const int r0 = holder_test_order(alpha);
    const Poly2 base = Poly2::radial_bump(4);
    std::vector<DictionaryBump> out;
    const std::pair<const char*, Poly2> members[] = {{"bump", base}, {"bump_dx", base.dx()}, {"bump_dy", base.dy()}};
    for (const auto& [name, poly] : members) {
        const double norm = sampled_cr_norm(poly, r0) * (1.0 + 1e-3);
        out.push_back({name, poly.scaled(1.0 / norm)});
    }
    return out;
}

/// Radial C^inf step: 1 on |y| <= 1/2, 0 on |y| >= 1.
inline double smooth_radial_step(double r) noexcept {
    auto g = [](double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; };
    if (r <= 0.5) return 1.0;
    if (r >= 1.0) return 0.0;
    const double s = (1.0 - r) / 0.5;  // 1 at r = 1/2, 0 at r = 1
    return g(s) / (g(s) + g(1.0 - s));
}

/// Mass of y -> smooth_radial_step(|y|): pi/4 from the flat core plus a 1D Gauss-Kronrod integral.
inline double smooth_radial_step_mass() {
    auto f = [](double r) { return 2.0 * std::numbers::pi * r * smooth_radial_step(r); };
    return std::numbers::pi * 0.25 +
           boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.5, 1.0, 10, 1e-14);
}

namespace detail {
inline constexpr int kCellQuadOrder = 5;
using CellGauss = boost::math::quadrature::gauss<double, kCellQuadOrder>;

// Nodes/weights of the full symmetric rule on [-1, 1].
inline const std::vector<std::pair<double, double>>& gauss_rule() {
    static const std::vector<std::pair<double, double>> rule = [] {
        std::vector<std::pair<double, double>> r;
        const auto& x = CellGauss::abscissa();
        const auto& w = CellGauss::weights();
        for (std::size_t k = 0; k < x.size(); ++k) {
            r.emplace_back(x[k], w[k]);
            if (x[k] != 0.0) r.emplace_back(-x[k], w[k]);
        }
        return r;
    }();
    return rule;
}
}  // namespace detail

/// int over [x0, x1] x [y0, y1] of g, by a 5x5 Gauss-Legendre rule subdivided
/// `sub` times per axis.
template <typename F>
double integrate_rect(const F& g, double x0, double x1, double y0, double y1, int sub = 1) {
    const auto& rule = detail::gauss_rule();
    const double hx = (x1 - x0) / sub, hy = (y1 - y0) / sub;
    double acc = 0.0;
    for (int a = 0; a < sub; ++a)
        for (int b = 0; b < sub; ++b) {
            const double cx = x0 + (a + 0.5) * hx, cy = y0 + (b + 0.5) * hy;
            for (const auto& [u, wu] : rule)
                for (const auto& [v, wv] : rule) acc += wu * wv * g(Point{cx + 0.5 * hx * u, cy + 0.5 * hy * v});
        }
    return acc * 0.25 * hx * hy;
}

/// <field, y -> lambda^-2 eta((y - x) / lambda)> for eta supported in the unit disc.
/// Cells meeting B(x, lambda) are integrated with a Gauss rule whose subdivision
/// keeps at least ~4 sub-cells per lambda when cells are coarse.
template <typename Eta>
double pair_scaled_bump(const LatticeField& field, const Eta& eta, double lambda, Point x) {
    const auto& grid = field.grid();
    const double a = grid.spacing;
    const int i0 = std::max(0, static_cast<int>(std::floor((x.x - lambda - grid.origin.x) / a)));
    const int i1 = std::min(grid.nx - 1, static_cast<int>(std::floor((x.x + lambda - grid.origin.x) / a)));
    const int j0 = std::max(0, static_cast<int>(std::floor((x.y - lambda - grid.origin.y) / a)));
    const int j1 = std::min(grid.ny - 1, static_cast<int>(std::floor((x.y + lambda - grid.origin.y) / a)));
    const int sub = std::clamp(static_cast<int>(std::ceil(4.0 * a / lambda)), 1, 16);
    const double inv = 1.0 / lambda;
    auto g = [&](Point y) { return eta(Point{(y.x - x.x) * inv, (y.y - x.y) * inv}); };
    double acc = 0.0;
    for (int j = j0; j <= j1; ++j) {
        const auto row = field.row(j);
        for (int i = i0; i <= i1; ++i) {
            if (row[static_cast<std::size_t>(i)] == 0.0) continue;
            acc += row[static_cast<std::size_t>(i)] *
                   integrate_rect(g, grid.x_edge(i), grid.x_edge(i + 1), grid.y_edge(j), grid.y_edge(j + 1), sub);
        }
    }
    return acc * inv * inv;
}

}  // namespace besovtight

