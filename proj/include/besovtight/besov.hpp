#pragma once

// Wavelet-coefficient pyramids over adapted regions and the local Besov /
// Hölder quantities built from them.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "besovtight/binio.hpp"
#include "besovtight/bumps.hpp"
#include "besovtight/geometry.hpp"
#include "besovtight/lattice_field.hpp"
#include "besovtight/wavelet.hpp"

namespace besovtight {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct BesovParams {
    double alpha = 0.0;
    double p = 2.0;
    double q = kInf;

    void validate(int regularity) const {
        if (!(p >= 1.0)) throw std::invalid_argument("Besov p must be in [1, inf]");
        if (!(q >= 1.0)) throw std::invalid_argument("Besov q must be in [1, inf]");
        if (!(std::abs(alpha) < regularity))
            throw std::invalid_argument("|alpha| = " + std::to_string(std::abs(alpha)) +
                                        " must be below the basis regularity r = " + std::to_string(regularity));
    }
};

/// Compact K inside open U with base level k.
struct AdaptedRegion {
    Rect K;
    int k = 0;
    Domain U = Domain::whole_plane();
    std::string label = "K";
};

/// 2^-k R < dist(K, U^c). Throws when K is not inside U.
inline bool check_adapted(const Rect& K, int k, const Domain& U, double R) {
    if (K.empty()) throw std::invalid_argument("check_adapted: K is empty");
    if (!U.contains(K)) throw std::invalid_argument("check_adapted: K is not contained in U");
    return std::ldexp(R, -k) < U.distance_to_complement(K);
}

struct SpanningSequence {
    std::vector<AdaptedRegion> regions;
    std::vector<std::string> warnings;
};

/// K_n = {x : dist(x, U^c) >= (2 + delta) R 2^-n}, k_n = n, for n = 0 .. count - 1;
/// empty K_n are dropped.
inline SpanningSequence spanning_sequence(const Rect& U, double delta, double R, int count) {
    if (!(delta > 0)) throw std::invalid_argument("spanning_sequence: delta must be positive");
    if (!(R > 0)) throw std::invalid_argument("spanning_sequence: R must be positive");
    const Domain dom = Domain::box(U);
    SpanningSequence out;
    for (int n = 0; n < count; ++n) {
        const double margin = (2.0 + delta) * std::ldexp(R, -n);
        if (!(2.0 * margin < U.width() && 2.0 * margin < U.height())) continue;
        AdaptedRegion reg{U.shrunk(margin), n, dom, "K_" + std::to_string(n)};
        if (!check_adapted(reg.K, reg.k, dom, R))
            throw std::logic_error("spanning_sequence produced a non-adapted pair");
        out.regions.push_back(reg);
    }
    if (out.regions.empty())
        out.warnings.push_back("spanning_sequence: every K_n is empty for n < " + std::to_string(count));
    return out;
}

/// v over Lambda_k cap K and w^(i) over Lambda_n cap K for n = k .. n_max.
class CoefficientPyramid {
public:
    CoefficientPyramid(AdaptedRegion region, int n_max, int regularity, std::string basis_id)
        : region_(std::move(region)), n_max_(n_max), regularity_(regularity), basis_id_(std::move(basis_id)) {
        if (n_max_ < region_.k) throw std::invalid_argument("pyramid: n_max must be >= k");
        father_ = LevelGrid{region_.k, WaveletKind::father, lattice_points_in(region_.K, region_.k), {}};
        father_.values.assign(father_.box.count(), 0.0);
        for (int n = region_.k; n <= n_max_; ++n) {
            std::array<LevelGrid, 3> lv;
            for (int i = 0; i < 3; ++i) {
                lv[i] = LevelGrid{n, kMotherKinds[i], lattice_points_in(region_.K, n), {}};
                lv[i].values.assign(lv[i].box.count(), 0.0);
            }
            mothers_.push_back(std::move(lv));
        }
    }

    const AdaptedRegion& region() const noexcept { return region_; }
    int k() const noexcept { return region_.k; }
    int n_max() const noexcept { return n_max_; }
    int regularity() const noexcept { return regularity_; }
    const std::string& basis_id() const noexcept { return basis_id_; }

    const LevelGrid& father() const noexcept { return father_; }
    LevelGrid& father() noexcept { return father_; }
    /// Mother kind i in {1, 2, 3} at level n.
    const LevelGrid& mother(int n, int i) const { return mothers_.at(level_index(n))[static_cast<std::size_t>(i - 1)]; }
    LevelGrid& mother(int n, int i) { return mothers_.at(level_index(n))[static_cast<std::size_t>(i - 1)]; }

    std::size_t position_count(int n) const { return lattice_points_in(region_.K, n).count(); }

    CoefficientPyramid scaled(double c) const {
        CoefficientPyramid out = *this;
        out.for_each_grid([c](LevelGrid& g) {
            for (double& v : g.values) v *= c;
        });
        return out;
    }

    CoefficientPyramid& operator+=(const CoefficientPyramid& o) {
        require_same_shape(o);
        combine(o, 1.0);
        return *this;
    }
    CoefficientPyramid& operator-=(const CoefficientPyramid& o) {
        require_same_shape(o);
        combine(o, -1.0);
        return *this;
    }
    friend CoefficientPyramid operator+(CoefficientPyramid a, const CoefficientPyramid& b) { return a += b; }
    friend CoefficientPyramid operator-(CoefficientPyramid a, const CoefficientPyramid& b) { return a -= b; }

    template <typename F>
    void for_each_grid(F&& f) {
        f(father_);
        for (auto& lv : mothers_)
            for (auto& g : lv) f(g);
    }
    template <typename F>
    void for_each_grid(F&& f) const {
        f(father_);
        for (const auto& lv : mothers_)
            for (const auto& g : lv) f(g);
    }

private:
    std::size_t level_index(int n) const {
        if (n < region_.k || n > n_max_) throw std::out_of_range("pyramid level " + std::to_string(n));
        return static_cast<std::size_t>(n - region_.k);
    }
    void require_same_shape(const CoefficientPyramid& o) const {
        if (o.region_.K == region_.K && o.region_.k == region_.k && o.n_max_ == n_max_) return;
        throw std::invalid_argument("pyramids have different shapes");
    }
    void combine(const CoefficientPyramid& o, double s) {
        for (std::size_t t = 0; t < father_.values.size(); ++t) father_.values[t] += s * o.father_.values[t];
        for (std::size_t l = 0; l < mothers_.size(); ++l)
            for (int i = 0; i < 3; ++i)
                for (std::size_t t = 0; t < mothers_[l][i].values.size(); ++t)
                    mothers_[l][i].values[t] += s * o.mothers_[l][i].values[t];
    }

    AdaptedRegion region_;
    int n_max_;
    int regularity_;
    std::string basis_id_;
    LevelGrid father_;
    std::vector<std::array<LevelGrid, 3>> mothers_;
};

inline CoefficientPyramid build_pyramid(const LatticeField& field, const WaveletBasis2D& basis,
                                        const AdaptedRegion& region, int n_max) {
    if (n_max < region.k) throw std::invalid_argument("build_pyramid: n_max < k");
    if (!check_adapted(region.K, region.k, region.U, basis.support_radius()))
        throw std::invalid_argument("build_pyramid: region is not adapted to the basis support radius");
    CoefficientPyramid pyr(region, n_max, basis.regularity(), basis.id());
    pyr.father() = pair_level(basis, field, WaveletKind::father, region.k, pyr.father().box);
    for (int n = region.k; n <= n_max; ++n)
        for (int i = 1; i <= 3; ++i)
            pyr.mother(n, i) = pair_level(basis, field, kMotherKinds[static_cast<std::size_t>(i - 1)], n,
                                          pyr.mother(n, i).box);
    return pyr;
}

namespace detail {
inline double lp_accumulate(double acc, double v, double p) {
    return std::isinf(p) ? std::max(acc, std::abs(v)) : acc + std::pow(std::abs(v), p);
}
inline double lp_finish(double acc, double p) { return std::isinf(p) ? acc : std::pow(acc, 1.0 / p); }
inline double level_prefactor(int n, double p) {
    const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
    return std::exp2(kDim * n * (0.5 - inv_p));
}
}  // namespace detail

struct LevelStatistics {
    int k = 0;
    double v = 0.0;          // v_{k,K,p}
    std::vector<double> w;   // w_{n,K,p}, index n - k
};

/// v_{k,K,p} = 2^{dk(1/2-1/p)} ||(v_{k,x})||_p and w_{n,K,p} = 2^{dn(1/2-1/p)} ||(w^(i)_{n,x})_{i,x}||_p.
inline LevelStatistics level_statistics(const CoefficientPyramid& pyr, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("level_statistics: p must be in [1, inf]");
    LevelStatistics s;
    s.k = pyr.k();
    double acc = 0.0;
    for (double v : pyr.father().values) acc = detail::lp_accumulate(acc, v, p);
    s.v = detail::level_prefactor(pyr.k(), p) * detail::lp_finish(acc, p);
    for (int n = pyr.k(); n <= pyr.n_max(); ++n) {
        acc = 0.0;
        for (int i = 1; i <= 3; ++i)
            for (double v : pyr.mother(n, i).values) acc = detail::lp_accumulate(acc, v, p);
        s.w.push_back(detail::level_prefactor(n, p) * detail::lp_finish(acc, p));
    }
    return s;
}

/// v_{k,K,p} + ||(2^{alpha n} w_{n,K,p})_{n=k..n_max}||_q, truncated at the pyramid's n_max.
inline double local_seminorm(const CoefficientPyramid& pyr, const BesovParams& params) {
    params.validate(pyr.regularity());
    const auto s = level_statistics(pyr, params.p);
    double acc = 0.0;
    for (std::size_t t = 0; t < s.w.size(); ++t)
        acc = detail::lp_accumulate(acc, std::exp2(params.alpha * (s.k + static_cast<int>(t))) * s.w[t], params.q);
    return s.v + detail::lp_finish(acc, params.q);
}

struct ProjectionBounds {
    double lhs = 0.0;    // ||V_n f||_{L^p}
    double mid = 0.0;    // 2^{dn(1/2-1/p)} ||(v_{n,x} f)||_{l^p}
    double ratio = 0.0;  // lhs / mid
};

/// Reconstruction V_n f = sum_x v_{n,x} phi_{n,x} over every x whose support meets
/// the field, evaluated as cell averages on a dyadic grid (step 2^-n for Haar,
/// where V_n f is constant on those cells, and 2^-n / 8 otherwise).
inline ProjectionBounds projection_norm_bounds(const LatticeField& field, const WaveletBasis2D& basis, int n,
                                               double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("projection_norm_bounds: p must be in [1, inf]");
    const Rect ext = field.grid().extent();
    const double s = std::ldexp(1.0, n);
    const long len = static_cast<long>(basis.support_length());
    IndexBox box;
    box.i0 = static_cast<long>(std::floor(ext.x0 * s)) - len;
    box.i1 = static_cast<long>(std::ceil(ext.x1 * s));
    box.j0 = static_cast<long>(std::floor(ext.y0 * s)) - len;
    box.j1 = static_cast<long>(std::ceil(ext.y1 * s));
    const auto coeffs = pair_level(basis, field, WaveletKind::father, n, box);

    ProjectionBounds out;
    double acc = 0.0;
    for (double v : coeffs.values) acc = detail::lp_accumulate(acc, v, p);
    out.mid = detail::level_prefactor(n, p) * detail::lp_finish(acc, p);

    const int refine = basis.vanishing_moments() == 1 ? 1 : 8;
    CellGrid g;
    g.spacing = 1.0 / (s * refine);
    g.origin = {box.i0 / s, box.j0 / s};
    g.nx = static_cast<int>((box.ni() + len) * refine);
    g.ny = static_cast<int>((box.nj() + len) * refine);
    std::vector<double> rec(g.size(), 0.0);
    synthesize_level(basis, coeffs, g, rec);
    out.lhs = LatticeField(g, std::move(rec)).lp_norm(p);
    out.ratio = out.mid > 0 ? out.lhs / out.mid : (out.lhs > 0 ? kInf : 1.0);
    return out;
}

/// max over dictionary, lambda, x of lambda^-alpha |<field, lambda^-d eta((. - x)/lambda)>|:
/// a lower bound on the C^alpha norm computed on finite grids.
inline double holder_dictionary_norm(const LatticeField& field, double alpha,
                                     const std::vector<DictionaryBump>& dictionary,
                                     std::span<const double> lambda_grid, std::span<const Point> x_grid) {
    if (dictionary.empty()) throw std::invalid_argument("holder_dictionary_norm: empty dictionary");
    if (!(alpha < 0)) throw std::invalid_argument("holder_dictionary_norm: alpha must be negative");
    double best = 0.0;
    for (double lambda : lambda_grid) {
        if (!(lambda > 0 && lambda <= 1)) throw std::invalid_argument("holder_dictionary_norm: lambda must be in (0, 1]");
        const double weight = std::pow(lambda, -alpha);
        for (const auto& eta : dictionary)
            for (const Point& x : x_grid) {
                const double v = pair_scaled_bump(field, [&](Point y) { return eta.value(y); }, lambda, x);
                best = std::max(best, weight * std::abs(v));
            }
    }
    return best;
}

inline std::vector<double> dyadic_lambdas(int j_min, int j_max) {
    std::vector<double> out;
    for (int j = j_min; j <= j_max; ++j) out.push_back(std::ldexp(1.0, -j));
    return out;
}

struct EmbeddingResult {
    double norm1 = 0.0;  // seminorm with (alpha1, p1, q1)
    double norm2 = 0.0;  // seminorm with (beta, p2, q2)
    double ratio = 0.0;  // norm1 / norm2 (0 when both vanish)
    double bound = 1.0;  // C with norm1 <= C norm2
};

/// Compares the two seminorms of one pyramid for beta = alpha1 + d (1/p2 - 1/p1),
/// p2 <= p1, q2 <= q1. Mother levels obey the inequality with constant 1; the
/// father term picks up 2^{dk(1/p2 - 1/p1)}.
inline EmbeddingResult embedding_check(const CoefficientPyramid& pyr, const BesovParams& first,
                                       const BesovParams& second) {
    if (!(second.p <= first.p)) throw std::invalid_argument("embedding_check: need p2 <= p1");
    if (!(second.q <= first.q)) throw std::invalid_argument("embedding_check: need q2 <= q1");
    auto inv = [](double p) { return std::isinf(p) ? 0.0 : 1.0 / p; };
    const double gap = kDim * (inv(second.p) - inv(first.p));
    if (std::abs(second.alpha - (first.alpha + gap)) > 1e-12)
        throw std::invalid_argument("embedding_check: beta must equal alpha1 + d(1/p2 - 1/p1)");
    EmbeddingResult r;
    r.norm1 = local_seminorm(pyr, first);
    r.norm2 = local_seminorm(pyr, second);
    r.ratio = r.norm2 > 0 ? r.norm1 / r.norm2 : 0.0;
    r.bound = std::max(1.0, std::exp2(gap * pyr.k()));
    return r;
}

/// Non-strict: every pyramid's seminorm is <= the bound registered for its region label.
inline bool in_coefficient_ball(std::span<const CoefficientPyramid> pyramids, const BesovParams& params,
                                const std::map<std::string, double>& bounds) {
    bool inside = true;
    for (const auto& pyr : pyramids) {
        const auto it = bounds.find(pyr.region().label);
        if (it == bounds.end())
            throw std::invalid_argument("in_coefficient_ball: no bound for region '" + pyr.region().label + "'");
        if (!(local_seminorm(pyr, params) <= it->second)) inside = false;
    }
    return inside;
}

inline bool in_coefficient_ball(const CoefficientPyramid& pyr, const BesovParams& params,
                                const std::map<std::string, double>& bounds) {
    return in_coefficient_ball(std::span<const CoefficientPyramid>(&pyr, 1), params, bounds);
}

/// f_{N,k} = sum_x v_{k,x} phi_{k,x} + sum_{k<=n<=N} sum_{i,x} w^(i)_{n,x} psi^(i)_{n,x},
/// sampled as cell averages on `grid`.
inline LatticeField reconstruct_truncated(const CoefficientPyramid& pyr, int N, const WaveletBasis2D& basis,
                                          const CellGrid& grid) {
    if (N < pyr.k() || N > pyr.n_max())
        throw std::invalid_argument("reconstruct_truncated: N must lie in [k, n_max]");
    std::vector<double> values(grid.size(), 0.0);
    synthesize_level(basis, pyr.father(), grid, values);
    for (int n = pyr.k(); n <= N; ++n)
        for (int i = 1; i <= 3; ++i) synthesize_level(basis, pyr.mother(n, i), grid, values);
    return LatticeField(grid, std::move(values));
}

/// K' = {x in K : x + 2^-k [0, 2N-1]^2 in K}: points whose level-k father support stays inside K.
inline Rect inner_region(const Rect& K, int k, const WaveletBasis2D& basis) {
    const double len = std::ldexp(basis.support_length(), -k);
    return {K.x0, K.y0, K.x1 - len, K.y1 - len};
}

/// Cellwise product with a cutoff sampled at cell centres.
template <typename Chi>
LatticeField multiply_cutoff(const LatticeField& field, const Chi& chi) {
    std::vector<double> out(field.values().begin(), field.values().end());
    const auto& g = field.grid();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) out[static_cast<std::size_t>(j) * g.nx + i] *= chi(g.center(i, j));
    return LatticeField(g, std::move(out), field.provenance());
}

inline LatticeField multiply_cutoff(const LatticeField& field, const LatticeField& chi) {
    field.require_same_grid(chi);
    std::vector<double> out(field.values().begin(), field.values().end());
    for (std::size_t t = 0; t < out.size(); ++t) out[t] *= chi.values()[t];
    return LatticeField(field.grid(), std::move(out), field.provenance());
}

/// Columnar text: header, then one row "n,i,x1,x2,value" per coefficient (i = 0 for the father).
inline void write_pyramid_csv(std::ostream& os, const CoefficientPyramid& pyr) {
    os << "n,i,x1,x2,value\n";
    os << std::setprecision(17);
    pyr.for_each_grid([&](const LevelGrid& g) {
        const int kind = static_cast<int>(g.kind);
        for (long j = g.box.j0; j <= g.box.j1; ++j)
            for (long i = g.box.i0; i <= g.box.i1; ++i) {
                const Point x = dyadic_point(g.n, {i, j});
                os << g.n << ',' << kind << ',' << x.x << ',' << x.y << ',' << g.at(i, j) << '\n';
            }
    });
}

// Binary blob: "BTPY", K (4 doubles), k, n_max, r (int32), then each level grid
// in order father, (n, i) as kind/n/box (int32 x 6) + values.
inline void write_pyramid_blob(std::ostream& os, const CoefficientPyramid& pyr) {
    binio::put_magic(os, "BTPY");
    const Rect& K = pyr.region().K;
    for (double v : {K.x0, K.y0, K.x1, K.y1}) binio::put<double>(os, v);
    binio::put<std::int32_t>(os, pyr.k());
    binio::put<std::int32_t>(os, pyr.n_max());
    binio::put<std::int32_t>(os, pyr.regularity());
    pyr.for_each_grid([&](const LevelGrid& g) {
        binio::put<std::int32_t>(os, static_cast<std::int32_t>(g.kind));
        binio::put<std::int32_t>(os, g.n);
        for (long b : {g.box.i0, g.box.i1, g.box.j0, g.box.j1}) binio::put<std::int32_t>(os, static_cast<std::int32_t>(b));
        binio::put_doubles(os, g.values);
    });
}

inline CoefficientPyramid read_pyramid_blob(std::istream& is, std::string basis_id = "unknown") {
    binio::expect_magic(is, "BTPY");
    Rect K;
    K.x0 = binio::get<double>(is);
    K.y0 = binio::get<double>(is);
    K.x1 = binio::get<double>(is);
    K.y1 = binio::get<double>(is);
    const int k = binio::get<std::int32_t>(is);
    const int n_max = binio::get<std::int32_t>(is);
    const int r = binio::get<std::int32_t>(is);
    if (n_max < k || n_max - k > 40) throw std::runtime_error("pyramid blob: bad level range");
    CoefficientPyramid pyr(AdaptedRegion{K, k, Domain::whole_plane(), "K"}, n_max, r, std::move(basis_id));
    pyr.for_each_grid([&](LevelGrid& g) {
        const auto kind = binio::get<std::int32_t>(is);
        const auto n = binio::get<std::int32_t>(is);
        IndexBox b;
        b.i0 = binio::get<std::int32_t>(is);
        b.i1 = binio::get<std::int32_t>(is);
        b.j0 = binio::get<std::int32_t>(is);
        b.j1 = binio::get<std::int32_t>(is);
        if (kind != static_cast<int>(g.kind) || n != g.n || b.i0 != g.box.i0 || b.i1 != g.box.i1 ||
            b.j0 != g.box.j0 || b.j1 != g.box.j1)
            throw std::runtime_error("pyramid blob: level layout does not match header");
        g.values = binio::get_doubles(is);
        if (g.values.size() != g.box.count()) throw std::runtime_error("pyramid blob: value count mismatch");
    });
    return pyr;
}

}  // namespace besovtight
