#pragma once

// Magnetization fields, wavelet-moment scaling statistics, the converse
// lower-bound profile, and the tightness verdict.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "besovtight/besov.hpp"
#include "besovtight/bumps.hpp"
#include "besovtight/ising/lattice.hpp"
#include "besovtight/lattice_field.hpp"
#include "besovtight/stats.hpp"
#include "besovtight/wavelet.hpp"

namespace besovtight {

inline constexpr double kMagnetizationExponent = 0.125;

/// Cell grid of U_a = U cap aZ^2 for an open rectangle U tiled by nx * ny cells
/// S_a(y) centred on lattice points. Throws unless U is exactly such a tiling.
inline CellGrid magnetization_grid(const Rect& U, double a, int nx, int ny) {
    if (!(a > 0)) throw std::invalid_argument("lattice spacing a must be positive");
    const double tol = 1e-9 * std::max(1.0, std::abs(U.x0) + std::abs(U.x1));
    if (std::abs(U.width() - nx * a) > tol || std::abs(U.height() - ny * a) > tol)
        throw std::invalid_argument("U is not tiled by the spin lattice: width/height must equal L * a");
    auto on_lattice = [&](double c) { return std::abs(c / a - std::round(c / a)) < 1e-7; };
    if (!on_lattice(U.x0 + 0.5 * a) || !on_lattice(U.y0 + 0.5 * a))
        throw std::invalid_argument("cell centres of U are not on aZ^2");
    return CellGrid{{U.x0, U.y0}, a, nx, ny};
}

/// Phi_a = a^{-1/8} sum_y sigma_y 1_{S_a(y)} over a full box domain.
inline LatticeField magnetization_field(const ising::SpinConfiguration& spins, const ising::LatticeDomain& domain,
                                        double a, const Rect& U) {
    if (!domain.is_full_box()) throw std::invalid_argument("magnetization_field needs a full rectangular domain");
    if (spins.sigma.size() != static_cast<std::size_t>(domain.site_count()))
        throw std::invalid_argument("spin configuration does not match domain");
    const CellGrid grid = magnetization_grid(U, a, domain.nx(), domain.ny());
    const double scale = std::pow(a, -kMagnetizationExponent);
    std::vector<double> values(spins.sigma.size());
    for (std::size_t t = 0; t < values.size(); ++t) values[t] = scale * spins.sigma[t];
    return LatticeField(grid, std::move(values), FieldProvenance::magnetization);
}

/// Which dyadic positions enter the sup at level n.
enum class PositionRule {
    lattice_in_K,   // x in Lambda_n cap K
    support_in_K,   // x in Lambda_n with x + 2^-n [0, 2N-1]^2 inside K
};

struct MomentRegion {
    AdaptedRegion region;
    int n_min = 0;
    int n_max = 5;
    PositionRule rule = PositionRule::support_in_K;
    std::string id = "K";
};

inline IndexBox moment_positions(const MomentRegion& mr, const WaveletBasis2D& basis, int n) {
    if (mr.rule == PositionRule::lattice_in_K) return lattice_points_in(mr.region.K, n);
    const double len = std::ldexp(basis.support_length(), -n);
    const Rect& K = mr.region.K;
    return lattice_points_in(Rect{K.x0, K.y0, K.x1 - len, K.y1 - len}, n);
}

/// Per-chain running sums of |pairing|^p at every position of every level.
class MomentAccumulator {
public:
    MomentAccumulator(const WaveletBasis2D& basis, MomentRegion region, double p)
        : basis_(&basis), region_(std::move(region)), p_(p) {
        if (!(p >= 2) || std::fmod(p, 2.0) != 0.0) throw std::invalid_argument("moment estimation needs even p");
        if (region_.n_max < region_.n_min) throw std::invalid_argument("moment region: empty level range");
        if (region_.rule == PositionRule::lattice_in_K &&
            !check_adapted(region_.region.K, region_.n_min, region_.region.U, basis.support_radius()))
            throw std::invalid_argument("moment region is not adapted at its base level");
        father_box_ = moment_positions(region_, basis, region_.n_min);
        father_sum_.assign(father_box_.count(), 0.0);
        for (int n = region_.n_min; n <= region_.n_max; ++n) {
            boxes_.push_back(moment_positions(region_, basis, n));
            for (int i = 0; i < 3; ++i) sums_.emplace_back(boxes_.back().count(), 0.0);
        }
    }

    void add(const LatticeField& field) {
        const auto fat = pair_level(*basis_, field, WaveletKind::father, region_.n_min, father_box_);
        for (std::size_t t = 0; t < fat.values.size(); ++t) father_sum_[t] += std::pow(std::abs(fat.values[t]), p_);
        for (int n = region_.n_min; n <= region_.n_max; ++n)
            for (int i = 0; i < 3; ++i) {
                const auto lv = pair_level(*basis_, field, kMotherKinds[static_cast<std::size_t>(i)], n,
                                           boxes_[static_cast<std::size_t>(n - region_.n_min)]);
                auto& s = sums_[static_cast<std::size_t>((n - region_.n_min) * 3 + i)];
                for (std::size_t t = 0; t < lv.values.size(); ++t) s[t] += std::pow(std::abs(lv.values[t]), p_);
            }
        ++samples_;
    }

    const WaveletBasis2D& basis() const noexcept { return *basis_; }
    const MomentRegion& region() const noexcept { return region_; }
    double p() const noexcept { return p_; }
    std::size_t samples() const noexcept { return samples_; }
    const IndexBox& father_box() const noexcept { return father_box_; }
    const IndexBox& box(int n) const { return boxes_.at(static_cast<std::size_t>(n - region_.n_min)); }
    const std::vector<double>& father_sum() const noexcept { return father_sum_; }
    const std::vector<double>& sum(int n, int i) const {
        return sums_.at(static_cast<std::size_t>((n - region_.n_min) * 3 + (i - 1)));
    }

private:
    const WaveletBasis2D* basis_;
    MomentRegion region_;
    double p_;
    std::size_t samples_ = 0;
    IndexBox father_box_;
    std::vector<double> father_sum_;
    std::vector<IndexBox> boxes_;
    std::vector<std::vector<double>> sums_;
};

/// How sup_x E[.] is estimated from per-position ensemble means.
enum class SupEstimator {
    plug_in,    // max of the pooled means
    cross_fit,  // argmax on one half of the chains, value read on the other half (and vice versa)
};

struct LevelRecord {
    int n = 0;
    double value = 0.0;
    double stderr_ = 0.0;
    std::size_t x_count = 0;
    std::size_t sample_count = 0;
    int kind = 0;        // maximizing wavelet kind (0 = father)
    Point argmax{};      // maximizing position
};

struct MomentScalingReport {
    double p = 2.0;
    std::string basis_id;
    std::string region_id;
    SupEstimator estimator = SupEstimator::cross_fit;
    LevelRecord father;
    std::vector<LevelRecord> levels;
    bool has_fit = false;
    double slope = 0.0;  // d log2(value) / dn; beta_hat = -slope
    double intercept = 0.0;
    double slope_stderr = 0.0;
    std::vector<std::string> warnings;

    double beta_hat() const noexcept { return -slope; }
};

/// Fit of log2(value) on n with weights 1 / (stderr / value)^2; non-positive
/// values are dropped with a warning and fewer than 3 remaining levels throw.
inline PowerFit fit_scaling_exponent(std::span<const LevelRecord> levels) {
    std::vector<ScalingPoint> pts;
    for (const auto& l : levels) pts.push_back({static_cast<double>(l.n), l.value, l.stderr_});
    return fit_log2_values(pts, 3);
}

namespace detail {

struct SupResult {
    double value = 0.0;
    double stderr_ = 0.0;
    std::size_t index = 0;
};

inline std::size_t argmax_mean(std::span<const std::vector<double>* const> sums, std::span<const std::size_t> samples,
                               int parity) {
    const std::size_t npos = sums.front()->size();
    std::size_t total = 0;
    for (std::size_t c = 0; c < sums.size(); ++c)
        if (parity < 0 || static_cast<int>(c % 2) == parity) total += samples[c];
    std::size_t best = 0;
    double best_mean = -1.0;
    for (std::size_t x = 0; x < npos; ++x) {
        double acc = 0.0;
        for (std::size_t c = 0; c < sums.size(); ++c)
            if (parity < 0 || static_cast<int>(c % 2) == parity) acc += (*sums[c])[x];
        const double mean = acc / static_cast<double>(total);
        if (mean > best_mean) {
            best_mean = mean;
            best = x;
        }
    }
    return best;
}

// prefactor * E[|.|^p]^{1/p} at the selected position(s); stderr by the delta
// method from per-chain means.
inline SupResult sup_moment(std::span<const std::vector<double>* const> chain_sums,
                            std::span<const std::size_t> chain_samples, double p, double prefactor,
                            SupEstimator estimator) {
    SupResult r;
    if (chain_sums.front()->empty()) return r;
    const bool split = estimator == SupEstimator::cross_fit && chain_sums.size() >= 4;
    std::size_t pick[2];
    if (split) {
        pick[0] = argmax_mean(chain_sums, chain_samples, 1);  // read by even chains
        pick[1] = argmax_mean(chain_sums, chain_samples, 0);  // read by odd chains
    } else {
        pick[0] = pick[1] = argmax_mean(chain_sums, chain_samples, -1);
    }
    r.index = pick[0];
    std::vector<double> per_chain;
    double acc = 0.0;
    std::size_t total = 0;
    for (std::size_t c = 0; c < chain_sums.size(); ++c) {
        if (chain_samples[c] == 0) continue;
        const double s = (*chain_sums[c])[pick[c % 2]];
        acc += s;
        total += chain_samples[c];
        per_chain.push_back(s / static_cast<double>(chain_samples[c]));
    }
    const double mean = acc / static_cast<double>(total);
    r.value = prefactor * std::pow(mean, 1.0 / p);
    if (per_chain.size() >= 2 && mean > 0) r.stderr_ = r.value * independent_mean(per_chain).stderr_ / (p * mean);
    return r;
}

}  // namespace detail

/// Level table from per-chain accumulators (all over the same basis and region).
/// Mother levels: 2^{dn} sup_x E[|<Phi, psi^(i)(2^n(. - x))>|^p]^{1/p} maxed over
/// i, i.e. 2^{dn/2} sup E[|w|^p]^{1/p}; father: 2^{-dk/2} sup E[|v|^p]^{1/p}.
inline MomentScalingReport moment_bound_scaling(std::span<const MomentAccumulator> chains,
                                                SupEstimator estimator = SupEstimator::cross_fit) {
    if (chains.empty()) throw std::invalid_argument("moment_bound_scaling: no chains");
    const auto& first = chains.front();
    const auto& reg = first.region();
    MomentScalingReport rep;
    rep.p = first.p();
    rep.basis_id = first.basis().id();
    rep.region_id = reg.id;
    rep.estimator = estimator;
    std::vector<std::size_t> samples;
    std::size_t total = 0;
    for (const auto& c : chains) {
        if (c.region().n_min != reg.n_min || c.region().n_max != reg.n_max || c.p() != first.p() ||
            &c.basis() != &first.basis())
            throw std::invalid_argument("moment_bound_scaling: chains disagree on basis/region/p");
        samples.push_back(c.samples());
        total += c.samples();
    }
    if (total == 0) throw std::invalid_argument("moment_bound_scaling: no samples");

    auto record = [&](int n, int kind, const IndexBox& box, std::vector<const std::vector<double>*> sums,
                      double prefactor) {
        LevelRecord r;
        r.n = n;
        r.kind = kind;
        r.x_count = box.count();
        r.sample_count = total;
        if (box.empty()) return r;
        const auto s = detail::sup_moment(sums, samples, rep.p, prefactor, estimator);
        r.value = s.value;
        r.stderr_ = s.stderr_;
        const long ni = box.ni();
        r.argmax = dyadic_point(n, {box.i0 + static_cast<long>(s.index) % ni, box.j0 + static_cast<long>(s.index) / ni});
        return r;
    };

    {
        std::vector<const std::vector<double>*> sums;
        for (const auto& c : chains) sums.push_back(&c.father_sum());
        rep.father = record(reg.n_min, 0, first.father_box(), sums, std::exp2(-kDim * reg.n_min / 2.0));
    }
    for (int n = reg.n_min; n <= reg.n_max; ++n) {
        LevelRecord best;
        best.n = n;
        for (int i = 1; i <= 3; ++i) {
            std::vector<const std::vector<double>*> sums;
            for (const auto& c : chains) sums.push_back(&c.sum(n, i));
            const auto r = record(n, i, first.box(n), sums, std::exp2(kDim * n / 2.0));
            if (i == 1 || r.value > best.value) best = r;
        }
        if (best.x_count == 0) rep.warnings.push_back("level " + std::to_string(n) + " has no positions");
        rep.levels.push_back(best);
    }
    try {
        const auto fit = fit_scaling_exponent(rep.levels);
        rep.has_fit = true;
        rep.slope = fit.fit.slope;
        rep.intercept = fit.fit.intercept;
        rep.slope_stderr = fit.fit.slope_stderr;
        rep.warnings.insert(rep.warnings.end(), fit.warnings.begin(), fit.warnings.end());
    } catch (const std::invalid_argument& e) {
        rep.warnings.push_back(std::string("fit refused: ") + e.what());
    }
    return rep;
}

/// Each field treated as one independent sample.
inline MomentScalingReport moment_bound_scaling(std::span<const LatticeField> ensemble, const WaveletBasis2D& basis,
                                                const MomentRegion& region, double p,
                                                SupEstimator estimator = SupEstimator::cross_fit) {
    std::vector<MomentAccumulator> chains;
    for (const auto& f : ensemble) {
        chains.emplace_back(basis, region, p);
        chains.back().add(f);
    }
    return moment_bound_scaling(chains, estimator);
}

struct TightnessVerdict {
    double alpha = 0.0;
    double p = 2.0;
    double q = kInf;
    double beta_hat = 0.0;
    double slope_stderr = 0.0;
    double multiplier = 2.0;
    double besov_margin = 0.0;   // (beta_hat - m se) - alpha
    double holder_margin = 0.0;  // (beta_hat - d/p - m se) - alpha
    bool besov_consistent = false;
    bool holder_consistent = false;

    static constexpr const char* kind = "statistical consistency check, not a proof";
    std::string besov_label() const { return besov_consistent ? "TIGHT-consistent" : "NOT-consistent"; }
    std::string holder_label() const { return holder_consistent ? "TIGHT-consistent" : "NOT-consistent"; }
};

/// alpha < beta_hat - m se (Besov) and alpha < beta_hat - d/p - m se (Hölder); strict.
/// Only the fitted slope enters, never the intercept.
inline TightnessVerdict tightness_verdict(const MomentScalingReport& report, double alpha, double p, double q,
                                          double multiplier = 2.0) {
    if (!report.has_fit) throw std::invalid_argument("tightness_verdict: report has no fit");
    TightnessVerdict v;
    v.alpha = alpha;
    v.p = p;
    v.q = q;
    v.beta_hat = report.beta_hat();
    v.slope_stderr = report.slope_stderr;
    v.multiplier = multiplier;
    const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
    v.besov_margin = (v.beta_hat - multiplier * v.slope_stderr) - alpha;
    v.holder_margin = (v.beta_hat - kDim * inv_p - multiplier * v.slope_stderr) - alpha;
    v.besov_consistent = v.besov_margin > 0;
    v.holder_consistent = v.holder_margin > 0;
    return v;
}

/// Cell-integral kernel of eta_{lambda,x} = lambda^-2 eta((. - x)/lambda) for x at a cell centre.
struct BumpKernel {
    double lambda = 0.0;
    int radius = 0;  // cells on each side of the centre cell
    std::vector<double> weights;  // (2 radius + 1)^2, row-major

    double at(int di, int dj) const {
        const int w = 2 * radius + 1;
        return weights[static_cast<std::size_t>((dj + radius) * w + (di + radius))];
    }
};

template <typename Eta>
BumpKernel make_bump_kernel(const Eta& eta, double lambda, double a) {
    BumpKernel k;
    k.lambda = lambda;
    k.radius = static_cast<int>(std::ceil(lambda / a - 0.5));
    const int w = 2 * k.radius + 1;
    k.weights.assign(static_cast<std::size_t>(w) * w, 0.0);
    const int sub = std::clamp(static_cast<int>(std::ceil(8.0 * a / lambda)), 1, 32);
    const double inv = 1.0 / lambda;
    auto g = [&](Point y) { return eta(Point{y.x * inv, y.y * inv}); };
    for (int dj = -k.radius; dj <= k.radius; ++dj)
        for (int di = -k.radius; di <= k.radius; ++di)
            k.weights[static_cast<std::size_t>((dj + k.radius) * w + (di + k.radius))] =
                integrate_rect(g, (di - 0.5) * a, (di + 0.5) * a, (dj - 0.5) * a, (dj + 0.5) * a, sub) * inv * inv;
    return k;
}

inline double radial_step_eta(Point y) { return smooth_radial_step(std::hypot(y.x, y.y)); }

struct ConverseSetup {
    Point centre{};
    double radius = 1.0;
    std::vector<double> lambdas;
};

/// X_{a,lambda} = int_{B(c, r)} |<Phi, eta_{lambda,x}>| dx for every lambda, as the
/// area of B(c, r) times the mean over cell centres on a stride grid (stride
/// max(1, floor(lambda / 4a)) cells) inside the disc.
class ConverseAccumulator {
public:
    template <typename Eta>
    ConverseAccumulator(const CellGrid& grid, ConverseSetup setup, const Eta& eta) : grid_(grid), setup_(std::move(setup)) {
        const double a = grid.spacing;
        const Rect ext = grid.extent();
        for (double lambda : setup_.lambdas) {
            Level lv;
            lv.lambda = lambda;
            lv.usable = lambda > a;
            if (lv.usable) {
                lv.kernel = make_bump_kernel(eta, lambda, a);
                const int stride = std::max(1, static_cast<int>(std::floor(lambda / (4 * a))));
                for (int j = 0; j < grid.ny; j += stride)
                    for (int i = 0; i < grid.nx; i += stride) {
                        const Point x = grid.center(i, j);
                        if (std::hypot(x.x - setup_.centre.x, x.y - setup_.centre.y) > setup_.radius) continue;
                        if (i - lv.kernel.radius < 0 || j - lv.kernel.radius < 0 || i + lv.kernel.radius >= grid.nx ||
                            j + lv.kernel.radius >= grid.ny)
                            throw std::invalid_argument("converse: B(c, r + lambda) leaves the field's domain");
                        lv.points.push_back({i, j});
                    }
                if (lv.points.empty()) throw std::invalid_argument("converse: no grid points inside the disc");
                (void)ext;
            }
            levels_.push_back(std::move(lv));
        }
    }

    /// X_{a,lambda} of one field, per lambda (NaN for excluded lambda).
    std::vector<double> evaluate(const LatticeField& field) const {
        if (!(field.grid() == grid_)) throw std::invalid_argument("converse: field grid mismatch");
        const double area = std::numbers::pi * setup_.radius * setup_.radius;
        std::vector<double> out;
        for (const auto& lv : levels_) {
            if (!lv.usable) {
                out.push_back(std::nan(""));
                continue;
            }
            const int r = lv.kernel.radius, w = 2 * r + 1;
            double acc = 0.0;
            for (const auto& [i, j] : lv.points) {
                double s = 0.0;
                for (int dj = -r; dj <= r; ++dj) {
                    const auto row = field.row(j + dj);
                    const double* kw = &lv.kernel.weights[static_cast<std::size_t>((dj + r) * w)];
                    for (int di = -r; di <= r; ++di) s += row[static_cast<std::size_t>(i + di)] * kw[di + r];
                }
                acc += std::abs(s);
            }
            out.push_back(area * acc / static_cast<double>(lv.points.size()));
        }
        return out;
    }

    void add(const LatticeField& field) {
        const auto x = evaluate(field);
        if (sums_.empty()) sums_.assign(x.size(), 0.0);
        for (std::size_t t = 0; t < x.size(); ++t) sums_[t] += x[t];
        ++samples_;
    }

    std::size_t samples() const noexcept { return samples_; }
    const std::vector<double>& sums() const noexcept { return sums_; }
    const ConverseSetup& setup() const noexcept { return setup_; }
    bool usable(std::size_t t) const { return levels_.at(t).usable; }

private:
    struct GridPoint {
        int i, j;
    };
    struct Level {
        double lambda = 0.0;
        bool usable = false;
        BumpKernel kernel;
        std::vector<GridPoint> points;
    };
    CellGrid grid_;
    ConverseSetup setup_;
    std::vector<Level> levels_;
    std::vector<double> sums_;
    std::size_t samples_ = 0;
};

struct LowerBoundProfile {
    struct Row {
        double lambda = 0.0;
        double mean = 0.0;
        double stderr_ = 0.0;
        std::size_t samples = 0;
        bool used = false;
    };
    std::vector<Row> rows;
    bool has_fit = false;
    double growth = 0.0;  // slope of log2 E[X] against -log2 lambda
    double growth_stderr = 0.0;
    std::vector<std::string> warnings;
};

/// Per-lambda ensemble means (stderr across chains) and the fitted growth exponent.
inline LowerBoundProfile lower_bound_profile(std::span<const ConverseAccumulator> chains) {
    if (chains.empty()) throw std::invalid_argument("lower_bound_profile: no chains");
    LowerBoundProfile prof;
    const auto& setup = chains.front().setup();
    std::vector<ScalingPoint> pts;
    for (std::size_t t = 0; t < setup.lambdas.size(); ++t) {
        LowerBoundProfile::Row row;
        row.lambda = setup.lambdas[t];
        if (!chains.front().usable(t)) {
            prof.warnings.push_back("lambda = " + std::to_string(row.lambda) + " is not above the lattice spacing; excluded");
            prof.rows.push_back(row);
            continue;
        }
        std::vector<double> per_chain;
        std::size_t total = 0;
        double acc = 0.0;
        for (const auto& c : chains) {
            if (c.samples() == 0) continue;
            per_chain.push_back(c.sums()[t] / static_cast<double>(c.samples()));
            acc += c.sums()[t];
            total += c.samples();
        }
        if (total == 0) throw std::invalid_argument("lower_bound_profile: no samples");
        row.mean = acc / static_cast<double>(total);
        row.stderr_ = independent_mean(per_chain).stderr_;
        row.samples = total;
        row.used = true;
        prof.rows.push_back(row);
        pts.push_back({-std::log2(row.lambda), row.mean, row.stderr_});
    }
    try {
        const auto fit = fit_log2_values(pts, 2);
        prof.has_fit = true;
        prof.growth = fit.fit.slope;
        prof.growth_stderr = fit.fit.slope_stderr;
        prof.warnings.insert(prof.warnings.end(), fit.warnings.begin(), fit.warnings.end());
    } catch (const std::invalid_argument& e) {
        prof.warnings.push_back(std::string("fit refused: ") + e.what());
    }
    return prof;
}

/// Each field treated as one independent sample.
template <typename Eta>
LowerBoundProfile lower_bound_profile(std::span<const LatticeField> ensemble, const Eta& eta, ConverseSetup setup) {
    if (ensemble.empty()) throw std::invalid_argument("lower_bound_profile: empty ensemble");
    std::vector<ConverseAccumulator> chains;
    const ConverseAccumulator proto(ensemble.front().grid(), std::move(setup), eta);
    for (const auto& f : ensemble) {
        chains.push_back(proto);
        chains.back().add(f);
    }
    return lower_bound_profile(chains);
}

namespace detail {

/// Each cell split into r x r equal subcells with the same value.
inline LatticeField refine_cells(const LatticeField& f, int r) {
    const auto& g = f.grid();
    CellGrid fine{g.origin, g.spacing / r, g.nx * r, g.ny * r};
    std::vector<double> v(fine.size());
    for (int j = 0; j < fine.ny; ++j)
        for (int i = 0; i < fine.nx; ++i)
            v[static_cast<std::size_t>(j) * fine.nx + i] = f.at(i / r, j / r);
    return LatticeField(fine, std::move(v), f.provenance());
}

inline bool on_lattice(double x, double h) { return std::abs(x / h - std::round(x / h)) < 1e-9; }

}  // namespace detail

/// ||f - f_{N,k}||_{B^{alpha,K,k}_{p,1}} for N = k .. n_max. The difference is
/// formed on a grid whose cell edges are dyadic, refining f by 2 when its cells
/// straddle dyadic lines (magnetization cells are centred on aZ^2), so that
/// truncated reconstructions are represented exactly.
inline std::vector<double> kolmogorov_convergence_check(const LatticeField& input, const WaveletBasis2D& basis,
                                                        const AdaptedRegion& region, int n_max, double alpha,
                                                        double p) {
    const BesovParams params{alpha, p, 1.0};
    const auto& g0 = input.grid();
    const bool aligned = detail::on_lattice(g0.origin.x, g0.spacing) && detail::on_lattice(g0.origin.y, g0.spacing);
    const LatticeField field = aligned ? input : detail::refine_cells(input, 2);
    const auto pyr = build_pyramid(field, basis, region, n_max);
    std::vector<double> gaps;
    for (int N = region.k; N <= n_max; ++N) {
        const auto rec = reconstruct_truncated(pyr, N, basis, field.grid());
        const LatticeField diff(field.grid(), [&] {
            std::vector<double> d(field.values().begin(), field.values().end());
            for (std::size_t t = 0; t < d.size(); ++t) d[t] -= rec.values()[t];
            return d;
        }());
        gaps.push_back(local_seminorm(build_pyramid(diff, basis, region, n_max), params));
    }
    return gaps;
}

}  // namespace besovtight
