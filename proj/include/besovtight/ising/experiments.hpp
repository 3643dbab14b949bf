#pragma once

// Ensemble runners for the critical exponents: independent Swendsen-Wang chains
// with derived seeds, one mean per chain, stderr across chains.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "besovtight/ising/observables.hpp"
#include "besovtight/ising/samplers.hpp"
#include "besovtight/parallel.hpp"
#include "besovtight/rng.hpp"
#include "besovtight/stats.hpp"

namespace besovtight::ising {

struct ChainSchedule {
    int chains = 16;
    long sweeps = 300;  // measured sweeps per chain
    long burn_in = 1000;
    int thin = 1;
    std::uint64_t seed = 1;
    int threads = 1;

    void validate() const {
        if (chains < 2) throw std::invalid_argument("ensemble needs at least 2 chains");
        if (sweeps < 1 || burn_in < 0 || thin < 1) throw std::invalid_argument("invalid sweep schedule");
    }
};

struct ScalingRow {
    double x = 0.0;  // distance m or size N
    Estimate estimate;
};

struct ExponentResult {
    std::string observable;
    std::vector<ScalingRow> rows;
    bool has_fit = false;
    double exponent = 0.0;  // minus the log-log slope
    double exponent_stderr = 0.0;
    double intercept = 0.0;
    std::vector<std::string> warnings;
};

namespace detail {

inline Estimate chain_estimate(std::span<const double> per_chain, long per_chain_samples) {
    auto e = independent_mean(per_chain);
    e.n = per_chain.size() * static_cast<std::size_t>(per_chain_samples);
    return e;
}

inline void fit_decay(ExponentResult& r, std::size_t min_points) {
    std::vector<ScalingPoint> pts;
    for (const auto& row : r.rows) pts.push_back({std::log2(row.x), row.estimate.mean, row.estimate.stderr_});
    try {
        const auto f = fit_log2_values(pts, min_points);
        r.has_fit = true;
        r.exponent = -f.fit.slope;
        r.exponent_stderr = f.fit.slope_stderr;
        r.intercept = f.fit.intercept;
        r.warnings = f.warnings;
    } catch (const std::invalid_argument& e) {
        r.warnings.push_back(std::string("fit refused: ") + e.what());
    }
}

}  // namespace detail

/// E[sigma_0 sigma_x] on an L x L box, |x - 0| = m along the four axis
/// directions, averaged over a 4 x 4 block of origins around the centre.
inline ExponentResult two_point_experiment(int L, Boundary bc, std::vector<int> distances, const ChainSchedule& sched,
                                           double p) {
    sched.validate();
    if (distances.empty()) throw std::invalid_argument("two_point: no distances");
    const int c0 = L / 2;
    for (int m : distances)
        if (m < 1 || c0 - 2 - m < 0 || c0 + 1 + m >= L)
            throw std::invalid_argument("two_point: distance " + std::to_string(m) + " does not fit in the box");
    const auto domain = LatticeDomain::box(L, L, bc);
    std::vector<std::vector<double>> per_chain(static_cast<std::size_t>(sched.chains),
                                               std::vector<double>(distances.size(), 0.0));
    parallel_for(static_cast<std::size_t>(sched.chains), sched.threads, [&](std::size_t c) {
        auto& acc = per_chain[c];
        sample_swendsen_wang(
            domain, p, sched.sweeps, sched.burn_in, derive_seed(sched.seed, c),
            [&](SwendsenWangChain& ch) {
                const auto& s = ch.spins().sigma;
                for (std::size_t k = 0; k < distances.size(); ++k) {
                    const int m = distances[k];
                    double sum = 0.0;
                    for (int dy = -2; dy <= 1; ++dy)
                        for (int dx = -2; dx <= 1; ++dx) {
                            const int x = c0 + dx, y = c0 + dy;
                            const int s0 = s[static_cast<std::size_t>(domain.site_at(x, y))];
                            sum += s0 * (s[static_cast<std::size_t>(domain.site_at(x + m, y))] +
                                         s[static_cast<std::size_t>(domain.site_at(x - m, y))] +
                                         s[static_cast<std::size_t>(domain.site_at(x, y + m))] +
                                         s[static_cast<std::size_t>(domain.site_at(x, y - m))]);
                        }
                    acc[k] += sum / 64.0;
                }
            },
            sched.thin);
        for (auto& v : acc) v /= static_cast<double>(sched.sweeps);
    });
    ExponentResult r;
    r.observable = "two_point";
    for (std::size_t k = 0; k < distances.size(); ++k) {
        std::vector<double> xs;
        for (const auto& pc : per_chain) xs.push_back(pc[k]);
        r.rows.push_back({static_cast<double>(distances[k]), detail::chain_estimate(xs, sched.sweeps)});
    }
    detail::fit_decay(r, 3);
    return r;
}

/// phi^+_{B_m}(0 <-> boundary) for each m.
inline ExponentResult one_arm_experiment(std::vector<int> radii, const ChainSchedule& sched, double p) {
    sched.validate();
    ExponentResult r;
    r.observable = "one_arm";
    for (int m : radii) {
        if (m == 0) {
            r.rows.push_back({0.0, one_arm_probability(0, {})});
            continue;
        }
        const auto domain = one_arm_domain(m);
        const int origin = domain.site_at(0, 0);
        std::vector<double> per_chain(static_cast<std::size_t>(sched.chains), 0.0);
        parallel_for(per_chain.size(), sched.threads, [&](std::size_t c) {
            double hits = 0.0;
            sample_swendsen_wang(
                domain, p, sched.sweeps, sched.burn_in, derive_seed(sched.seed ^ mix64(static_cast<std::uint64_t>(m)), c),
                [&](SwendsenWangChain& ch) { hits += ch.touches_ghost(origin) ? 1.0 : 0.0; }, sched.thin);
            per_chain[c] = hits / static_cast<double>(sched.sweeps);
        });
        r.rows.push_back({static_cast<double>(m), detail::chain_estimate(per_chain, sched.sweeps)});
    }
    std::vector<ScalingRow> kept;
    for (const auto& row : r.rows)
        if (row.x > 0) kept.push_back(row);
    ExponentResult fit_view = r;
    fit_view.rows = kept;
    detail::fit_decay(fit_view, 3);
    r.has_fit = fit_view.has_fit;
    r.exponent = fit_view.exponent;
    r.exponent_stderr = fit_view.exponent_stderr;
    r.intercept = fit_view.intercept;
    r.warnings = fit_view.warnings;
    return r;
}

struct CorrelationSumResult {
    int order = 2;
    std::vector<ScalingRow> rows;  // x = N, estimate of E[M^p] / (N + 1)^{15 p / 8}
    double max_ratio = 0.0;        // largest / smallest normalized value
};

inline CorrelationSumResult correlation_sum_experiment(std::vector<int> sizes, int order, const ChainSchedule& sched,
                                                       double p) {
    sched.validate();
    check_correlation_sum_order(order);
    CorrelationSumResult r;
    r.order = order;
    for (int N : sizes) {
        const auto domain = correlation_sum_domain(N);
        std::vector<double> per_chain(static_cast<std::size_t>(sched.chains), 0.0);
        parallel_for(per_chain.size(), sched.threads, [&](std::size_t c) {
            double acc = 0.0;
            sample_swendsen_wang(
                domain, p, sched.sweeps, sched.burn_in, derive_seed(sched.seed ^ mix64(static_cast<std::uint64_t>(N)), c),
                [&](SwendsenWangChain& ch) { acc += normalized_correlation_sum_sample(ch.spins(), N, order); },
                sched.thin);
            per_chain[c] = acc / static_cast<double>(sched.sweeps);
        });
        r.rows.push_back({static_cast<double>(N), detail::chain_estimate(per_chain, sched.sweeps)});
    }
    double lo = 0.0, hi = 0.0;
    for (std::size_t k = 0; k < r.rows.size(); ++k) {
        const double v = r.rows[k].estimate.mean;
        if (k == 0 || v < lo) lo = v;
        if (k == 0 || v > hi) hi = v;
    }
    r.max_ratio = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
    return r;
}

}  // namespace besovtight::ising
