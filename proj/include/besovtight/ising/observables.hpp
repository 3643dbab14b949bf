#pragma once

// Estimators over sample streams: spin products, parity events of the FK
// partition, one-arm connections and magnetization moments.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "besovtight/ising/exact.hpp"
#include "besovtight/ising/lattice.hpp"
#include "besovtight/stats.hpp"

namespace besovtight::ising {

inline int spin_product(const SpinConfiguration& s, std::span<const int> points) {
    int prod = 1;
    for (int v : points) prod *= s.at(v);
    return prod;
}

/// Mean of prod_j sigma_{y_j} with binned stderr.
inline Estimate correlation(std::span<const SpinConfiguration> samples, std::span<const int> points,
                            int bins = kDefaultBins) {
    if (samples.empty()) throw std::invalid_argument("correlation: empty sample stream");
    std::vector<double> xs;
    xs.reserve(samples.size());
    for (const auto& s : samples) xs.push_back(spin_product(s, points));
    return binned_mean(xs, bins);
}

inline Estimate correlation(const ExactIsingTable& table, std::span<const int> points) {
    return {table.correlation(points), 0.0, 1};
}

enum class ParityVariant { free_A0, wired_A1 };

/// A^0: every open cluster holds an even number of the points; A^1 also
/// accepts clusters that contain the ghost.
inline bool event_A(const FKConfiguration& fk, std::span<const int> points, ParityVariant variant, int ghost) {
    if (variant == ParityVariant::wired_A1 && ghost < 0)
        throw std::invalid_argument("event A^1 needs a plus boundary");
    const int gc = (variant == ParityVariant::wired_A1) ? fk.cluster_of(ghost) : -1;
    return parity_event([&](int v) { return fk.cluster_of(v); }, points, gc);
}

inline Estimate event_A_probability(std::span<const FKConfiguration> samples, std::span<const int> points,
                                    ParityVariant variant, int ghost, int bins = kDefaultBins) {
    if (samples.empty()) throw std::invalid_argument("event_A_probability: empty sample stream");
    std::vector<double> xs;
    xs.reserve(samples.size());
    for (const auto& fk : samples) xs.push_back(event_A(fk, points, variant, ghost) ? 1.0 : 0.0);
    return binned_mean(xs, bins);
}

inline Estimate event_A_probability(const ExactFKTable& table, std::span<const int> points, ParityVariant variant) {
    return {table.parity_probability(points, variant == ParityVariant::wired_A1), 0.0, 1};
}

/// B_m = [-m, m]^2 with a plus (wired) boundary.
inline LatticeDomain one_arm_domain(int m) {
    if (m < 0) throw std::invalid_argument("one-arm radius must be non-negative");
    return LatticeDomain::box(2 * m + 1, 2 * m + 1, Boundary::plus, {-m, -m});
}

/// Per-sample indicators of {0 <-> boundary of B_m}. For m = 0 the origin lies on
/// the boundary and the probability is 1 by convention.
inline Estimate one_arm_probability(int m, std::span<const std::uint8_t> hits, int bins = kDefaultBins) {
    if (m == 0) return {1.0, 0.0, hits.size()};
    if (hits.empty()) throw std::invalid_argument("one_arm_probability: empty sample stream");
    std::vector<double> xs(hits.begin(), hits.end());
    return binned_mean(xs, bins);
}

/// U_N = [0, N]^2 with (N + 1)^2 sites.
inline LatticeDomain correlation_sum_domain(int N, Boundary bc = Boundary::plus) {
    if (N < 0) throw std::invalid_argument("correlation sum needs N >= 0");
    return LatticeDomain::box(N + 1, N + 1, bc);
}

inline void check_correlation_sum_order(int p) {
    if (p != 2 && p != 4) throw std::invalid_argument("correlation sum order must be 2 or 4 (even), got " + std::to_string(p));
}

/// sum_{y_1..y_p} sigma_{y_1} ... sigma_{y_p} = M^p for one configuration, over (N + 1)^{15 p / 8}.
inline double normalized_correlation_sum_sample(const SpinConfiguration& s, int N, int p) {
    check_correlation_sum_order(p);
    const double M = static_cast<double>(s.magnetization());
    return std::pow(M, p) / std::pow(N + 1.0, 15.0 * p / 8.0);
}

inline double normalized_correlation_sum(const ExactIsingTable& table, int N, int sites, int p) {
    check_correlation_sum_order(p);
    double acc = 0.0;
    for (std::uint32_t s = 0; s < table.size(); ++s) {
        double M = 0.0;
        for (int v = 0; v < sites; ++v) M += ExactIsingTable::spin_of(s, v, -1);
        acc += std::pow(M, p) * table.probability(s);
    }
    return acc / std::pow(N + 1.0, 15.0 * p / 8.0);
}

}  // namespace besovtight::ising
