#pragma once

// Exact enumeration on small graphs: the FK measure over all 2^|E| edge
// configurations, the Ising measure over all 2^V spin configurations, and the
// joint Edwards-Sokal table when both fit.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <stdexcept>
#include <vector>

#include "besovtight/ising/lattice.hpp"

namespace besovtight::ising {

inline constexpr int kMaxExactEdges = 20;
inline constexpr int kMaxExactSpins = 24;

/// Each cluster holds an even number of the marked points, or (wired) contains
/// the ghost. Points may repeat; repeats count with multiplicity.
template <typename ClusterOf>
bool parity_event(ClusterOf&& cluster_of, std::span<const int> points, int ghost_cluster) {
    // Few points: pair them off by cluster with a small sort.
    std::vector<int> cl;
    cl.reserve(points.size());
    for (int v : points) {
        const int c = cluster_of(v);
        if (c != ghost_cluster) cl.push_back(c);
    }
    std::sort(cl.begin(), cl.end());
    for (std::size_t t = 0; t < cl.size();) {
        std::size_t u = t;
        while (u < cl.size() && cl[u] == cl[t]) ++u;
        if ((u - t) % 2) return false;
        t = u;
    }
    return true;
}

/// phi^xi_{Lambda,p,q}: probability of every edge configuration, with its cluster labels.
class ExactFKTable {
public:
    ExactFKTable(const LatticeDomain& domain, double p, double q = 2.0) : domain_(&domain), p_(p), q_(q) {
        const int ne = domain.edge_count();
        if (ne > kMaxExactEdges)
            throw std::invalid_argument("exact enumeration supports at most 20 edges, got " + std::to_string(ne));
        if (!(p >= 0 && p <= 1)) throw std::invalid_argument("p must lie in [0, 1]");
        if (!(q > 0)) throw std::invalid_argument("q must be positive");
        nv_ = domain.vertex_count();
        if (nv_ > 255) throw std::invalid_argument("exact enumeration: too many vertices");
        const std::uint32_t count = 1u << ne;
        prob_.resize(count);
        labels_.resize(static_cast<std::size_t>(count) * nv_);
        UnionFind uf;
        for (std::uint32_t m = 0; m < count; ++m) {
            uf.reset(nv_);
            int open = 0;
            for (int e = 0; e < ne; ++e)
                if (m >> e & 1u) {
                    ++open;
                    uf.unite(domain.edges()[static_cast<std::size_t>(e)].u, domain.edges()[static_cast<std::size_t>(e)].v);
                }
            const auto lab = uf.canonical_labels();
            std::copy(lab.begin(), lab.end(), labels_.begin() + static_cast<std::ptrdiff_t>(m) * nv_);
            prob_[m] = std::pow(p, open) * std::pow(1.0 - p, ne - open) * std::pow(q, uf.components());
        }
        double z = 0.0;
        for (double w : prob_) z += w;
        z_ = z;
        for (double& w : prob_) w /= z;
    }

    const LatticeDomain& domain() const noexcept { return *domain_; }
    double p() const noexcept { return p_; }
    double q() const noexcept { return q_; }
    std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(prob_.size()); }
    double partition_function() const noexcept { return z_; }
    double probability(std::uint32_t mask) const { return prob_.at(mask); }
    std::span<const std::uint8_t> labels(std::uint32_t mask) const {
        return {labels_.data() + static_cast<std::size_t>(mask) * nv_, static_cast<std::size_t>(nv_)};
    }

    /// phi(event) for pred(mask, labels).
    template <typename Pred>
    double event_probability(Pred&& pred) const {
        double acc = 0.0;
        for (std::uint32_t m = 0; m < size(); ++m)
            if (pred(m, labels(m))) acc += prob_[m];
        return acc;
    }

    double edge_open(int e) const {
        return event_probability([e](std::uint32_t m, auto) { return (m >> e & 1u) != 0; });
    }

    /// phi(A^0) (wired = false) or phi(A^1) (wired = true) for the marked sites.
    double parity_probability(std::span<const int> points, bool wired) const {
        const int g = domain_->ghost();
        return event_probability([&](std::uint32_t, std::span<const std::uint8_t> lab) {
            const int ghost_cluster = (wired && g >= 0) ? lab[static_cast<std::size_t>(g)] : -1;
            return parity_event([&](int v) { return static_cast<int>(lab[static_cast<std::size_t>(v)]); }, points,
                                ghost_cluster);
        });
    }

    double connection_probability(int u, int v) const {
        return event_probability([&](std::uint32_t, std::span<const std::uint8_t> lab) {
            return lab[static_cast<std::size_t>(u)] == lab[static_cast<std::size_t>(v)];
        });
    }

private:
    const LatticeDomain* domain_;
    double p_, q_;
    int nv_ = 0;
    double z_ = 0.0;
    std::vector<double> prob_;
    std::vector<std::uint8_t> labels_;
};

/// Ising measure pi ∝ exp(beta * #{aligned edges}) over all spin configurations
/// (ghost spin +1 under a plus boundary).
class ExactIsingTable {
public:
    ExactIsingTable(const LatticeDomain& domain, double beta) : domain_(&domain) {
        const int ns = domain.site_count();
        if (ns > kMaxExactSpins) throw std::invalid_argument("exact Ising enumeration supports at most 24 sites");
        const std::uint32_t count = 1u << ns;
        prob_.resize(count);
        const int g = domain.ghost();
        for (std::uint32_t s = 0; s < count; ++s) {
            int aligned = 0;
            for (const auto& e : domain.edges()) {
                const int su = spin_of(s, e.u, g), sv = spin_of(s, e.v, g);
                aligned += (su == sv);
            }
            prob_[s] = std::exp(beta * aligned);
        }
        double z = 0.0;
        for (double w : prob_) z += w;
        for (double& w : prob_) w /= z;
    }

    /// Spin of vertex v in configuration bits s (bit set = -1).
    static int spin_of(std::uint32_t s, int v, int ghost) noexcept {
        if (v == ghost) return 1;
        return (s >> v & 1u) ? -1 : 1;
    }

    std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(prob_.size()); }
    double probability(std::uint32_t s) const { return prob_.at(s); }

    double correlation(std::span<const int> points) const {
        double acc = 0.0;
        const int g = domain_->ghost();
        for (std::uint32_t s = 0; s < size(); ++s) {
            int prod = 1;
            for (int v : points) prod *= spin_of(s, v, g);
            acc += prod * prob_[s];
        }
        return acc;
    }

private:
    const LatticeDomain* domain_;
    std::vector<double> prob_;
};

struct CouplingMarginalGaps {
    double spin = 0.0;  // max |mu(sigma) - pi(sigma)|
    double edge = 0.0;  // max |mu(omega) - phi(omega)|
};

/// Builds the joint Edwards-Sokal weights and compares both marginals with the
/// separately enumerated Ising and FK measures.
inline CouplingMarginalGaps edwards_sokal_marginal_gaps(const LatticeDomain& domain, double p) {
    const int ne = domain.edge_count(), ns = domain.site_count();
    if (ne + ns > 24) throw std::invalid_argument("joint enumeration needs |E| + |V| <= 24");
    const int g = domain.ghost();
    const std::uint32_t nw = 1u << ne, nsig = 1u << ns;
    std::vector<double> spin(nsig, 0.0), edge(nw, 0.0);
    double z = 0.0;
    for (std::uint32_t s = 0; s < nsig; ++s) {
        std::uint32_t aligned_mask = 0;
        for (int e = 0; e < ne; ++e) {
            const auto& ed = domain.edges()[static_cast<std::size_t>(e)];
            if (ExactIsingTable::spin_of(s, ed.u, g) == ExactIsingTable::spin_of(s, ed.v, g)) aligned_mask |= 1u << e;
        }
        for (std::uint32_t m = 0; m < nw; ++m) {
            if (m & ~aligned_mask) continue;  // an open edge joins unequal spins
            const int open = std::popcount(m);
            const double w = std::pow(p, open) * std::pow(1.0 - p, ne - open);
            spin[s] += w;
            edge[m] += w;
            z += w;
        }
    }
    const ExactIsingTable ising(domain, -std::log1p(-p));
    const ExactFKTable fk(domain, p, 2.0);
    CouplingMarginalGaps gaps;
    for (std::uint32_t s = 0; s < nsig; ++s) gaps.spin = std::max(gaps.spin, std::abs(spin[s] / z - ising.probability(s)));
    for (std::uint32_t m = 0; m < nw; ++m) gaps.edge = std::max(gaps.edge, std::abs(edge[m] / z - fk.probability(m)));
    return gaps;
}

/// Domain Markov property: for every state xi of the edges outside `inner`,
/// compares phi(omega_inner | xi), read off the full table, with phi^xi_Lambda
/// built directly: weights p^o (1-p)^(|inner|-o) q^k where k counts the open
/// clusters of omega_inner x xi that meet an endpoint of an inner edge.
/// Returns the largest absolute difference.
inline double domain_markov_gap(const ExactFKTable& table, std::span<const int> inner) {
    const auto& domain = table.domain();
    const int ne = domain.edge_count();
    std::uint32_t inner_mask = 0;
    for (int e : inner) {
        if (e < 0 || e >= ne) throw std::invalid_argument("domain_markov_gap: edge out of range");
        inner_mask |= 1u << e;
    }
    std::vector<int> touched;
    for (int e : inner) {
        touched.push_back(domain.edges()[static_cast<std::size_t>(e)].u);
        touched.push_back(domain.edges()[static_cast<std::size_t>(e)].v);
    }
    const int ni = std::popcount(inner_mask);
    double gap = 0.0;
    UnionFind uf;
    for (std::uint32_t xi = 0; xi < table.size(); ++xi) {
        if (xi & inner_mask) continue;
        // Enumerate inner sub-configurations as subsets of inner_mask.
        std::vector<std::uint32_t> subs;
        for (std::uint32_t s = inner_mask;; s = (s - 1) & inner_mask) {
            subs.push_back(s);
            if (s == 0) break;
        }
        double cond_total = 0.0, direct_total = 0.0;
        std::vector<double> cond, direct;
        for (std::uint32_t s : subs) {
            const std::uint32_t m = xi | s;
            cond.push_back(table.probability(m));
            cond_total += cond.back();
            uf.reset(domain.vertex_count());
            for (int e = 0; e < ne; ++e)
                if (m >> e & 1u) uf.unite(domain.edges()[static_cast<std::size_t>(e)].u, domain.edges()[static_cast<std::size_t>(e)].v);
            std::vector<int> roots;
            for (int v : touched) roots.push_back(uf.find(v));
            std::sort(roots.begin(), roots.end());
            const auto k = std::unique(roots.begin(), roots.end()) - roots.begin();
            const int open = std::popcount(s);
            direct.push_back(std::pow(table.p(), open) * std::pow(1.0 - table.p(), ni - open) *
                             std::pow(table.q(), static_cast<double>(k)));
            direct_total += direct.back();
        }
        if (cond_total <= 0) continue;
        for (std::size_t t = 0; t < subs.size(); ++t)
            gap = std::max(gap, std::abs(cond[t] / cond_total - direct[t] / direct_total));
    }
    return gap;
}

}  // namespace besovtight::ising
