#pragma once

// Cluster Monte Carlo for the Edwards-Sokal coupling at q = 2.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "besovtight/ising/lattice.hpp"
#include "besovtight/rng.hpp"

namespace besovtight::ising {

enum class Start { cold, hot };

namespace detail {
inline std::uint64_t probability_threshold(double p) {
    if (!(p >= 0 && p <= 1)) throw std::invalid_argument("bond probability must lie in [0, 1]");
    if (p >= 1.0) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(std::ldexp(p, 64));
}
inline bool bernoulli(Xoshiro256& rng, std::uint64_t threshold, bool certain) {
    return certain || rng() < threshold;
}
}  // namespace detail

/// Swendsen-Wang: each sweep draws omega given sigma (open aligned edges with
/// probability p), then sigma given omega (one fair coin per cluster; the ghost
/// cluster keeps spin +1).
class SwendsenWangChain {
public:
    SwendsenWangChain(const LatticeDomain& domain, double p, std::uint64_t seed, Start start = Start::cold)
        : domain_(&domain),
          threshold_(detail::probability_threshold(p)),
          certain_(p >= 1.0),
          rng_(seed),
          uf_(domain.vertex_count()),
          omega_(static_cast<std::size_t>(domain.edge_count()), 0),
          root_spin_(static_cast<std::size_t>(domain.vertex_count()), 0) {
        spins_.boundary = domain.boundary();
        spins_.sigma.assign(static_cast<std::size_t>(domain.site_count()), 1);
        if (start == Start::hot)
            for (auto& s : spins_.sigma) s = rng_.coin() ? 1 : -1;
    }

    void sweep() {
        const auto& edges = domain_->edges();
        const int g = domain_->ghost();
        const auto* sig = spins_.sigma.data();
        uf_.reset(domain_->vertex_count());
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const int u = edges[e].u, v = edges[e].v;
            const int su = sig[u], sv = (v == g) ? 1 : sig[v];
            const bool open = su == sv && detail::bernoulli(rng_, threshold_, certain_);
            omega_[e] = open;
            if (open) uf_.unite(u, v);
        }
        std::fill(root_spin_.begin(), root_spin_.end(), 0);
        if (g >= 0) root_spin_[static_cast<std::size_t>(uf_.find(g))] = 1;
        auto* out = spins_.sigma.data();
        for (int v = 0; v < domain_->site_count(); ++v) {
            auto& rs = root_spin_[static_cast<std::size_t>(uf_.find(v))];
            if (rs == 0) rs = rng_.coin() ? 1 : -1;
            out[v] = rs;
        }
        ++sweeps_;
    }

    const LatticeDomain& domain() const noexcept { return *domain_; }
    const SpinConfiguration& spins() const noexcept { return spins_; }
    const std::vector<std::uint8_t>& omega() const noexcept { return omega_; }
    /// Cluster root of v in the bond configuration of the last sweep.
    int cluster_of(int v) noexcept { return uf_.find(v); }
    bool connected(int u, int v) noexcept { return uf_.find(u) == uf_.find(v); }
    bool touches_ghost(int v) noexcept { return domain_->has_ghost() && connected(v, domain_->ghost()); }
    FKConfiguration fk() const { return FKConfiguration(omega_, uf_, domain_->boundary(), domain_->ghost()); }
    long sweeps() const noexcept { return sweeps_; }
    const Xoshiro256& rng() const noexcept { return rng_; }

private:
    const LatticeDomain* domain_;
    std::uint64_t threshold_;
    bool certain_;
    Xoshiro256 rng_;
    UnionFind uf_;
    std::vector<std::uint8_t> omega_;
    std::vector<std::int8_t> root_spin_;
    SpinConfiguration spins_;
    long sweeps_ = 0;
};

/// Wolff single-cluster updates on the graph including the ghost. The ghost is
/// an ordinary vertex during growth; when its cluster flips, every spin is
/// flipped back (global symmetry) so that the ghost stays +1.
class WolffChain {
public:
    WolffChain(const LatticeDomain& domain, double p, std::uint64_t seed, Start start = Start::cold)
        : domain_(&domain),
          threshold_(detail::probability_threshold(p)),
          certain_(p >= 1.0),
          rng_(seed),
          spin_(static_cast<std::size_t>(domain.vertex_count()), 1) {
        if (start == Start::hot)
            for (int v = 0; v < domain.site_count(); ++v) spin_[static_cast<std::size_t>(v)] = rng_.coin() ? 1 : -1;
        stack_.reserve(static_cast<std::size_t>(domain.vertex_count()));
        spins_.boundary = domain.boundary();
    }

    /// One cluster flip; returns the cluster size.
    int step() {
        const int nv = domain_->vertex_count();
        const int seed = static_cast<int>(rng_.below(static_cast<std::uint64_t>(nv)));
        const std::int8_t s0 = spin_[static_cast<std::size_t>(seed)];
        spin_[static_cast<std::size_t>(seed)] = static_cast<std::int8_t>(-s0);
        stack_.clear();
        stack_.push_back(seed);
        int size = 1;
        while (!stack_.empty()) {
            const int u = stack_.back();
            stack_.pop_back();
            auto [b, e] = domain_->neighbours(u);
            for (const int* it = b; it != e; ++it) {
                auto& sw = spin_[static_cast<std::size_t>(*it)];
                if (sw == s0 && detail::bernoulli(rng_, threshold_, certain_)) {
                    sw = static_cast<std::int8_t>(-s0);
                    stack_.push_back(*it);
                    ++size;
                }
            }
        }
        const int g = domain_->ghost();
        if (g >= 0 && spin_[static_cast<std::size_t>(g)] < 0)
            for (auto& s : spin_) s = static_cast<std::int8_t>(-s);
        ++steps_;
        return size;
    }

    const SpinConfiguration& spins() {
        spins_.sigma.assign(spin_.begin(), spin_.begin() + domain_->site_count());
        return spins_;
    }
    long steps() const noexcept { return steps_; }

private:
    const LatticeDomain* domain_;
    std::uint64_t threshold_;
    bool certain_;
    Xoshiro256 rng_;
    std::vector<std::int8_t> spin_;
    std::vector<int> stack_;
    SpinConfiguration spins_;
    long steps_ = 0;
};

/// Runs burn_in sweeps, then calls on_sample(chain) after every `thin` sweeps
/// until `sweeps` samples have been delivered.
template <typename OnSample>
void sample_swendsen_wang(const LatticeDomain& domain, double p, long sweeps, long burn_in, std::uint64_t seed,
                          OnSample&& on_sample, int thin = 1) {
    if (sweeps < 0 || burn_in < 0 || thin < 1) throw std::invalid_argument("sample_swendsen_wang: bad schedule");
    SwendsenWangChain chain(domain, p, seed);
    for (long t = 0; t < burn_in; ++t) chain.sweep();
    for (long s = 0; s < sweeps; ++s) {
        for (int t = 0; t < thin; ++t) chain.sweep();
        on_sample(chain);
    }
}

/// Wolff analogue of sample_swendsen_wang; `steps` samples, `thin` flips apart.
template <typename OnSample>
void sample_wolff(const LatticeDomain& domain, double p, long steps, long burn_in, std::uint64_t seed,
                  OnSample&& on_sample, int thin = 1) {
    if (steps < 0 || burn_in < 0 || thin < 1) throw std::invalid_argument("sample_wolff: bad schedule");
    WolffChain chain(domain, p, seed);
    for (long t = 0; t < burn_in; ++t) chain.step();
    for (long s = 0; s < steps; ++s) {
        for (int t = 0; t < thin; ++t) chain.step();
        on_sample(chain.spins());
    }
}

}  // namespace besovtight::ising
