#pragma once

// Critical Ising magnetization ensembles: M independent plus-boundary chains on
// an L x L box, each snapshot turned into Phi_a and handed to per-chain observers.

#include <cmath>
#include <cstddef>
#include <type_traits>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "besovtight/geometry.hpp"
#include "besovtight/ising/experiments.hpp"
#include "besovtight/ising/samplers.hpp"
#include "besovtight/lattice_field.hpp"
#include "besovtight/parallel.hpp"
#include "besovtight/tightness.hpp"

namespace besovtight {

/// Spin (i, j) of the box sits at a (offset + i, offset + j); its cell S_a is the
/// square of side a around that point, so U = ((offset - 1/2) a, (offset + L - 1/2) a)^2.
struct MagnetizationLattice {
    int L = 512;
    double a = 1.0 / 128;
    int offset = -64;
    ising::Boundary boundary = ising::Boundary::plus;

    Rect U() const { return square((offset - 0.5) * a, (offset + L - 0.5) * a); }
    CellGrid grid() const { return magnetization_grid(U(), a, L, L); }
};

/// Runs sched.chains chains; chain c feeds every measured snapshot to
/// observers[c].add(field), then on_done(c, chain) sees the final state.
template <typename Observer, typename OnChainDone = std::nullptr_t>
std::vector<Observer> run_magnetization_ensemble(const MagnetizationLattice& lat, const ising::ChainSchedule& sched,
                                                 double p, const Observer& proto, OnChainDone on_done = nullptr) {
    sched.validate();
    const auto domain = ising::LatticeDomain::box(lat.L, lat.L, lat.boundary);
    const Rect U = lat.U();
    (void)lat.grid();
    std::vector<Observer> observers(static_cast<std::size_t>(sched.chains), proto);
    parallel_for(observers.size(), sched.threads, [&](std::size_t c) {
        ising::SwendsenWangChain chain(domain, p, derive_seed(sched.seed, c));
        for (long t = 0; t < sched.burn_in; ++t) chain.sweep();
        for (long s = 0; s < sched.sweeps; ++s) {
            for (int t = 0; t < sched.thin; ++t) chain.sweep();
            observers[c].add(magnetization_field(chain.spins(), domain, lat.a, U));
        }
        if constexpr (!std::is_same_v<OnChainDone, std::nullptr_t>) on_done(c, chain);
    });
    return observers;
}

/// Moment accumulators for several bases plus an optional converse accumulator.
struct FieldObservers {
    std::vector<MomentAccumulator> moments;
    std::vector<ConverseAccumulator> converse;  // empty or one

    void add(const LatticeField& f) {
        for (auto& m : moments) m.add(f);
        for (auto& c : converse) c.add(f);
    }
};

inline std::vector<MomentAccumulator> collect_moments(const std::vector<FieldObservers>& obs, std::size_t which) {
    std::vector<MomentAccumulator> out;
    for (const auto& o : obs) out.push_back(o.moments.at(which));
    return out;
}

inline std::vector<ConverseAccumulator> collect_converse(const std::vector<FieldObservers>& obs) {
    std::vector<ConverseAccumulator> out;
    for (const auto& o : obs) out.push_back(o.converse.at(0));
    return out;
}

}  // namespace besovtight
