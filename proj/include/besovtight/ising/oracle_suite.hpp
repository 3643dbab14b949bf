#pragma once

// Exact-enumeration identity checks on graphs with at most 20 edges.

#include <cmath>
#include <string>
#include <vector>

#include "besovtight/ising/exact.hpp"
#include "besovtight/ising/lattice.hpp"

namespace besovtight::ising {

struct OracleCheck {
    std::string name;
    bool passed = false;
    double observed = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
};

namespace detail {

inline OracleCheck close_check(std::string name, double observed, double expected, double tol) {
    return {std::move(name), std::abs(observed - expected) <= tol, observed, expected, tol};
}

// Index of the edge joining sites u and v (either orientation), or -1.
inline int find_edge(const LatticeDomain& d, int u, int v) {
    for (int e = 0; e < d.edge_count(); ++e) {
        const auto& ed = d.edges()[static_cast<std::size_t>(e)];
        if ((ed.u == u && ed.v == v) || (ed.u == v && ed.v == u)) return e;
    }
    return -1;
}

inline std::vector<std::vector<int>> point_sets(int sites) {
    std::vector<std::vector<int>> sets;
    for (int a = 0; a < sites; ++a)
        for (int b = a + 1; b < sites; ++b) sets.push_back({a, b});
    for (int a = 0; a + 3 < sites; ++a) sets.push_back({a, a + 1, a + 2, a + 3});
    if (sites >= 4) sets.push_back({0, 1, sites - 2, sites - 1});
    sets.push_back({0});
    sets.push_back({0, 0});
    return sets;
}

// Largest |E[sigma_Y] - phi(A_Y)| over pairs and quadruples of sites.
inline double parity_identity_gap(const LatticeDomain& d, double p, bool wired) {
    const ExactFKTable fk(d, p);
    const ExactIsingTable ising(d, -std::log1p(-p));
    double gap = 0.0;
    for (const auto& pts : point_sets(d.site_count()))
        gap = std::max(gap, std::abs(ising.correlation(pts) - fk.parity_probability(pts, wired)));
    return gap;
}

}  // namespace detail

inline std::vector<OracleCheck> run_oracle_suite(double tol = 1e-12) {
    const double p = critical_parameters().p_c;
    std::vector<OracleCheck> out;

    const auto edge = LatticeDomain::graph(2, {{0, 1}}, Boundary::free);
    const ExactFKTable edge_fk(edge, p);
    const ExactIsingTable edge_ising(edge, critical_parameters().beta_c_paper);
    const int pair[2] = {0, 1};
    out.push_back(detail::close_check("single_edge_fk_open", edge_fk.edge_open(0), std::sqrt(2.0) - 1.0, tol));
    out.push_back(detail::close_check("single_edge_ising_correlation", edge_ising.correlation(pair), p / (2.0 - p), tol));
    out.push_back(detail::close_check("single_edge_A0_equals_open", edge_fk.parity_probability(pair, false),
                                      edge_fk.edge_open(0), tol));

    // Plus boundary on a box, free boundary on a box, and larger / irregular
    // stand-ins for the whole-plane statements.
    const auto plus_box = LatticeDomain::box(2, 2, Boundary::plus);
    const auto plus_wide = LatticeDomain::from_mask(3, 2, {1, 1, 1, 1, 1, 0}, Boundary::plus);
    const auto free_box = LatticeDomain::box(3, 3, Boundary::free);
    const auto free_strip = LatticeDomain::box(4, 2, Boundary::free);
    out.push_back(detail::close_check("identity_plus_box_A1", detail::parity_identity_gap(plus_box, p, true), 0.0, tol));
    out.push_back(
        detail::close_check("identity_plus_large_A1", detail::parity_identity_gap(plus_wide, p, true), 0.0, tol));
    out.push_back(detail::close_check("identity_free_box_A0", detail::parity_identity_gap(free_box, p, false), 0.0, tol));
    out.push_back(
        detail::close_check("identity_free_large_A0", detail::parity_identity_gap(free_strip, p, false), 0.0, tol));

    {
        const auto g1 = edwards_sokal_marginal_gaps(LatticeDomain::box(2, 2, Boundary::free), p);
        const auto g2 = edwards_sokal_marginal_gaps(LatticeDomain::graph(3, {{0, 1}, {1, 2}}, Boundary::plus, {0, 2}), p);
        out.push_back(detail::close_check("edwards_sokal_spin_marginal", std::max(g1.spin, g2.spin), 0.0, tol));
        out.push_back(detail::close_check("edwards_sokal_edge_marginal", std::max(g1.edge, g2.edge), 0.0, tol));
    }

    {
        // phi(e and e') - phi(e) phi(e') >= 0 on the one-edge and four-edge tables.
        double worst = 0.0;
        const auto square = LatticeDomain::box(2, 2, Boundary::free);
        for (const auto* d : {&edge, &square}) {
            const auto& dom = *d;
            const ExactFKTable t(dom, p);
            for (int e = 0; e < dom.edge_count(); ++e)
                for (int f = 0; f < dom.edge_count(); ++f) {
                    const double both = t.event_probability(
                        [&](std::uint32_t m, auto) { return (m >> e & 1u) && (m >> f & 1u); });
                    worst = std::min(worst, both - t.edge_open(e) * t.edge_open(f));
                }
        }
        out.push_back({"fkg_edge_pairs", worst >= -tol, worst, 0.0, tol});
    }

    {
        const auto path = LatticeDomain::graph(3, {{0, 1}, {1, 2}}, Boundary::free);
        const ExactFKTable t(path, p);
        const int inner[1] = {0};
        double gap = domain_markov_gap(t, inner);
        const auto sq = LatticeDomain::box(2, 2, Boundary::plus);
        const ExactFKTable ts(sq, p);
        const int inner_sq[2] = {detail::find_edge(sq, 0, 1), detail::find_edge(sq, 0, 2)};
        gap = std::max(gap, domain_markov_gap(ts, inner_sq));
        out.push_back(detail::close_check("domain_markov", gap, 0.0, tol));
    }

    {
        // phi^0(e open) <= phi^1(e open) for every internal edge of a 3 x 2 box.
        const auto f = LatticeDomain::box(3, 2, Boundary::free);
        const auto w = LatticeDomain::box(3, 2, Boundary::plus);
        const ExactFKTable tf(f, p), tw(w, p);
        double worst = 1.0;
        for (int e = 0; e < f.edge_count(); ++e) {
            const auto& ed = f.edges()[static_cast<std::size_t>(e)];
            worst = std::min(worst, tw.edge_open(detail::find_edge(w, ed.u, ed.v)) - tf.edge_open(e));
        }
        out.push_back({"boundary_monotonicity", worst >= -tol, worst, 0.0, tol});
    }

    {
        const auto two = LatticeDomain::graph(4, {{0, 1}, {2, 3}}, Boundary::free);
        const ExactFKTable t(two, p);
        const double joint = t.event_probability([](std::uint32_t m, auto) { return (m & 3u) == 3u; });
        out.push_back(detail::close_check("disjoint_component_factorization", joint, t.edge_open(0) * t.edge_open(1), tol));
    }
    return out;
}

inline bool all_passed(const std::vector<OracleCheck>& checks) {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

}  // namespace besovtight::ising
