#pragma once

// Graphs for the FK / Ising models: finite subsets of Z^2 with free or plus
// (wired) boundary, where the plus boundary is a single ghost vertex with spin
// +1 that receives every boundary-crossing edge.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace besovtight::ising {

enum class Boundary : std::uint8_t { free = 0, plus = 1 };

inline std::string to_string(Boundary b) { return b == Boundary::plus ? "plus" : "free"; }

inline Boundary parse_boundary(const std::string& s) {
    if (s == "plus" || s == "wired") return Boundary::plus;
    if (s == "free") return Boundary::free;
    throw std::invalid_argument("unknown boundary '" + s + "' (expected plus or free)");
}

struct CriticalParameters {
    double p_c = 0.0;
    double beta_c_paper = 0.0;  // e^{-beta} = 1 - p; equals 2 K_c in the sigma_x sigma_y convention
};

/// Self-dual point of the q = 2 random-cluster model.
inline CriticalParameters critical_parameters() {
    const double s = std::sqrt(2.0);
    const double p = s / (1.0 + s);
    return {p, -std::log1p(-p)};
}

/// Edge-open probability for aligned spins at inverse temperature beta (paper convention).
inline double p_from_beta(double beta) { return -std::expm1(-beta); }

struct SitePos {
    int x = 0;
    int y = 0;
};

/// Finite graph: vertices 0..V-1 are lattice sites; with a plus boundary the
/// ghost has index V. Edges may repeat an (u, ghost) pair (corner sites).
class LatticeDomain {
public:
    struct Edge {
        int u = 0;
        int v = 0;
    };

    /// Sites of the rectangle [x0, x0 + nx) x [y0, y0 + ny) of Z^2.
    static LatticeDomain box(int nx, int ny, Boundary bc, SitePos origin = {0, 0}) {
        return from_mask(nx, ny, std::vector<std::uint8_t>(static_cast<std::size_t>(nx) * ny, 1), bc, origin);
    }

    /// Sites of a rectangle selected by a row-major mask. E_Lambda holds every edge
    /// with an endpoint in Lambda; edges leaving Lambda go to the ghost (plus) or
    /// are dropped (free).
    static LatticeDomain from_mask(int nx, int ny, const std::vector<std::uint8_t>& mask, Boundary bc,
                                   SitePos origin = {0, 0}) {
        if (nx <= 0 || ny <= 0) throw std::invalid_argument("lattice domain needs positive size");
        if (mask.size() != static_cast<std::size_t>(nx) * ny) throw std::invalid_argument("mask size mismatch");
        LatticeDomain d;
        d.bc_ = bc;
        d.nx_ = nx;
        d.ny_ = ny;
        d.origin_ = origin;
        d.index_.assign(mask.size(), -1);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                if (mask[static_cast<std::size_t>(j) * nx + i]) {
                    d.index_[static_cast<std::size_t>(j) * nx + i] = static_cast<int>(d.pos_.size());
                    d.pos_.push_back({origin.x + i, origin.y + j});
                }
        if (d.pos_.empty()) throw std::invalid_argument("lattice domain has no sites");
        const int ghost = static_cast<int>(d.pos_.size());
        auto inside = [&](int i, int j) {
            return i >= 0 && j >= 0 && i < nx && j < ny && mask[static_cast<std::size_t>(j) * nx + i];
        };
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                if (!inside(i, j)) continue;
                const int u = d.index_[static_cast<std::size_t>(j) * nx + i];
                const int nb[4][2] = {{i + 1, j}, {i, j + 1}, {i - 1, j}, {i, j - 1}};
                for (int t = 0; t < 4; ++t) {
                    const int a = nb[t][0], b = nb[t][1];
                    if (inside(a, b)) {
                        if (t < 2) d.edges_.push_back({u, d.index_[static_cast<std::size_t>(b) * nx + a]});
                    } else if (bc == Boundary::plus) {
                        d.edges_.push_back({u, ghost});
                    }
                }
            }
        d.finish();
        return d;
    }

    /// Arbitrary small graph; `ghost_edges` lists vertices joined to the ghost
    /// (only meaningful with a plus boundary).
    static LatticeDomain graph(int vertices, std::vector<std::pair<int, int>> edges, Boundary bc,
                               std::vector<int> ghost_edges = {}) {
        if (vertices <= 0) throw std::invalid_argument("graph needs vertices");
        LatticeDomain d;
        d.bc_ = bc;
        d.nx_ = vertices;
        d.ny_ = 1;
        for (int v = 0; v < vertices; ++v) {
            d.pos_.push_back({v, 0});
            d.index_.push_back(v);
        }
        for (auto [u, v] : edges) {
            if (u < 0 || v < 0 || u >= vertices || v >= vertices || u == v)
                throw std::invalid_argument("graph edge out of range");
            d.edges_.push_back({u, v});
        }
        if (bc == Boundary::plus)
            for (int v : ghost_edges) {
                if (v < 0 || v >= vertices) throw std::invalid_argument("ghost edge out of range");
                d.edges_.push_back({v, vertices});
            }
        else if (!ghost_edges.empty())
            throw std::invalid_argument("ghost edges need a plus boundary");
        d.finish();
        return d;
    }

    Boundary boundary() const noexcept { return bc_; }
    bool has_ghost() const noexcept { return bc_ == Boundary::plus; }
    int site_count() const noexcept { return static_cast<int>(pos_.size()); }
    /// Vertices including the ghost.
    int vertex_count() const noexcept { return site_count() + (has_ghost() ? 1 : 0); }
    int ghost() const noexcept { return has_ghost() ? site_count() : -1; }
    int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    SitePos position(int v) const { return pos_.at(static_cast<std::size_t>(v)); }
    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    SitePos origin() const noexcept { return origin_; }
    bool is_full_box() const noexcept {
        return static_cast<std::size_t>(site_count()) == static_cast<std::size_t>(nx_) * ny_;
    }

    /// Vertex at lattice position, or -1 outside Lambda.
    int site_at(SitePos p) const noexcept {
        const int i = p.x - origin_.x, j = p.y - origin_.y;
        if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return -1;
        return index_[static_cast<std::size_t>(j) * nx_ + i];
    }
    int site_at(int x, int y) const noexcept { return site_at(SitePos{x, y}); }

    /// Neighbours of v in CSR form (includes the ghost; repeated for multi-edges).
    std::pair<const int*, const int*> neighbours(int v) const noexcept {
        return {adj_.data() + adj_start_[static_cast<std::size_t>(v)],
                adj_.data() + adj_start_[static_cast<std::size_t>(v) + 1]};
    }

private:
    void finish() {
        const int nv = vertex_count();
        adj_start_.assign(static_cast<std::size_t>(nv) + 1, 0);
        for (const auto& e : edges_) {
            ++adj_start_[static_cast<std::size_t>(e.u) + 1];
            ++adj_start_[static_cast<std::size_t>(e.v) + 1];
        }
        std::partial_sum(adj_start_.begin(), adj_start_.end(), adj_start_.begin());
        adj_.assign(static_cast<std::size_t>(adj_start_.back()), 0);
        std::vector<int> fill(adj_start_.begin(), adj_start_.end() - 1);
        for (const auto& e : edges_) {
            adj_[static_cast<std::size_t>(fill[static_cast<std::size_t>(e.u)]++)] = e.v;
            adj_[static_cast<std::size_t>(fill[static_cast<std::size_t>(e.v)]++)] = e.u;
        }
    }

    Boundary bc_ = Boundary::free;
    int nx_ = 0, ny_ = 0;
    SitePos origin_;
    std::vector<int> index_;
    std::vector<SitePos> pos_;
    std::vector<Edge> edges_;
    std::vector<int> adj_start_;
    std::vector<int> adj_;
};

/// Disjoint-set forest with path halving and union by size.
class UnionFind {
public:
    explicit UnionFind(int n = 0) { reset(n); }

    void reset(int n) {
        parent_.resize(static_cast<std::size_t>(n));
        std::iota(parent_.begin(), parent_.end(), 0);
        size_.assign(static_cast<std::size_t>(n), 1);
        components_ = n;
    }

    int find(int v) noexcept {
        auto* p = parent_.data();
        while (p[v] != v) {
            p[v] = p[p[v]];
            v = p[v];
        }
        return v;
    }

    bool unite(int a, int b) noexcept {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[static_cast<std::size_t>(a)] < size_[static_cast<std::size_t>(b)]) std::swap(a, b);
        parent_[static_cast<std::size_t>(b)] = a;
        size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
        --components_;
        return true;
    }

    int size() const noexcept { return static_cast<int>(parent_.size()); }
    int components() const noexcept { return components_; }
    int cluster_size(int v) noexcept { return size_[static_cast<std::size_t>(find(v))]; }

    /// Labels 0, 1, ... in order of each cluster's smallest vertex; independent of union order.
    std::vector<int> canonical_labels() {
        std::vector<int> label(parent_.size(), -1), root_label(parent_.size(), -1);
        int next = 0;
        for (int v = 0; v < size(); ++v) {
            const int r = find(v);
            if (root_label[static_cast<std::size_t>(r)] < 0) root_label[static_cast<std::size_t>(r)] = next++;
            label[static_cast<std::size_t>(v)] = root_label[static_cast<std::size_t>(r)];
        }
        return label;
    }

private:
    std::vector<int> parent_;
    std::vector<int> size_;
    int components_ = 0;
};

/// Edge states with their cluster partition over sites and ghost.
class FKConfiguration {
public:
    FKConfiguration() = default;

    FKConfiguration(const LatticeDomain& domain, std::vector<std::uint8_t> omega)
        : omega_(std::move(omega)), bc_(domain.boundary()), ghost_(domain.ghost()) {
        if (omega_.size() != static_cast<std::size_t>(domain.edge_count()))
            throw std::invalid_argument("edge state count does not match domain");
        uf_.reset(domain.vertex_count());
        for (std::size_t e = 0; e < omega_.size(); ++e)
            if (omega_[e]) {
                ++open_;
                uf_.unite(domain.edges()[e].u, domain.edges()[e].v);
            }
    }

    /// Adopts an already-built partition (sampler fast path).
    FKConfiguration(std::vector<std::uint8_t> omega, UnionFind uf, Boundary bc, int ghost)
        : omega_(std::move(omega)), uf_(std::move(uf)), bc_(bc), ghost_(ghost) {
        for (auto w : omega_) open_ += w;
    }

    const std::vector<std::uint8_t>& omega() const noexcept { return omega_; }
    bool open(int e) const { return omega_.at(static_cast<std::size_t>(e)) != 0; }
    int open_count() const noexcept { return open_; }
    Boundary boundary() const noexcept { return bc_; }

    int cluster_of(int v) const noexcept { return uf_.find(v); }
    bool connected(int u, int v) const noexcept { return uf_.find(u) == uf_.find(v); }
    bool touches_ghost(int v) const noexcept { return ghost_ >= 0 && connected(v, ghost_); }
    /// Number of open clusters, the ghost cluster counted once.
    int cluster_count() const noexcept { return uf_.components(); }
    std::vector<int> canonical_labels() const { return uf_.canonical_labels(); }

private:
    std::vector<std::uint8_t> omega_;
    mutable UnionFind uf_;
    Boundary bc_ = Boundary::free;
    int ghost_ = -1;
    int open_ = 0;
};

/// Spins on sites; with a plus boundary the ghost spin is +1 implicitly.
struct SpinConfiguration {
    std::vector<std::int8_t> sigma;
    Boundary boundary = Boundary::free;

    int at(int v) const { return sigma.at(static_cast<std::size_t>(v)); }
    long magnetization() const noexcept {
        long m = 0;
        for (auto s : sigma) m += s;
        return m;
    }
};

}  // namespace besovtight::ising
