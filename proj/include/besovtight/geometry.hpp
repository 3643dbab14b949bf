#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace besovtight {

inline constexpr int kDim = 2;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Axis-aligned rectangle [x0, x1] x [y0, y1]. Whether the boundary belongs to
/// the set is decided by the caller (K is closed, U is open).
struct Rect {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    double width() const noexcept { return x1 - x0; }
    double height() const noexcept { return y1 - y0; }
    bool empty() const noexcept { return !(x1 >= x0 && y1 >= y0); }
    bool contains(Point p) const noexcept { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
    bool contains(const Rect& r) const noexcept {
        return r.x0 >= x0 && r.x1 <= x1 && r.y0 >= y0 && r.y1 <= y1;
    }
    bool strictly_contains(const Rect& r) const noexcept {
        return r.x0 > x0 && r.x1 < x1 && r.y0 > y0 && r.y1 < y1;
    }
    Rect shrunk(double margin) const noexcept { return {x0 + margin, y0 + margin, x1 - margin, y1 - margin}; }
    Rect translated(Point v) const noexcept { return {x0 + v.x, y0 + v.y, x1 + v.x, y1 + v.y}; }
};

inline Rect square(double lo, double hi) { return {lo, lo, hi, hi}; }

inline bool operator==(const Rect& a, const Rect& b) {
    return a.x0 == b.x0 && a.y0 == b.y0 && a.x1 == b.x1 && a.y1 == b.y1;
}

/// Open domain U: either an open rectangle or the whole plane.
class Domain {
public:
    static Domain whole_plane() { return Domain{}; }
    static Domain box(const Rect& r) {
        if (r.width() <= 0 || r.height() <= 0) throw std::invalid_argument("domain rectangle must have positive area");
        return Domain{r};
    }

    bool is_whole_plane() const noexcept { return !box_; }
    const Rect& rect() const {
        if (!box_) throw std::logic_error("whole-plane domain has no rectangle");
        return *box_;
    }

    /// Closed set K inside the open set U.
    bool contains(const Rect& k) const noexcept { return !box_ || box_->strictly_contains(k); }

    /// dist(K, U^c) for K inside U; +inf for the whole plane.
    double distance_to_complement(const Rect& k) const noexcept {
        if (!box_) return std::numeric_limits<double>::infinity();
        const Rect& u = *box_;
        return std::min({k.x0 - u.x0, u.x1 - k.x1, k.y0 - u.y0, u.y1 - k.y1});
    }

    double distance_to_complement(Point p) const noexcept {
        return distance_to_complement(Rect{p.x, p.y, p.x, p.y});
    }

    std::string describe() const;

private:
    Domain() = default;
    explicit Domain(const Rect& r) : box_(r) {}
    std::optional<Rect> box_;
};

inline std::string Domain::describe() const {
    if (!box_) return "R2";
    return "(" + std::to_string(box_->x0) + "," + std::to_string(box_->x1) + ")x(" + std::to_string(box_->y0) + "," +
           std::to_string(box_->y1) + ")";
}

}  // namespace besovtight
