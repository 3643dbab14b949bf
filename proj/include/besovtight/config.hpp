#pragma once

// Experiment configuration: INI-style "key = value" text with [sections].
// Unknown sections and keys are errors; every error carries line and column.

#include <algorithm>
#include <charconv>
#include <map>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "besovtight/geometry.hpp"
#include "besovtight/ising/lattice.hpp"

namespace besovtight {

enum class ExperimentKind { oracle, two_point, one_arm, corr_sum, moment_scaling, converse, kolmogorov };

inline std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::oracle: return "oracle";
        case ExperimentKind::two_point: return "two_point";
        case ExperimentKind::one_arm: return "one_arm";
        case ExperimentKind::corr_sum: return "corr_sum";
        case ExperimentKind::moment_scaling: return "moment_scaling";
        case ExperimentKind::converse: return "converse";
        case ExperimentKind::kolmogorov: return "kolmogorov";
    }
    return "?";
}

class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, int column, const std::string& msg)
        : std::runtime_error("config:" + std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
          line_(line),
          column_(column) {}
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_, column_;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::moment_scaling;
    std::uint64_t seed = 1;
    std::string output = "out";

    // [lattice]
    int L = 512;
    ising::Boundary boundary = ising::Boundary::plus;
    std::optional<double> a;       // default 4 / L
    std::optional<int> offset;     // default -L / 8
    std::optional<double> p_bond;  // default p_c

    // [sampling]
    int chains = 64;
    long sweeps = 16;
    long burn_in = 200;
    int thin = 10;

    // [basis]
    std::vector<int> bases{1, 2};
    std::optional<int> depth;  // default 10 for Haar, 14 otherwise

    // [region]
    Rect K{0, 0, 3, 3};
    int k = 0;
    int n_max = 5;
    std::string positions = "support";  // support | lattice

    // [params]
    double alpha = -0.25;
    double p = 2.0;
    double q = std::numeric_limits<double>::infinity();
    double margin = 2.0;
    std::vector<double> alphas{-0.25, -0.175, -0.05};
    std::vector<double> margins{2.0, 1.0, 2.0};

    // [observables]
    std::vector<int> distances{4, 6, 8, 12, 16, 24, 32};
    std::vector<int> radii{8, 16, 32, 64};
    std::vector<int> sizes{16, 32, 64};
    int order = 2;

    // [converse]
    Point centre{1.5, 1.5};
    double radius = 1.0;
    std::vector<double> lambdas{0.25, 0.125, 0.0625, 0.03125, 0.015625};

    double spacing() const { return a.value_or(4.0 / L); }
    int lattice_offset() const { return offset.value_or(-L / 8); }
    int depth_for(int n) const { return depth.value_or(n == 1 ? 10 : 14); }
    Rect U() const { return square((lattice_offset() - 0.5) * spacing(), (lattice_offset() + L - 0.5) * spacing()); }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline long long parse_integer(const std::string& s) {
    long long v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) throw std::invalid_argument("expected an integer, got '" + s + "'");
    return v;
}

inline double parse_real(const std::string& s) {
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || s.empty()) throw std::invalid_argument("expected a number, got '" + s + "'");
    return v;
}

inline int parse_int_in(const std::string& s, long long lo, long long hi) {
    const auto v = parse_integer(s);
    if (v < lo || v > hi)
        throw std::invalid_argument("value " + s + " out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(v);
}

inline std::string fmt_real(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

template <typename T, typename F>
std::string join(const std::vector<T>& xs, F f) {
    std::string s;
    for (std::size_t t = 0; t < xs.size(); ++t) s += (t ? ", " : "") + f(xs[t]);
    return s;
}

struct KeySpec {
    std::string section, key;
    std::function<void(ExperimentConfig&, const std::string&)> set;
};

inline const std::vector<KeySpec>& config_schema() {
    using C = ExperimentConfig;
    using S = std::string;
    static const std::vector<KeySpec> schema = {
        {"experiment", "kind",
         [](C& c, const S& v) {
             static const std::vector<std::pair<S, ExperimentKind>> kinds = {
                 {"oracle", ExperimentKind::oracle},       {"two_point", ExperimentKind::two_point},
                 {"one_arm", ExperimentKind::one_arm},     {"corr_sum", ExperimentKind::corr_sum},
                 {"moment_scaling", ExperimentKind::moment_scaling}, {"converse", ExperimentKind::converse},
                 {"kolmogorov", ExperimentKind::kolmogorov}};
             for (const auto& [name, k] : kinds)
                 if (v == name) {
                     c.kind = k;
                     return;
                 }
             throw std::invalid_argument("unknown experiment kind '" + v + "'");
         }},
        {"experiment", "seed",
         [](C& c, const S& v) {
             if (!v.empty() && v[0] == '-') throw std::invalid_argument("seed must be non-negative");
             std::uint64_t s = 0;
             auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
             if (ec != std::errc{} || ptr != v.data() + v.size())
                 throw std::invalid_argument("expected an unsigned 64-bit seed, got '" + v + "'");
             c.seed = s;
         }},
        {"experiment", "output", [](C& c, const S& v) { c.output = v; }},
        {"lattice", "L", [](C& c, const S& v) { c.L = parse_int_in(v, 1, 4096); }},
        {"lattice", "boundary", [](C& c, const S& v) { c.boundary = ising::parse_boundary(v); }},
        {"lattice", "a",
         [](C& c, const S& v) {
             const double a = parse_real(v);
             if (!(a > 0) || std::isinf(a)) throw std::invalid_argument("lattice spacing must be positive");
             c.a = a;
         }},
        {"lattice", "offset", [](C& c, const S& v) { c.offset = parse_int_in(v, -1000000, 1000000); }},
        {"lattice", "p_bond",
         [](C& c, const S& v) {
             const double p = parse_real(v);
             if (!(p > 0 && p < 1)) throw std::invalid_argument("bond probability must lie in (0, 1)");
             c.p_bond = p;
         }},
        {"sampling", "chains", [](C& c, const S& v) { c.chains = parse_int_in(v, 2, 100000); }},
        {"sampling", "sweeps", [](C& c, const S& v) { c.sweeps = parse_int_in(v, 1, 100000000); }},
        {"sampling", "burn_in", [](C& c, const S& v) { c.burn_in = parse_int_in(v, 0, 100000000); }},
        {"sampling", "thin", [](C& c, const S& v) { c.thin = parse_int_in(v, 1, 1000000); }},
        {"basis", "N",
         [](C& c, const S& v) {
             c.bases.clear();
             for (const auto& t : split_list(v)) c.bases.push_back(parse_int_in(t, 1, 4));
             if (c.bases.empty()) throw std::invalid_argument("at least one basis order required");
         }},
        {"basis", "J", [](C& c, const S& v) { c.depth = parse_int_in(v, 6, 24); }},
        {"region", "K",
         [](C& c, const S& v) {
             const auto t = split_list(v);
             if (t.size() != 4) throw std::invalid_argument("K needs four numbers: x0 y0 x1 y1");
             c.K = Rect{parse_real(t[0]), parse_real(t[1]), parse_real(t[2]), parse_real(t[3])};
             if (!(c.K.x1 > c.K.x0 && c.K.y1 > c.K.y0)) throw std::invalid_argument("K must have positive area");
         }},
        {"region", "k", [](C& c, const S& v) { c.k = parse_int_in(v, -10, 20); }},
        {"region", "n_max", [](C& c, const S& v) { c.n_max = parse_int_in(v, -10, 20); }},
        {"region", "positions",
         [](C& c, const S& v) {
             if (v != "support" && v != "lattice") throw std::invalid_argument("positions must be 'support' or 'lattice'");
             c.positions = v;
         }},
        {"params", "alpha", [](C& c, const S& v) { c.alpha = parse_real(v); }},
        {"params", "p",
         [](C& c, const S& v) {
             c.p = parse_real(v);
             if (!(c.p >= 1)) throw std::invalid_argument("p must be at least 1");
         }},
        {"params", "q",
         [](C& c, const S& v) {
             c.q = parse_real(v);
             if (!(c.q >= 1)) throw std::invalid_argument("q must be at least 1");
         }},
        {"params", "margin",
         [](C& c, const S& v) {
             c.margin = parse_real(v);
             if (!(c.margin >= 0)) throw std::invalid_argument("margin must be non-negative");
         }},
        {"params", "alphas",
         [](C& c, const S& v) {
             c.alphas.clear();
             for (const auto& t : split_list(v)) c.alphas.push_back(parse_real(t));
         }},
        {"params", "margins",
         [](C& c, const S& v) {
             c.margins.clear();
             for (const auto& t : split_list(v)) c.margins.push_back(parse_real(t));
         }},
        {"observables", "distances",
         [](C& c, const S& v) {
             c.distances.clear();
             for (const auto& t : split_list(v)) c.distances.push_back(parse_int_in(t, 1, 4096));
         }},
        {"observables", "radii",
         [](C& c, const S& v) {
             c.radii.clear();
             for (const auto& t : split_list(v)) c.radii.push_back(parse_int_in(t, 0, 2048));
         }},
        {"observables", "sizes",
         [](C& c, const S& v) {
             c.sizes.clear();
             for (const auto& t : split_list(v)) c.sizes.push_back(parse_int_in(t, 0, 4096));
         }},
        {"observables", "order", [](C& c, const S& v) { c.order = parse_int_in(v, 1, 64); }},
        {"converse", "centre",
         [](C& c, const S& v) {
             const auto t = split_list(v);
             if (t.size() != 2) throw std::invalid_argument("centre needs two numbers");
             c.centre = {parse_real(t[0]), parse_real(t[1])};
         }},
        {"converse", "radius",
         [](C& c, const S& v) {
             c.radius = parse_real(v);
             if (!(c.radius > 0)) throw std::invalid_argument("radius must be positive");
         }},
        {"converse", "lambdas",
         [](C& c, const S& v) {
             c.lambdas.clear();
             for (const auto& t : split_list(v)) {
                 const double l = parse_real(t);
                 if (!(l > 0 && l <= 1)) throw std::invalid_argument("lambda must lie in (0, 1]");
                 c.lambdas.push_back(l);
             }
         }},
    };
    return schema;
}

}  // namespace detail

/// Source positions of the keys that were set, "section.key" -> (line, column).
using KeyPositions = std::map<std::string, std::pair<int, int>>;

/// Cross-field checks, run before any sampling. Errors point at the offending
/// key when it was given explicitly, else at (0, 0).
inline void validate_config(const ExperimentConfig& c, const KeyPositions& where = {}) {
    auto fail = [&](const std::string& key, const std::string& m) {
        const auto it = where.find(key);
        if (it == where.end()) throw ConfigError(0, 0, m);
        throw ConfigError(it->second.first, it->second.second, m);
    };
    const bool moments = c.kind == ExperimentKind::moment_scaling;
    if (moments && (std::isinf(c.p) || std::fmod(c.p, 2.0) != 0.0)) fail("params.p", "even p required for moment_scaling");
    if (c.kind == ExperimentKind::corr_sum && c.order != 2 && c.order != 4)
        fail("observables.order", "corr_sum order must be 2 or 4 (even p required)");
    if (c.n_max < c.k) fail("region.n_max", "n_max must be at least k");
    if (c.alphas.size() != c.margins.size()) fail("params.margins", "params.alphas and params.margins must have equal length");
    if (moments || c.kind == ExperimentKind::converse || c.kind == ExperimentKind::kolmogorov) {
        const Rect U = c.U();
        if (!U.strictly_contains(c.K))
            fail("region.K", "region K must lie inside the sampled domain U = " + Domain::box(U).describe());
        if (c.boundary != ising::Boundary::plus) fail("lattice.boundary", "magnetization experiments use a plus boundary");
    }
    if (c.kind == ExperimentKind::converse) {
        if (c.lambdas.empty()) fail("converse.lambdas", "converse needs at least one lambda");
        const Rect ext = c.U();
        const double reach = c.radius + *std::max_element(c.lambdas.begin(), c.lambdas.end());
        if (c.centre.x - reach <= ext.x0 || c.centre.x + reach >= ext.x1 || c.centre.y - reach <= ext.y0 ||
            c.centre.y + reach >= ext.y1)
            fail("converse.centre", "converse disc B(centre, radius + max lambda) must lie inside U");
    }
    if (c.kind == ExperimentKind::two_point)
        for (int m : c.distances)
            if (c.L / 2 - 2 - m < 0 || c.L / 2 + 1 + m >= c.L)
                fail("observables.distances", "distance " + std::to_string(m) + " does not fit in L");
}

inline ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig c;
    std::string section;
    KeyPositions seen;
    std::set<std::string> sections;
    for (const auto& s : detail::config_schema()) sections.insert(s.section);
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;
        auto line = raw;
        if (const auto h = line.find_first_of("#;"); h != std::string_view::npos) line = line.substr(0, h);
        const auto body = detail::trim(line);
        if (body.empty()) continue;
        const int body_col = static_cast<int>(body.data() - raw.data()) + 1;
        if (body.front() == '[') {
            if (body.back() != ']') throw ConfigError(line_no, body_col, "unterminated section header");
            section = std::string(detail::trim(body.substr(1, body.size() - 2)));
            if (!sections.count(section)) throw ConfigError(line_no, body_col + 1, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_no, body_col, "expected 'key = value'");
        const std::string key(detail::trim(body.substr(0, eq)));
        const auto value_sv = detail::trim(body.substr(eq + 1));
        const int value_col =
            value_sv.empty() ? body_col + static_cast<int>(eq) + 1 : static_cast<int>(value_sv.data() - raw.data()) + 1;
        if (section.empty()) throw ConfigError(line_no, body_col, "key '" + key + "' outside any section");
        const detail::KeySpec* spec = nullptr;
        for (const auto& s : detail::config_schema())
            if (s.section == section && s.key == key) spec = &s;
        if (!spec) throw ConfigError(line_no, body_col, "unknown key '" + key + "' in [" + section + "]");
        if (!seen.emplace(section + "." + key, std::pair{line_no, value_col}).second)
            throw ConfigError(line_no, body_col, "duplicate key '" + key + "' in [" + section + "]");
        if (value_sv.empty()) throw ConfigError(line_no, value_col, "missing value for '" + key + "'");
        try {
            spec->set(c, std::string(value_sv));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(line_no, value_col, section + "." + key + ": " + e.what());
        }
    }
    validate_config(c, seen);
    return c;
}

/// Canonical text of every effective value; parse_config(echo(c)) reproduces c.
inline std::string echo_config(const ExperimentConfig& c) {
    using detail::fmt_real;
    using detail::join;
    auto ints = [](int v) { return std::to_string(v); };
    std::ostringstream os;
    os << "[experiment]\nkind = " << to_string(c.kind) << "\nseed = " << c.seed << "\noutput = " << c.output << "\n";
    os << "\n[lattice]\nL = " << c.L << "\nboundary = " << ising::to_string(c.boundary) << "\na = " << fmt_real(c.spacing())
       << "\noffset = " << c.lattice_offset()
       << "\np_bond = " << fmt_real(c.p_bond.value_or(ising::critical_parameters().p_c)) << "\n";
    os << "\n[sampling]\nchains = " << c.chains << "\nsweeps = " << c.sweeps << "\nburn_in = " << c.burn_in
       << "\nthin = " << c.thin << "\n";
    os << "\n[basis]\nN = " << join(c.bases, ints) << "\n";
    if (c.depth) os << "J = " << *c.depth << "\n";
    os << "\n[region]\nK = " << fmt_real(c.K.x0) << " " << fmt_real(c.K.y0) << " " << fmt_real(c.K.x1) << " "
       << fmt_real(c.K.y1) << "\nk = " << c.k << "\nn_max = " << c.n_max << "\npositions = " << c.positions << "\n";
    os << "\n[params]\nalpha = " << fmt_real(c.alpha) << "\np = " << fmt_real(c.p) << "\nq = " << fmt_real(c.q)
       << "\nmargin = " << fmt_real(c.margin) << "\nalphas = " << join(c.alphas, fmt_real)
       << "\nmargins = " << join(c.margins, fmt_real) << "\n";
    os << "\n[observables]\ndistances = " << join(c.distances, ints) << "\nradii = " << join(c.radii, ints)
       << "\nsizes = " << join(c.sizes, ints) << "\norder = " << c.order << "\n";
    os << "\n[converse]\ncentre = " << fmt_real(c.centre.x) << " " << fmt_real(c.centre.y)
       << "\nradius = " << fmt_real(c.radius) << "\nlambdas = " << join(c.lambdas, fmt_real) << "\n";
    return os.str();
}

}  // namespace besovtight
