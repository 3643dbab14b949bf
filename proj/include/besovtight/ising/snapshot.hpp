#pragma once

// Run-length-encoded spin / FK snapshots of square boxes.
//
// Header (16 bytes, little endian):
//   0  magic "BTS1"
//   4  L (u16)
//   6  boundary tag (u8: 0 free, 1 plus)
//   7  flags (u8: bit 0 = edge section present)
//   8  seed (u64)
// Body: run lengths as LEB128 varints. Spins alternate +1, -1, +1, ... starting
// with +1 (a leading run may be 0) and cover L * L sites; the edge section, if
// present, alternates closed, open, ... over the edges of box(L, L, boundary).

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "besovtight/ising/lattice.hpp"

namespace besovtight::ising {

inline constexpr std::array<char, 4> kSnapshotMagic{'B', 'T', 'S', '1'};

struct Snapshot {
    int L = 0;
    Boundary boundary = Boundary::plus;
    std::uint64_t seed = 0;
    SpinConfiguration spins;
    std::optional<std::vector<std::uint8_t>> omega;
};

namespace detail {

inline void put_varint(std::ostream& os, std::uint64_t v) {
    while (v >= 0x80) {
        os.put(static_cast<char>((v & 0x7f) | 0x80));
        v >>= 7;
    }
    os.put(static_cast<char>(v));
}

inline std::uint64_t get_varint(std::istream& is) {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
        const int c = is.get();
        if (c == std::char_traits<char>::eof()) throw std::runtime_error("snapshot: truncated varint");
        v |= static_cast<std::uint64_t>(c & 0x7f) << shift;
        if (!(c & 0x80)) return v;
    }
    throw std::runtime_error("snapshot: varint too long");
}

template <typename T, typename IsFirst>
void put_runs(std::ostream& os, const std::vector<T>& xs, IsFirst is_first) {
    bool state = true;
    std::uint64_t run = 0;
    for (const auto& x : xs) {
        if (is_first(x) == state) {
            ++run;
        } else {
            put_varint(os, run);
            state = !state;
            run = 1;
        }
    }
    put_varint(os, run);
}

inline std::vector<bool> get_runs(std::istream& is, std::size_t count) {
    std::vector<bool> out;
    out.reserve(count);
    bool state = true;
    while (out.size() < count) {
        const auto run = get_varint(is);
        if (run > count - out.size()) throw std::runtime_error("snapshot: run overflows the configuration");
        out.insert(out.end(), run, state);
        state = !state;
    }
    return out;
}

template <typename T>
void put_le(std::ostream& os, T v) {
    for (std::size_t b = 0; b < sizeof(T); ++b) os.put(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * b)) & 0xff));
}

template <typename T>
T get_le(std::istream& is) {
    std::uint64_t v = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) {
        const int c = is.get();
        if (c == std::char_traits<char>::eof()) throw std::runtime_error("snapshot: truncated header");
        v |= static_cast<std::uint64_t>(c & 0xff) << (8 * b);
    }
    return static_cast<T>(v);
}

}  // namespace detail

inline void write_snapshot(std::ostream& os, const Snapshot& s) {
    if (s.L <= 0 || s.L > 0xffff) throw std::invalid_argument("snapshot: L must fit in 16 bits");
    if (s.spins.sigma.size() != static_cast<std::size_t>(s.L) * s.L)
        throw std::invalid_argument("snapshot: spins do not cover an L x L box");
    os.write(kSnapshotMagic.data(), 4);
    detail::put_le<std::uint16_t>(os, static_cast<std::uint16_t>(s.L));
    detail::put_le<std::uint8_t>(os, static_cast<std::uint8_t>(s.boundary));
    detail::put_le<std::uint8_t>(os, s.omega ? 1 : 0);
    detail::put_le<std::uint64_t>(os, s.seed);
    detail::put_runs(os, s.spins.sigma, [](std::int8_t v) { return v > 0; });
    if (s.omega) {
        const auto expected = LatticeDomain::box(s.L, s.L, s.boundary).edge_count();
        if (s.omega->size() != static_cast<std::size_t>(expected))
            throw std::invalid_argument("snapshot: edge states do not match the box");
        detail::put_runs(os, *s.omega, [](std::uint8_t v) { return v == 0; });
    }
    if (!os) throw std::runtime_error("snapshot: write failed");
}

inline Snapshot read_snapshot(std::istream& is) {
    std::array<char, 4> magic{};
    is.read(magic.data(), 4);
    if (!is || magic != kSnapshotMagic) throw std::runtime_error("snapshot: bad magic");
    Snapshot s;
    s.L = detail::get_le<std::uint16_t>(is);
    const auto tag = detail::get_le<std::uint8_t>(is);
    if (tag > 1) throw std::runtime_error("snapshot: unknown boundary tag");
    s.boundary = static_cast<Boundary>(tag);
    const auto flags = detail::get_le<std::uint8_t>(is);
    s.seed = detail::get_le<std::uint64_t>(is);
    const auto bits = detail::get_runs(is, static_cast<std::size_t>(s.L) * s.L);
    s.spins.boundary = s.boundary;
    s.spins.sigma.resize(bits.size());
    for (std::size_t t = 0; t < bits.size(); ++t) s.spins.sigma[t] = bits[t] ? 1 : -1;
    if (flags & 1u) {
        const auto ne = static_cast<std::size_t>(LatticeDomain::box(s.L, s.L, s.boundary).edge_count());
        const auto eb = detail::get_runs(is, ne);
        s.omega.emplace(ne);
        for (std::size_t t = 0; t < ne; ++t) (*s.omega)[t] = eb[t] ? 0 : 1;
    }
    return s;
}

}  // namespace besovtight::ising
