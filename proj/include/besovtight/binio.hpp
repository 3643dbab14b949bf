#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Little-endian binary helpers shared by the basis, pyramid and snapshot formats.
namespace besovtight::binio {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

template <typename T>
void put(std::ostream& os, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    os.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    static_assert(std::is_trivially_copyable_v<T>);
    char buf[sizeof(T)];
    if (!is.read(buf, sizeof(T))) throw std::runtime_error("binary stream truncated");
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

inline void put_doubles(std::ostream& os, std::span<const double> xs) {
    put<std::uint64_t>(os, xs.size());
    os.write(reinterpret_cast<const char*>(xs.data()), static_cast<std::streamsize>(xs.size() * sizeof(double)));
}

inline std::vector<double> get_doubles(std::istream& is, std::uint64_t max_count = (1ULL << 32)) {
    const auto n = get<std::uint64_t>(is);
    if (n > max_count) throw std::runtime_error("binary stream: implausible array length");
    std::vector<double> xs(n);
    if (!is.read(reinterpret_cast<char*>(xs.data()), static_cast<std::streamsize>(n * sizeof(double))))
        throw std::runtime_error("binary stream truncated");
    return xs;
}

inline void put_magic(std::ostream& os, const char (&magic)[5]) { os.write(magic, 4); }

inline void expect_magic(std::istream& is, const char (&magic)[5]) {
    char buf[4];
    if (!is.read(buf, 4) || std::memcmp(buf, magic, 4) != 0)
        throw std::runtime_error(std::string("bad magic, expected ") + magic);
}

}  // namespace besovtight::binio
