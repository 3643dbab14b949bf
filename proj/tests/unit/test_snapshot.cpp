#include <gtest/gtest.h>

#include <sstream>

#include "besovtight/ising/samplers.hpp"
#include "besovtight/ising/snapshot.hpp"

using namespace besovtight::ising;

TEST(Snapshot, RoundTripWithEdges) {
    const auto d = LatticeDomain::box(24, 24, Boundary::plus);
    SwendsenWangChain c(d, critical_parameters().p_c, 17);
    for (int s = 0; s < 5; ++s) c.sweep();
    Snapshot snap{24, Boundary::plus, 17, c.spins(), c.omega()};
    std::stringstream ss;
    write_snapshot(ss, snap);
    const auto back = read_snapshot(ss);
    EXPECT_EQ(back.L, 24);
    EXPECT_EQ(back.seed, 17u);
    EXPECT_EQ(back.boundary, Boundary::plus);
    EXPECT_EQ(back.spins.sigma, snap.spins.sigma);
    ASSERT_TRUE(back.omega.has_value());
    EXPECT_EQ(*back.omega, c.omega());
}

TEST(Snapshot, HeaderLayoutAndCompression) {
    Snapshot snap;
    snap.L = 300;
    snap.boundary = Boundary::free;
    snap.seed = 0x0102030405060708ULL;
    snap.spins.sigma.assign(300 * 300, 1);
    std::stringstream ss;
    write_snapshot(ss, snap);
    const std::string bytes = ss.str();
    ASSERT_GE(bytes.size(), 16u);
    EXPECT_EQ(bytes.substr(0, 4), "BTS1");
    EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 300 & 0xff);
    EXPECT_EQ(static_cast<unsigned char>(bytes[5]), 300 >> 8);
    EXPECT_EQ(bytes[6], 0);
    EXPECT_EQ(bytes[7], 0);
    EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 0x08);
    EXPECT_LT(bytes.size(), 32u);  // one run of 90000 plus signs
    const auto back = read_snapshot(ss);
    EXPECT_FALSE(back.omega.has_value());
    EXPECT_EQ(back.spins.magnetization(), 90000);
}

TEST(Snapshot, RejectsBadInput) {
    Snapshot snap;
    snap.L = 4;
    snap.spins.sigma.assign(15, 1);
    std::stringstream ss;
    EXPECT_THROW(write_snapshot(ss, snap), std::invalid_argument);
    std::stringstream junk("BTS2xxxxxxxxxxxxxxxx");
    EXPECT_THROW(read_snapshot(junk), std::runtime_error);
    std::stringstream truncated(std::string("BTS1\x04\x00\x01\x00", 8));
    EXPECT_THROW(read_snapshot(truncated), std::runtime_error);
}
