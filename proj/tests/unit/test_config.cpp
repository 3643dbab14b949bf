#include <gtest/gtest.h>

#include "besovtight/config.hpp"

using namespace besovtight;

namespace {

ConfigError error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e;
    }
    ADD_FAILURE() << "no error for:\n" << text;
    return ConfigError(-1, -1, "none");
}

}  // namespace

TEST(Config, MinimalConfigFillsDefaults) {
    const auto c = parse_config("[experiment]\nkind = moment_scaling\n");
    EXPECT_EQ(c.L, 512);
    EXPECT_EQ(c.chains, 64);
    EXPECT_DOUBLE_EQ(c.spacing(), 4.0 / 512);
    EXPECT_EQ(c.lattice_offset(), -64);
    EXPECT_EQ(c.depth_for(1), 10);
    EXPECT_EQ(c.depth_for(2), 14);
    const auto echo = echo_config(c);
    for (const char* key : {"kind = moment_scaling", "seed = 1", "L = 512", "boundary = plus", "a = ", "offset = -64",
                            "p_bond = ", "chains = 64", "sweeps = 16", "burn_in = 200", "thin = 10", "N = 1, 2",
                            "K = 0 0 3 3", "k = 0", "n_max = 5", "positions = support", "alpha = ", "p = 2",
                            "q = inf", "margins = 2, 1, 2", "distances = 4, 6, 8, 12, 16, 24, 32", "radii = 8, 16, 32, 64",
                            "sizes = 16, 32, 64", "order = 2", "centre = 1.5 1.5", "radius = 1", "lambdas = "})
        EXPECT_NE(echo.find(key), std::string::npos) << key << "\n" << echo;
}

TEST(Config, EchoRoundTrips) {
    const auto c = parse_config(
        "# comment\n[experiment]\nkind = two_point\nseed = 42\n[lattice]\nL = 256\nboundary = free\n"
        "[observables]\ndistances = 2, 4, 8\n[basis]\nJ = 12\n");
    const auto echo = echo_config(c);
    const auto back = parse_config(echo);
    EXPECT_EQ(echo_config(back), echo);
    EXPECT_EQ(back.seed, 42u);
    EXPECT_EQ(back.boundary, ising::Boundary::free);
    EXPECT_EQ(back.distances, (std::vector<int>{2, 4, 8}));
    EXPECT_EQ(back.depth, 12);
}

TEST(Config, OddMomentRejectedWithPosition) {
    const auto e = error_of("[params]\np = 3\n");
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 5);
    EXPECT_NE(std::string(e.what()).find("even p required"), std::string::npos) << e.what();
    EXPECT_NO_THROW(parse_config("[experiment]\nkind = two_point\n[params]\np = 3\n"));
}

TEST(Config, RejectsBadInput) {
    EXPECT_NE(std::string(error_of("[experiment]\nseed = -4\n").what()).find("non-negative"), std::string::npos);
    EXPECT_EQ(error_of("[experiment]\nseed = 1\nfoo = 2\n").line(), 3);
    EXPECT_NE(std::string(error_of("[experiment]\nseed = 1\nseed = 2\n").what()).find("duplicate"), std::string::npos);
    EXPECT_EQ(error_of("[nowhere]\n").line(), 1);
    EXPECT_EQ(error_of("L = 3\n").line(), 1);
    EXPECT_EQ(error_of("[lattice]\nL = abc\n").column(), 5);
    EXPECT_EQ(error_of("[lattice]\nL = 0\n").line(), 2);
    EXPECT_EQ(error_of("[sampling]\nchains = 1\n").line(), 2);
    EXPECT_EQ(error_of("[lattice]\np_bond = 1.5\n").line(), 2);
    EXPECT_EQ(error_of("[params]\nq = 0.5\n").line(), 2);
    EXPECT_EQ(error_of("[region]\nK = 0 0 1\n").line(), 2);
    EXPECT_EQ(error_of("[lattice]\nL = \n").line(), 2);
    EXPECT_EQ(error_of("[lattice\n").line(), 1);
}

TEST(Config, CrossFieldChecks) {
    // K outside the sampled window
    EXPECT_EQ(error_of("[region]\nK = 0 0 9 9\n").line(), 2);
    // moment experiments need a plus boundary
    EXPECT_EQ(error_of("[lattice]\nboundary = free\n").line(), 2);
    EXPECT_EQ(error_of("[experiment]\nkind = corr_sum\n[observables]\norder = 3\n").line(), 4);
    EXPECT_EQ(error_of("[params]\nalphas = -0.25\n").line(), 0);  // length mismatch with default margins
    EXPECT_EQ(error_of("[experiment]\nkind = two_point\n[lattice]\nL = 16\n[observables]\ndistances = 4 32\n").line(), 6);
}
