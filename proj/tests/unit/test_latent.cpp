#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "worldlet/latent.hpp"

#include <array>
#include <set>
#include <vector>

using namespace worldlet;

using Block = std::array<std::uint32_t, 4>;

TEST_CASE("philox4x32-10 known answers") {
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("latent values depend only on seed and subset") {
    LatentField a(7), b(7), c(8);
    const int s1[] = {0, 3}, s2[] = {0, 3}, s3[] = {0, 4}, s4[] = {3};
    CHECK(a.uniform(s1) == b.uniform(s2));
    CHECK(a.uniform(s1) != c.uniform(s1));
    CHECK(a.uniform(s1) != a.uniform(s3));
    CHECK(a.uniform(s4) != a.uniform(s1));
    CHECK(a.uniform({}) == b.uniform({}));
    // Sizes above three go through the hashed encoding.
    const int big1[] = {0, 1, 2, 3}, big2[] = {0, 1, 2, 4};
    CHECK(a.uniform(big1) != a.uniform(big2));
    CHECK(a.uniform(big1) == b.uniform(big1));
}

TEST_CASE("latent values look uniform") {
    LatentField f(123);
    std::array<int, 10> bins{};
    const int n = 200;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const int s[] = {i, j};
            const double u = f.uniform(s);
            REQUIRE(u >= 0.0);
            REQUIRE(u < 1.0);
            ++bins[static_cast<std::size_t>(u * 10)];
        }
    }
    const double expected = n * (n - 1) / 2 / 10.0;
    double chi2 = 0;
    for (int b : bins) chi2 += (b - expected) * (b - expected) / expected;
    // 9 degrees of freedom; 27.9 is the 0.999 quantile.
    CHECK(chi2 < 27.9);
}

TEST_CASE("derived seeds are distinct") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t j = 0; j < 10000; ++j) seen.insert(derive_seed(42, j));
    CHECK(seen.size() == 10000);
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("engine is reproducible and bounded draws stay in range") {
    PhiloxEngine a(9), b(9), c(9, 1);
    std::vector<std::uint64_t> xa, xb, xc;
    for (int i = 0; i < 9; ++i) {
        xa.push_back(a());
        xb.push_back(b());
        xc.push_back(c());
    }
    CHECK(xa == xb);
    CHECK(xa != xc);
    std::array<int, 3> counts{};
    for (int i = 0; i < 3000; ++i) {
        auto v = a.below(3);
        REQUIRE(v < 3);
        ++counts[v];
    }
    for (int c3 : counts) CHECK(c3 > 850);
}
