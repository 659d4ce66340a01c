#include <doctest.h>

#include <cmath>
#include <vector>

#include "imputekit/rng.hpp"

using namespace imputekit;

namespace {

struct Moments
{
    double mean = 0.0;
    double var = 0.0;
};

template <class Draw>
Moments moments(std::size_t n, Draw&& draw)
{
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = draw();
        sum += x;
        sq += x * x;
    }
    const double mean = sum / static_cast<double>(n);
    return {mean, sq / static_cast<double>(n) - mean * mean};
}

}  // namespace

TEST_CASE("philox4x32-10 matches the reference known-answer vectors")
{
    using Block = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("splitmix64 reference outputs")
{
    // First outputs of the SplitMix64 generator seeded with 0: the state
    // advances by the golden gamma before each finalization.
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafull);
    CHECK(splitmix64(0x9e3779b97f4a7c15ull) == 0x6e789e6aa1b965f4ull);
}

TEST_CASE("identical paths give identical streams")
{
    auto a = seed_tree(42, {3, 1, 4});
    auto b = seed_tree(42, {3, 1, 4});
    for (int i = 0; i < 100; ++i) {
        REQUIRE(a() == b());
    }
    CHECK(subseed(42, {3, 1}) == subseed(42, {3, 1}));
}

TEST_CASE("sibling and permuted paths give different streams")
{
    CHECK(seed_tree(42, {0})() != seed_tree(42, {1})());
    CHECK(seed_tree(42, {1, 2})() != seed_tree(42, {2, 1})());
    CHECK(seed_tree(42, {0})() != seed_tree(43, {0})());
    CHECK(seed_tree(42, {0}).key() != seed_tree(42, {0, 0}).key());
}

TEST_CASE("pooled output of 64 substreams has uniform mean and variance")
{
    const std::size_t per = 2000;
    double sum = 0.0, sq = 0.0;
    for (std::uint64_t s = 0; s < 64; ++s) {
        auto rng = seed_tree(7, {s});
        for (std::size_t i = 0; i < per; ++i) {
            const double u = rng.uniform();
            sum += u;
            sq += u * u;
        }
    }
    const double n = 64.0 * per;
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    // Standard errors: sqrt(1/12/n) ~ 0.0008 for the mean, ~0.0002 for the variance.
    CHECK(std::abs(mean - 0.5) < 0.004);
    CHECK(std::abs(var - 1.0 / 12.0) < 0.001);
}

TEST_CASE("sibling streams are uncorrelated")
{
    const std::size_t n = 20000;
    for (std::uint64_t s = 0; s < 8; ++s) {
        auto a = seed_tree(11, {s});
        auto b = seed_tree(11, {s + 1});
        double sab = 0.0, sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = a.uniform(), y = b.uniform();
            sab += x * y;
            sa += x;
            sb += y;
            saa += x * x;
            sbb += y * y;
        }
        const double cov = sab / n - (sa / n) * (sb / n);
        const double corr = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
        // 5 standard errors of a null correlation.
        CHECK(std::abs(corr) < 5.0 / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("uniform draws stay in range")
{
    auto rng = seed_tree(1, {0});
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        const double v = rng.uniform_open();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        REQUIRE(v > 0.0);
        REQUIRE(v < 1.0);
    }
}

TEST_CASE("bounded indices are uniform")
{
    auto rng = seed_tree(2, {0});
    const std::size_t n = 7, draws = 70000;
    std::vector<double> counts(n, 0.0);
    for (std::size_t i = 0; i < draws; ++i) {
        const auto k = rng.index(n);
        REQUIRE(k < n);
        counts[k] += 1.0;
    }
    const double expected = static_cast<double>(draws) / n;
    double chi2 = 0.0;
    for (double c : counts) {
        chi2 += (c - expected) * (c - expected) / expected;
    }
    // 6 degrees of freedom; 22.46 is the 0.999 quantile.
    CHECK(chi2 < 22.46);
    CHECK(rng.index(1) == 0);
}

TEST_CASE("normal, gamma and chi-square moments")
{
    auto rng = seed_tree(3, {0});
    const std::size_t n = 200000;
    const auto z = moments(n, [&] { return rng.normal(); });
    CHECK(std::abs(z.mean) < 0.01);
    CHECK(std::abs(z.var - 1.0) < 0.015);

    const auto shifted = moments(n, [&] { return rng.normal(2.0, 3.0); });
    CHECK(std::abs(shifted.mean - 2.0) < 0.03);
    CHECK(std::abs(shifted.var - 9.0) < 0.15);

    for (double shape : {0.4, 1.0, 3.5}) {
        const auto g = moments(n, [&] { return rng.gamma(shape); });
        // Gamma(k, 1) has mean k and variance k.
        CHECK(std::abs(g.mean - shape) < 6.0 * std::sqrt(shape / n));
        CHECK(std::abs(g.var - shape) < 0.05 * shape + 0.01);
    }

    const auto c = moments(n, [&] { return rng.chi_square(5.0); });
    CHECK(std::abs(c.mean - 5.0) < 0.05);
    CHECK(std::abs(c.var - 10.0) < 0.3);
}

TEST_CASE("bernoulli frequency")
{
    auto rng = seed_tree(4, {0});
    std::size_t hits = 0;
    const std::size_t n = 100000;
    for (std::size_t i = 0; i < n; ++i) {
        hits += rng.bernoulli(0.3) ? 1 : 0;
    }
    CHECK(std::abs(static_cast<double>(hits) / n - 0.3) < 0.006);
}
