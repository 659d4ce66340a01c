#include "imputekit/rng.hpp"

#include <cmath>
#include <numbers>

namespace imputekit {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo)
{
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key)
{
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return ctr;
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t derive_key(std::uint64_t parent, std::uint64_t index)
{
    // Two rounds so that (parent, index) and (index, parent) do not collide.
    return splitmix64(splitmix64(parent) ^ (index * 0xd6e8feb86659fd93ull + 0x2545f4914f6cdd1dull));
}

RandomStream::RandomStream(std::uint64_t key) : key_(key) {}

std::uint32_t RandomStream::next32()
{
    if (used_ == 4) {
        const std::array<std::uint32_t, 4> counter{
            static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32), 0u,
            static_cast<std::uint32_t>(kRngVersion)};
        const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(key_),
                                               static_cast<std::uint32_t>(key_ >> 32)};
        buffer_ = philox4x32(counter, key);
        ++block_;
        used_ = 0;
    }
    return buffer_[used_++];
}

RandomStream::result_type RandomStream::operator()()
{
    const std::uint64_t hi = next32();
    const std::uint64_t lo = next32();
    return (hi << 32) | lo;
}

double RandomStream::uniform()
{
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_open()
{
    return (static_cast<double>((*this)() >> 12) + 0.5) * 0x1.0p-52;
}

std::size_t RandomStream::index(std::size_t n)
{
    // Lemire's nearly-divisionless bounded draw.
    const std::uint64_t range = n;
    unsigned __int128 product = static_cast<unsigned __int128>((*this)()) * range;
    auto low = static_cast<std::uint64_t>(product);
    if (low < range) {
        const std::uint64_t threshold = (0 - range) % range;
        while (low < threshold) {
            product = static_cast<unsigned __int128>((*this)()) * range;
            low = static_cast<std::uint64_t>(product);
        }
    }
    return static_cast<std::size_t>(product >> 64);
}

double RandomStream::normal()
{
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RandomStream::gamma(double shape)
{
    if (shape < 1.0) {
        const double boosted = gamma(shape + 1.0);
        return boosted * std::pow(uniform_open(), 1.0 / shape);
    }
    // Marsaglia & Tsang (2000).
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) {
            return d * v;
        }
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
            return d * v;
        }
    }
}

namespace {

std::uint64_t fold_path(std::uint64_t root_seed, std::span<const std::uint64_t> path)
{
    std::uint64_t key = splitmix64(root_seed);
    for (auto index : path) {
        key = derive_key(key, index);
    }
    return key;
}

}  // namespace

RandomStream seed_tree(std::uint64_t root_seed, std::span<const std::uint64_t> path)
{
    return RandomStream(fold_path(root_seed, path));
}

RandomStream seed_tree(std::uint64_t root_seed, std::initializer_list<std::uint64_t> path)
{
    return seed_tree(root_seed, std::span<const std::uint64_t>(path.begin(), path.size()));
}

std::uint64_t subseed(std::uint64_t root_seed, std::initializer_list<std::uint64_t> path)
{
    return fold_path(root_seed, std::span<const std::uint64_t>(path.begin(), path.size()));
}

}  // namespace imputekit
