#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>

namespace imputekit {

/// Identifies the generator/derivation scheme; bump if either changes so
/// stored seeds stay meaningful.
inline constexpr int kRngVersion = 1;

/*!
 * Philox4x32-10 keyed block function (Salmon et al., SC'11).
 *
 * Maps a 128-bit counter and 64-bit key to 128 pseudorandom bits. Pure
 * function of its inputs, so any block of any stream can be computed
 * independently.
 */
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer, used for key derivation.
std::uint64_t splitmix64(std::uint64_t x);

/// Key of the child substream `index` below `parent`.
std::uint64_t derive_key(std::uint64_t parent, std::uint64_t index);

/*!
 * Counter-based random stream.
 *
 * The stream is fully determined by its 64-bit key; the counter walks
 * forward through Philox blocks. Satisfies UniformRandomBitGenerator, but
 * the member distributions below are used throughout instead of <random>
 * distributions, whose output is implementation-defined.
 */
class RandomStream
{
  public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t key);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()();

    std::uint64_t key() const { return key_; }

    // Uniform on [0, 1) with 53 bits of resolution.
    double uniform();
    // Uniform on (0, 1).
    double uniform_open();
    // Uniform integer on [0, n); n must be positive.
    std::size_t index(std::size_t n);
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }
    // Gamma(shape, 1).
    double gamma(double shape);
    double chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }
    bool bernoulli(double p) { return uniform() < p; }

  private:
    std::uint32_t next32();

    std::uint64_t key_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
};

/*!
 * Derive the substream at a hierarchical index path below a root seed.
 *
 * Identical (root, path) pairs always give identical streams; any two
 * distinct paths give streams with unrelated keys.
 */
RandomStream seed_tree(std::uint64_t root_seed, std::span<const std::uint64_t> path);
RandomStream seed_tree(std::uint64_t root_seed, std::initializer_list<std::uint64_t> path);

/// Root seed of a sub-tree, for handing a whole subtree to a callee.
std::uint64_t subseed(std::uint64_t root_seed, std::initializer_list<std::uint64_t> path);

}  // namespace imputekit
