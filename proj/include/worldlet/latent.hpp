#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>

namespace worldlet {

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// 53-bit uniform in [0,1).
inline double to_unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

/// Independent child seed for stream j (sample index, restart, ...).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// The latent variables U_i of one sampled world: a pure function of the
/// seed and the (sorted, 0-based) index subset, so U_i does not depend on n.
class LatentField {
public:
    explicit LatentField(std::uint64_t seed) noexcept : seed_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }
    /// U_∅ for the empty subset.
    double uniform(std::span<const int> sorted_subset) const;

private:
    std::uint64_t seed_;
};

/// Counter-mode generator satisfying UniformRandomBitGenerator.
class PhiloxEngine {
public:
    using result_type = std::uint64_t;

    explicit PhiloxEngine(std::uint64_t seed, std::uint64_t stream = 0) noexcept : seed_(seed), stream_(stream) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

    double uniform() { return to_unit((*this)()); }
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

private:
    std::uint64_t seed_, stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 2;
};

}  // namespace worldlet
