#include "worldlet/latent.hpp"

namespace worldlet {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53, kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9, kWeyl1 = 0xBB67AE85;

// Counter word 0 carries a domain tag in bits 8..15 and the subset size below.
constexpr std::uint32_t kTagLatent = 0, kTagChild = 1, kTagStream = 2;

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::array<std::uint32_t, 2> key_of(std::uint64_t seed) {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

std::uint64_t join(const std::array<std::uint32_t, 4>& r) { return (std::uint64_t{r[1]} << 32) | r[0]; }

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
        c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    return c;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return join(philox4x32({kTagChild << 8, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0},
                           key_of(seed)));
}

double LatentField::uniform(std::span<const int> s) const {
    std::array<std::uint32_t, 4> ctr{(kTagLatent << 8) | static_cast<std::uint32_t>(s.size() & 0xFF), 0, 0, 0};
    if (s.size() <= 3) {
        for (std::size_t h = 0; h < s.size(); ++h) ctr[h + 1] = static_cast<std::uint32_t>(s[h]);
    } else {
        std::uint64_t h = s.size();
        for (int x : s) h = splitmix(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)));
        const std::uint64_t h2 = splitmix(h);
        ctr[1] = static_cast<std::uint32_t>(h);
        ctr[2] = static_cast<std::uint32_t>(h >> 32);
        ctr[3] = static_cast<std::uint32_t>(h2);
    }
    return to_unit(join(philox4x32(ctr, key_of(seed_))));
}

PhiloxEngine::result_type PhiloxEngine::operator()() {
    if (used_ == 2) {
        buffer_ = philox4x32({(kTagStream << 8) | static_cast<std::uint32_t>(block_ >> 32 << 16),
                              static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32),
                              static_cast<std::uint32_t>(block_)},
                             key_of(seed_));
        ++block_;
        used_ = 0;
    }
    const std::uint64_t out = (std::uint64_t{buffer_[2 * used_ + 1]} << 32) | buffer_[2 * used_];
    ++used_;
    return out;
}

std::uint64_t PhiloxEngine::below(std::uint64_t bound) {
    // Rejection keeps the result exactly uniform.
    if (bound <= 1) return 0;
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t x;
    do {
        x = (*this)();
    } while (x >= limit);
    return x % bound;
}

}  // namespace worldlet
