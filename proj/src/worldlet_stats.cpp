#include "worldlet/worldlet_stats.hpp"

#include "parallel.hpp"
#include "worldlet/errors.hpp"

#include <set>
#include <unordered_map>

namespace worldlet {

// --- WorldletDistribution --------------------------------------------------

WorldletDistribution WorldletDistribution::create(SignaturePtr signature, int k, Convention convention, Entries entries) {
    if (!signature) throw InvalidArgument("distribution needs a signature");
    if (k < 1) throw InvalidArgument("distribution size must be positive");
    WorldletDistribution d;
    d.signature_ = std::move(signature);
    d.k_ = k;
    d.convention_ = convention;
    Rational total = 0;
    for (auto& [world, p] : entries) {
        if (world.size() != k) throw InvalidArgument("distribution entry has the wrong world size");
        if (!(world.signature() == *d.signature_)) throw InvalidArgument("distribution entry has a different signature");
        if (p < 0) throw InvalidArgument("negative probability");
        total += p;
        if (p != 0) d.entries_.emplace(world, p);
    }
    if (total != 1) throw InvalidArgument("probabilities sum to " + format_rational(total) + ", not 1");
    return d;
}

WorldletDistribution WorldletDistribution::point_mass(const World& world, Convention convention) {
    Entries e;
    e.emplace(world, Rational(1));
    return create(world.signature_ptr(), world.size(), convention, std::move(e));
}

Rational WorldletDistribution::prob(const World& world) const {
    auto it = entries_.find(world);
    return it == entries_.end() ? Rational(0) : it->second;
}

// --- SubsetCensus ----------------------------------------------------------

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
        if (r > ~std::uint64_t{0}) throw ResourceLimit("C(" + std::to_string(n) + "," + std::to_string(k) + ")", ~std::uint64_t{0}, ~std::uint64_t{0});
    }
    return static_cast<std::uint64_t>(r);
}

SubsetCensus::SubsetCensus(SignaturePtr signature, int n, int k) : signature_(std::move(signature)), n_(n), k_(k) {
    if (k < 1 || k > n) {
        throw InvalidArgument("worldlet size " + std::to_string(k) + " must be in [1, " + std::to_string(n) + "]");
    }
    TupleLayout small(*signature_, k), big(*signature_, n);
    worldlet_bits_ = small.bit_count();
    if (worldlet_bits_ > 64) throw ResourceLimit("adjacency bits of a " + std::to_string(k) + "-world", worldlet_bits_, 64);
    subsets_ = binomial(n, k);
    Tuple t;
    for (std::size_t b = 0; b < worldlet_bits_; ++b) {
        std::size_t r = small.decode(b, t);
        offsets_.push_back(big.offset(r));
        tuples_.push_back(t);
    }
}

std::uint64_t SubsetCensus::code(const World& world, const int* subset) const {
    const BitVector& bits = world.bits();
    std::uint64_t out = 0;
    for (std::size_t b = 0; b < worldlet_bits_; ++b) {
        std::size_t idx = 0;
        for (int x : tuples_[b]) idx = idx * static_cast<std::size_t>(n_) + static_cast<std::size_t>(subset[x]);
        if (bits.test(offsets_[b] + idx)) out |= std::uint64_t{1} << b;
    }
    return out;
}

World SubsetCensus::worldlet(std::uint64_t code) const {
    return World(signature_, k_, BitVector::from_u64(worldlet_bits_, code));
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> SubsetCensus::count(const World& world, unsigned threads) const {
    if (world.size() != n_ || !(world.signature() == *signature_)) throw InvalidArgument("world does not match the census");
    const std::size_t firsts = static_cast<std::size_t>(n_ - k_ + 1);
    const unsigned workers = detail::effective_threads(threads, firsts);
    std::vector<std::unordered_map<std::uint64_t, std::uint64_t>> partial(workers);

    detail::parallel_for(firsts, workers, [&](std::size_t first, unsigned worker) {
        auto& tally = partial[worker];
        std::vector<int> s(static_cast<std::size_t>(k_));
        s[0] = static_cast<int>(first);
        for (int j = 1; j < k_; ++j) s[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j - 1)] + 1;
        if (k_ > 1 && s.back() >= n_) return;
        while (true) {
            ++tally[code(world, s.data())];
            // Advance positions 1..k-1 with position 0 fixed.
            int i = k_ - 1;
            while (i >= 1 && s[static_cast<std::size_t>(i)] == n_ - k_ + i) --i;
            if (i < 1) break;
            ++s[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < k_; ++j) s[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j - 1)] + 1;
        }
    });

    std::map<std::uint64_t, std::uint64_t> merged;
    for (const auto& t : partial) {
        for (const auto& [c, n] : t) merged[c] += n;
    }
    return {merged.begin(), merged.end()};
}

// --- frequencies -----------------------------------------------------------

namespace {

std::uint64_t factorial(int k) {
    std::uint64_t f = 1;
    for (int i = 2; i <= k; ++i) f *= static_cast<std::uint64_t>(i);
    return f;
}

}  // namespace

FrequencyVector frequency_unordered(const World& world, int k, Convention convention, unsigned threads) {
    if (k > world.size()) throw InvalidArgument("worldlet size exceeds world size");
    if (!satisfies_convention(world, convention)) throw InvalidArgument("world violates the " + to_string(convention) + " convention");
    SubsetCensus census(world.signature_ptr(), world.size(), k);
    const std::uint64_t total = census.subset_count();
    WorldletDistribution::Entries entries;
    for (const auto& [code, count] : census.count(world, threads)) {
        Rational p(mpz_class(static_cast<unsigned long>(count)), mpz_class(static_cast<unsigned long>(total)));
        p.canonicalize();
        entries.emplace(census.worldlet(code), p);
    }
    return {WorldletDistribution::create(world.signature_ptr(), k, convention, std::move(entries)), world.size(),
            Sampling::Unordered};
}

FrequencyVector frequency_ordered(const World& world, int k, Convention convention, unsigned threads) {
    if (k > world.size()) throw InvalidArgument("worldlet size exceeds world size");
    if (!satisfies_convention(world, convention)) throw InvalidArgument("world violates the " + to_string(convention) + " convention");
    SubsetCensus census(world.signature_ptr(), world.size(), k);
    // Each k-subset is drawn in k! orders; order σ turns the increasing
    // relabeling x into σx.
    std::map<World, std::uint64_t> tally;
    for (const auto& [code, count] : census.count(world, threads)) {
        World x = census.worldlet(code);
        for_each_permutation(k, [&](const Permutation& sigma) { tally[apply_permutation(x, sigma)] += count; });
    }
    const mpz_class total = mpz_class(static_cast<unsigned long>(census.subset_count())) *
                            mpz_class(static_cast<unsigned long>(factorial(k)));
    WorldletDistribution::Entries entries;
    for (auto& [w, count] : tally) {
        Rational p(mpz_class(static_cast<unsigned long>(count)), total);
        p.canonicalize();
        entries.emplace(w, p);
    }
    return {WorldletDistribution::create(world.signature_ptr(), k, convention, std::move(entries)), world.size(),
            Sampling::Ordered};
}

WorldletDistribution iso_average(const WorldletDistribution& distribution, const Budget& budget) {
    std::map<World, Rational> class_mass;
    for (const auto& [w, p] : distribution.entries()) class_mass[canonical_form(w, budget).canonical] += p;
    WorldletDistribution::Entries entries;
    for (const auto& [canon, mass] : class_mass) {
        auto members = isomorphism_class(canon, budget);
        Rational share = mass / static_cast<long>(members.size());
        for (auto& m : members) entries.emplace(std::move(m), share);
    }
    return WorldletDistribution::create(distribution.signature_ptr(), distribution.size(), distribution.convention(),
                                        std::move(entries));
}

FrequencyVector iso_average(const FrequencyVector& frequencies, const Budget& budget) {
    return {iso_average(frequencies.distribution, budget), frequencies.source_size, Sampling::Ordered};
}

WorldletDistribution fenstad(const WorldletDistribution& q, int k, unsigned threads) {
    if (k < 1 || k > q.size()) {
        throw InvalidArgument("Fenstad target size " + std::to_string(k) + " must be in [1, " + std::to_string(q.size()) + "]");
    }
    WorldletDistribution::Entries acc;
    for (const auto& [w, p] : q.entries()) {
        auto f = frequency_ordered(w, k, q.convention(), threads);
        for (const auto& [x, px] : f.distribution.entries()) acc[x] += p * px;
    }
    return WorldletDistribution::create(q.signature_ptr(), k, q.convention(), std::move(acc));
}

WorldletDistribution marginalize(const WorldletDistribution& q, int m) {
    if (m < 1 || m > q.size()) {
        throw InvalidArgument("marginal size " + std::to_string(m) + " must be in [1, " + std::to_string(q.size()) + "]");
    }
    std::vector<int> prefix(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) prefix[static_cast<std::size_t>(i)] = i;
    WorldletDistribution::Entries acc;
    for (const auto& [w, p] : q.entries()) acc[induce_subset(w, prefix)] += p;
    return WorldletDistribution::create(q.signature_ptr(), m, q.convention(), std::move(acc));
}

ExchangeabilityResult is_exchangeable(const WorldletDistribution& q, const Budget& budget) {
    std::set<World> checked;
    for (const auto& [w, p] : q.entries()) {
        if (checked.count(w)) continue;
        for (const auto& other : isomorphism_class(w, budget)) {
            if (q.prob(other) != p) return {false, std::make_pair(w, other)};
            checked.insert(other);
        }
    }
    return {};
}

std::vector<World> convention_violations(const WorldletDistribution& q, Convention convention) {
    std::vector<World> out;
    for (const auto& [w, p] : q.entries()) {
        if (!satisfies_convention(w, convention)) out.push_back(w);
    }
    return out;
}

}  // namespace worldlet
