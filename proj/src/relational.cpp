#include "worldlet/relational.hpp"

#include "combinations.hpp"
#include "worldlet/errors.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace worldlet {

std::string to_string(Convention convention) {
    return convention == Convention::Directed ? "directed" : "undirected";
}

Convention parse_convention(std::string_view text) {
    if (text == "directed") return Convention::Directed;
    if (text == "undirected") return Convention::Undirected;
    throw ParseError("unknown convention '" + std::string(text) + "'");
}

namespace {

std::uint64_t factorial_capped(int n, std::uint64_t cap) {
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) {
        if (f > cap / static_cast<std::uint64_t>(i)) return cap + 1;
        f *= static_cast<std::uint64_t>(i);
    }
    return f;
}

void check_permutation_budget(int n, const Budget& budget) {
    std::uint64_t f = factorial_capped(n, budget.max_permutations);
    if (f > budget.max_permutations) {
        throw ResourceLimit("enumerating the " + std::to_string(n) + "! relabelings of a world", f, budget.max_permutations);
    }
}

// Builds the world on [m] whose tuple (h_1..h_a) holds iff (map[h_1]..map[h_a]) holds in `source`.
World pull_back(const World& source, std::span<const int> map) {
    const int m = static_cast<int>(map.size());
    World out(source.signature_ptr(), m);
    TupleLayout src = source.layout();
    TupleLayout dst = out.layout();
    BitVector bits(dst.bit_count());
    Tuple mapped;
    for (std::size_t bit = 0; bit < dst.bit_count(); ++bit) {
        Tuple t;
        std::size_t r = dst.decode(bit, t);
        mapped.resize(t.size());
        for (std::size_t j = 0; j < t.size(); ++j) mapped[j] = map[static_cast<std::size_t>(t[j])];
        if (source.bits().test(src.index(r, mapped))) bits.set(bit);
    }
    return World(source.signature_ptr(), m, std::move(bits));
}

std::string hex_of(const BitVector& bits) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    std::size_t nibbles = (bits.size() + 3) / 4;
    for (std::size_t k = nibbles; k-- > 0;) {
        int v = 0;
        for (int b = 3; b >= 0; --b) {
            std::size_t i = k * 4 + static_cast<std::size_t>(b);
            v = v * 2 + ((i < bits.size() && bits.test(i)) ? 1 : 0);
        }
        out.push_back(digits[v]);
    }
    auto first = out.find_first_not_of('0');
    return first == std::string::npos ? "0" : out.substr(first);
}

}  // namespace

World induce_subset(const World& world, std::span<const int> subset) {
    if (subset.empty()) throw InvalidArgument("induced subset must be nonempty");
    std::vector<int> sorted(subset.begin(), subset.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw InvalidArgument("induced subset contains repeated elements");
    }
    if (sorted.front() < 0 || sorted.back() >= world.size()) {
        throw InvalidArgument("induced subset contains elements outside the domain");
    }
    return pull_back(world, sorted);
}

World induce_tuple(const World& world, std::span<const int> tuple) {
    if (tuple.empty()) throw InvalidArgument("induced tuple must be nonempty");
    std::vector<int> sorted(tuple.begin(), tuple.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw InvalidArgument("induced tuple has repeated components");
    }
    if (sorted.front() < 0 || sorted.back() >= world.size()) {
        throw InvalidArgument("induced tuple contains elements outside the domain");
    }
    return pull_back(world, tuple);
}

std::vector<CellAssignment> decompose(const World& world) {
    const auto& sig = world.signature_ptr();
    TupleLayout layout = world.layout();
    std::vector<CellAssignment> out;
    Tuple mapped;
    for (int m = 1; m <= sig->arity(); ++m) {
        CellCatalog catalog(*sig, m);
        detail::for_each_combination(world.size(), m, [&](const Tuple& index) {
            BitVector bits(catalog.size());
            for (std::size_t j = 0; j < catalog.size(); ++j) {
                const auto& e = catalog.entries()[j];
                mapped.resize(e.tuple.size());
                for (std::size_t h = 0; h < e.tuple.size(); ++h) mapped[h] = index[static_cast<std::size_t>(e.tuple[h])];
                if (world.bits().test(layout.index(e.relation, mapped))) bits.set(j);
            }
            out.push_back({index, ArityCell(sig, m, std::move(bits))});
        });
    }
    return out;
}

World recompose(SignaturePtr signature, int n, std::span<const CellAssignment> cells) {
    World out(signature, n);
    TupleLayout layout = out.layout();
    BitVector bits(layout.bit_count());
    std::set<std::pair<int, std::vector<int>>> seen;
    std::vector<CellCatalog> catalogs;
    for (int m = 1; m <= signature->arity(); ++m) catalogs.emplace_back(*signature, m);

    Tuple mapped;
    for (const auto& c : cells) {
        const int m = c.cell.level();
        if (m < 1 || m > signature->arity() || static_cast<int>(c.index.size()) != m) {
            throw InvalidArgument("cell level does not match its index tuple");
        }
        if (!(c.cell.signature() == *signature)) throw InvalidArgument("cell belongs to a different signature");
        for (std::size_t h = 0; h < c.index.size(); ++h) {
            if (c.index[h] < 0 || c.index[h] >= n || (h > 0 && c.index[h] <= c.index[h - 1])) {
                throw InvalidArgument("cell index tuple must be strictly increasing and inside the domain");
            }
        }
        if (!seen.insert({m, std::vector<int>(c.index.begin(), c.index.end())}).second) {
            throw InvalidArgument("duplicate cell for one index tuple");
        }
        const auto& catalog = catalogs[static_cast<std::size_t>(m - 1)];
        c.cell.bits().for_each_set([&](std::size_t j) {
            const auto& e = catalog.entries()[j];
            mapped.resize(e.tuple.size());
            for (std::size_t h = 0; h < e.tuple.size(); ++h) mapped[h] = c.index[static_cast<std::size_t>(e.tuple[h])];
            bits.set(layout.index(e.relation, mapped));
        });
    }
    for (int m = 1; m <= signature->arity(); ++m) {
        std::size_t expected = 0;
        detail::for_each_combination(n, m, [&](const Tuple&) { ++expected; });
        std::size_t got = 0;
        for (const auto& s : seen) got += s.first == m ? 1 : 0;
        if (got != expected) {
            throw InvalidArgument("missing cells at level " + std::to_string(m) + ": got " + std::to_string(got) +
                                  " of " + std::to_string(expected));
        }
    }
    return World(std::move(signature), n, std::move(bits));
}

std::vector<ArityCell> enumerate_cells(SignaturePtr signature, int m) {
    CellCatalog catalog(*signature, m);
    if (catalog.size() > 22) {
        throw ResourceLimit("enumerating cells of level " + std::to_string(m),
                            catalog.size() >= 64 ? ~std::uint64_t{0} : std::uint64_t{1} << catalog.size(),
                            std::uint64_t{1} << 22);
    }
    std::vector<ArityCell> out;
    const std::uint64_t total = std::uint64_t{1} << catalog.size();
    out.reserve(total);
    for (std::uint64_t code = 0; code < total; ++code) {
        out.emplace_back(signature, m, BitVector::from_u64(catalog.size(), code));
    }
    return out;
}

World apply_permutation(const World& world, const Permutation& permutation) {
    if (permutation.size() != world.size()) throw InvalidArgument("permutation size does not match world size");
    TupleLayout layout = world.layout();
    BitVector bits(layout.bit_count());
    Tuple t;
    world.bits().for_each_set([&](std::size_t bit) {
        std::size_t r = layout.decode(bit, t);
        for (auto& x : t) x = permutation(x);
        bits.set(layout.index(r, t));
    });
    return World(world.signature_ptr(), world.size(), std::move(bits));
}

Permutation induced_permutation(const Permutation& permutation, std::span<const int> sorted_index) {
    if (sorted_index.empty()) throw InvalidArgument("index tuple must be nonempty");
    for (std::size_t h = 0; h < sorted_index.size(); ++h) {
        if (sorted_index[h] < 0 || sorted_index[h] >= permutation.size()) {
            throw InvalidArgument("index component outside the permutation domain");
        }
        if (h > 0 && sorted_index[h] <= sorted_index[h - 1]) throw InvalidArgument("index tuple must be sorted");
    }
    std::vector<int> images;
    for (int i : sorted_index) images.push_back(permutation(i));
    std::vector<int> sorted = images;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> out;
    for (int v : images) out.push_back(static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin()));
    return Permutation(std::move(out));
}

ArityCell permute_cell(const ArityCell& cell, const Permutation& permutation) {
    if (permutation.size() != cell.level()) throw InvalidArgument("permutation size does not match cell level");
    CellCatalog catalog = cell.catalog();
    BitVector bits(catalog.size());
    Tuple t;
    cell.bits().for_each_set([&](std::size_t j) {
        const auto& e = catalog.entries()[j];
        t = e.tuple;
        for (auto& x : t) x = permutation(x);
        bits.set(catalog.find(e.relation, t));
    });
    return ArityCell(cell.signature_ptr(), cell.level(), std::move(bits));
}

Permutation rank_permutation(std::span<const int> tuple) {
    std::vector<int> sorted(tuple.begin(), tuple.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> images(tuple.size());
    for (std::size_t h = 0; h < tuple.size(); ++h) {
        auto rank = std::lower_bound(sorted.begin(), sorted.end(), tuple[h]) - sorted.begin();
        images[static_cast<std::size_t>(rank)] = static_cast<int>(h);
    }
    return Permutation(std::move(images));
}

std::string world_label(const World& world) { return std::to_string(world.size()) + ":" + hex_of(world.bits()); }

std::string IsoClassId::label() const { return world_label(canonical); }

IsoClassId canonical_form(const World& world, const Budget& budget) {
    check_permutation_budget(world.size(), budget);
    TupleLayout layout = world.layout();
    std::vector<std::pair<std::size_t, Tuple>> present;
    world.bits().for_each_set([&](std::size_t bit) {
        Tuple t;
        std::size_t r = layout.decode(bit, t);
        present.emplace_back(r, std::move(t));
    });

    BitVector best = world.bits();
    std::uint64_t perms = 0, stabilizer = 0;
    Tuple mapped;
    for_each_permutation(world.size(), [&](const Permutation& p) {
        BitVector bits(layout.bit_count());
        for (const auto& [r, t] : present) {
            mapped.resize(t.size());
            for (std::size_t j = 0; j < t.size(); ++j) mapped[j] = p(t[j]);
            bits.set(layout.index(r, mapped));
        }
        ++perms;
        if (bits == world.bits()) ++stabilizer;
        if (bits < best) best = std::move(bits);
    });
    return {World(world.signature_ptr(), world.size(), std::move(best)), perms / stabilizer};
}

std::vector<World> isomorphism_class(const World& world, const Budget& budget) {
    check_permutation_budget(world.size(), budget);
    std::set<World> orbit;
    for_each_permutation(world.size(), [&](const Permutation& p) { orbit.insert(apply_permutation(world, p)); });
    return {orbit.begin(), orbit.end()};
}

bool satisfies_convention(const World& world, Convention convention) {
    if (convention == Convention::Directed) return true;
    for (std::size_t r = 0; r < world.signature().relation_count(); ++r) {
        if (world.signature().relation(r).arity != 2) continue;
        for (const auto& t : world.tuples(r)) {
            if (t[0] == t[1]) return false;
            const int rev[2] = {t[1], t[0]};
            if (!world.holds(r, rev)) return false;
        }
    }
    return true;
}

// --- WorldSpace ------------------------------------------------------------

WorldSpace::WorldSpace(SignaturePtr signature, int n, Convention convention)
    : signature_(std::move(signature)), n_(n), convention_(convention) {
    TupleLayout layout(*signature_, n_);
    world_bits_ = layout.bit_count();
    for (std::size_t r = 0; r < signature_->relation_count(); ++r) {
        const int arity = signature_->relation(r).arity;
        const std::size_t begin = layout.offset(r);
        std::size_t cells = 1;
        for (int j = 0; j < arity; ++j) cells *= static_cast<std::size_t>(n_);
        if (convention_ == Convention::Undirected && arity == 2) {
            for (int i = 0; i < n_; ++i) {
                for (int j = i + 1; j < n_; ++j) {
                    const int ij[2] = {i, j}, ji[2] = {j, i};
                    free_bits_.push_back({layout.index(r, ij), layout.index(r, ji)});
                }
            }
        } else {
            for (std::size_t b = begin; b < begin + cells; ++b) free_bits_.push_back({b});
        }
    }
    auto max_bit = [](const std::vector<std::size_t>& v) { return *std::max_element(v.begin(), v.end()); };
    std::sort(free_bits_.begin(), free_bits_.end(),
              [&](const auto& a, const auto& b) { return max_bit(a) < max_bit(b); });
    owner_.assign(world_bits_, -1);
    for (std::size_t f = 0; f < free_bits_.size(); ++f) {
        for (auto b : free_bits_[f]) owner_[b] = static_cast<int>(f);
    }
}

std::uint64_t WorldSpace::checked_count(const Budget& budget) const {
    const std::size_t bits = free_bits_.size();
    if (bits >= 63) throw ResourceLimit("enumerating 2^" + std::to_string(bits) + " worlds", ~std::uint64_t{0}, budget.max_worlds);
    const std::uint64_t count = std::uint64_t{1} << bits;
    if (count > budget.max_worlds) {
        throw ResourceLimit("enumerating 2^" + std::to_string(bits) + " worlds of size " + std::to_string(n_), count,
                            budget.max_worlds);
    }
    return count;
}

World WorldSpace::world(std::uint64_t code) const {
    if (free_bits_.size() > 64) throw InvalidArgument("world space too large for 64-bit codes");
    BitVector bits(world_bits_);
    for (std::size_t f = 0; f < free_bits_.size(); ++f) {
        if ((code >> f) & 1u) {
            for (auto b : free_bits_[f]) bits.set(b);
        }
    }
    return World(signature_, n_, std::move(bits));
}

std::uint64_t WorldSpace::code(const World& world) const {
    if (free_bits_.size() > 64) throw InvalidArgument("world space too large for 64-bit codes");
    if (world.size() != n_ || !(world.signature() == *signature_)) throw InvalidArgument("world does not belong to this space");
    std::uint64_t code = 0;
    for (std::size_t b = 0; b < world_bits_; ++b) {
        if (!world.bits().test(b)) continue;
        if (owner_[b] < 0) throw InvalidArgument("world violates the " + to_string(convention_) + " convention");
    }
    for (std::size_t f = 0; f < free_bits_.size(); ++f) {
        const auto& group = free_bits_[f];
        bool first = world.bits().test(group.front());
        for (auto b : group) {
            if (world.bits().test(b) != first) throw InvalidArgument("world violates the " + to_string(convention_) + " convention");
        }
        if (first) code |= std::uint64_t{1} << f;
    }
    return code;
}

std::vector<World> enumerate_worlds(SignaturePtr signature, int n, Convention convention, const Budget& budget) {
    WorldSpace space(std::move(signature), n, convention);
    const std::uint64_t count = space.checked_count(budget);
    std::vector<World> out;
    out.reserve(count);
    for (std::uint64_t c = 0; c < count; ++c) out.push_back(space.world(c));
    return out;
}

// --- CodePermuter ----------------------------------------------------------

CodePermuter::CodePermuter(const WorldSpace& space, const Budget& budget) : bits_(space.free_bit_count()) {
    if (bits_ > 64) throw InvalidArgument("world space too large for 64-bit codes");
    check_permutation_budget(space.domain_size(), budget);
    TupleLayout layout(*space.signature(), space.domain_size());
    Tuple t;
    for_each_permutation(space.domain_size(), [&](const Permutation& p) {
        for (std::size_t f = 0; f < bits_; ++f) {
            std::size_t r = layout.decode(space.free_bits()[f].front(), t);
            for (auto& x : t) x = p(x);
            maps_.push_back(static_cast<std::uint8_t>(space.owner(layout.index(r, t))));
        }
        ++perm_count_;
    });
}

std::uint64_t CodePermuter::apply(std::size_t permutation, std::uint64_t code) const {
    const std::uint8_t* map = maps_.data() + permutation * bits_;
    std::uint64_t out = 0;
    while (code) {
        int f = std::countr_zero(code);
        out |= std::uint64_t{1} << map[f];
        code &= code - 1;
    }
    return out;
}

std::pair<std::uint64_t, std::uint64_t> CodePermuter::canonical(std::uint64_t code) const {
    std::uint64_t best = code, stabilizer = 0;
    for (std::size_t p = 0; p < perm_count_; ++p) {
        std::uint64_t c = apply(p, code);
        if (c == code) ++stabilizer;
        best = std::min(best, c);
    }
    return {best, perm_count_ / stabilizer};
}

std::vector<IsoClass> enumerate_iso_classes(const WorldSpace& space, const Budget& budget) {
    const std::uint64_t count = space.checked_count(budget);
    CodePermuter permuter(space, budget);
    std::vector<std::uint64_t> visited((count + 63) / 64, 0);
    auto seen = [&](std::uint64_t c) { return (visited[c >> 6] >> (c & 63)) & 1u; };
    std::vector<IsoClass> out;
    for (std::uint64_t code = 0; code < count; ++code) {
        if (seen(code)) continue;
        // The first unvisited code is the minimum of its orbit.
        std::uint64_t size = 0;
        for (std::size_t p = 0; p < permuter.permutation_count(); ++p) {
            std::uint64_t c = permuter.apply(p, code);
            if (!seen(c)) {
                visited[c >> 6] |= std::uint64_t{1} << (c & 63);
                ++size;
            }
        }
        out.push_back({IsoClassId{space.world(code), size}, code});
    }
    return out;
}

}  // namespace worldlet
