#include "worldlet/world.hpp"

#include "worldlet/errors.hpp"

#include <algorithm>
#include <set>

namespace worldlet {

// --- Signature -------------------------------------------------------------

Signature::Signature(std::vector<Relation> relations) : relations_(std::move(relations)) {
    for (const auto& r : relations_) arity_ = std::max(arity_, r.arity);
}

std::shared_ptr<const Signature> Signature::create(std::vector<Relation> relations) {
    if (relations.empty()) throw InvalidArgument("signature needs at least one relation");
    std::set<std::string> seen;
    for (const auto& r : relations) {
        if (r.name.empty()) throw InvalidArgument("relation name must be nonempty");
        if (r.arity < 1) throw InvalidArgument("relation '" + r.name + "' has arity < 1");
        if (!seen.insert(r.name).second) throw InvalidArgument("duplicate relation name '" + r.name + "'");
    }
    return std::shared_ptr<const Signature>(new Signature(std::move(relations)));
}

std::optional<std::size_t> Signature::find(std::string_view name) const {
    for (std::size_t i = 0; i < relations_.size(); ++i) {
        if (relations_[i].name == name) return i;
    }
    return std::nullopt;
}

SignaturePtr graph_signature() {
    static const SignaturePtr sig = Signature::create({{"e", 2}});
    return sig;
}

// --- TupleLayout -----------------------------------------------------------

TupleLayout::TupleLayout(const Signature& signature, int n) : n_(n) {
    if (n < 1) throw InvalidArgument("domain size must be positive");
    for (const auto& r : signature.relations()) {
        arities_.push_back(r.arity);
        offsets_.push_back(total_);
        std::size_t cells = 1;
        for (int j = 0; j < r.arity; ++j) cells *= static_cast<std::size_t>(n);
        total_ += cells;
    }
}

std::size_t TupleLayout::index(std::size_t relation, std::span<const int> tuple) const {
    if (relation >= arities_.size()) throw InvalidArgument("relation index out of range");
    if (tuple.size() != static_cast<std::size_t>(arities_[relation])) {
        throw InvalidArgument("tuple length does not match relation arity");
    }
    std::size_t idx = 0;
    for (int t : tuple) {
        if (t < 0 || t >= n_) throw InvalidArgument("tuple component outside the domain");
        idx = idx * static_cast<std::size_t>(n_) + static_cast<std::size_t>(t);
    }
    return offsets_[relation] + idx;
}

std::size_t TupleLayout::decode(std::size_t bit, Tuple& tuple) const {
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), bit);
    std::size_t relation = static_cast<std::size_t>(it - offsets_.begin()) - 1;
    std::size_t local = bit - offsets_[relation];
    int arity = arities_[relation];
    tuple.resize(static_cast<std::size_t>(arity));
    for (int j = arity - 1; j >= 0; --j) {
        tuple[static_cast<std::size_t>(j)] = static_cast<int>(local % static_cast<std::size_t>(n_));
        local /= static_cast<std::size_t>(n_);
    }
    return relation;
}

// --- World -----------------------------------------------------------------

World::World(SignaturePtr signature, int n) : signature_(std::move(signature)), n_(n) {
    if (!signature_) throw InvalidArgument("world needs a signature");
    bits_ = BitVector(TupleLayout(*signature_, n_).bit_count());
}

World::World(SignaturePtr signature, int n, BitVector bits)
    : signature_(std::move(signature)), n_(n), bits_(std::move(bits)) {
    if (!signature_) throw InvalidArgument("world needs a signature");
    if (bits_.size() != TupleLayout(*signature_, n_).bit_count()) {
        throw InvalidArgument("adjacency bit count does not match signature and size");
    }
}

World World::from_tuples(SignaturePtr signature, int n, const std::vector<std::vector<Tuple>>& tuples) {
    World w(std::move(signature), n);
    if (tuples.size() != w.signature().relation_count()) {
        throw InvalidArgument("expected one tuple list per relation");
    }
    TupleLayout layout = w.layout();
    for (std::size_t r = 0; r < tuples.size(); ++r) {
        for (const auto& t : tuples[r]) w.bits_.set(layout.index(r, t));
    }
    return w;
}

bool World::holds(std::size_t relation, std::span<const int> tuple) const {
    return bits_.test(layout().index(relation, tuple));
}

void World::set(std::size_t relation, std::span<const int> tuple, bool value) {
    bits_.assign(layout().index(relation, tuple), value);
}

std::vector<Tuple> World::tuples(std::size_t relation) const {
    TupleLayout lay = layout();
    std::vector<Tuple> out;
    Tuple t;
    bits_.for_each_set([&](std::size_t bit) {
        if (lay.decode(bit, t) == relation) out.push_back(t);
    });
    return out;
}

bool operator==(const World& a, const World& b) {
    if (a.n_ != b.n_ || !(a.bits_ == b.bits_)) return false;
    if (a.signature_ == b.signature_) return true;
    return a.signature_ && b.signature_ && *a.signature_ == *b.signature_;
}

// --- Permutation -----------------------------------------------------------

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
    std::vector<char> seen(images_.size(), 0);
    for (int v : images_) {
        if (v < 0 || static_cast<std::size_t>(v) >= images_.size() || seen[static_cast<std::size_t>(v)]) {
            throw InvalidArgument("permutation images are not a bijection");
        }
        seen[static_cast<std::size_t>(v)] = 1;
    }
}

Permutation Permutation::identity(int n) {
    std::vector<int> images(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) images[static_cast<std::size_t>(i)] = i;
    return Permutation(std::move(images));
}

Permutation Permutation::inverse() const {
    std::vector<int> inv(images_.size());
    for (std::size_t i = 0; i < images_.size(); ++i) inv[static_cast<std::size_t>(images_[i])] = static_cast<int>(i);
    Permutation p;
    p.images_ = std::move(inv);
    return p;
}

Permutation compose(const Permutation& outer, const Permutation& inner) {
    if (outer.size() != inner.size()) throw InvalidArgument("cannot compose permutations of different sizes");
    Permutation p;
    p.images_.resize(inner.images_.size());
    for (std::size_t i = 0; i < inner.images_.size(); ++i) {
        p.images_[i] = outer.images_[static_cast<std::size_t>(inner.images_[i])];
    }
    return p;
}

// --- Cells -----------------------------------------------------------------

namespace {

int distinct_count(const Tuple& t) {
    Tuple sorted = t;
    std::sort(sorted.begin(), sorted.end());
    return static_cast<int>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

}  // namespace

CellCatalog::CellCatalog(const Signature& signature, int m) : m_(m) {
    if (m < 1 || m > signature.arity()) {
        throw InvalidArgument("cell level " + std::to_string(m) + " outside [1, " + std::to_string(signature.arity()) + "]");
    }
    for (std::size_t r = 0; r < signature.relation_count(); ++r) {
        int arity = signature.relation(r).arity;
        if (arity < m) continue;
        std::size_t total = 1;
        for (int j = 0; j < arity; ++j) total *= static_cast<std::size_t>(m);
        Tuple t(static_cast<std::size_t>(arity));
        for (std::size_t code = 0; code < total; ++code) {
            std::size_t rest = code;
            for (int j = arity - 1; j >= 0; --j) {
                t[static_cast<std::size_t>(j)] = static_cast<int>(rest % static_cast<std::size_t>(m));
                rest /= static_cast<std::size_t>(m);
            }
            if (distinct_count(t) == m) entries_.push_back({r, t});
        }
    }
}

std::size_t CellCatalog::find(std::size_t relation, std::span<const int> tuple) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.relation == relation && std::equal(e.tuple.begin(), e.tuple.end(), tuple.begin(), tuple.end())) return i;
    }
    return entries_.size();
}

ArityCell::ArityCell(SignaturePtr signature, int m) : signature_(std::move(signature)), m_(m) {
    bits_ = BitVector(CellCatalog(*signature_, m_).size());
}

ArityCell::ArityCell(SignaturePtr signature, int m, BitVector bits)
    : signature_(std::move(signature)), m_(m), bits_(std::move(bits)) {
    if (bits_.size() != CellCatalog(*signature_, m_).size()) {
        throw InvalidArgument("cell bit count does not match catalog size");
    }
}

bool ArityCell::holds(std::size_t relation, std::span<const int> tuple) const {
    CellCatalog cat = catalog();
    std::size_t i = cat.find(relation, tuple);
    if (i == cat.size()) throw InvalidArgument("tuple is not part of this cell's index space");
    return bits_.test(i);
}

void ArityCell::set(std::size_t relation, std::span<const int> tuple, bool value) {
    CellCatalog cat = catalog();
    std::size_t i = cat.find(relation, tuple);
    if (i == cat.size()) throw InvalidArgument("tuple is not part of this cell's index space");
    bits_.assign(i, value);
}

}  // namespace worldlet
