#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace worldlet {

struct Relation {
    std::string name;
    int arity = 1;

    friend bool operator==(const Relation&, const Relation&) = default;
};

/// Ordered list of named relations. Fixes the space of possible worlds.
class Signature {
public:
    /// Throws InvalidArgument on an empty list, duplicate names, or arity < 1.
    static std::shared_ptr<const Signature> create(std::vector<Relation> relations);

    const std::vector<Relation>& relations() const noexcept { return relations_; }
    std::size_t relation_count() const noexcept { return relations_.size(); }
    const Relation& relation(std::size_t index) const { return relations_.at(index); }

    /// Maximum relation arity.
    int arity() const noexcept { return arity_; }

    std::optional<std::size_t> find(std::string_view name) const;

    friend bool operator==(const Signature& a, const Signature& b) { return a.relations_ == b.relations_; }

private:
    explicit Signature(std::vector<Relation> relations);

    std::vector<Relation> relations_;
    int arity_ = 0;
};

using SignaturePtr = std::shared_ptr<const Signature>;

/// A single binary relation named "e"; the graph signature used throughout the examples.
SignaturePtr graph_signature();

}  // namespace worldlet
