#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace worldlet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violated by a caller (bad sizes, malformed tuples, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An enumeration or search would exceed a configured budget.
class ResourceLimit : public Error {
public:
    ResourceLimit(const std::string& what, std::uint64_t requested, std::uint64_t budget)
        : Error(what + ": requested " + std::to_string(requested) + ", budget " + std::to_string(budget)),
          requested_(requested), budget_(budget) {}

    std::uint64_t requested() const noexcept { return requested_; }
    std::uint64_t budget() const noexcept { return budget_; }

private:
    std::uint64_t requested_;
    std::uint64_t budget_;
};

/// Malformed JSON or rational literal.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace worldlet
