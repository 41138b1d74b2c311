#pragma once

#include <stdexcept>
#include <string>

namespace nesskit {

// Invalid input document or parameter set (CLI exit code 2).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A physics precondition of the theory fails for the given model
// (degenerate kernel, vanishing golden-rule constant, ...; CLI exit code 3).
class physics_error : public std::runtime_error {
public:
    explicit physics_error(const std::string& what) : std::runtime_error(what) {}
};

// A numerical procedure failed to reach its target accuracy (CLI exit code 4).
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace nesskit
