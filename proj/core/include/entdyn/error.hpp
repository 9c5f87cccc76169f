#pragma once

#include <stdexcept>
#include <string>

namespace entdyn {

/// Invalid caller input: bad dimensions, mismatched sizes, unknown names.
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

/// A Weingarten denominator factor (d + content) vanishes for the requested dimension.
class SingularDimensionError : public std::domain_error {
public:
    explicit SingularDimensionError(const std::string& what) : std::domain_error(what) {}
};

/// A floating point result failed a consistency check (e.g. non-negligible imaginary part).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace entdyn
