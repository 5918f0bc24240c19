#pragma once

#include <stdexcept>
#include <string>

namespace specdiff {

/// Operand shapes are incompatible (dimension mismatch between grids).
class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation produced non-finite values; message names the failing step.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed on-disk data. `kind` distinguishes the failure classes so
/// callers and tests do not have to string-match.
class ParseError : public std::runtime_error {
public:
    enum class Kind { BadMagic, VersionMismatch, TruncatedPayload, Malformed };

    ParseError(Kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Config constraint violation; message names the offending key.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace specdiff
