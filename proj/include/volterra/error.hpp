#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace volterra {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text; carries the byte offset of the offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Evaluation outside the closed lower half-plane, or a similar domain violation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A Theta-power was evaluated where its base vanishes.
class PoleError : public Error {
public:
    using Error::Error;
};

/// Invalid argument combination (wrong dimension, bad weight, mixed contexts...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A grid certification or weight selection could not be completed.
class CertificationError : public Error {
public:
    using Error::Error;
};

/// The principal symbol of an operator is not positive definite on the sampled grid.
class PositivityError : public CertificationError {
public:
    using CertificationError::CertificationError;
};

/// A numeric quadrature did not reach the requested accuracy or diverges.
class QuadratureError : public Error {
public:
    using Error::Error;
};

}  // namespace volterra
