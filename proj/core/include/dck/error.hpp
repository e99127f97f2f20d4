#pragma once

#include <stdexcept>
#include <string>

namespace dck {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation or fails validation.
class InputError : public Error {
public:
    using Error::Error;
};

/// A factorization or inverse cannot be computed reliably for the given data.
class ConditioningError : public Error {
public:
    using Error::Error;
};

/// Two successive quadrature refinements disagree by more than the tolerance.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double coarse, double fine)
        : Error(what + " (coarse=" + std::to_string(coarse) + ", fine=" + std::to_string(fine) + ")"),
          coarse_(coarse),
          fine_(fine) {}

    [[nodiscard]] double coarse() const noexcept { return coarse_; }
    [[nodiscard]] double fine() const noexcept { return fine_; }

private:
    double coarse_;
    double fine_;
};

}  // namespace dck
