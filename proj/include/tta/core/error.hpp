#pragma once

#include <stdexcept>
#include <string>

namespace tta {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A tensor or layer received an input of the wrong shape.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Gradients, losses or parameters stopped being finite.
class NumericError : public Error {
public:
    using Error::Error;
};

/// An artifact was produced from a different source checkpoint, or its
/// content hash does not verify.
class HashMismatch : public Error {
public:
    using Error::Error;
};

}  // namespace tta
