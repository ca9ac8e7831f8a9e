#pragma once

#include <stdexcept>
#include <string>

namespace bowae {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written. The message names the path.
class IoError : public Error {
public:
    using Error::Error;
};

/// An index or token fell outside the valid range of its container.
class IndexError : public Error {
public:
    using Error::Error;
};

/// Parameters or losses became NaN/Inf during training.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace bowae
