#pragma once

#include <stdexcept>
#include <string>

namespace surftex {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Input was readable but violates a format or domain invariant.
class DataError : public Error {
public:
    using Error::Error;
};

/// A caller-supplied parameter is out of its documented range.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace surftex
