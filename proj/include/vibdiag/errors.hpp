#ifndef VIBDIAG_ERRORS_HPP
#define VIBDIAG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace vibdiag {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or missing input data (files, CSV rows, labels).
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(what) {}
};

/// Violated precondition or configuration invariant.
class InvariantError : public Error {
public:
    explicit InvariantError(const std::string& what) : Error(what) {}
};

} // namespace vibdiag

#endif
