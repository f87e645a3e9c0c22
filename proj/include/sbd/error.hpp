#pragma once

#include <stdexcept>
#include <string>

namespace sbd {

// Raised for malformed or inconsistent input data (files, records, labels).
// The CLI maps it to exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Raised for invalid flags or configuration values. The CLI maps it to exit
// code 1.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sbd
