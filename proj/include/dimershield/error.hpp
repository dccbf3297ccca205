#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dimershield {

// Base of every typed failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class UnitError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class TruncationError : public Error {
public:
    using Error::Error;
};

class NearDegeneracyError : public Error {
public:
    NearDegeneracyError(const std::string& msg, std::size_t offending_index)
        : Error(msg), index(offending_index) {}
    std::size_t index;
};

class NoBarrierError : public Error {
public:
    using Error::Error;
};

class PoleError : public Error {
public:
    using Error::Error;
};

class AsymptoteError : public Error {
public:
    using Error::Error;
};

// Non-fatal conditions collected alongside results.
struct Diagnostics {
    std::vector<std::string> warnings;
    void warn(std::string w) { warnings.push_back(std::move(w)); }
    bool empty() const { return warnings.empty(); }
};

}  // namespace dimershield
