#pragma once

#include <stdexcept>
#include <string>

namespace gammachan {

// Raised when a numerical routine cannot meet its accuracy contract
// (as opposed to being called with out-of-domain arguments).
class AccuracyError : public std::runtime_error {
public:
    explicit AccuracyError(const std::string& what) : std::runtime_error(what) {}
};

// Raised for malformed configuration files / CLI usage; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gammachan
