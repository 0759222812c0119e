#pragma once

#include <stdexcept>
#include <string>

namespace tripatch {

/// Bad user input: missing files, malformed data, inconsistent dimensions.
/// The CLI maps this to exit code 1.
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Internal contract breach (a bug, not a user mistake). CLI exit code 2.
class invariant_error : public std::logic_error {
public:
    explicit invariant_error(const std::string& msg) : std::logic_error(msg) {}
};

} // namespace tripatch
