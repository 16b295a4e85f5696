#pragma once

#include <stdexcept>
#include <string>

namespace chbsim {

/// Invalid user-supplied configuration or parameter. The CLI maps this to exit code 1.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numeric procedure failed (lost bracket, no admissible root, undefined ratio).
/// The CLI maps this to exit code 2.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace chbsim
