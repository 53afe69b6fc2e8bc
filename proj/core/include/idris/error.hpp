#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace idris {

// Invalid argument to a numeric primitive.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

enum class ConfigErrorCode {
    missing_file = 10,
    parse = 11,
    validation = 12,
    unknown_key = 13,
    unsupported = 14,
    usage = 15,
};

std::string_view to_string(ConfigErrorCode code);

// Anything the user can fix by editing a scenario file or the command line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(ConfigErrorCode code, std::string key, const std::string& message);

    ConfigErrorCode code() const noexcept { return code_; }
    const std::string& key() const noexcept { return key_; }

private:
    ConfigErrorCode code_;
    std::string key_;
};

// I/O and other failures that happen while running a valid configuration.
class RuntimeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace idris
