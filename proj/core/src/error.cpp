#include "idris/error.hpp"

namespace idris {

std::string_view to_string(ConfigErrorCode code) {
    switch (code) {
        case ConfigErrorCode::missing_file: return "missing-file";
        case ConfigErrorCode::parse: return "parse";
        case ConfigErrorCode::validation: return "validation";
        case ConfigErrorCode::unknown_key: return "unknown-key";
        case ConfigErrorCode::unsupported: return "unsupported";
        case ConfigErrorCode::usage: return "usage";
    }
    return "config";
}

ConfigError::ConfigError(ConfigErrorCode code, std::string key, const std::string& message)
    : std::runtime_error(key.empty() ? message : key + ": " + message),
      code_(code),
      key_(std::move(key)) {}

}  // namespace idris
