#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ldacs::cli {

/// A configuration value that cannot be used; key() names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error("config error: " + key + ": " + message), key_(std::move(key)) {}

    const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct KeySpec {
    const char* key;
    const char* default_value;
    const char* help;
};

/// Every accepted configuration key with its default.
const std::vector<KeySpec>& known_keys();

/// Parses `key = value` lines; '#' starts a comment. Unknown keys throw.
std::map<std::string, std::string> parse_config_text(const std::string& text, const std::string& origin);

/// Numeric axis: comma-separated items, each a number or start:stop:step (inclusive).
std::vector<double> parse_axis(const std::string& key, const std::string& text);

/// Runs one `sync-lab` invocation. Exit codes: 0 success, 1 runtime
/// failure, 2 configuration or usage error.
int parse_and_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ldacs::cli
