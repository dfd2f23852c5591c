#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace danrti {

/// Line-oriented `key = value` configuration text. `#` starts a comment;
/// repeated keys accumulate in order (used for node/target lists). Parse and
/// lookup errors carry the source line for diagnostics.
class KeyValueConfig {
  public:
    static KeyValueConfig parse_file(const std::string& path);
    static KeyValueConfig parse_string(const std::string& text, const std::string& origin = "");

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    /// Accepts `inf` for infinity; used by shadowing depth.
    double get_double_or_inf(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    /// All values recorded for a repeated key, in file order.
    std::vector<std::string> get_all(const std::string& key) const;

    /// Raw text the config was parsed from (for run-directory snapshots).
    const std::string& source_text() const { return source_; }

    /// Keys that were never read; surfaced as a typo warning.
    std::vector<std::string> unused_keys() const;

  private:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool used = false;
    };
    std::string origin_;
    std::string source_;
    std::multimap<std::string, Entry> entries_;

    const Entry* find(const std::string& key) const;
    [[noreturn]] void fail(const std::string& key, const std::string& why) const;
};

/// Splits a whitespace-separated value list ("3.5 3.0 45 8").
std::vector<std::string> split_fields(const std::string& value);

}  // namespace danrti
