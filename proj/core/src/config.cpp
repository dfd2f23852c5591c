#include "danrti/config.hpp"

#include <cctype>
#include <fstream>
#include <limits>
#include <sstream>

#include "danrti/errors.hpp"

namespace danrti {

namespace {
std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}
}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text, const std::string& origin) {
    KeyValueConfig cfg;
    cfg.origin_ = origin.empty() ? "<string>" : origin;
    cfg.source_ = text;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(cfg.origin_ + ":" + std::to_string(line_no) +
                              ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(cfg.origin_ + ":" + std::to_string(line_no) + ": empty key");
        cfg.entries_.emplace(key, Entry{value, line_no, false});
    }
    return cfg;
}

const KeyValueConfig::Entry* KeyValueConfig::find(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
}

void KeyValueConfig::fail(const std::string& key, const std::string& why) const {
    throw ConfigError(origin_ + ": key '" + key + "': " + why);
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string KeyValueConfig::get_string(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) fail(key, "missing");
    return e->value;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
    const Entry* e = find(key);
    return e ? e->value : fallback;
}

double KeyValueConfig::get_double(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) fail(key, "missing");
    try {
        std::size_t pos = 0;
        const double v = std::stod(e->value, &pos);
        if (pos != e->value.size()) throw std::invalid_argument("trailing text");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ":" + std::to_string(e->line) + ": key '" + key +
                          "': not a number: '" + e->value + "'");
    }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

double KeyValueConfig::get_double_or_inf(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get_string(key);
    if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
    return get_double(key);
}

long long KeyValueConfig::get_int(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) fail(key, "missing");
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(e->value, &pos);
        if (pos != e->value.size()) throw std::invalid_argument("trailing text");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ":" + std::to_string(e->line) + ": key '" + key +
                          "': not an integer: '" + e->value + "'");
    }
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get_string(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail(key, "not a boolean: '" + v + "'");
}

std::vector<std::string> KeyValueConfig::get_all(const std::string& key) const {
    std::vector<std::string> out;
    auto [lo, hi] = entries_.equal_range(key);
    for (auto it = lo; it != hi; ++it) {
        it->second.used = true;
        out.push_back(it->second.value);
    }
    return out;
}

std::vector<std::string> KeyValueConfig::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [key, entry] : entries_)
        if (!entry.used) out.push_back(key);
    return out;
}

std::vector<std::string> split_fields(const std::string& value) {
    std::vector<std::string> out;
    std::istringstream in(value);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

}  // namespace danrti
