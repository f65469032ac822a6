#include "trackgen/config.hpp"

#include <fstream>
#include <sstream>

#include "trackgen/errors.hpp"
#include "trackgen/util.hpp"

namespace trackgen {

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path);
}

KeyValueConfig KeyValueConfig::parse_text(const std::string& text, const std::string& origin) {
    KeyValueConfig cfg;
    cfg.origin_ = origin;
    int line_no = 0;
    for (const std::string& raw : split(text, '\n')) {
        ++line_no;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        if (cfg.values_.count(key))
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" +
                              key + "'");
        cfg.values_[key] = value;
    }
    return cfg;
}

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string KeyValueConfig::lookup(const std::string& key) {
    consumed_.insert(key);
    return values_.at(key);
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    return lookup(key);
}

std::string KeyValueConfig::require_string(const std::string& key) {
    if (!has(key)) throw ConfigError(origin_ + ": missing required key '" + key + "'");
    return lookup(key);
}

double KeyValueConfig::get_double(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    try {
        return parse_double(lookup(key));
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ": key '" + key + "' is not a number");
    }
}

long KeyValueConfig::get_long(const std::string& key, long fallback) {
    if (!has(key)) return fallback;
    try {
        return parse_long(lookup(key));
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ": key '" + key + "' is not an integer");
    }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const std::string v = lookup(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(origin_ + ": key '" + key + "' is not a boolean");
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& key,
                                                  const std::vector<std::string>& fallback) {
    if (!has(key)) return fallback;
    std::vector<std::string> out;
    for (const std::string& item : split(lookup(key), ',')) {
        const std::string t = trim(item);
        if (!t.empty()) out.push_back(t);
    }
    if (out.empty()) throw ConfigError(origin_ + ": key '" + key + "' has an empty list");
    return out;
}

void KeyValueConfig::reject_unknown_keys() const {
    std::string unknown;
    for (const auto& [key, value] : values_) {
        if (!consumed_.count(key)) {
            if (!unknown.empty()) unknown += ", ";
            unknown += "'" + key + "'";
        }
    }
    if (!unknown.empty())
        throw ConfigError(origin_ + ": unknown key(s): " + unknown);
}

} // namespace trackgen
