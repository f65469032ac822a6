#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace trackgen {

// Flat `key = value` document with '#' comments. Unknown keys are reported
// once parsing is consumed, so typos surface with the file name attached.
class KeyValueConfig {
public:
    static KeyValueConfig parse_file(const std::string& path);
    static KeyValueConfig parse_text(const std::string& text, const std::string& origin);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback);
    std::string require_string(const std::string& key);
    double get_double(const std::string& key, double fallback);
    long get_long(const std::string& key, long fallback);
    bool get_bool(const std::string& key, bool fallback);
    std::vector<std::string> get_list(const std::string& key,
                                      const std::vector<std::string>& fallback);

    // Throws ConfigError naming any key that was never read.
    void reject_unknown_keys() const;

    const std::string& origin() const { return origin_; }

private:
    std::string lookup(const std::string& key);

    std::string origin_;
    std::map<std::string, std::string> values_;
    std::set<std::string> consumed_;
};

} // namespace trackgen
