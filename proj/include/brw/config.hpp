#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace brw {

// Flat `key = value` files: one pair per line, '#' starts a comment,
// blank lines ignored, insertion order preserved. Values are raw text
// until a typed getter is called; getters throw ValidationError naming
// the offending key.
class ConfigMap {
public:
    static ConfigMap parse_file(const std::string& path);
    static ConfigMap parse_text(const std::string& text);

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key,
                           const std::string& fallback) const;

    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;

    std::uint64_t get_uint(const std::string& key) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;

    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;

    bool get_bool(const std::string& key, bool fallback) const;

    // Comma-separated lists.
    std::vector<long long> get_int_list(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key) const;

    std::vector<std::string> keys() const;
    std::string serialize() const;

private:
    const std::string* find(const std::string& key) const;

    std::vector<std::pair<std::string, std::string>> entries_;
};

} // namespace brw
