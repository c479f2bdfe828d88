#include "brw/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "brw/errors.hpp"

namespace brw {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' &&
            c != '-')
            return false;
    return true;
}

} // namespace

ConfigMap ConfigMap::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str());
}

ConfigMap ConfigMap::parse_text(const std::string& text) {
    ConfigMap cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) +
                                  " has no '='");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!valid_key(key))
            throw ValidationError("bad key '" + key + "' on config line " +
                                  std::to_string(lineno));
        if (cfg.has(key))
            throw ValidationError("duplicate key '" + key + "' on config line " +
                                  std::to_string(lineno));
        cfg.entries_.emplace_back(key, value);
    }
    return cfg;
}

bool ConfigMap::has(const std::string& key) const {
    return find(key) != nullptr;
}

void ConfigMap::set(const std::string& key, const std::string& value) {
    if (!valid_key(key)) throw ValidationError("bad key '" + key + "'");
    for (auto& [k, v] : entries_)
        if (k == key) {
            v = value;
            return;
        }
    entries_.emplace_back(key, value);
}

const std::string* ConfigMap::find(const std::string& key) const {
    for (const auto& [k, v] : entries_)
        if (k == key) return &v;
    return nullptr;
}

std::string ConfigMap::get_string(const std::string& key) const {
    const std::string* v = find(key);
    if (!v) throw ValidationError("missing required key '" + key + "'");
    return *v;
}

std::string ConfigMap::get_string(const std::string& key,
                                  const std::string& fallback) const {
    const std::string* v = find(key);
    return v ? *v : fallback;
}

namespace {

long long parse_int(const std::string& key, const std::string& raw) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(raw.c_str(), &end, 10);
    if (errno != 0 || end == raw.c_str() || *end != '\0')
        throw ValidationError("key '" + key + "' is not an integer: '" + raw +
                              "'");
    return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& raw) {
    errno = 0;
    char* end = nullptr;
    if (!raw.empty() && raw[0] == '-')
        throw ValidationError("key '" + key + "' must be nonnegative: '" +
                              raw + "'");
    const unsigned long long v = std::strtoull(raw.c_str(), &end, 10);
    if (errno != 0 || end == raw.c_str() || *end != '\0')
        throw ValidationError("key '" + key + "' is not an integer: '" + raw +
                              "'");
    return v;
}

double parse_double(const std::string& key, const std::string& raw) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(raw.c_str(), &end);
    if (errno != 0 || end == raw.c_str() || *end != '\0')
        throw ValidationError("key '" + key + "' is not a number: '" + raw +
                              "'");
    return v;
}

} // namespace

long long ConfigMap::get_int(const std::string& key) const {
    return parse_int(key, get_string(key));
}

long long ConfigMap::get_int(const std::string& key, long long fallback) const {
    const std::string* v = find(key);
    return v ? parse_int(key, *v) : fallback;
}

std::uint64_t ConfigMap::get_uint(const std::string& key) const {
    return parse_uint(key, get_string(key));
}

std::uint64_t ConfigMap::get_uint(const std::string& key,
                                  std::uint64_t fallback) const {
    const std::string* v = find(key);
    return v ? parse_uint(key, *v) : fallback;
}

double ConfigMap::get_double(const std::string& key) const {
    return parse_double(key, get_string(key));
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
    const std::string* v = find(key);
    return v ? parse_double(key, *v) : fallback;
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
    const std::string* v = find(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1") return true;
    if (*v == "false" || *v == "0") return false;
    throw ValidationError("key '" + key + "' is not a boolean: '" + *v + "'");
}

std::vector<long long> ConfigMap::get_int_list(const std::string& key) const {
    const std::string raw = get_string(key);
    std::vector<long long> out;
    std::istringstream in(raw);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ValidationError("key '" + key + "' has an empty list item");
        out.push_back(parse_int(key, item));
    }
    if (out.empty()) throw ValidationError("key '" + key + "' is empty");
    return out;
}

std::vector<double> ConfigMap::get_double_list(const std::string& key) const {
    const std::string raw = get_string(key);
    std::vector<double> out;
    std::istringstream in(raw);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ValidationError("key '" + key + "' has an empty list item");
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ValidationError("key '" + key + "' is empty");
    return out;
}

std::vector<std::string> ConfigMap::keys() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [k, v] : entries_) out.push_back(k);
    return out;
}

std::string ConfigMap::serialize() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

} // namespace brw
