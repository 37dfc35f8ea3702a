#include "cdzsl/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cdzsl/errors.hpp"

namespace cdzsl {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

KeyValueFile KeyValueFile::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open file: " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path.string());
}

KeyValueFile KeyValueFile::parse_string(const std::string& text,
                                        const std::string& origin) {
    KeyValueFile kv;
    kv.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw DataError(origin + ":" + std::to_string(lineno) +
                            ": expected 'key = value', got '" + line + "'");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw DataError(origin + ":" + std::to_string(lineno) +
                            ": empty key");
        }
        if (kv.values_.count(key)) {
            throw DataError(origin + ":" + std::to_string(lineno) +
                            ": duplicate key '" + key + "'");
        }
        kv.values_[key] = value;
        kv.order_.push_back(key);
    }
    return kv;
}

const std::string* KeyValueFile::find(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return nullptr;
    consumed_.insert(key);
    return &it->second;
}

bool KeyValueFile::has(const std::string& key) const {
    return values_.count(key) != 0;
}

std::string KeyValueFile::get_string(const std::string& key,
                                     const std::string& fallback) {
    const std::string* v = find(key);
    return v ? *v : fallback;
}

double KeyValueFile::get_double(const std::string& key, double fallback) {
    const std::string* v = find(key);
    if (!v) return fallback;
    char* end = nullptr;
    double x = std::strtod(v->c_str(), &end);
    if (end == v->c_str() || *end != '\0') {
        throw DataError(origin_ + ": key '" + key + "' is not a number: '" +
                        *v + "'");
    }
    return x;
}

std::int64_t KeyValueFile::get_int(const std::string& key,
                                   std::int64_t fallback) {
    const std::string* v = find(key);
    if (!v) return fallback;
    char* end = nullptr;
    long long x = std::strtoll(v->c_str(), &end, 10);
    if (end == v->c_str() || *end != '\0') {
        throw DataError(origin_ + ": key '" + key + "' is not an integer: '" +
                        *v + "'");
    }
    return static_cast<std::int64_t>(x);
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) {
    const std::string* v = find(key);
    if (!v) return fallback;
    const std::string s = lower(*v);
    if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "off" || s == "no" || s == "0") return false;
    throw DataError(origin_ + ": key '" + key + "' is not a boolean: '" + *v +
                    "'");
}

std::string KeyValueFile::need_string(const std::string& key) {
    const std::string* v = find(key);
    if (!v) throw DataError(origin_ + ": missing required key '" + key + "'");
    return *v;
}

double KeyValueFile::need_double(const std::string& key) {
    if (!has(key)) {
        throw DataError(origin_ + ": missing required key '" + key + "'");
    }
    return get_double(key, 0.0);
}

void KeyValueFile::reject_unknown() const {
    std::string bad;
    for (const auto& key : order_) {
        if (!consumed_.count(key)) {
            if (!bad.empty()) bad += ", ";
            bad += "'" + key + "'";
        }
    }
    if (!bad.empty()) {
        throw InvalidArgument(origin_ + ": unknown key(s): " + bad);
    }
}

}  // namespace cdzsl
