#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace cdzsl {

/// Flat "key = value" text file. '#' starts a comment, blank lines are
/// ignored, keys are unique. Getters mark keys as consumed so a caller can
/// reject unknown keys afterwards.
class KeyValueFile {
public:
    static KeyValueFile parse_file(const std::filesystem::path& path);
    static KeyValueFile parse_string(const std::string& text,
                                     const std::string& origin);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback);
    double get_double(const std::string& key, double fallback);
    std::int64_t get_int(const std::string& key, std::int64_t fallback);
    bool get_bool(const std::string& key, bool fallback);

    /// Required variants: throw DataError naming the key when absent.
    std::string need_string(const std::string& key);
    double need_double(const std::string& key);

    /// Throws InvalidArgument naming every key never consumed by a getter.
    void reject_unknown() const;

    const std::string& origin() const { return origin_; }

private:
    std::string origin_;
    std::map<std::string, std::string> values_;
    std::vector<std::string> order_;
    mutable std::set<std::string> consumed_;

    const std::string* find(const std::string& key) const;
};

}  // namespace cdzsl
