#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace labsched {

// Minimal `key = value` config text: one pair per line, '#' comments,
// values either scalars or comma-separated lists. Used for solver overrides
// and bench manifests.
class KvConfig {
  public:
    static KvConfig parse_file(const std::filesystem::path& path);
    static KvConfig parse_text(const std::string& text);

    bool has(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::vector<std::string> get_list(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

  private:
    std::map<std::string, std::string> entries_;
};

}  // namespace labsched
