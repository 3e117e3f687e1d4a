#pragma once

// Flat key-value text format shared by run configs and device-parameter
// files. Grammar (see docs/config-format.md):
//
//   line    := blank | comment | entry
//   comment := '#' any*
//   entry   := key ws* '=' ws* value
//   key     := [A-Za-z0-9_.:()/*^-]+ (dotted namespaces, e.g. model.k)
//   value   := any*, surrounding whitespace trimmed
//
// Duplicate keys are an error. Reals are written with 17 significant digits.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qzeno {

class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& in, const std::string& source = "<input>");
    static KeyValueConfig parse_string(const std::string& text);
    static KeyValueConfig load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    std::optional<std::string> find(const std::string& key) const;
    const std::string& get(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;

    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set_int(const std::string& key, std::int64_t value);

    const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

    void write(std::ostream& out) const;
    std::string to_string() const;
    void save(const std::filesystem::path& path) const;

private:
    std::map<std::string, std::string> entries_;
};

/// Shortest text that round-trips a double exactly (17 significant digits).
std::string format_real(double v);
double parse_real(const std::string& s, const std::string& key = "");
std::vector<std::string> split(const std::string& s, char sep);
std::string trim(const std::string& s);

}  // namespace qzeno
