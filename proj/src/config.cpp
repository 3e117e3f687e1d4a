#include "qzeno/config.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qzeno/error.hpp"

namespace qzeno {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_real(const std::string& s, const std::string& key) {
    const std::string t = trim(s);
    // strtod flags underflow even when the result is a valid subnormal, so
    // only overflow counts as an error.
    errno = 0;
    char* end = nullptr;
    const double v = t.empty() ? 0.0 : std::strtod(t.c_str(), &end);
    const bool ok = !t.empty() && end == t.c_str() + t.size() && std::isfinite(v) &&
                    !(errno == ERANGE && std::abs(v) == HUGE_VAL);
    if (!ok) {
        throw Error(ErrorCode::ParseError, "'" + s + "' is not a number" + (key.empty() ? "" : " (key " + key + ")"));
    }
    return v;
}

namespace {

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == ':' ||
                        c == '-' || c == '(' || c == ')' || c == '/' || c == '*' || c == '^';
        if (!ok) return false;
    }
    return true;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
    KeyValueConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        const std::string where = source + ":" + std::to_string(lineno);
        if (eq == std::string::npos) throw Error(ErrorCode::ParseError, where + ": expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        if (!valid_key(key)) throw Error(ErrorCode::ParseError, where + ": invalid key '" + key + "'");
        if (cfg.has(key)) throw Error(ErrorCode::ParseError, where + ": duplicate key '" + key + "'");
        cfg.entries_[key] = trim(t.substr(eq + 1));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    return parse(in, path.string());
}

std::optional<std::string> KeyValueConfig::find(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

const std::string& KeyValueConfig::get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw Error(ErrorCode::ParseError, "missing key '" + key + "'");
    return it->second;
}

std::string KeyValueConfig::get(const std::string& key, const std::string& fallback) const {
    auto v = find(key);
    return v ? *v : fallback;
}

double KeyValueConfig::get_double(const std::string& key) const { return parse_real(get(key), key); }

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    auto v = find(key);
    return v ? parse_real(*v, key) : fallback;
}

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) const {
    auto v = find(key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        const long long r = std::stoll(*v, &used);
        if (used == v->size()) return r;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::ParseError, "'" + *v + "' is not an integer (key " + key + ")");
}

std::uint64_t KeyValueConfig::get_uint(const std::string& key, std::uint64_t fallback) const {
    auto v = find(key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        const unsigned long long r = std::stoull(*v, &used);
        if (used == v->size() && (*v)[0] != '-') return r;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::ParseError, "'" + *v + "' is not an unsigned integer (key " + key + ")");
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    if (!valid_key(key)) throw Error(ErrorCode::ParseError, "invalid key '" + key + "'");
    if (value.find('\n') != std::string::npos) throw Error(ErrorCode::ParseError, "multi-line value for " + key);
    entries_[key] = trim(value);
}

void KeyValueConfig::set(const std::string& key, double value) { set(key, format_real(value)); }

void KeyValueConfig::set_int(const std::string& key, std::int64_t value) { set(key, std::to_string(value)); }

void KeyValueConfig::write(std::ostream& out) const {
    for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
}

std::string KeyValueConfig::to_string() const {
    std::ostringstream out;
    write(out);
    return out.str();
}

void KeyValueConfig::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    write(out);
    if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

}  // namespace qzeno
