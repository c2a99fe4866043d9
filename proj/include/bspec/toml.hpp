#ifndef BSPEC_TOML_HPP
#define BSPEC_TOML_HPP

#include <map>
#include <string>
#include <vector>

namespace bspec {

// Minimal TOML subset used by scene files and run manifests: root-level
// key = value pairs, [[array-of-table]] sections, strings, numbers, booleans
// and flat numeric arrays, with # comments.
struct TomlValue {
    enum class Kind { string, number, boolean, array };
    Kind kind = Kind::number;
    std::string str;
    double num = 0.0;
    bool boolean = false;
    std::vector<double> array;
};

struct TomlTable {
    std::map<std::string, TomlValue> values;

    bool has(const std::string& key) const { return values.count(key) > 0; }
    const TomlValue& at(const std::string& key) const;  // ParseError if absent
    double number(const std::string& key) const;
    const std::string& string(const std::string& key) const;
    bool boolean(const std::string& key) const;
    const std::vector<double>& array(const std::string& key) const;
};

struct TomlDoc {
    TomlTable root;
    std::map<std::string, std::vector<TomlTable>> arrays;
};

// Throws ParseError with the 1-based offending line.
TomlDoc parse_toml(const std::string& text);

}

#endif
