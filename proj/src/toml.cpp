#include "bspec/toml.hpp"

#include <cstdlib>
#include <stdexcept>

#include "bspec/errors.hpp"

namespace bspec {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Strip a # comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

double parse_number(const std::string& text, int line) {
    const std::string t = trim(text);
    if (t.empty()) throw ParseError(line, "empty numeric value");
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
        throw ParseError(line, "malformed number '" + t + "'");
    return v;
}

TomlValue parse_value(const std::string& text, int line) {
    TomlValue v;
    const std::string t = trim(text);
    if (t.empty()) throw ParseError(line, "missing value");
    if (t.front() == '"') {
        if (t.size() < 2 || t.back() != '"')
            throw ParseError(line, "unterminated string");
        v.kind = TomlValue::Kind::string;
        v.str = t.substr(1, t.size() - 2);
        return v;
    }
    if (t == "true" || t == "false") {
        v.kind = TomlValue::Kind::boolean;
        v.boolean = (t == "true");
        return v;
    }
    if (t.front() == '[') {
        if (t.back() != ']') throw ParseError(line, "unterminated array");
        v.kind = TomlValue::Kind::array;
        std::string body = t.substr(1, t.size() - 2);
        std::size_t pos = 0;
        while (pos <= body.size()) {
            std::size_t comma = body.find(',', pos);
            const std::string item =
                body.substr(pos, comma == std::string::npos ? std::string::npos
                                                            : comma - pos);
            if (!trim(item).empty()) v.array.push_back(parse_number(item, line));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        return v;
    }
    v.kind = TomlValue::Kind::number;
    v.num = parse_number(t, line);
    return v;
}

}  // namespace

const TomlValue& TomlTable::at(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) throw ParseError(0, "missing key '" + key + "'");
    return it->second;
}

double TomlTable::number(const std::string& key) const {
    const TomlValue& v = at(key);
    if (v.kind != TomlValue::Kind::number)
        throw ParseError(0, "key '" + key + "' is not a number");
    return v.num;
}

const std::string& TomlTable::string(const std::string& key) const {
    const TomlValue& v = at(key);
    if (v.kind != TomlValue::Kind::string)
        throw ParseError(0, "key '" + key + "' is not a string");
    return v.str;
}

bool TomlTable::boolean(const std::string& key) const {
    const TomlValue& v = at(key);
    if (v.kind != TomlValue::Kind::boolean)
        throw ParseError(0, "key '" + key + "' is not a boolean");
    return v.boolean;
}

const std::vector<double>& TomlTable::array(const std::string& key) const {
    const TomlValue& v = at(key);
    if (v.kind != TomlValue::Kind::array)
        throw ParseError(0, "key '" + key + "' is not an array");
    return v.array;
}

TomlDoc parse_toml(const std::string& text) {
    TomlDoc doc;
    TomlTable* current = &doc.root;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        ++line_no;
        std::size_t nl = text.find('\n', pos);
        std::string line =
            text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = (nl == std::string::npos) ? text.size() + 1 : nl + 1;

        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.rfind("[[", 0) == 0) {
            if (line.size() < 5 || line.substr(line.size() - 2) != "]]")
                throw ParseError(line_no, "malformed table-array header");
            const std::string name = trim(line.substr(2, line.size() - 4));
            if (name.empty()) throw ParseError(line_no, "empty table-array name");
            doc.arrays[name].emplace_back();
            current = &doc.arrays[name].back();
            continue;
        }
        if (line.front() == '[')
            throw ParseError(line_no, "plain tables are not supported");
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(line_no, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ParseError(line_no, "empty key");
        if (current->values.count(key))
            throw ParseError(line_no, "duplicate key '" + key + "'");
        current->values[key] = parse_value(line.substr(eq + 1), line_no);
    }
    return doc;
}

}
