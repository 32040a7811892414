#pragma once

// Minimal TOML subset reader for run configurations: [table] headers
// (dotted names allowed), key = value lines with strings, numbers, booleans
// and flat arrays, full-line or trailing comments. Enough for the configs
// shipped under configs/; not a general TOML implementation.

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace toml_lite {

inline std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

inline nlohmann::json parse_scalar(const std::string& raw, int line_no) {
    const std::string v = trim(raw);
    if (v.empty()) throw std::runtime_error("toml: empty value at line " + std::to_string(line_no));
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"')
            throw std::runtime_error("toml: unterminated string at line " + std::to_string(line_no));
        return v.substr(1, v.size() - 2);
    }
    if (v == "true") return true;
    if (v == "false") return false;
    try {
        size_t pos = 0;
        if (v.find_first_of(".eE") == std::string::npos) {
            const long long i = std::stoll(v, &pos);
            if (pos == v.size()) return i;
        }
        const double d = std::stod(v, &pos);
        if (pos == v.size()) return d;
    } catch (...) {
    }
    throw std::runtime_error("toml: cannot parse value '" + v + "' at line " +
                             std::to_string(line_no));
}

inline nlohmann::json parse_value(const std::string& raw, int line_no) {
    const std::string v = trim(raw);
    if (!v.empty() && v.front() == '[') {
        if (v.back() != ']')
            throw std::runtime_error("toml: unterminated array at line " + std::to_string(line_no));
        nlohmann::json arr = nlohmann::json::array();
        std::string inner = v.substr(1, v.size() - 2);
        std::string item;
        bool in_string = false;
        for (char ch : inner) {
            if (ch == '"') in_string = !in_string;
            if (ch == ',' && !in_string) {
                if (!trim(item).empty()) arr.push_back(parse_scalar(item, line_no));
                item.clear();
            } else {
                item += ch;
            }
        }
        if (!trim(item).empty()) arr.push_back(parse_scalar(item, line_no));
        return arr;
    }
    return parse_scalar(v, line_no);
}

inline nlohmann::json parse(std::istream& in) {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* current = &root;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(strip_comment(line));
        if (stripped.empty()) continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']')
                throw std::runtime_error("toml: bad table header at line " +
                                         std::to_string(line_no));
            const std::string path = trim(stripped.substr(1, stripped.size() - 2));
            current = &root;
            std::stringstream ss(path);
            std::string part;
            while (std::getline(ss, part, '.')) {
                part = trim(part);
                if (part.empty())
                    throw std::runtime_error("toml: empty table name at line " +
                                             std::to_string(line_no));
                current = &((*current)[part]);
                if (current->is_null()) *current = nlohmann::json::object();
            }
            continue;
        }
        const size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("toml: expected key = value at line " +
                                     std::to_string(line_no));
        const std::string key = trim(stripped.substr(0, eq));
        if (key.empty())
            throw std::runtime_error("toml: empty key at line " + std::to_string(line_no));
        (*current)[key] = parse_value(stripped.substr(eq + 1), line_no);
    }
    return root;
}

inline nlohmann::json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return parse(in);
}

}  // namespace toml_lite
