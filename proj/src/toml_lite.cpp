#include "divtest/toml_lite.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "divtest/errors.hpp"

namespace divtest {

namespace {

[[noreturn]] void parse_error(int line, const std::string& what) {
    raise(errc::invalid_argument, "config line " + std::to_string(line) + ": " + what);
}

struct Cursor {
    const std::string& s;
    std::size_t pos = 0;
    int line;

    bool done() const { return pos >= s.size(); }
    char peek() const { return s[pos]; }
    void skip_ws() {
        while (!done() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
};

TomlValue parse_value(Cursor& c);

TomlValue parse_string(Cursor& c) {
    TomlValue v;
    v.kind = TomlValue::Kind::string;
    ++c.pos;  // opening quote
    while (!c.done() && c.peek() != '"') {
        char ch = c.peek();
        if (ch == '\\') {
            ++c.pos;
            if (c.done()) parse_error(c.line, "dangling escape in string");
            switch (c.peek()) {
                case 'n': ch = '\n'; break;
                case 't': ch = '\t'; break;
                case '"': ch = '"'; break;
                case '\\': ch = '\\'; break;
                default: parse_error(c.line, "unsupported escape in string");
            }
        }
        v.str.push_back(ch);
        ++c.pos;
    }
    if (c.done()) parse_error(c.line, "unterminated string");
    ++c.pos;  // closing quote
    return v;
}

TomlValue parse_scalar(Cursor& c) {
    std::size_t start = c.pos;
    while (!c.done() && c.peek() != ',' && c.peek() != ']' && c.peek() != '#' &&
           c.peek() != ' ' && c.peek() != '\t')
        ++c.pos;
    std::string tok = c.s.substr(start, c.pos - start);
    if (tok.empty()) parse_error(c.line, "expected a value");

    TomlValue v;
    if (tok == "true" || tok == "false") {
        v.kind = TomlValue::Kind::boolean;
        v.bool_val = (tok == "true");
        return v;
    }
    const bool looks_float = tok.find_first_of(".eE") != std::string::npos &&
                             tok.find_first_not_of("+-0123456789.eE") == std::string::npos;
    try {
        std::size_t used = 0;
        if (looks_float) {
            v.kind = TomlValue::Kind::floating;
            v.float_val = std::stod(tok, &used);
        } else {
            v.kind = TomlValue::Kind::integer;
            v.int_val = std::stoll(tok, &used);
        }
        if (used != tok.size()) parse_error(c.line, "malformed number '" + tok + "'");
    } catch (const std::exception&) {
        parse_error(c.line, "cannot parse value '" + tok + "'");
    }
    return v;
}

TomlValue parse_value(Cursor& c) {
    c.skip_ws();
    if (c.done()) parse_error(c.line, "missing value");
    if (c.peek() == '"') return parse_string(c);
    if (c.peek() == '[') {
        TomlValue v;
        v.kind = TomlValue::Kind::array;
        ++c.pos;
        c.skip_ws();
        while (!c.done() && c.peek() != ']') {
            v.array.push_back(parse_value(c));
            c.skip_ws();
            if (!c.done() && c.peek() == ',') {
                ++c.pos;
                c.skip_ws();
            }
        }
        if (c.done()) parse_error(c.line, "unterminated array");
        ++c.pos;
        if (!v.array.empty()) {
            for (const TomlValue& e : v.array) {
                const bool num_mix = (e.kind == TomlValue::Kind::integer ||
                                      e.kind == TomlValue::Kind::floating) &&
                                     (v.array[0].kind == TomlValue::Kind::integer ||
                                      v.array[0].kind == TomlValue::Kind::floating);
                if (e.kind != v.array[0].kind && !num_mix)
                    parse_error(c.line, "arrays must be homogeneous");
            }
        }
        return v;
    }
    return parse_scalar(c);
}

}  // namespace

double TomlValue::as_number() const {
    if (kind == Kind::integer) return static_cast<double>(int_val);
    if (kind == Kind::floating) return float_val;
    raise(errc::invalid_argument, "config value is not a number");
}

TomlTable TomlTable::parse(const std::string& text) {
    TomlTable table;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        Cursor c{raw, 0, line_no};
        c.skip_ws();
        if (c.done() || c.peek() == '#') continue;
        if (c.peek() == '[')
            parse_error(line_no, "tables/sections are not supported; use flat keys");

        std::size_t key_start = c.pos;
        while (!c.done() && (std::isalnum(static_cast<unsigned char>(c.peek())) ||
                             c.peek() == '_' || c.peek() == '-'))
            ++c.pos;
        std::string key = raw.substr(key_start, c.pos - key_start);
        if (key.empty()) parse_error(line_no, "expected a key");
        c.skip_ws();
        if (c.done() || c.peek() != '=') parse_error(line_no, "expected '=' after key '" + key + "'");
        ++c.pos;

        TomlValue value = parse_value(c);
        c.skip_ws();
        if (!c.done() && c.peek() != '#')
            parse_error(line_no, "trailing characters after value for key '" + key + "'");
        if (table.values_.count(key)) parse_error(line_no, "duplicate key '" + key + "'");
        table.values_.emplace(std::move(key), std::move(value));
    }
    return table;
}

TomlTable TomlTable::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(errc::invalid_argument, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

const TomlValue& TomlTable::at(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) raise(errc::invalid_argument, "missing config key '" + key + "'");
    return it->second;
}

std::string TomlTable::get_string(const std::string& key) const {
    const TomlValue& v = at(key);
    if (v.kind != TomlValue::Kind::string)
        raise(errc::invalid_argument, "config key '" + key + "' must be a string");
    return v.str;
}

std::int64_t TomlTable::get_int(const std::string& key) const {
    const TomlValue& v = at(key);
    if (v.kind != TomlValue::Kind::integer)
        raise(errc::invalid_argument, "config key '" + key + "' must be an integer");
    return v.int_val;
}

double TomlTable::get_double(const std::string& key) const { return at(key).as_number(); }

bool TomlTable::get_bool(const std::string& key) const {
    const TomlValue& v = at(key);
    if (v.kind != TomlValue::Kind::boolean)
        raise(errc::invalid_argument, "config key '" + key + "' must be a boolean");
    return v.bool_val;
}

std::vector<double> TomlTable::get_double_array(const std::string& key) const {
    const TomlValue& v = at(key);
    if (v.kind != TomlValue::Kind::array)
        raise(errc::invalid_argument, "config key '" + key + "' must be an array");
    std::vector<double> out;
    out.reserve(v.array.size());
    for (const TomlValue& e : v.array) out.push_back(e.as_number());
    return out;
}

std::vector<std::int64_t> TomlTable::get_int_array(const std::string& key) const {
    const TomlValue& v = at(key);
    if (v.kind != TomlValue::Kind::array)
        raise(errc::invalid_argument, "config key '" + key + "' must be an array");
    std::vector<std::int64_t> out;
    out.reserve(v.array.size());
    for (const TomlValue& e : v.array) {
        if (e.kind != TomlValue::Kind::integer)
            raise(errc::invalid_argument, "config key '" + key + "' must be an integer array");
        out.push_back(e.int_val);
    }
    return out;
}

}  // namespace divtest
