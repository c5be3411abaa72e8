#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace divtest {

// Minimal TOML reader covering the flat subset the experiment configs use:
// bare keys, `key = value` pairs, strings, integers, floats, booleans,
// homogeneous arrays of those, and # comments.  Tables/sections and
// multi-line values are rejected with a clear diagnostic rather than
// silently misread.

struct TomlValue {
    enum class Kind { string, integer, floating, boolean, array };
    Kind kind = Kind::string;
    std::string str;
    std::int64_t int_val = 0;
    double float_val = 0.0;
    bool bool_val = false;
    std::vector<TomlValue> array;

    double as_number() const;  // integer or floating
};

class TomlTable {
public:
    static TomlTable parse(const std::string& text);
    static TomlTable parse_file(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    const TomlValue& at(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;
    double get_double(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<double> get_double_array(const std::string& key) const;
    std::vector<std::int64_t> get_int_array(const std::string& key) const;

    const std::map<std::string, TomlValue>& values() const { return values_; }

private:
    std::map<std::string, TomlValue> values_;
};

}  // namespace divtest
