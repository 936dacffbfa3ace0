#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace specmeter {

// Shortest round-trip decimal form, '.' separator, independent of locale.
std::string format_double(double value);
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

std::string_view trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);

// "kind:key=value,key=value". A value runs to the next ',' so nested
// "entry=heavy_cubic:cut=2" is preserved verbatim.
struct KindWithOptions {
    std::string kind;
    std::map<std::string, std::string> options;

    bool has(const std::string& key) const { return options.count(key) != 0; }
    double number(const std::string& key, double fallback) const;
    long long integer(const std::string& key, long long fallback) const;
    std::string text(const std::string& key, const std::string& fallback) const;
};

KindWithOptions split_kind_options(std::string_view text);

}  // namespace specmeter
