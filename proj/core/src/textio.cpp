#include "specmeter/textio.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>

namespace specmeter {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    text = trim(text);
    if (text == "inf" || text == "+inf") return INFINITY;
    if (text == "-inf") return -INFINITY;
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty()) {
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    }
    return value;
}

long long parse_integer(std::string_view text) {
    text = trim(text);
    long long value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty()) {
        throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
    }
    return value;
}

std::string_view trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.emplace_back(trim(text.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double KindWithOptions::number(const std::string& key, double fallback) const {
    const auto it = options.find(key);
    if (it == options.end()) return fallback;
    try {
        return parse_double(it->second);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("option '" + key + "' of '" + kind + "': not a number");
    }
}

long long KindWithOptions::integer(const std::string& key, long long fallback) const {
    const auto it = options.find(key);
    if (it == options.end()) return fallback;
    try {
        return parse_integer(it->second);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("option '" + key + "' of '" + kind + "': not an integer");
    }
}

std::string KindWithOptions::text(const std::string& key, const std::string& fallback) const {
    const auto it = options.find(key);
    return it == options.end() ? fallback : it->second;
}

KindWithOptions split_kind_options(std::string_view text) {
    text = trim(text);
    KindWithOptions out;
    const auto colon = text.find(':');
    out.kind = std::string(trim(text.substr(0, colon)));
    if (out.kind.empty()) throw std::invalid_argument("empty kind in '" + std::string(text) + "'");
    if (colon == std::string_view::npos) return out;
    std::string_view rest = text.substr(colon + 1);
    for (const auto& item : split(rest, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("option '" + item + "' of '" + out.kind + "' is not key=value");
        }
        auto key = std::string(trim(std::string_view(item).substr(0, eq)));
        auto value = std::string(trim(std::string_view(item).substr(eq + 1)));
        if (!out.options.emplace(key, value).second) {
            throw std::invalid_argument("duplicate option '" + key + "' in '" + out.kind + "'");
        }
    }
    return out;
}

}  // namespace specmeter
