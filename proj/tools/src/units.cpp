#include "units.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <utility>

#include "decolab/errors.hpp"

namespace decolab::cli {

namespace {

struct Suffix {
    const char* text;
    double scale;
};

std::vector<Suffix> suffixes(Dimension dim) {
    switch (dim) {
        case Dimension::none: return {};
        case Dimension::fraction: return {{"%", 1e-2}, {"ppm", 1e-6}, {"ppb", 1e-9}};
        case Dimension::time: return {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}};
        case Dimension::frequency: return {{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
        case Dimension::field: return {{"T", 1.0}, {"mT", 1e-3}, {"uT", 1e-6}, {"nT", 1e-9}, {"G", 1e-4}, {"mG", 1e-7}};
        case Dimension::power: return {{"W", 1.0}, {"mW", 1e-3}, {"uW", 1e-6}, {"nW", 1e-9}};
        case Dimension::length: return {{"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}};
        case Dimension::pressure:
            return {{"Pa", 1.0}, {"kPa", 1e3}, {"mbar", 100.0}, {"Torr", 101325.0 / 760.0}, {"atm", 101325.0}};
        case Dimension::diffusion: return {{"Hz^2/s", 1.0}, {"kHz^2/s", 1e6}, {"MHz^2/s", 1e12}};
        case Dimension::drift_rate: return {{"Hz/s", 1.0}, {"kHz/s", 1e3}, {"MHz/s", 1e6}};
    }
    return {};
}

// Number prefix and the remaining suffix text.
std::pair<double, std::string> split(const std::string& text, const std::string& what) {
    if (text == "inf" || text == "+inf") return {std::numeric_limits<double>::infinity(), ""};
    double v = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (begin != end && *begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr == begin) throw ConfigError(what + ": cannot parse number in '" + text + "'");
    std::string rest(ptr, end);
    if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
    return {v, rest};
}

double apply_suffix(double v, const std::string& suffix, Dimension dim, const std::string& text,
                    const std::string& what) {
    if (suffix.empty()) return v;
    for (const auto& s : suffixes(dim))
        if (suffix == s.text) return v * s.scale;
    std::string allowed;
    for (const auto& s : suffixes(dim)) allowed += std::string(allowed.empty() ? "" : ", ") + s.text;
    throw ConfigError(what + ": unknown unit '" + suffix + "' in '" + text + "'" +
                      (allowed.empty() ? " (expects a plain number)" : " (expected one of " + allowed + ")"));
}

}  // namespace

double parse_quantity(const std::string& text, Dimension dim, const std::string& what) {
    const auto [v, suffix] = split(text, what);
    const double out = apply_suffix(v, suffix, dim, text, what);
    if (std::isnan(out)) throw ConfigError(what + ": NaN is not a valid value");
    return out;
}

std::vector<double> parse_range(const std::string& text, Dimension dim, int points, bool log_spacing,
                                const std::string& what) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i)
        if (i == text.size() || text[i] == ':') {
            parts.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    if (parts.size() < 2 || parts.size() > 3) throw ConfigError(what + ": expected 'a:b' or 'a:b:step', got '" + text + "'");
    auto [a_num, a_suf] = split(parts[0], what);
    auto [b_num, b_suf] = split(parts[1], what);
    if (a_suf.empty()) a_suf = b_suf;
    if (b_suf.empty()) b_suf = a_suf;
    const double a = apply_suffix(a_num, a_suf, dim, text, what);
    const double b = apply_suffix(b_num, b_suf, dim, text, what);
    if (!std::isfinite(a) || !std::isfinite(b) || !(b >= a)) throw ConfigError(what + ": range needs finite a <= b");
    std::vector<double> out;
    if (parts.size() == 3) {
        auto [s_num, s_suf] = split(parts[2], what);
        if (s_suf.empty()) s_suf = b_suf;
        const double step = apply_suffix(s_num, s_suf, dim, text, what);
        if (!(step > 0.0)) throw ConfigError(what + ": step must be > 0");
        const double count = std::floor((b - a) / step * (1.0 + 1e-12) + 1e-9);
        if (count > 1e7) throw ConfigError(what + ": range has more than 1e7 points");
        for (long k = 0; k <= static_cast<long>(count); ++k) out.push_back(a + k * step);
        return out;
    }
    if (points < 0) throw ConfigError("--points must be >= 0");
    if (log_spacing) {
        if (!(a > 0.0)) throw ConfigError(what + ": log spacing needs a > 0");
        for (int k = 0; k < points; ++k)
            out.push_back(points == 1 ? b : a * std::pow(b / a, k / double(points - 1)));
        return out;
    }
    for (int k = 0; k < points; ++k) out.push_back(points == 1 ? a : a + (b - a) * k / (points - 1));
    return out;
}

std::vector<double> positive_only(std::vector<double> values) {
    std::erase_if(values, [](double v) { return !(v > 0.0); });
    return values;
}

}  // namespace decolab::cli
