#pragma once

#include <string>
#include <vector>

namespace decolab::cli {

enum class Dimension {
    none,         // plain number
    fraction,     // %, ppm, ppb; bare numbers are fractions
    time,         // s
    frequency,    // Hz
    field,        // T
    power,        // W
    length,       // m
    pressure,     // Pa
    diffusion,    // Hz^2/s
    drift_rate,   // Hz/s
};

// Parses "<number>[suffix]" and returns the SI value. Bare numbers are SI.
// Throws ConfigError naming `what` on malformed input or a suffix of the
// wrong dimension. "inf" is accepted where a dimension allows it.
double parse_quantity(const std::string& text, Dimension dim, const std::string& what);

// "a:b" gives `points` evenly spaced values from a to b inclusive;
// "a:b:step" gives a, a + step, ... up to b. A bare endpoint takes the
// other endpoint's suffix, so "0:5ms" spans 0 to 5 ms. With log_spacing the
// a:b form is geometric and requires a > 0.
std::vector<double> parse_range(const std::string& text, Dimension dim, int points, bool log_spacing,
                                const std::string& what);

// Drops values <= 0, for sweeps of delays that must be positive.
std::vector<double> positive_only(std::vector<double> values);

}  // namespace decolab::cli
