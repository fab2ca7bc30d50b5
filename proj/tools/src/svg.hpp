#pragma once

#include <string>
#include <vector>

namespace decolab::cli {

struct Series {
    enum class Style { line, points, bars };
    std::string label;
    std::vector<double> x, y;
    Style style = Style::line;
};

struct Plot {
    std::string title, x_label, y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<Series> series;
};

// Deterministic SVG text: identical plots give byte-identical output.
// Non-finite points, and non-positive ones on a log axis, are skipped.
std::string render_svg(const Plot& plot);
void write_svg(const std::string& path, const Plot& plot);

}  // namespace decolab::cli
