#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace decolab {

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

// Flat key-value file with optional [section] headers. Each entry keeps the
// line it came from so diagnostics can name it.
struct KvEntry {
    std::string key;
    std::string value;
    int line = 0;
};

struct KvSection {
    std::string name;  // empty for the top-level block
    int line = 0;
    std::vector<KvEntry> entries;
};

std::vector<KvSection> parse_kv(std::istream& in, const std::string& source_name);

// Parses a full double; throws ConfigError naming source, key and line.
double kv_number(const KvEntry& e, const std::string& source_name);

// Minimal CSV table: header row plus numeric rows.
struct CsvTable {
    struct TextCell {
        std::size_t row, col;
        std::string text;
    };
    std::string source;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<int> lines;  // 1-based source line of each row
    // Cells holding words rather than numbers; they read as NaN and asking
    // for their column as numbers raises DataError.
    std::vector<TextCell> text_cells;

    int column(const std::string& name) const;  // -1 when absent
    std::vector<double> column_values(const std::string& name) const;
    std::vector<double> column_values(int index) const;
};

// Blank lines and lines starting with '#' are skipped. Unparseable cells
// raise DataError with the 1-based line number.
CsvTable read_csv(std::istream& in, const std::string& source_name);
CsvTable read_csv_file(const std::string& path);

class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header);
    CsvWriter& operator<<(double v);
    CsvWriter& operator<<(const std::string& s);
    void end_row();

private:
    std::ostream& out_;
    std::size_t columns_;
    std::size_t cell_ = 0;
};

}  // namespace decolab
