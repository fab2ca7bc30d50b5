#include "decolab/io.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "decolab/errors.hpp"

namespace decolab {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

bool parse_full_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf.data(), ptr);
}

std::vector<KvSection> parse_kv(std::istream& in, const std::string& source_name) {
    std::vector<KvSection> sections(1);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (const auto hash = line.find('#'); hash != std::string::npos) line = trim(line.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw ConfigError(source_name + ":" + std::to_string(line_no) +
                                  ": malformed section header '" + line + "'");
            sections.push_back({trim(std::string_view(line).substr(1, line.size() - 2)), line_no, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source_name + ":" + std::to_string(line_no) + ": expected 'key = value', got '" +
                              line + "'");
        KvEntry entry{trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)),
                      line_no};
        if (entry.key.empty())
            throw ConfigError(source_name + ":" + std::to_string(line_no) + ": empty key");
        sections.back().entries.push_back(std::move(entry));
    }
    return sections;
}

double kv_number(const KvEntry& e, const std::string& source_name) {
    double v = 0.0;
    if (!parse_full_double(e.value, v))
        throw ConfigError(source_name + ":" + std::to_string(e.line) + ": key '" + e.key +
                          "' expects a number, got '" + e.value + "'");
    return v;
}

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

std::vector<double> CsvTable::column_values(int index) const {
    for (const auto& t : text_cells)
        if (t.col == static_cast<std::size_t>(index))
            throw DataError(source + ":" + std::to_string(lines.at(t.row)) + ": cannot parse '" + t.text +
                            "' in column '" + header.at(t.col) + "'");
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.at(static_cast<std::size_t>(index)));
    return out;
}

std::vector<double> CsvTable::column_values(const std::string& name) const {
    const int idx = column(name);
    if (idx < 0) throw DataError("missing CSV column '" + name + "'");
    return column_values(idx);
}

CsvTable read_csv(std::istream& in, const std::string& source_name) {
    CsvTable table;
    table.source = source_name;
    std::string raw;
    int line_no = 0;
    bool have_header = false;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != table.header.size())
            throw DataError(source_name + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(table.header.size()) + " columns, found " +
                            std::to_string(cells.size()));
        std::vector<double> row(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (!parse_full_double(cells[i], row[i])) {
                if (!cells[i].empty() && std::isalpha(static_cast<unsigned char>(cells[i].front())) &&
                    cells[i] != "nan" && cells[i] != "inf") {
                    row[i] = std::numeric_limits<double>::quiet_NaN();
                    table.text_cells.push_back({table.rows.size(), i, cells[i]});
                    continue;
                }
                throw DataError(source_name + ":" + std::to_string(line_no) + ": cannot parse '" + cells[i] +
                                "' in column '" + table.header[i] + "'");
            }
        }
        table.rows.push_back(std::move(row));
        table.lines.push_back(line_no);
    }
    if (!have_header) throw DataError(source_name + ": empty CSV file");
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return read_csv(in, path);
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

CsvWriter& CsvWriter::operator<<(double v) { return *this << format_double(v); }

CsvWriter& CsvWriter::operator<<(const std::string& s) {
    if (cell_ > 0) out_ << ',';
    out_ << s;
    ++cell_;
    return *this;
}

void CsvWriter::end_row() {
    if (cell_ != columns_)
        throw std::logic_error("CsvWriter row has " + std::to_string(cell_) + " cells, expected " +
                               std::to_string(columns_));
    out_ << '\n';
    cell_ = 0;
}

}  // namespace decolab
