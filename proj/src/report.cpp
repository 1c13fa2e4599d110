#include "perc/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace perc {

std::string render_csv(const CsvTable& table) {
    std::string out = "format," + table.format_tag + "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        out += table.columns[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size()) throw std::logic_error("csv row width mismatch");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file " + path);
    out << contents;
    if (!out) throw std::runtime_error("failed writing output file " + path);
}

std::string fmt_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string fmt_int(std::int64_t value) { return std::to_string(value); }

}  // namespace perc
