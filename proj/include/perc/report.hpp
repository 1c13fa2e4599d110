#pragma once

#include <string>
#include <vector>

namespace perc {

// Deterministic CSV output: first line "format,<tag>", then the column
// header, then the rows. Doubles are printed with %.17g so identical values
// produce identical bytes.
struct CsvTable {
    std::string format_tag;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

std::string render_csv(const CsvTable& table);
void write_text_file(const std::string& path, const std::string& contents);

std::string fmt_double(double value);
std::string fmt_int(std::int64_t value);

}  // namespace perc
