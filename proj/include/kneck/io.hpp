#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace kneck {

inline constexpr const char* tool_name = "kneck";
inline constexpr const char* tool_version = "1.0.0";

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

// Fixed %.12e formatting, locale independent.
std::string fmt(double v);

// Writes to path.tmp then renames over path; creates parent directories.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    void add_comment(const std::string& line);
    void add_row(const std::vector<std::string>& cells);

    // Comment lines first, each prefixed by "# ".
    std::string str() const;

private:
    std::vector<std::string> columns_;
    std::vector<std::string> comments_;
    std::vector<std::vector<std::string>> rows_;
};

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// Line plot with axes; one polyline per series.
std::string svg_line_plot(const std::vector<Series>& series, const std::string& title, const std::string& x_label,
                          const std::string& y_label);

// Flat key=value file with '#' comments. Throws ConfigError with the line number on malformed lines.
std::map<std::string, std::string> parse_key_value(const std::string& text);

std::vector<double> parse_real_list(const std::string& text);

} // namespace kneck
