#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "switchosc/trajectory.hpp"

namespace switchosc {

// 12 significant digits, '.' decimal point, no locale.
std::string format_number(double v);
double parse_number(const std::string& s);

inline constexpr const char* kTrajectoryCsvHeader = "x,y_or_v,mode,branch,event";

struct CsvRow {
    double x = 0.0;
    double y = 0.0;
    std::string mode;
    int branch = -1;
    std::string event;
};

std::vector<CsvRow> trajectory_rows(const Trajectory& t);
std::string trajectory_csv(const Trajectory& t);
std::string rows_csv(const std::vector<CsvRow>& rows);
// Throws DomainError on a bad header or malformed line.
std::vector<CsvRow> parse_trajectory_csv(const std::string& text);

// Generic table; cells are written as given.
std::string table_csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

struct SvgSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
    std::string color = "#1f77b4";
    bool markers = false;  // circles instead of a polyline
    bool dashed = false;
};

struct SvgPlot {
    std::string title;
    std::string xlabel = "x";
    std::string ylabel = "y";
    bool log_x = false;
    bool log_y = false;
    std::vector<SvgSeries> series;
};

std::string render_svg(const SvgPlot& plot);

// One polyline per contiguous mode run; ylabel "v" when any row is a layer sample.
std::string svg_from_rows(const std::vector<CsvRow>& rows, const std::string& title);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace switchosc
