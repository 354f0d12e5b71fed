#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace georing {

/// Raw samples of one quantity; cumulative views are derived on demand.
struct MetricSeries {
    std::string name;
    std::vector<double> values;

    struct Point {
        double value;
        double cumulative;
    };

    /// Distinct sorted values with P(X <= v). Last cumulative value is exactly 1.
    std::vector<Point> cdf() const;
    /// Distinct sorted values with P(X >= v). First value is exactly 1.
    std::vector<Point> ccdf() const;

    /// Fraction of samples <= limit (0 for an empty series).
    double fraction_at_most(double limit) const;
    double mean() const;
    double max() const;
};

/// RFC-4180 field quoting (only when needed).
std::string csv_field(const std::string& s);
/// Shortest decimal form that round-trips through strtod ("%.17g" fallback).
std::string format_double(double v);

void write_cdf_csv(std::ostream& os, const std::vector<MetricSeries::Point>& pts, const std::string& value_header,
                   const std::string& cum_header);

struct ReferenceLine {
    double x;
    std::string label;
};

struct PlotSeries {
    std::string label;
    std::vector<MetricSeries::Point> points;
    std::string color;
};

/// Step plot of cumulative curves with vertical reference lines.
void write_cumulative_svg(std::ostream& os, const std::string& title, const std::string& xlabel,
                          const std::vector<PlotSeries>& series, const std::vector<ReferenceLine>& refs,
                          bool log_y);

/// Writes text to `path`, creating parent directories. Throws std::runtime_error
/// when the file cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace georing
