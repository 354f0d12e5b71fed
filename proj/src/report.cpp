#include "georing/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace georing {

std::vector<MetricSeries::Point> MetricSeries::cdf() const
{
    std::vector<double> v = values;
    std::sort(v.begin(), v.end());
    std::vector<Point> out;
    double n = static_cast<double>(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i + 1 < v.size() && v[i + 1] == v[i])
            continue;
        out.push_back({v[i], i + 1 == v.size() ? 1.0 : static_cast<double>(i + 1) / n});
    }
    return out;
}

std::vector<MetricSeries::Point> MetricSeries::ccdf() const
{
    std::vector<double> v = values;
    std::sort(v.begin(), v.end());
    std::vector<Point> out;
    double n = static_cast<double>(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0 && v[i - 1] == v[i])
            continue;
        out.push_back({v[i], i == 0 ? 1.0 : static_cast<double>(v.size() - i) / n});
    }
    return out;
}

double MetricSeries::fraction_at_most(double limit) const
{
    if (values.empty())
        return 0.0;
    auto c = std::count_if(values.begin(), values.end(), [limit](double x) { return x <= limit; });
    return static_cast<double>(c) / static_cast<double>(values.size());
}

double MetricSeries::mean() const
{
    if (values.empty())
        return NAN;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double MetricSeries::max() const
{
    if (values.empty())
        return NAN;
    return *std::max_element(values.begin(), values.end());
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    if (res.ec != std::errc())
        return std::to_string(v);
    return std::string(buf, res.ptr);
}

void write_cdf_csv(std::ostream& os, const std::vector<MetricSeries::Point>& pts, const std::string& value_header,
                   const std::string& cum_header)
{
    os << csv_field(value_header) << ',' << csv_field(cum_header) << "\r\n";
    for (const auto& p : pts)
        os << format_double(p.value) << ',' << format_double(p.cumulative) << "\r\n";
}

namespace {

std::string esc(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

void write_cumulative_svg(std::ostream& os, const std::string& title, const std::string& xlabel,
                          const std::vector<PlotSeries>& series, const std::vector<ReferenceLine>& refs, bool log_y)
{
    const double W = 640, H = 420, L = 60, R = 20, T = 36, B = 50;
    double xmin = INFINITY, xmax = -INFINITY;
    for (const auto& s : series)
        for (const auto& p : s.points) {
            xmin = std::min(xmin, p.value);
            xmax = std::max(xmax, p.value);
        }
    for (const auto& r : refs) {
        xmin = std::min(xmin, r.x);
        xmax = std::max(xmax, r.x);
    }
    if (!std::isfinite(xmin)) {
        xmin = 0.0;
        xmax = 1.0;
    }
    if (xmax <= xmin)
        xmax = xmin + 1.0;
    const double ymin_log = -4.0;
    auto sx = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto sy = [&](double y) {
        double f = log_y ? (std::log10(std::max(y, 1e-4)) - ymin_log) / -ymin_log : y;
        return H - B - f * (H - T - B);
    };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << esc(title) << "</text>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        double xv = xmin + (xmax - xmin) * k / 4.0;
        os << "<text x=\"" << num(sx(xv)) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
           << format_double(std::round(xv * 1000.0) / 1000.0) << "</text>\n";
        double yv = log_y ? std::pow(10.0, ymin_log * (1.0 - k / 4.0)) : k / 4.0;
        os << "<text x=\"" << L - 6 << "\" y=\"" << num(sy(yv) + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
           << format_double(yv) << "</text>\n";
    }
    os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">" << esc(xlabel)
       << "</text>\n";

    for (const auto& r : refs) {
        os << "<line x1=\"" << num(sx(r.x)) << "\" y1=\"" << T << "\" x2=\"" << num(sx(r.x)) << "\" y2=\"" << H - B
           << "\" stroke=\"red\" stroke-dasharray=\"5,4\"/>\n";
        os << "<text x=\"" << num(sx(r.x) + 4) << "\" y=\"" << T + 12 << "\" font-size=\"11\" fill=\"red\">"
           << esc(r.label) << "</text>\n";
    }

    int row = 0;
    for (const auto& s : series) {
        std::ostringstream path;
        double prev = -1.0;
        bool first = true;
        for (const auto& p : s.points) {
            double x = sx(p.value), y = sy(p.cumulative);
            if (first) {
                path << "M" << num(x) << "," << num(y);
                first = false;
            } else {
                path << " L" << num(x) << "," << num(prev) << " L" << num(x) << "," << num(y);
            }
            prev = y;
        }
        const std::string color = s.color.empty() ? "blue" : s.color;
        if (!first)
            os << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
        os << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 14 + 14 * row << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
           << color << "\">" << esc(s.label) << "</text>\n";
        ++row;
    }
    os << "</svg>\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot write " + path.string());
    f << text;
    if (!f)
        throw std::runtime_error("write failed: " + path.string());
}

}  // namespace georing
