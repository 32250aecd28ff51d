#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "obc/basins.hpp"
#include "obc/geometry.hpp"
#include "obc/symbolic.hpp"

namespace obc {

// Shortest decimal representation that round-trips the double exactly.
inline std::string dtos(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline ConvexPolygon unit_square() {
    return ConvexPolygon::validate({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
}

// Regular d-gon inscribed in the circle of radius `circumradius`, first
// vertex at angle `phase` (default puts a vertex on the positive y-axis).
inline ConvexPolygon regular_ngon(int d, double circumradius = 1.0, double phase = M_PI / 2.0) {
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        const double ang = phase + 2.0 * M_PI * i / d;
        pts.push_back({circumradius * std::cos(ang), circumradius * std::sin(ang)});
    }
    return ConvexPolygon::validate(std::move(pts));
}

namespace detail {
inline bool comment_or_blank(const std::string& line) {
    for (const char c : line) {
        if (c == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}
} // namespace detail

// Polygon text format: one "x y" pair per line, '#' starts a comment line.
inline ConvexPolygon read_polygon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open polygon file " + path);
    std::vector<Point> pts;
    std::string line;
    while (std::getline(in, line)) {
        if (detail::comment_or_blank(line)) continue;
        std::istringstream ls(line);
        double x, y;
        if (!(ls >> x >> y)) throw io_error("malformed polygon line '" + line + "' in " + path);
        pts.push_back({x, y});
    }
    return ConvexPolygon::validate(std::move(pts));
}

inline void write_polygon(const ConvexPolygon& poly, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path + " for writing");
    for (const Point& v : poly.vertices()) out << dtos(v.real()) << " " << dtos(v.imag()) << "\n";
}

// Palette file: lines "label r g b".
inline Palette read_palette(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open palette file " + path);
    Palette pal;
    std::string line;
    while (std::getline(in, line)) {
        if (detail::comment_or_blank(line)) continue;
        std::istringstream ls(line);
        long label;
        int r, g, b;
        if (!(ls >> label >> r >> g >> b)) throw io_error("malformed palette line '" + line + "' in " + path);
        pal[static_cast<std::int32_t>(label)] = {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                                                 static_cast<std::uint8_t>(b)};
    }
    return pal;
}

// Polynomial file: one coefficient per line, constant term first.
inline std::vector<double> read_coefficients(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open coefficient file " + path);
    std::vector<double> cs;
    std::string line;
    while (std::getline(in, line)) {
        if (detail::comment_or_blank(line)) continue;
        std::istringstream ls(line);
        double c;
        if (!(ls >> c)) throw io_error("malformed coefficient line '" + line + "' in " + path);
        cs.push_back(c);
    }
    if (cs.empty()) throw io_error("no coefficients in " + path);
    return cs;
}

// Line drawing of singular segments (and the polygon outline) as SVG. The
// y-axis is flipped so the drawing matches plane coordinates.
inline void write_singular_svg(const std::vector<SingularSegment>& segments, const ConvexPolygon& poly,
                               double half_extent, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path + " for writing");
    const double w = 2.0 * half_extent;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << dtos(-half_extent) << " " << dtos(-half_extent)
        << " " << dtos(w) << " " << dtos(w) << "\">\n";
    out << "<g transform=\"scale(1,-1)\" stroke-width=\"" << dtos(w / 1200.0) << "\" fill=\"none\">\n";
    out << "<polygon stroke=\"#d03030\" points=\"";
    for (std::size_t i = 0; i < poly.size(); ++i) {
        if (i) out << " ";
        out << dtos(poly.vertices()[i].real()) << "," << dtos(poly.vertices()[i].imag());
    }
    out << "\"/>\n";
    for (const SingularSegment& s : segments)
        out << "<line stroke=\"#202020\" x1=\"" << dtos(s.a.real()) << "\" y1=\"" << dtos(s.a.imag()) << "\" x2=\""
            << dtos(s.b.real()) << "\" y2=\"" << dtos(s.b.imag()) << "\"/>\n";
    out << "</g>\n</svg>\n";
    if (!out) throw io_error("failed writing " + path);
}

} // namespace obc
