#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "obc/certification.hpp"
#include "obc/parallel.hpp"

namespace obc {

struct BBox {
    double x0, y0, x1, y1;
};

// Labels: attractor index >= 0, -1 singular, -2 unresolved, -3 inside the
// polygon. Row-major, top row at max y, pixel centers sampled.
struct BasinRaster {
    int width = 0, height = 0;
    BBox bbox{};
    std::vector<std::int32_t> labels;

    std::int32_t at(int ix, int iy) const { return labels[static_cast<std::size_t>(iy) * width + ix]; }
};

constexpr std::int32_t kLabelSingular = -1;
constexpr std::int32_t kLabelUnresolved = -2;
constexpr std::int32_t kLabelInside = -3;

inline BasinRaster render_basins(const MapParams& params, const std::vector<PeriodicAttractor>& attractors,
                                 const BBox& bbox, int width, int height, int max_iter, double tol,
                                 int threads = 1) {
    if (attractors.empty()) throw domain_error("EmptyAttractorList", "rendering needs at least one attractor");
    BasinRaster raster;
    raster.width = width;
    raster.height = height;
    raster.bbox = bbox;
    raster.labels.assign(static_cast<std::size_t>(width) * height, kLabelUnresolved);
    const double dx = (bbox.x1 - bbox.x0) / width;
    const double dy = (bbox.y1 - bbox.y0) / height;

    parallel_for(static_cast<std::size_t>(height), threads, [&](std::size_t iy) {
        for (int ix = 0; ix < width; ++ix) {
            const Point z{bbox.x0 + (ix + 0.5) * dx, bbox.y1 - (static_cast<double>(iy) + 0.5) * dy};
            std::int32_t label;
            if (params.polygon.contains(z)) {
                label = kLabelInside;
            } else {
                const BasinAssignment res = basin_assign(params, attractors, z, max_iter, tol);
                switch (res.outcome) {
                case BasinAssignment::Outcome::Attractor: label = res.index; break;
                case BasinAssignment::Outcome::Singular: label = kLabelSingular; break;
                case BasinAssignment::Outcome::InsidePolygon: label = kLabelInside; break;
                default: label = kLabelUnresolved; break;
                }
            }
            raster.labels[iy * static_cast<std::size_t>(width) + ix] = label;
        }
    });
    return raster;
}

struct Rgb {
    std::uint8_t r, g, b;
};

using Palette = std::map<std::int32_t, Rgb>;

namespace detail {
inline Rgb hsv(double h, double s, double v) {
    const double c = v * s;
    const double hp = h / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) { r = c; g = x; }
    else if (hp < 2) { r = x; g = c; }
    else if (hp < 3) { g = c; b = x; }
    else if (hp < 4) { g = x; b = c; }
    else if (hp < 5) { r = x; b = c; }
    else { r = c; b = x; }
    const double m = v - c;
    auto q = [m](double u) { return static_cast<std::uint8_t>(std::lround(255.0 * (u + m))); };
    return {q(r), q(g), q(b)};
}
} // namespace detail

// Golden-angle hues for the attractors; fixed colors for the special labels.
inline Palette default_palette(int n_attractors) {
    Palette pal;
    pal[kLabelInside] = {0, 0, 0};
    pal[kLabelSingular] = {255, 255, 255};
    pal[kLabelUnresolved] = {80, 80, 80};
    for (int i = 0; i < n_attractors; ++i) {
        const double hue = std::fmod(i * 137.50776405003785, 360.0);
        pal[i] = detail::hsv(hue, 0.75, 0.95);
    }
    return pal;
}

// Binary PPM (P6), 8-bit RGB, rows written top to bottom.
inline void write_ppm(const BasinRaster& raster, const Palette& palette, const std::string& path) {
    for (const std::int32_t label : raster.labels)
        if (palette.find(label) == palette.end())
            throw domain_error("PaletteMissing", "no palette entry for label " + std::to_string(label));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open " + path + " for writing");
    out << "P6\n" << raster.width << " " << raster.height << "\n255\n";
    std::vector<std::uint8_t> row(static_cast<std::size_t>(raster.width) * 3);
    for (int iy = 0; iy < raster.height; ++iy) {
        for (int ix = 0; ix < raster.width; ++ix) {
            const Rgb c = palette.at(raster.at(ix, iy));
            row[static_cast<std::size_t>(ix) * 3 + 0] = c.r;
            row[static_cast<std::size_t>(ix) * 3 + 1] = c.g;
            row[static_cast<std::size_t>(ix) * 3 + 2] = c.b;
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw io_error("failed writing " + path);
}

} // namespace obc
