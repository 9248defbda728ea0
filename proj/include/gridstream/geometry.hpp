// geometry.hpp — planar grid partition of a bounded region.
//
// The region [min_lon, max_lon] x [min_lat, max_lat] is divided into
// equal-sized cells. Cells are half-open [lo, hi) on both axes, except the
// region's global max edges, which clamp into the last row/column, so every
// in-bounds point maps to exactly one cell. All distances are planar
// Euclidean in coordinate units.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace gridstream {

using CellId = std::uint64_t;

struct Point {
    double lon = 0.0;
    double lat = 0.0;
};

// Closed rectangle [min_lon, max_lon] x [min_lat, max_lat].
struct Rect {
    double min_lon = 0.0;
    double min_lat = 0.0;
    double max_lon = 0.0;
    double max_lat = 0.0;

    bool contains(Point p) const {
        return p.lon >= min_lon && p.lon <= max_lon && p.lat >= min_lat && p.lat <= max_lat;
    }
    double width() const { return max_lon - min_lon; }
    double height() const { return max_lat - min_lat; }
    double area() const { return width() * height(); }
};

inline double distance(Point a, Point b) {
    const double dx = a.lon - b.lon;
    const double dy = a.lat - b.lat;
    return std::sqrt(dx * dx + dy * dy);
}

// Distance from p to the nearest point of r (0 if p is inside r).
inline double min_distance(Point p, const Rect& r) {
    const double cx = std::clamp(p.lon, r.min_lon, r.max_lon);
    const double cy = std::clamp(p.lat, r.min_lat, r.max_lat);
    return distance(p, Point{cx, cy});
}

// Distance from p to the farthest point of r (always a corner).
inline double max_distance(Point p, const Rect& r) {
    const double dx = std::max(std::abs(p.lon - r.min_lon), std::abs(p.lon - r.max_lon));
    const double dy = std::max(std::abs(p.lat - r.min_lat), std::abs(p.lat - r.max_lat));
    return std::sqrt(dx * dx + dy * dy);
}

struct GridConfig {
    double min_lon = 0.0;
    double min_lat = 0.0;
    double max_lon = 0.0;
    double max_lat = 0.0;
    double cell_width = 0.0;
    double cell_height = 0.0;
    std::uint32_t n_cols = 0;
    std::uint32_t n_rows = 0;

    static GridConfig make(double min_lon, double min_lat, double max_lon, double max_lat,
                           double cell_width, double cell_height) {
        if (!(max_lon > min_lon) || !(max_lat > min_lat))
            throw std::invalid_argument("grid: region must have positive extent");
        if (!(cell_width > 0.0) || !(cell_height > 0.0))
            throw std::invalid_argument("grid: cell dimensions must be positive");
        GridConfig g;
        g.min_lon = min_lon;
        g.min_lat = min_lat;
        g.max_lon = max_lon;
        g.max_lat = max_lat;
        g.cell_width = cell_width;
        g.cell_height = cell_height;
        const double cols = std::ceil((max_lon - min_lon) / cell_width);
        const double rows = std::ceil((max_lat - min_lat) / cell_height);
        if (cols * rows > static_cast<double>(std::numeric_limits<std::uint32_t>::max()))
            throw std::invalid_argument("grid: too many cells");
        g.n_cols = static_cast<std::uint32_t>(cols);
        g.n_rows = static_cast<std::uint32_t>(rows);
        return g;
    }

    std::uint64_t n_cells() const { return std::uint64_t{n_cols} * n_rows; }

    Rect region() const { return Rect{min_lon, min_lat, max_lon, max_lat}; }

    bool in_region(Point p) const { return region().contains(p); }

    std::uint32_t col_of(double lon) const {
        const auto c = static_cast<std::int64_t>(std::floor((lon - min_lon) / cell_width));
        return static_cast<std::uint32_t>(std::clamp<std::int64_t>(c, 0, n_cols - 1));
    }
    std::uint32_t row_of(double lat) const {
        const auto r = static_cast<std::int64_t>(std::floor((lat - min_lat) / cell_height));
        return static_cast<std::uint32_t>(std::clamp<std::int64_t>(r, 0, n_rows - 1));
    }

    CellId cell_id(std::uint32_t row, std::uint32_t col) const {
        return std::uint64_t{row} * n_cols + col;
    }
    std::uint32_t row_of_cell(CellId c) const { return static_cast<std::uint32_t>(c / n_cols); }
    std::uint32_t col_of_cell(CellId c) const { return static_cast<std::uint32_t>(c % n_cols); }

    // O(1) arithmetic lookup; no structures consulted. Throws on out-of-bounds.
    CellId cell_of(Point p) const {
        if (!in_region(p))
            throw std::range_error("cell_of: point outside region");
        return cell_id(row_of(p.lat), col_of(p.lon));
    }

    // Cell extent clipped to the region (last row/column may be partial).
    Rect cell_bounds(CellId c) const {
        const std::uint32_t row = row_of_cell(c);
        const std::uint32_t col = col_of_cell(c);
        Rect r;
        r.min_lon = min_lon + col * cell_width;
        r.min_lat = min_lat + row * cell_height;
        r.max_lon = std::min(r.min_lon + cell_width, max_lon);
        r.max_lat = std::min(r.min_lat + cell_height, max_lat);
        return r;
    }

    // Intersection of r with the region; nullopt when disjoint.
    std::optional<Rect> clamp_rect(const Rect& r) const {
        Rect c;
        c.min_lon = std::max(r.min_lon, min_lon);
        c.min_lat = std::max(r.min_lat, min_lat);
        c.max_lon = std::min(r.max_lon, max_lon);
        c.max_lat = std::min(r.max_lat, max_lat);
        if (c.min_lon > c.max_lon || c.min_lat > c.max_lat)
            return std::nullopt;
        return c;
    }
};

// Closed-interval overlap: cells sharing only an edge or corner with `rect`
// count as intersecting. `rect` must already be clamped to the region.
// Returns sorted cell ids.
inline std::vector<CellId> cells_intersecting_rect(const Rect& rect, const GridConfig& g) {
    std::vector<CellId> out;
    const std::int64_t col_lo = std::max<std::int64_t>(0, g.col_of(rect.min_lon) - 1);
    const std::int64_t col_hi = std::min<std::int64_t>(g.n_cols - 1, g.col_of(rect.max_lon) + 1);
    const std::int64_t row_lo = std::max<std::int64_t>(0, g.row_of(rect.min_lat) - 1);
    const std::int64_t row_hi = std::min<std::int64_t>(g.n_rows - 1, g.row_of(rect.max_lat) + 1);
    for (std::int64_t row = row_lo; row <= row_hi; ++row) {
        for (std::int64_t col = col_lo; col <= col_hi; ++col) {
            const CellId c = g.cell_id(static_cast<std::uint32_t>(row), static_cast<std::uint32_t>(col));
            const Rect b = g.cell_bounds(c);
            if (b.min_lon <= rect.max_lon && rect.min_lon <= b.max_lon &&
                b.min_lat <= rect.max_lat && rect.min_lat <= b.max_lat)
                out.push_back(c);
        }
    }
    return out;
}

// Cells whose minimum distance to `center` is <= radius. Sorted cell ids.
inline std::vector<CellId> cells_intersecting_circle(Point center, double radius, const GridConfig& g) {
    if (radius < 0.0)
        throw std::invalid_argument("cells_intersecting_circle: negative radius");
    std::vector<CellId> out;
    const std::int64_t col_lo = std::max<std::int64_t>(0, g.col_of(std::max(center.lon - radius, g.min_lon)) - 1);
    const std::int64_t col_hi = std::min<std::int64_t>(g.n_cols - 1, g.col_of(std::min(center.lon + radius, g.max_lon)) + 1);
    const std::int64_t row_lo = std::max<std::int64_t>(0, g.row_of(std::max(center.lat - radius, g.min_lat)) - 1);
    const std::int64_t row_hi = std::min<std::int64_t>(g.n_rows - 1, g.row_of(std::min(center.lat + radius, g.max_lat)) + 1);
    for (std::int64_t row = row_lo; row <= row_hi; ++row) {
        for (std::int64_t col = col_lo; col <= col_hi; ++col) {
            const CellId c = g.cell_id(static_cast<std::uint32_t>(row), static_cast<std::uint32_t>(col));
            if (min_distance(center, g.cell_bounds(c)) <= radius)
                out.push_back(c);
        }
    }
    return out;
}

// Cells at Chebyshev ring index `ring` around `center_cell`, clipped to the
// grid. ring 0 is the cell itself. Sorted cell ids.
inline std::vector<CellId> chebyshev_ring(CellId center_cell, std::uint32_t ring, const GridConfig& g) {
    const std::int64_t r0 = g.row_of_cell(center_cell);
    const std::int64_t c0 = g.col_of_cell(center_cell);
    std::vector<CellId> out;
    if (ring == 0) {
        out.push_back(center_cell);
        return out;
    }
    const std::int64_t d = ring;
    auto add = [&](std::int64_t row, std::int64_t col) {
        if (row < 0 || col < 0 || row >= g.n_rows || col >= g.n_cols)
            return;
        out.push_back(g.cell_id(static_cast<std::uint32_t>(row), static_cast<std::uint32_t>(col)));
    };
    for (std::int64_t col = c0 - d; col <= c0 + d; ++col) {
        add(r0 - d, col);
        add(r0 + d, col);
    }
    for (std::int64_t row = r0 - d + 1; row <= r0 + d - 1; ++row) {
        add(row, c0 - d);
        add(row, c0 + d);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace gridstream
