#pragma once
// Grid geometry and exact line-of-sight walks.
//
// Cells are unit squares: cell (x, y) spans [x, x+1) x [y, y+1) in cell
// units, center at (x+0.5, y+0.5). Sight between two cells follows the open
// segment joining their centers; a cell obstructs only if the segment passes
// through its open interior. Grazing a corner or sliding along an edge does
// not obstruct. To keep that rule exact we work in doubled integer
// coordinates where centers are odd lattice points and grid lines are even,
// so every crossing test reduces to integer comparisons.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <vector>

namespace scout {

struct Cell {
    int x = 0;
    int y = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

struct CellLess {
    // (y, x) ordering, the scan order used everywhere a cell list needs a
    // canonical sequence.
    bool operator()(const Cell& a, const Cell& b) const {
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    }
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }

inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

// Center of a cell in world meters.
inline Vec2 cell_center(Cell c, double resolution) {
    return {(c.x + 0.5) * resolution, (c.y + 0.5) * resolution};
}

// Cell containing a world point.
inline Cell point_cell(Vec2 p, double resolution) {
    return {static_cast<int>(std::floor(p.x / resolution)),
            static_cast<int>(std::floor(p.y / resolution))};
}

inline int manhattan(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

inline double cell_distance(Cell a, Cell b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

// The four axis neighbors in (y, x) scan order.
inline std::vector<Cell> neighbors4(Cell c) {
    return {{c.x, c.y - 1}, {c.x - 1, c.y}, {c.x + 1, c.y}, {c.x, c.y + 1}};
}

// Doubled-coordinate center of a cell.
inline Cell doubled_center(Cell c) { return {2 * c.x + 1, 2 * c.y + 1}; }

// Walks every cell whose open interior the open segment a..b crosses, in
// order, starting with the cell after `a`'s and ending with `b`'s own cell.
// Endpoints are doubled coordinates and must both be odd lattice points.
// The callback returns false to stop early. Crossing events are enumerated
// as exact rationals: the i-th vertical grid line is met at t = (2i-1)/|dx|
// and similarly for horizontal lines; a tie means the segment passes through
// a lattice corner and steps diagonally, which is what the open-interior
// rule demands.
template <typename Fn>
void walk_segment(Cell a2, Cell b2, Fn&& fn) {
    const long long dx = b2.x - a2.x;
    const long long dy = b2.y - a2.y;
    const long long adx = std::llabs(dx);
    const long long ady = std::llabs(dy);
    const int sx = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
    const int sy = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
    long long i = 1, j = 1;             // next vertical / horizontal crossing
    const long long nx = adx / 2, ny = ady / 2;
    int cx = (a2.x - 1) / 2, cy = (a2.y - 1) / 2;
    while (i <= nx || j <= ny) {
        bool step_x, step_y;
        if (i > nx) {
            step_x = false;
            step_y = true;
        } else if (j > ny) {
            step_x = true;
            step_y = false;
        } else {
            const long long tv = (2 * i - 1) * ady; // cross-multiplied times
            const long long th = (2 * j - 1) * adx;
            step_x = tv <= th;
            step_y = th <= tv;
        }
        if (step_x) {
            cx += sx;
            ++i;
        }
        if (step_y) {
            cy += sy;
            ++j;
        }
        if (!fn(Cell{cx, cy})) return;
    }
}

// True when no cell strictly between a and b obstructs. `blocked` is a
// predicate over cells; the endpoints themselves are never queried.
template <typename Blocked>
bool line_of_sight(Cell a, Cell b, Blocked&& blocked) {
    if (a == b) return true;
    const Cell target = b;
    bool clear = true;
    walk_segment(doubled_center(a), doubled_center(b), [&](Cell c) {
        if (c == target) return false;
        if (blocked(c)) {
            clear = false;
            return false;
        }
        return true;
    });
    return clear;
}

// Walks outward from `origin` along direction `dir` (any nonzero vector),
// visiting crossed cells in order until the callback stops it or the ray has
// covered `limit` cells of axis extent. Used for sight rays through frontier
// centroids and for heading rays. The direction is quantized to a far
// integer endpoint; with limit scaled up the angular error is negligible at
// in-grid distances.
template <typename Fn>
void walk_ray(Cell origin, Vec2 dir, int limit, Fn&& fn) {
    const double len = norm(dir);
    if (len <= 0.0) return;
    const double scale = 2.0 * 64.0 * static_cast<double>(limit) / len;
    Cell o2 = doubled_center(origin);
    Cell far{o2.x + static_cast<int>(std::lround(dir.x * scale)),
             o2.y + static_cast<int>(std::lround(dir.y * scale))};
    // Nudge the far endpoint onto an odd lattice point so the walk's parity
    // assumptions hold; a half-cell shift at 64x range is harmless.
    if ((far.x & 1) == 0) far.x += 1;
    if ((far.y & 1) == 0) far.y += 1;
    int steps = 0;
    const int max_steps = 4 * limit + 8;
    walk_segment(o2, far, [&](Cell c) {
        if (++steps > max_steps) return false;
        return fn(c);
    });
}

} // namespace scout
