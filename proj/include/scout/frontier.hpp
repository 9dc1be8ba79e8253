#pragma once
// Occupancy mapping and frontier extraction. The agent's map records what
// has been seen: cells move from unknown to free/occupied once, with one
// revision allowed — a surface believed open that contact disproves gets
// re-marked occupied by its owner. Frontiers are known-free cells touching
// the unknown, clustered with DBSCAN on cell-center distance.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "world.hpp"

namespace scout {

enum class OccState : std::uint8_t { Unknown, Free, Occupied };

struct DimensionMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OccupancyMap {
    int width = 0;
    int height = 0;
    double resolution = 0.05;
    std::vector<OccState> grid;

    OccupancyMap() = default;
    OccupancyMap(int w, int h, double res)
        : width(w), height(h), resolution(res),
          grid(static_cast<std::size_t>(w) * h, OccState::Unknown) {}

    bool in_bounds(Cell c) const {
        return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height;
    }
    std::size_t index(Cell c) const {
        return static_cast<std::size_t>(c.y) * width + c.x;
    }
    OccState at(Cell c) const { return in_bounds(c) ? grid[index(c)] : OccState::Occupied; }

    // Debug rendering: '?', '.', '#' per cell.
    std::string dump() const {
        std::string out;
        out.reserve(grid.size() + height);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                OccState s = grid[index({x, y})];
                out += s == OccState::Unknown ? '?' : (s == OccState::Free ? '.' : '#');
            }
            out += '\n';
        }
        return out;
    }
};

// Marks seen traversable cells free and seen obstructions occupied; returns
// the cells that left the unknown state, in the order encountered. Knowledge
// is monotone: a known cell never changes state again.
inline std::vector<Cell> update_occupancy(OccupancyMap& map, const Observation& obs) {
    std::vector<Cell> changed;
    auto apply = [&](const std::vector<Cell>& cells, OccState s) {
        for (Cell c : cells) {
            if (!map.in_bounds(c))
                throw DimensionMismatchError("observation cell outside occupancy map");
            OccState& cur = map.grid[map.index(c)];
            if (cur == OccState::Unknown) {
                cur = s;
                changed.push_back(c);
            }
        }
    };
    apply(obs.visible_cells, OccState::Free);
    apply(obs.visible_blocked, OccState::Occupied);
    return changed;
}

// Exactly the known-free cells with at least one unknown 4-neighbor,
// in (y, x) order. Cells beyond the map edge are not unknown.
inline std::vector<Cell> detect_frontiers(const OccupancyMap& map) {
    std::vector<Cell> out;
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            Cell c{x, y};
            if (map.grid[map.index(c)] != OccState::Free) continue;
            for (Cell n : neighbors4(c)) {
                if (map.in_bounds(n) && map.grid[map.index(n)] == OccState::Unknown) {
                    out.push_back(c);
                    break;
                }
            }
        }
    }
    return out;
}

struct Frontier {
    int id = -1;
    Vec2 centroid;                 // meters
    std::vector<Cell> member_cells; // (y, x) sorted
    int created_step = 0;
};

// DBSCAN over cell centers, Euclidean metric, radius inclusive, min_samples
// counting the point itself. Border points join the cluster of their (y, x)
// smallest core neighbor, which makes the partition independent of input
// order. Noise is dropped. Output clusters are ordered by centroid (y, x).
inline std::vector<Frontier> cluster_frontiers(const std::vector<Cell>& cells_in,
                                               double eps, int min_samples,
                                               double resolution, int created_step = 0) {
    std::vector<Cell> pts = cells_in;
    std::sort(pts.begin(), pts.end(), CellLess{});
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const int n = static_cast<int>(pts.size());
    if (n == 0) return {};

    // Bucket grid at eps granularity in cell units for neighbor lookups.
    const double eps_cells = eps / resolution;
    const int bucket = std::max(1, static_cast<int>(eps_cells) + 1);
    struct BucketKey {
        int bx, by;
        bool operator<(const BucketKey& o) const {
            if (by != o.by) return by < o.by;
            return bx < o.bx;
        }
    };
    std::vector<std::pair<BucketKey, int>> buckets(n);
    auto key_of = [&](Cell c) {
        auto div = [](int v, int b) { return v >= 0 ? v / b : -((-v + b - 1) / b); };
        return BucketKey{div(c.x, bucket), div(c.y, bucket)};
    };
    for (int i = 0; i < n; ++i) buckets[i] = {key_of(pts[i]), i};
    std::sort(buckets.begin(), buckets.end(),
              [](const auto& a, const auto& b) { return a.first < b.first || (!(b.first < a.first) && a.second < b.second); });

    auto neighbors_of = [&](int i) {
        std::vector<int> out;
        BucketKey k = key_of(pts[i]);
        const double eps2 = eps_cells * eps_cells;
        for (int by = k.by - 1; by <= k.by + 1; ++by) {
            for (int bx = k.bx - 1; bx <= k.bx + 1; ++bx) {
                BucketKey probe{bx, by};
                auto lo = std::lower_bound(buckets.begin(), buckets.end(), probe,
                                           [](const auto& a, const BucketKey& b) { return a.first < b; });
                for (auto it = lo; it != buckets.end() && !(probe < it->first); ++it) {
                    int j = it->second;
                    double dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y;
                    if (dx * dx + dy * dy <= eps2 + 1e-9) out.push_back(j);
                }
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    };

    std::vector<std::vector<int>> nbr(n);
    std::vector<char> core(n, 0);
    for (int i = 0; i < n; ++i) {
        nbr[i] = neighbors_of(i);
        core[i] = static_cast<int>(nbr[i].size()) >= min_samples;
    }

    std::vector<int> label(n, -1);
    int next = 0;
    for (int i = 0; i < n; ++i) {
        if (!core[i] || label[i] >= 0) continue;
        label[i] = next;
        std::vector<int> stack{i};
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : nbr[u]) {
                if (!core[v] || label[v] >= 0) continue;
                label[v] = next;
                stack.push_back(v);
            }
        }
        ++next;
    }
    for (int i = 0; i < n; ++i) {
        if (core[i]) continue;
        for (int v : nbr[i]) { // nbr sorted by index == (y, x) order of pts
            if (core[v]) {
                label[i] = label[v];
                break;
            }
        }
    }

    std::vector<Frontier> clusters(next);
    for (int i = 0; i < n; ++i)
        if (label[i] >= 0) clusters[label[i]].member_cells.push_back(pts[i]);
    for (Frontier& f : clusters) {
        double sx = 0, sy = 0;
        for (Cell c : f.member_cells) {
            Vec2 ctr = cell_center(c, resolution);
            sx += ctr.x;
            sy += ctr.y;
        }
        f.centroid = {sx / f.member_cells.size(), sy / f.member_cells.size()};
        f.created_step = created_step;
    }
    std::sort(clusters.begin(), clusters.end(), [](const Frontier& a, const Frontier& b) {
        if (a.centroid.y != b.centroid.y) return a.centroid.y < b.centroid.y;
        return a.centroid.x < b.centroid.x;
    });
    for (int i = 0; i < next; ++i) clusters[i].id = i;
    return clusters;
}

} // namespace scout
