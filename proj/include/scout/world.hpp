#pragma once
// Procedural grid apartments. A world is a binary-split floor plan of
// rectangular rooms joined by one door per shared wall, furnished from the
// taxonomy, with a fraction of interior-facing wall cells replaced by
// illusion surfaces (mirrors and glass). Worlds are immutable after
// generation and safe to share across threads.

#include <algorithm>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "rng.hpp"
#include "taxonomy.hpp"

namespace scout {

enum class CellKind : std::uint8_t { Free, Wall, Door, Illusion };
enum class IllusionKind : std::uint8_t { Mirror, Glass };

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnreachableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IllusionSpec {
    Cell cell;
    IllusionKind kind = IllusionKind::Mirror;
    int referenced_region = -1; // what the surface appears to show
    int faced_region = -1;      // region of the free cell it fronts
};

struct ObjectInstance {
    int object = -1;
    Cell cell;
    int region = -1;
};

struct Region {
    int id = -1;
    int category = -1;
    std::vector<Cell> cells;
    Vec2 centroid;
    std::vector<int> objects; // indices into World::objects
    std::vector<double> embedding;
};

// heading is one of 8 compass directions, 0 = +x, counterclockwise.
struct Pose {
    Vec2 position;
    int heading = 0;
};

inline Vec2 heading_vec(int h) {
    static const Vec2 dirs[8] = {{1, 0},  {1, 1},  {0, 1},  {-1, 1},
                                 {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
    return dirs[((h % 8) + 8) % 8];
}

struct WorldConfig {
    int width = 96;
    int height = 96;
    double resolution = 0.05;
    int min_rooms = 4;
    int max_rooms = 6;
    int min_room_side = 16;                   // cells of clear interior per room side
    double illusion_density = 0.3;            // fraction of eligible wall cells
    double mirror_fraction = 38.0 / 67.0;     // mirrors vs glass, from the error mix
    double door_margin = 1.5;                 // meters; panes keep clear of doorways
    friend bool operator==(const WorldConfig&, const WorldConfig&) = default;
};

struct World {
    int width = 0;
    int height = 0;
    double resolution = 0.05;
    std::uint64_t seed = 0;
    std::vector<CellKind> grid;     // row-major, y * width + x
    std::vector<int> region_of;     // region id per cell, -1 outside rooms
    std::vector<int> illusion_of;   // index into illusions per cell, -1 otherwise
    std::vector<Region> regions;
    std::vector<ObjectInstance> objects;
    std::vector<IllusionSpec> illusions;

    bool in_bounds(Cell c) const {
        return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height;
    }
    std::size_t index(Cell c) const {
        return static_cast<std::size_t>(c.y) * width + c.x;
    }
    CellKind at(Cell c) const { return in_bounds(c) ? grid[index(c)] : CellKind::Wall; }
    int region_at(Cell c) const { return in_bounds(c) ? region_of[index(c)] : -1; }
    int illusion_at(Cell c) const { return in_bounds(c) ? illusion_of[index(c)] : -1; }

    bool traversable(Cell c) const {
        CellKind k = at(c);
        return k == CellKind::Free || k == CellKind::Door;
    }
    // Mirrors and glass both stop sight; what they report is another
    // matter: perception reads them as open space until contact says
    // otherwise.
    bool opaque(Cell c) const {
        CellKind k = at(c);
        return k == CellKind::Wall || k == CellKind::Illusion;
    }
};

inline bool sees(const World& w, Cell a, Cell b) {
    return line_of_sight(a, b, [&](Cell c) { return w.opaque(c); });
}

// First opaque cell along a ray, within a cell extent budget. `hit` is false
// when the ray leaves the grid or exceeds the budget first.
struct RayHit {
    bool hit = false;
    Cell cell;
};

inline RayHit cast_ray(const World& w, Cell origin, Vec2 dir, int max_cells) {
    RayHit r;
    walk_ray(origin, dir, max_cells, [&](Cell c) {
        if (!w.in_bounds(c)) return false;
        if (cell_distance(origin, c) > static_cast<double>(max_cells) + 0.5) return false;
        if (w.opaque(c)) {
            r.hit = true;
            r.cell = c;
            return false;
        }
        return true;
    });
    return r;
}

// ---------------------------------------------------------------------------
// Perception

struct SeenObject {
    int object = -1;
    Vec2 position;
    friend bool operator==(const SeenObject&, const SeenObject&) = default;
};

// An illusion surface in view: it reads as an opening into the region its
// scene shows, and nothing in the percept marks it as solid.
struct PhantomOpening {
    Cell cell;
    int shown_region = -1;
    friend bool operator==(const PhantomOpening&, const PhantomOpening&) = default;
};

// True when the viewer looks at the pane's front — the side whose floor it
// dresses up. The surfaces are one-way: from behind, a mirror is a dull
// panel and glass is backed film — plain wall either way.
inline bool faces_front(const World& w, const IllusionSpec& il, Cell viewer) {
    for (Cell nb : neighbors4(il.cell)) {
        if (!w.in_bounds(nb) || w.grid[w.index(nb)] != CellKind::Free) continue;
        if (w.region_of[w.index(nb)] != il.faced_region) continue;
        Cell back{2 * il.cell.x - nb.x, 2 * il.cell.y - nb.y};
        double fx = viewer.x - nb.x, fy = viewer.y - nb.y;
        double bx = viewer.x - back.x, by = viewer.y - back.y;
        return fx * fx + fy * fy <= bx * bx + by * by;
    }
    return false;
}

struct Observation {
    std::vector<Cell> visible_cells;       // traversable cells seen, (y, x) sorted
    std::vector<Cell> visible_blocked;     // wall cells seen
    std::vector<PhantomOpening> phantom_open;  // illusion surfaces seen
    std::vector<SeenObject> visible_objects;
    int region_category = -1;              // possibly fooled by an illusion
    std::vector<int> local_objects;        // object ids within r_context
    std::vector<double> embedding;         // of the perceived region
    Pose pose;
    int true_region = -1;                  // region the agent stands in
    int perceived_region = -1;             // region the percept claims
    bool mirror_fooled = false;
};

// Ray casting from the pose cell: a cell is visible when the open segment of
// sight to it crosses no opaque interior. Illusion surfaces in view are
// reported as apparent openings showing their referenced region rather than
// as barriers. If the heading sight line ends on an illusion within range,
// the reported region semantics come from the referenced region; a mirror
// additionally shows that region's objects at positions reflected through
// the mirror cell, never their true locations.
inline Observation perceive(const World& w, Pose pose, double range_m,
                            double r_context = 3.0) {
    Observation obs;
    obs.pose = pose;
    const Cell pc = point_cell(pose.position, w.resolution);
    const int rc = static_cast<int>(range_m / w.resolution + 1e-9);
    obs.true_region = w.region_at(pc);

    std::vector<char> vis_mask(w.grid.size(), 0);
    for (int y = pc.y - rc; y <= pc.y + rc; ++y) {
        for (int x = pc.x - rc; x <= pc.x + rc; ++x) {
            Cell c{x, y};
            if (!w.in_bounds(c)) continue;
            double dx = c.x - pc.x, dy = c.y - pc.y;
            if (dx * dx + dy * dy > static_cast<double>(rc) * rc) continue;
            if (!sees(w, pc, c)) continue;
            if (w.traversable(c)) {
                obs.visible_cells.push_back(c);
            } else if (int il = w.illusion_at(c);
                       il >= 0 && faces_front(w, w.illusions[il], pc)) {
                obs.phantom_open.push_back({c, w.illusions[il].referenced_region});
            } else {
                obs.visible_blocked.push_back(c);
            }
            vis_mask[w.index(c)] = 1;
        }
    }

    for (const ObjectInstance& oi : w.objects) {
        if (!vis_mask[w.index(oi.cell)]) continue;
        obs.visible_objects.push_back({oi.object, cell_center(oi.cell, w.resolution)});
    }

    int perceived = obs.true_region;
    RayHit hit = cast_ray(w, pc, heading_vec(pose.heading), rc);
    if (hit.hit && w.illusion_at(hit.cell) >= 0 &&
        faces_front(w, w.illusions[w.illusion_at(hit.cell)], pc)) {
        const IllusionSpec& il = w.illusions[w.illusion_at(hit.cell)];
        perceived = il.referenced_region;
        if (il.kind == IllusionKind::Mirror) {
            obs.mirror_fooled = true;
            const Vec2 m = cell_center(il.cell, w.resolution);
            for (int oidx : w.regions[il.referenced_region].objects) {
                const ObjectInstance& oi = w.objects[oidx];
                Vec2 true_pos = cell_center(oi.cell, w.resolution);
                obs.visible_objects.push_back({oi.object, m * 2.0 - true_pos});
            }
        }
    }
    obs.perceived_region = perceived;
    if (perceived >= 0) {
        obs.region_category = w.regions[perceived].category;
        obs.embedding = w.regions[perceived].embedding;
    }

    for (const SeenObject& so : obs.visible_objects)
        if (distance(so.position, pose.position) <= r_context)
            obs.local_objects.push_back(so.object);
    std::sort(obs.local_objects.begin(), obs.local_objects.end());
    obs.local_objects.erase(std::unique(obs.local_objects.begin(), obs.local_objects.end()),
                            obs.local_objects.end());
    return obs;
}

// ---------------------------------------------------------------------------
// Distance

// Moves from `from` to every traversable cell, -1 where unreachable.
inline std::vector<int> distance_field(const World& w, Cell from) {
    std::vector<int> dist(w.grid.size(), -1);
    if (!w.in_bounds(from) || !w.traversable(from)) return dist;
    std::queue<Cell> q;
    dist[w.index(from)] = 0;
    q.push(from);
    while (!q.empty()) {
        Cell c = q.front();
        q.pop();
        int d = dist[w.index(c)];
        for (Cell n : neighbors4(c)) {
            if (!w.in_bounds(n) || !w.traversable(n)) continue;
            if (dist[w.index(n)] >= 0) continue;
            dist[w.index(n)] = d + 1;
            q.push(n);
        }
    }
    return dist;
}

inline double geodesic_distance(const World& w, Cell a, Cell b) {
    std::vector<int> dist = distance_field(w, a);
    if (!w.in_bounds(b) || dist[w.index(b)] < 0)
        throw UnreachableError("no traversable path between cells");
    return dist[w.index(b)] * w.resolution;
}

// ---------------------------------------------------------------------------
// Generation

namespace detail {

struct Rect {
    int x0, y0, x1, y1; // half-open
    int w() const { return x1 - x0; }
    int h() const { return y1 - y0; }
    long long area() const { return static_cast<long long>(w()) * h(); }
};

inline bool try_layout(World& w, const WorldConfig& cfg, const Taxonomy& tax, Rng& rng) {
    const int W = cfg.width, H = cfg.height;
    w.grid.assign(static_cast<std::size_t>(W) * H, CellKind::Wall);
    w.region_of.assign(w.grid.size(), -1);
    w.illusion_of.assign(w.grid.size(), -1);
    w.regions.clear();
    w.objects.clear();
    w.illusions.clear();

    const int target = static_cast<int>(rng.range(cfg.min_rooms, cfg.max_rooms));
    const int ms = cfg.min_room_side;
    std::vector<Rect> leaves{{1, 1, W - 1, H - 1}};
    while (static_cast<int>(leaves.size()) < target) {
        int pick = -1;
        long long best = -1;
        for (std::size_t i = 0; i < leaves.size(); ++i) {
            const Rect& r = leaves[i];
            if ((r.w() >= 2 * ms + 1 || r.h() >= 2 * ms + 1) && r.area() > best) {
                best = r.area();
                pick = static_cast<int>(i);
            }
        }
        if (pick < 0) return false; // cannot reach the room count
        Rect r = leaves[pick];
        bool can_v = r.w() >= 2 * ms + 1;
        bool can_h = r.h() >= 2 * ms + 1;
        bool vertical = can_v && (!can_h || r.w() >= r.h());
        leaves.erase(leaves.begin() + pick);
        if (vertical) {
            int c = static_cast<int>(rng.range(r.x0 + ms, r.x1 - ms - 1));
            leaves.push_back({r.x0, r.y0, c, r.y1});
            leaves.push_back({c + 1, r.y0, r.x1, r.y1});
        } else {
            int c = static_cast<int>(rng.range(r.y0 + ms, r.y1 - ms - 1));
            leaves.push_back({r.x0, r.y0, r.x1, c});
            leaves.push_back({r.x0, c + 1, r.x1, r.y1});
        }
    }
    std::sort(leaves.begin(), leaves.end(), [](const Rect& a, const Rect& b) {
        if (a.y0 != b.y0) return a.y0 < b.y0;
        return a.x0 < b.x0;
    });

    const int R = static_cast<int>(leaves.size());
    for (int id = 0; id < R; ++id) {
        const Rect& r = leaves[id];
        Region reg;
        reg.id = id;
        double sx = 0, sy = 0;
        for (int y = r.y0; y < r.y1; ++y) {
            for (int x = r.x0; x < r.x1; ++x) {
                Cell c{x, y};
                w.grid[w.index(c)] = CellKind::Free;
                w.region_of[w.index(c)] = id;
                reg.cells.push_back(c);
                Vec2 ctr = cell_center(c, cfg.resolution);
                sx += ctr.x;
                sy += ctr.y;
            }
        }
        reg.centroid = {sx / reg.cells.size(), sy / reg.cells.size()};
        w.regions.push_back(std::move(reg));
    }

    // One door per adjacent leaf pair. Adjacent means separated by exactly
    // the one-cell wall line a split created, with overlapping extent.
    for (int i = 0; i < R; ++i) {
        for (int j = i + 1; j < R; ++j) {
            const Rect &a = leaves[i], &b = leaves[j];
            if (a.x1 + 1 == b.x0 || b.x1 + 1 == a.x0) {
                int wallx = (a.x1 + 1 == b.x0) ? a.x1 : b.x1;
                int lo = std::max(a.y0, b.y0), hi = std::min(a.y1, b.y1);
                if (lo < hi) {
                    int y = static_cast<int>(rng.range(lo, hi - 1));
                    w.grid[w.index({wallx, y})] = CellKind::Door;
                }
            } else if (a.y1 + 1 == b.y0 || b.y1 + 1 == a.y0) {
                int wally = (a.y1 + 1 == b.y0) ? a.y1 : b.y1;
                int lo = std::max(a.x0, b.x0), hi = std::min(a.x1, b.x1);
                if (lo < hi) {
                    int x = static_cast<int>(rng.range(lo, hi - 1));
                    w.grid[w.index({x, wally})] = CellKind::Door;
                }
            }
        }
    }

    // Categories: a deterministic shuffle, distinct per region.
    std::vector<int> cats(tax.categories.size());
    for (std::size_t i = 0; i < cats.size(); ++i) cats[i] = static_cast<int>(i);
    for (std::size_t i = cats.size() - 1; i > 0; --i)
        std::swap(cats[i], cats[rng.below(i + 1)]);
    if (R > static_cast<int>(cats.size())) return false;

    for (int id = 0; id < R; ++id) {
        Region& reg = w.regions[id];
        reg.category = cats[id];
        std::vector<int> chosen = tax.top_objects(reg.category, 3);
        for (int o = 0; o < tax.num_objects(); ++o) {
            if (std::find(chosen.begin(), chosen.end(), o) != chosen.end()) continue;
            double p = tax.co_occ[o][reg.category];
            if (p >= 0.3 && rng.chance(p)) chosen.push_back(o);
        }
        std::vector<char> taken(reg.cells.size(), 0);
        for (int o : chosen) {
            std::size_t at = 0;
            for (int tries = 0; tries < 64; ++tries) {
                at = rng.below(reg.cells.size());
                if (!taken[at]) break;
            }
            taken[at] = 1;
            int oidx = static_cast<int>(w.objects.size());
            w.objects.push_back({o, reg.cells[at], id});
            reg.objects.push_back(oidx);
        }
        std::vector<int> names;
        for (int oidx : reg.objects) names.push_back(w.objects[oidx].object);
        reg.embedding = make_region_embedding(tax, reg.category, names);
    }

    // Illusions replace eligible wall cells: interior-facing stretches of
    // blank wall, clear of doorways — a doorframe is unmistakably a door,
    // so panes live mid-wall. They come as panes of up to three contiguous
    // cells grown along the wall from a seed, all showing the same scene;
    // the density budget counts cells, not panes.
    if (R >= 2 && cfg.illusion_density > 0.0) {
        std::vector<Cell> doors;
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x)
                if (w.grid[w.index({x, y})] == CellKind::Door) doors.push_back({x, y});
        std::vector<Cell> eligible;
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                Cell c{x, y};
                if (w.grid[w.index(c)] != CellKind::Wall) continue;
                bool faces_free = false;
                for (Cell n : neighbors4(c)) {
                    if (w.in_bounds(n) && w.grid[w.index(n)] == CellKind::Free) {
                        faces_free = true;
                        break;
                    }
                }
                if (!faces_free) continue;
                bool clear = true;
                for (Cell d : doors) {
                    double dx = static_cast<double>(c.x - d.x);
                    double dy = static_cast<double>(c.y - d.y);
                    if (std::sqrt(dx * dx + dy * dy) * cfg.resolution < cfg.door_margin) {
                        clear = false;
                        break;
                    }
                }
                if (clear) eligible.push_back(c);
            }
        }
        std::size_t count = static_cast<std::size_t>(
            std::llround(cfg.illusion_density * static_cast<double>(eligible.size())));
        count = std::min(count, eligible.size());
        for (std::size_t i = 0; i + 1 < eligible.size(); ++i) {
            std::size_t j = i + rng.below(eligible.size() - i);
            std::swap(eligible[i], eligible[j]);
        }

        auto faced_of = [&](Cell c) {
            for (Cell n : neighbors4(c)) {
                if (w.in_bounds(n) && w.grid[w.index(n)] == CellKind::Free)
                    return w.region_of[w.index(n)];
            }
            return -1;
        };

        std::size_t placed = 0;
        for (std::size_t i = 0; i < eligible.size() && placed < count; ++i) {
            Cell seed = eligible[i];
            if (w.grid[w.index(seed)] != CellKind::Wall) continue;
            int faced = faced_of(seed);

            // The pane: the seed plus up to two wall cells along the wall
            // run that face the same room.
            std::vector<Cell> pane{seed};
            bool horiz = w.at({seed.x - 1, seed.y}) == CellKind::Wall ||
                         w.at({seed.x + 1, seed.y}) == CellKind::Wall;
            Cell dir = horiz ? Cell{1, 0} : Cell{0, 1};
            for (int s : {1, -1}) {
                Cell c{seed.x + s * dir.x, seed.y + s * dir.y};
                while (static_cast<int>(pane.size()) < 3 && w.in_bounds(c) &&
                       w.grid[w.index(c)] == CellKind::Wall && faced_of(c) == faced) {
                    pane.push_back(c);
                    c = {c.x + s * dir.x, c.y + s * dir.y};
                }
            }
            if (pane.size() > count - placed) pane.resize(count - placed);

            bool want_mirror = rng.chance(cfg.mirror_fraction);
            // Glass needs true rooms on both sides of the seed; otherwise
            // the pane degrades to a mirror.
            int through = -1;
            {
                Cell l{seed.x - 1, seed.y}, r{seed.x + 1, seed.y};
                Cell u{seed.x, seed.y - 1}, d{seed.x, seed.y + 1};
                auto reg = [&](Cell n) {
                    return (w.in_bounds(n) && w.grid[w.index(n)] == CellKind::Free)
                               ? w.region_of[w.index(n)]
                               : -1;
                };
                if (reg(l) >= 0 && reg(r) >= 0 && reg(l) != reg(r))
                    through = reg(l) == faced ? reg(r) : reg(l);
                else if (reg(u) >= 0 && reg(d) >= 0 && reg(u) != reg(d))
                    through = reg(u) == faced ? reg(d) : reg(u);
            }
            IllusionKind kind;
            int referenced;
            if (!want_mirror && through >= 0) {
                kind = IllusionKind::Glass;
                referenced = through;
            } else {
                kind = IllusionKind::Mirror;
                std::uint64_t pick = rng.below(static_cast<std::uint64_t>(R - 1));
                referenced = static_cast<int>(pick);
                if (referenced >= faced) ++referenced;
            }
            for (Cell c : pane) {
                IllusionSpec spec;
                spec.cell = c;
                spec.kind = kind;
                spec.referenced_region = referenced;
                spec.faced_region = faced;
                w.illusion_of[w.index(c)] = static_cast<int>(w.illusions.size());
                w.grid[w.index(c)] = CellKind::Illusion;
                w.illusions.push_back(spec);
                placed += 1;
            }
        }
    }
    return true;
}

} // namespace detail

// Structural checks shared by generation and scenario loading.
inline std::vector<std::string> validate_world(const World& w) {
    std::vector<std::string> issues;
    Cell first_free{-1, -1};
    std::size_t open_cells = 0;
    for (int y = 0; y < w.height; ++y) {
        for (int x = 0; x < w.width; ++x) {
            Cell c{x, y};
            CellKind k = w.grid[w.index(c)];
            if (k == CellKind::Free) {
                if (w.region_of[w.index(c)] < 0) issues.push_back("free cell without region");
                if (first_free.x < 0) first_free = c;
            } else if (w.region_of[w.index(c)] >= 0) {
                issues.push_back("non-free cell carries a region id");
            }
            if (k == CellKind::Free || k == CellKind::Door) ++open_cells;
        }
    }
    if (first_free.x >= 0) {
        std::vector<int> dist = distance_field(w, first_free);
        std::size_t reached = 0;
        for (int d : dist) reached += d >= 0;
        if (reached != open_cells) issues.push_back("free space is not connected");
    }
    for (const IllusionSpec& il : w.illusions) {
        if (il.referenced_region < 0 ||
            il.referenced_region >= static_cast<int>(w.regions.size()))
            issues.push_back("illusion references a missing region");
        else if (il.referenced_region == il.faced_region &&
                 il.kind == IllusionKind::Mirror)
            issues.push_back("mirror references the region it faces");
        if (w.at(il.cell) != CellKind::Illusion) issues.push_back("illusion cell kind mismatch");
    }
    for (const Region& r : w.regions)
        if (r.cells.empty()) issues.push_back("empty region");
    return issues;
}

inline World generate_world(const WorldConfig& cfg, std::uint64_t seed,
                            const Taxonomy& tax) {
    if (cfg.width < cfg.min_room_side + 2 || cfg.height < cfg.min_room_side + 2)
        throw GenerationError("grid too small for one room");
    if (cfg.min_rooms < 1 || cfg.max_rooms < cfg.min_rooms)
        throw GenerationError("bad room count range");
    World w;
    w.width = cfg.width;
    w.height = cfg.height;
    w.resolution = cfg.resolution;
    w.seed = seed;
    for (int attempt = 0; attempt < 32; ++attempt) {
        Rng rng(hash_key(seed, 0x776f726c64ULL, static_cast<std::uint64_t>(attempt)));
        if (!detail::try_layout(w, cfg, tax, rng)) continue;
        if (validate_world(w).empty()) return w;
    }
    throw GenerationError("world constraints unsatisfiable after bounded retries");
}

} // namespace scout
