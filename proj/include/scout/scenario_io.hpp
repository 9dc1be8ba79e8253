#pragma once
// Scenario files: lossless JSON round-trip for World. Categories and objects
// are stored by name, so a file stays readable and survives vocabulary
// reordering; embeddings are recomputed on load.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "world.hpp"

namespace scout {

using ordered_json = nlohmann::ordered_json;

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kScenarioSchemaVersion = 1;

inline char cell_char(CellKind k) {
    switch (k) {
        case CellKind::Free: return '.';
        case CellKind::Wall: return '#';
        case CellKind::Door: return '+';
        case CellKind::Illusion: return 'I';
    }
    return '#';
}

inline ordered_json world_to_json(const World& w, const Taxonomy& tax) {
    ordered_json j;
    j["schema_version"] = kScenarioSchemaVersion;
    j["seed"] = w.seed;
    j["width"] = w.width;
    j["height"] = w.height;
    j["resolution"] = w.resolution;
    ordered_json rows = ordered_json::array();
    for (int y = 0; y < w.height; ++y) {
        std::string row(static_cast<std::size_t>(w.width), '#');
        for (int x = 0; x < w.width; ++x) row[x] = cell_char(w.grid[w.index({x, y})]);
        rows.push_back(row);
    }
    j["grid"] = std::move(rows);
    ordered_json regions = ordered_json::array();
    for (const Region& r : w.regions) {
        ordered_json jr;
        jr["id"] = r.id;
        jr["category"] = tax.categories.at(r.category);
        jr["centroid"] = {r.centroid.x, r.centroid.y};
        ordered_json cells = ordered_json::array();
        for (Cell c : r.cells) cells.push_back({c.x, c.y});
        jr["cells"] = std::move(cells);
        regions.push_back(std::move(jr));
    }
    j["regions"] = std::move(regions);
    ordered_json objects = ordered_json::array();
    for (const ObjectInstance& o : w.objects) {
        ordered_json jo;
        jo["object"] = tax.objects.at(o.object);
        jo["cell"] = {o.cell.x, o.cell.y};
        jo["region"] = o.region;
        objects.push_back(std::move(jo));
    }
    j["objects"] = std::move(objects);
    ordered_json illusions = ordered_json::array();
    for (const IllusionSpec& il : w.illusions) {
        ordered_json ji;
        ji["cell"] = {il.cell.x, il.cell.y};
        ji["kind"] = il.kind == IllusionKind::Mirror ? "mirror" : "glass";
        ji["referenced_region"] = il.referenced_region;
        ji["faced_region"] = il.faced_region;
        illusions.push_back(std::move(ji));
    }
    j["illusions"] = std::move(illusions);
    return j;
}

inline std::string save_world(const World& w, const Taxonomy& tax) {
    return world_to_json(w, tax).dump(1) + "\n";
}

inline World world_from_json(const ordered_json& j, const Taxonomy& tax) {
    if (!j.contains("schema_version") || j["schema_version"].get<int>() != kScenarioSchemaVersion)
        throw ScenarioError("unsupported scenario schema version");
    World w;
    w.seed = j.at("seed").get<std::uint64_t>();
    w.width = j.at("width").get<int>();
    w.height = j.at("height").get<int>();
    w.resolution = j.at("resolution").get<double>();
    if (w.width <= 0 || w.height <= 0 || w.resolution <= 0)
        throw ScenarioError("bad scenario dimensions");
    const auto& rows = j.at("grid");
    if (static_cast<int>(rows.size()) != w.height) throw ScenarioError("grid row count mismatch");
    w.grid.assign(static_cast<std::size_t>(w.width) * w.height, CellKind::Wall);
    w.region_of.assign(w.grid.size(), -1);
    w.illusion_of.assign(w.grid.size(), -1);
    for (int y = 0; y < w.height; ++y) {
        std::string row = rows[y].get<std::string>();
        if (static_cast<int>(row.size()) != w.width) throw ScenarioError("grid row width mismatch");
        for (int x = 0; x < w.width; ++x) {
            CellKind k;
            switch (row[x]) {
                case '.': k = CellKind::Free; break;
                case '#': k = CellKind::Wall; break;
                case '+': k = CellKind::Door; break;
                case 'I': k = CellKind::Illusion; break;
                default: throw ScenarioError(std::string("unknown grid char: ") + row[x]);
            }
            w.grid[w.index({x, y})] = k;
        }
    }
    for (const auto& jr : j.at("regions")) {
        Region r;
        r.id = jr.at("id").get<int>();
        r.category = tax.category_index(jr.at("category").get<std::string>());
        r.centroid = {jr.at("centroid")[0].get<double>(), jr.at("centroid")[1].get<double>()};
        for (const auto& jc : jr.at("cells")) {
            Cell c{jc[0].get<int>(), jc[1].get<int>()};
            if (!w.in_bounds(c)) throw ScenarioError("region cell out of bounds");
            r.cells.push_back(c);
            w.region_of[w.index(c)] = r.id;
        }
        if (r.id != static_cast<int>(w.regions.size()))
            throw ScenarioError("region ids must be dense and ordered");
        w.regions.push_back(std::move(r));
    }
    for (const auto& jo : j.at("objects")) {
        ObjectInstance o;
        o.object = tax.object_index(jo.at("object").get<std::string>());
        o.cell = {jo.at("cell")[0].get<int>(), jo.at("cell")[1].get<int>()};
        o.region = jo.at("region").get<int>();
        if (o.region < 0 || o.region >= static_cast<int>(w.regions.size()))
            throw ScenarioError("object references missing region");
        w.regions[o.region].objects.push_back(static_cast<int>(w.objects.size()));
        w.objects.push_back(o);
    }
    for (const auto& ji : j.at("illusions")) {
        IllusionSpec il;
        il.cell = {ji.at("cell")[0].get<int>(), ji.at("cell")[1].get<int>()};
        std::string kind = ji.at("kind").get<std::string>();
        if (kind == "mirror") il.kind = IllusionKind::Mirror;
        else if (kind == "glass") il.kind = IllusionKind::Glass;
        else throw ScenarioError("unknown illusion kind: " + kind);
        il.referenced_region = ji.at("referenced_region").get<int>();
        il.faced_region = ji.at("faced_region").get<int>();
        if (!w.in_bounds(il.cell)) throw ScenarioError("illusion cell out of bounds");
        w.illusion_of[w.index(il.cell)] = static_cast<int>(w.illusions.size());
        w.illusions.push_back(il);
    }
    for (Region& r : w.regions) {
        std::vector<int> names;
        for (int oidx : r.objects) names.push_back(w.objects[oidx].object);
        r.embedding = make_region_embedding(tax, r.category, names);
    }
    return w;
}

inline World load_world(const std::string& text, const Taxonomy& tax) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioError(std::string("scenario parse error: ") + e.what());
    }
    return world_from_json(j, tax);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << text;
}

} // namespace scout
