#pragma once
// Category and object vocabulary with a hand-set co-occurrence model.
// co_occ[o][c] is the probability that a region of category c contains
// object o. Everything downstream (classification, embeddings, peaked
// distributions, synthetic region furnishing) derives from this one table.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace scout {

struct Taxonomy {
    std::vector<std::string> categories;
    std::vector<std::string> objects;
    std::vector<std::vector<double>> co_occ; // [object][category]

    int num_categories() const { return static_cast<int>(categories.size()); }
    int num_objects() const { return static_cast<int>(objects.size()); }

    int category_index(const std::string& name) const {
        for (int i = 0; i < num_categories(); ++i)
            if (categories[i] == name) return i;
        throw std::out_of_range("unknown category: " + name);
    }

    int object_index(const std::string& name) const {
        for (int i = 0; i < num_objects(); ++i)
            if (objects[i] == name) return i;
        throw std::out_of_range("unknown object: " + name);
    }

    // Objects most likely for a category, descending probability, ties by
    // object index. Used for hypothesis children and for synthesizing the
    // contents of misleading predictions.
    std::vector<int> top_objects(int category, int n) const {
        std::vector<int> idx(objects.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
            return co_occ[a][category] > co_occ[b][category];
        });
        if (static_cast<int>(idx.size()) > n) idx.resize(n);
        return idx;
    }
};

// Posterior over categories given a set of present objects: uniform prior,
// independent per-object likelihoods, renormalized. Degenerate zero mass
// falls back to uniform. Absent objects contribute nothing; the model is a
// presence-only naive Bayes.
inline std::vector<double> classify_by_objects(const Taxonomy& tax,
                                               const std::vector<int>& object_ids) {
    const int k = tax.num_categories();
    std::vector<double> post(k, 1.0);
    for (int o : object_ids)
        for (int c = 0; c < k; ++c) post[c] *= tax.co_occ[o][c];
    double mass = std::accumulate(post.begin(), post.end(), 0.0);
    if (mass <= 0.0) {
        std::fill(post.begin(), post.end(), 1.0 / k);
        return post;
    }
    for (double& p : post) p /= mass;
    return post;
}

// Cosine similarity between the co-occurrence columns of two categories.
inline double category_affinity(const Taxonomy& tax, int a, int b) {
    double dot = 0, na = 0, nb = 0;
    for (int o = 0; o < tax.num_objects(); ++o) {
        dot += tax.co_occ[o][a] * tax.co_occ[o][b];
        na += tax.co_occ[o][a] * tax.co_occ[o][a];
        nb += tax.co_occ[o][b] * tax.co_occ[o][b];
    }
    if (na <= 0.0 || nb <= 0.0) return 0.0;
    return dot / std::sqrt(na * nb);
}

// Distribution with mass rho on c_star and the remainder spread over the
// other categories in proportion to their co-occurrence affinity with
// c_star, uniform if all affinities vanish.
inline std::vector<double> peaked_distribution(const Taxonomy& tax, int c_star, double rho) {
    const int k = tax.num_categories();
    std::vector<double> p(k, 0.0);
    p[c_star] = rho;
    double total = 0.0;
    std::vector<double> aff(k, 0.0);
    for (int c = 0; c < k; ++c) {
        if (c == c_star) continue;
        aff[c] = category_affinity(tax, c, c_star);
        total += aff[c];
    }
    const double rest = 1.0 - rho;
    for (int c = 0; c < k; ++c) {
        if (c == c_star) continue;
        p[c] = total > 0.0 ? rest * aff[c] / total : rest / (k - 1);
    }
    return p;
}

// Region embedding: a smoothed one-hot over categories concatenated with an
// L1-normalized object bag over the vocabulary. Stands in for a learned
// encoder; cosine similarity on these vectors behaves sensibly (same
// category with shared furniture scores high, unrelated rooms near zero).
inline std::vector<double> make_region_embedding(const Taxonomy& tax, int category,
                                                 const std::vector<int>& object_ids) {
    const int k = tax.num_categories();
    std::vector<double> e(static_cast<size_t>(k + tax.num_objects()), 0.0);
    const double smooth = 0.05 / k;
    for (int c = 0; c < k; ++c) e[c] = smooth;
    e[category] += 0.95;
    if (!object_ids.empty()) {
        const double w = 1.0 / static_cast<double>(object_ids.size());
        for (int o : object_ids) e[static_cast<size_t>(k + o)] += w;
    }
    return e;
}

inline Taxonomy default_taxonomy() {
    Taxonomy t;
    t.categories = {
        "kitchen",      "bathroom",   "bedroom",     "living_room",  "dining_room",
        "hallway",      "office",     "closet",      "laundry_room", "garage",
        "pantry",       "library",    "nursery",     "gym",          "sunroom",
        "utility_room", "workshop",   "studio",      "mudroom",      "guest_room",
        "storage_room", "foyer",      "play_room",
    };
    t.objects = {
        "stove",         "refrigerator", "sink",          "oven",        "microwave",
        "toilet",        "shower",       "bathtub",       "vanity",      "bed",
        "wardrobe",      "nightstand",   "sofa",          "tv",          "coffee_table",
        "dining_table",  "chair",        "bookshelf",     "desk",        "computer",
        "lamp",          "washing_machine", "dryer",      "ironing_board", "toolbox",
        "workbench",     "treadmill",    "dumbbells",     "yoga_mat",    "plant",
        "easel",         "crib",         "toy_chest",     "coat_rack",   "shoe_rack",
        "boiler",        "shelving",     "boxes",         "piano",       "rug",
    };
    const int K = t.num_categories();
    const int V = t.num_objects();
    t.co_occ.assign(V, std::vector<double>(K, 0.02));
    struct Entry {
        const char* cat;
        const char* obj;
        double p;
    };
    static const Entry entries[] = {
        {"kitchen", "stove", 0.92},        {"kitchen", "refrigerator", 0.90},
        {"kitchen", "sink", 0.85},         {"kitchen", "oven", 0.80},
        {"kitchen", "microwave", 0.70},    {"kitchen", "chair", 0.30},
        {"bathroom", "toilet", 0.93},      {"bathroom", "shower", 0.85},
        {"bathroom", "sink", 0.75},        {"bathroom", "vanity", 0.65},
        {"bathroom", "bathtub", 0.60},
        {"bedroom", "bed", 0.95},          {"bedroom", "nightstand", 0.75},
        {"bedroom", "wardrobe", 0.70},     {"bedroom", "lamp", 0.55},
        {"living_room", "sofa", 0.90},     {"living_room", "tv", 0.80},
        {"living_room", "coffee_table", 0.75}, {"living_room", "rug", 0.50},
        {"living_room", "lamp", 0.45},     {"living_room", "plant", 0.40},
        {"living_room", "piano", 0.15},
        {"dining_room", "dining_table", 0.95}, {"dining_room", "chair", 0.90},
        {"dining_room", "rug", 0.35},      {"dining_room", "lamp", 0.30},
        {"hallway", "coat_rack", 0.45},    {"hallway", "rug", 0.40},
        {"hallway", "lamp", 0.35},         {"hallway", "plant", 0.25},
        {"office", "desk", 0.92},          {"office", "computer", 0.88},
        {"office", "chair", 0.70},         {"office", "bookshelf", 0.60},
        {"office", "lamp", 0.50},
        {"closet", "wardrobe", 0.80},      {"closet", "shoe_rack", 0.70},
        {"closet", "shelving", 0.60},      {"closet", "boxes", 0.55},
        {"laundry_room", "washing_machine", 0.95}, {"laundry_room", "dryer", 0.85},
        {"laundry_room", "ironing_board", 0.60},   {"laundry_room", "sink", 0.35},
        {"laundry_room", "shelving", 0.30},
        {"garage", "toolbox", 0.80},       {"garage", "workbench", 0.70},
        {"garage", "boxes", 0.60},         {"garage", "shelving", 0.55},
        {"pantry", "shelving", 0.90},      {"pantry", "boxes", 0.70},
        {"pantry", "refrigerator", 0.25},  {"pantry", "microwave", 0.15},
        {"library", "bookshelf", 0.95},    {"library", "chair", 0.60},
        {"library", "lamp", 0.50},         {"library", "desk", 0.45},
        {"library", "rug", 0.35},          {"library", "piano", 0.12},
        {"nursery", "crib", 0.95},         {"nursery", "toy_chest", 0.70},
        {"nursery", "rug", 0.45},          {"nursery", "lamp", 0.40},
        {"nursery", "wardrobe", 0.35},
        {"gym", "treadmill", 0.85},        {"gym", "dumbbells", 0.80},
        {"gym", "yoga_mat", 0.70},         {"gym", "tv", 0.30},
        {"sunroom", "plant", 0.85},        {"sunroom", "chair", 0.60},
        {"sunroom", "sofa", 0.35},         {"sunroom", "rug", 0.30},
        {"sunroom", "easel", 0.15},
        {"utility_room", "boiler", 0.85},  {"utility_room", "shelving", 0.60},
        {"utility_room", "toolbox", 0.45}, {"utility_room", "washing_machine", 0.20},
        {"workshop", "workbench", 0.92},   {"workshop", "toolbox", 0.85},
        {"workshop", "shelving", 0.50},    {"workshop", "boxes", 0.40},
        {"studio", "easel", 0.90},         {"studio", "lamp", 0.45},
        {"studio", "desk", 0.40},          {"studio", "piano", 0.35},
        {"studio", "rug", 0.30},           {"studio", "plant", 0.30},
        {"mudroom", "coat_rack", 0.85},    {"mudroom", "shoe_rack", 0.80},
        {"mudroom", "rug", 0.50},          {"mudroom", "boxes", 0.20},
        {"guest_room", "bed", 0.90},       {"guest_room", "nightstand", 0.60},
        {"guest_room", "wardrobe", 0.50},  {"guest_room", "lamp", 0.45},
        {"guest_room", "desk", 0.20},
        {"storage_room", "boxes", 0.92},   {"storage_room", "shelving", 0.85},
        {"storage_room", "toolbox", 0.30}, {"storage_room", "wardrobe", 0.25},
        {"foyer", "coat_rack", 0.70},      {"foyer", "rug", 0.55},
        {"foyer", "shoe_rack", 0.50},      {"foyer", "plant", 0.45},
        {"foyer", "lamp", 0.40},
        {"play_room", "toy_chest", 0.90},  {"play_room", "rug", 0.60},
        {"play_room", "tv", 0.35},         {"play_room", "chair", 0.30},
        {"play_room", "piano", 0.20},
    };
    for (const Entry& e : entries) t.co_occ[t.object_index(e.obj)][t.category_index(e.cat)] = e.p;
    return t;
}

} // namespace scout
