#include "tdaq/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <limits>
#include <optional>
#include <cmath>
#include <numeric>

#include "tdaq/complex.hpp"
#include "tdaq/error.hpp"
#include "tdaq/rng.hpp"

namespace tdaq::oracle {

namespace {

std::atomic<std::uint64_t> g_invocations{0};

const std::vector<PersistencePair> kEmpty;

using Column = std::vector<std::uint32_t>;

// Z/2 column addition: symmetric difference of sorted index lists.
void add_column(Column& target, const Column& source, Column& scratch) {
    scratch.clear();
    std::set_symmetric_difference(target.begin(), target.end(), source.begin(), source.end(),
                                  std::back_inserter(scratch));
    target.swap(scratch);
}

}  // namespace

const std::vector<PersistencePair>& PersistenceDiagram::points(int k) const {
    if (k < 0 || k >= static_cast<int>(dims.size())) return kEmpty;
    return dims[static_cast<std::size_t>(k)];
}

std::size_t PersistenceDiagram::persistent_betti(int k, double scale) const {
    const auto& pts = points(k);
    return static_cast<std::size_t>(std::count_if(pts.begin(), pts.end(), [scale](const PersistencePair& p) {
        return p.birth <= scale && scale < p.death;
    }));
}

std::vector<PersistencePair> PersistenceDiagram::sorted(int k) const {
    auto out = points(k);
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t reduction_invocations() { return g_invocations.load(); }

PersistenceDiagram compute_ph(const DistanceMatrix& distances, int max_dim, const PhOptions& options) {
    ++g_invocations;
    const auto n = static_cast<std::size_t>(distances.rows());
    if (max_dim < 0) fail(ErrorKind::invalid_argument, "max dimension must be >= 0");
    if (static_cast<std::size_t>(max_dim) + 1 > n) fail(ErrorKind::invalid_argument, "dimension exceeds vertex count");
    const int top = std::min(max_dim + 1, static_cast<int>(n) - 1);
    const double threshold = options.threshold.value_or(max_distance(distances));

    std::vector<std::vector<Simplex>> simplices;
    std::vector<std::vector<double>> diameters;
    enumerate_rips(distances, threshold, top, simplices, diameters);

    // filtration order: diameter, dimension, then lexicographic (or shuffled) rank
    struct Entry {
        double diameter;
        int dim;
        std::uint64_t tie;
        std::uint32_t lex;
    };
    std::vector<Entry> order;
    std::optional<Rng> rng;
    if (options.tie_shuffle_seed) rng.emplace(*options.tie_shuffle_seed);
    for (int d = 0; d <= top; ++d)
        for (std::size_t i = 0; i < simplices[static_cast<std::size_t>(d)].size(); ++i)
            order.push_back({diameters[static_cast<std::size_t>(d)][i], d,
                             rng ? rng->engine()() : static_cast<std::uint64_t>(i), static_cast<std::uint32_t>(i)});
    std::sort(order.begin(), order.end(), [](const Entry& a, const Entry& b) {
        if (a.diameter != b.diameter) return a.diameter < b.diameter;
        if (a.dim != b.dim) return a.dim < b.dim;
        if (a.tie != b.tie) return a.tie < b.tie;
        return a.lex < b.lex;
    });

    std::vector<std::vector<std::uint32_t>> position(static_cast<std::size_t>(top) + 1);
    for (int d = 0; d <= top; ++d) position[static_cast<std::size_t>(d)].resize(simplices[static_cast<std::size_t>(d)].size());
    for (std::size_t g = 0; g < order.size(); ++g)
        position[static_cast<std::size_t>(order[g].dim)][order[g].lex] = static_cast<std::uint32_t>(g);

    auto face_positions = [&](const Entry& e) {
        const auto& s = simplices[static_cast<std::size_t>(e.dim)][e.lex];
        const auto& faces = simplices[static_cast<std::size_t>(e.dim) - 1];
        Column col;
        col.reserve(static_cast<std::size_t>(e.dim) + 1);
        for (std::size_t i = 0; i <= static_cast<std::size_t>(e.dim); ++i) {
            const auto f = s.face(i);
            const auto it = std::lower_bound(faces.begin(), faces.end(), f);
            col.push_back(position[static_cast<std::size_t>(e.dim) - 1][static_cast<std::size_t>(it - faces.begin())]);
        }
        std::sort(col.begin(), col.end());
        return col;
    };

    const std::uint32_t none = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> pivot_owner(order.size(), none);  // low index -> column
    std::vector<char> is_low(order.size(), 0);
    std::vector<char> nonzero(order.size(), 0);

    PersistenceDiagram out;
    out.max_dim = max_dim;
    out.dims.assign(static_cast<std::size_t>(max_dim) + 1, {});
    out.vertex_count = n;
    out.simplex_count = order.size();
    out.clip_value = order.empty() ? 0.0 : order.back().diameter;

    // clearing: reduce the highest dimension first, skip columns already known
    // to be pivots (they reduce to zero)
    Column scratch;
    std::vector<Column> reduced(order.size());
    for (int d = top; d >= 1; --d) {
        for (std::size_t g = 0; g < order.size(); ++g) {
            if (order[g].dim != d || is_low[g]) continue;
            Column col = face_positions(order[g]);
            while (!col.empty()) {
                const std::uint32_t low = col.back();
                const std::uint32_t owner = pivot_owner[low];
                if (owner == none) break;
                add_column(col, reduced[owner], scratch);
            }
            if (col.empty()) continue;
            const std::uint32_t low = col.back();
            pivot_owner[low] = static_cast<std::uint32_t>(g);
            is_low[low] = 1;
            nonzero[g] = 1;
            const int pair_dim = d - 1;
            if (pair_dim <= max_dim) {
                const double birth = order[low].diameter;
                const double death = order[g].diameter;
                if (death > birth) out.dims[static_cast<std::size_t>(pair_dim)].push_back({birth, death});
            }
            reduced[g] = std::move(col);
        }
    }
    for (std::size_t g = 0; g < order.size(); ++g) {
        const int d = order[g].dim;
        if (d > max_dim || is_low[g] || nonzero[g]) continue;
        out.dims[static_cast<std::size_t>(d)].push_back({order[g].diameter, kInfinity});
    }
    for (auto& pts : out.dims) std::sort(pts.begin(), pts.end());
    return out;
}

// ---------------------------------------------------------------- bottleneck

namespace {

struct Point {
    double birth, death;
};

std::vector<Point> clipped(const std::vector<PersistencePair>& pts, double clip) {
    std::vector<Point> out;
    for (const auto& p : pts) out.push_back({p.birth, p.essential() ? std::max(clip, p.birth) : p.death});
    return out;
}

double linf(const Point& a, const Point& b) {
    return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

double half_persistence(const Point& p) { return (p.death - p.birth) / 2.0; }

// Kuhn's augmenting paths; adjacency given as a predicate.
template <class Adjacent>
bool perfect_matching(std::size_t size, const Adjacent& adjacent) {
    std::vector<std::ptrdiff_t> match_right(size, -1);
    std::vector<char> visited;
    std::function<bool(std::size_t)> augment = [&](std::size_t u) -> bool {
        for (std::size_t v = 0; v < size; ++v) {
            if (visited[v] || !adjacent(u, v)) continue;
            visited[v] = 1;
            if (match_right[v] < 0 || augment(static_cast<std::size_t>(match_right[v]))) {
                match_right[v] = static_cast<std::ptrdiff_t>(u);
                return true;
            }
        }
        return false;
    };
    for (std::size_t u = 0; u < size; ++u) {
        visited.assign(size, 0);
        if (!augment(u)) return false;
    }
    return true;
}

double bottleneck_points(const std::vector<Point>& a, const std::vector<Point>& b) {
    const std::size_t na = a.size(), nb = b.size();
    if (na == 0 && nb == 0) return 0.0;
    std::vector<double> candidates{0.0};
    for (const auto& p : a) candidates.push_back(half_persistence(p));
    for (const auto& q : b) candidates.push_back(half_persistence(q));
    for (const auto& p : a)
        for (const auto& q : b) candidates.push_back(linf(p, q));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // left: a_0..a_{na-1}, then diagonal copies of b; right: b_0..b_{nb-1},
    // then diagonal copies of a
    const std::size_t size = na + nb;
    auto feasible = [&](double r) {
        return perfect_matching(size, [&](std::size_t u, std::size_t v) {
            const bool u_real = u < na, v_real = v < nb;
            if (u_real && v_real) return linf(a[u], b[v]) <= r;
            if (u_real) return v - nb == u && half_persistence(a[u]) <= r;
            if (v_real) return u - na == v && half_persistence(b[v]) <= r;
            return true;
        });
    };
    std::size_t lo = 0, hi = candidates.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (feasible(candidates[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    return candidates[lo];
}

}  // namespace

double bottleneck(const std::vector<PersistencePair>& a, const std::vector<PersistencePair>& b) {
    double clip = 0.0;
    for (const auto* pts : {&a, &b})
        for (const auto& p : *pts) clip = std::max(clip, p.essential() ? p.birth : p.death);
    return bottleneck_points(clipped(a, clip), clipped(b, clip));
}

double bottleneck(const PersistenceDiagram& a, const PersistenceDiagram& b, int k) {
    return bottleneck_points(clipped(a.points(k), a.clip_value), clipped(b.points(k), b.clip_value));
}

double max_bottleneck(const PersistenceDiagram& a, const PersistenceDiagram& b) {
    double worst = 0.0;
    for (int k = 0; k <= std::min(a.max_dim, b.max_dim); ++k) worst = std::max(worst, bottleneck(a, b, k));
    return worst;
}

// ---------------------------------------------------------------- catalog

DiagramClassCatalog::DiagramClassCatalog(std::vector<CatalogEntry> entries, double radius, AssignmentPolicy policy)
    : entries_(std::move(entries)), radius_(radius), policy_(policy) {
    if (entries_.empty()) fail(ErrorKind::invalid_argument, "catalog needs at least one class");
    if (!(radius_ >= 0.0)) fail(ErrorKind::invalid_argument, "catalog radius must be non-negative");
    for (std::size_t i = 0; i < entries_.size(); ++i)
        for (std::size_t j = i + 1; j < entries_.size(); ++j)
            if (!(max_bottleneck(entries_[i].exemplar, entries_[j].exemplar) > 2.0 * radius_))
                fail(ErrorKind::invalid_argument, "catalog exemplars '" + entries_[i].name + "' and '" +
                                                      entries_[j].name + "' are not separated by more than 2r");
}

std::optional<int> DiagramClassCatalog::class_of(const std::string& name) const {
    for (const auto& e : entries_)
        if (e.name == name) return e.class_id;
    return std::nullopt;
}

Assignment assign_class(const PersistenceDiagram& diagram, const DiagramClassCatalog& catalog,
                        const std::string& generator_shape) {
    if (catalog.policy() == AssignmentPolicy::generator_label) {
        const auto id = catalog.class_of(generator_shape);
        if (!id) fail(ErrorKind::integrity, "out of catalog: no class named '" + generator_shape + "'");
        return {*id, 0.0};
    }
    Assignment best{0, kInfinity};
    for (const auto& e : catalog.entries()) {
        const double d = max_bottleneck(diagram, e.exemplar);
        if (d < best.distance) best = {e.class_id, d};
    }
    if (best.distance > catalog.radius())
        fail(ErrorKind::integrity, "out of catalog: nearest exemplar at bottleneck distance " +
                                       std::to_string(best.distance) + " > radius " + std::to_string(catalog.radius()));
    return best;
}

// ---------------------------------------------------------------- json

nlohmann::json to_json(const PersistenceDiagram& d) {
    nlohmann::json dims = nlohmann::json::object();
    for (int k = 0; k <= d.max_dim; ++k) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : d.points(k))
            pts.push_back(nlohmann::json::array({p.birth, p.essential() ? nlohmann::json("inf") : nlohmann::json(p.death)}));
        dims[std::to_string(k)] = pts;
    }
    return nlohmann::json{{"dims", dims},
                          {"clip_value", d.clip_value},
                          {"provenance", {{"max_dim", d.max_dim},
                                          {"vertex_count", d.vertex_count},
                                          {"simplex_count", d.simplex_count},
                                          {"coefficients", "Z/2"},
                                          {"filtration", "vietoris-rips"}}}};
}

PersistenceDiagram diagram_from_json(const nlohmann::json& j) {
    PersistenceDiagram d;
    try {
        d.clip_value = j.at("clip_value").get<double>();
        const auto& prov = j.at("provenance");
        d.max_dim = prov.at("max_dim").get<int>();
        d.vertex_count = prov.value("vertex_count", std::size_t{0});
        d.simplex_count = prov.value("simplex_count", std::size_t{0});
        d.dims.assign(static_cast<std::size_t>(d.max_dim) + 1, {});
        for (const auto& [key, pts] : j.at("dims").items()) {
            const int k = std::stoi(key);
            if (k < 0 || k > d.max_dim) fail(ErrorKind::io, "diagram dimension out of range");
            for (const auto& p : pts) {
                PersistencePair pair{p.at(0).get<double>(), kInfinity};
                if (!p.at(1).is_string()) pair.death = p.at(1).get<double>();
                d.dims[static_cast<std::size_t>(k)].push_back(pair);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::io, std::string("malformed diagram: ") + e.what());
    }
    return d;
}

}  // namespace tdaq::oracle
