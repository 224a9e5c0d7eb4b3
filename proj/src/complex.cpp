#include "tdaq/complex.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "tdaq/error.hpp"

namespace tdaq {

Simplex::Simplex(std::vector<Vertex> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.empty()) fail(ErrorKind::invalid_argument, "simplex needs at least one vertex");
    for (std::size_t i = 1; i < vertices_.size(); ++i)
        if (!(vertices_[i - 1] < vertices_[i]))
            fail(ErrorKind::invalid_argument, "simplex vertices must be strictly ascending");
}

Simplex::Simplex(std::initializer_list<Vertex> vertices)
    : Simplex(std::vector<Vertex>(vertices)) {}

Simplex Simplex::face(std::size_t i) const {
    Simplex f;
    f.vertices_.reserve(vertices_.size() - 1);
    for (std::size_t v = 0; v < vertices_.size(); ++v)
        if (v != i) f.vertices_.push_back(vertices_[v]);
    return f;
}

namespace {
const std::vector<Simplex> kNoSimplices;
}

SimplicialComplex::SimplicialComplex(std::size_t vertex_count,
                                     std::vector<std::vector<Simplex>> by_dim)
    : vertex_count_(vertex_count), by_dim_(std::move(by_dim)) {
    for (std::size_t k = 0; k < by_dim_.size(); ++k) {
        const auto& level = by_dim_[k];
        for (std::size_t i = 0; i < level.size(); ++i) {
            const Simplex& s = level[i];
            if (s.dim() != static_cast<int>(k))
                fail(ErrorKind::invalid_argument, "simplex stored under the wrong dimension");
            if (s.vertices().back() >= vertex_count_)
                fail(ErrorKind::invalid_argument, "simplex vertex out of range");
            if (i > 0 && !(level[i - 1] < s))
                fail(ErrorKind::invalid_argument, "simplices must be sorted without duplicates");
            if (k > 0) {
                for (std::size_t f = 0; f <= k; ++f)
                    if (index_of(s.face(f)) < 0)
                        fail(ErrorKind::invalid_argument, "complex is not closed under faces");
            }
        }
    }
}

SimplicialComplex SimplicialComplex::from_maximal(std::size_t vertex_count,
                                                  const std::vector<Simplex>& maximal) {
    std::vector<std::set<Simplex>> levels;
    std::function<void(const Simplex&)> add = [&](const Simplex& s) {
        const auto k = static_cast<std::size_t>(s.dim());
        if (levels.size() <= k) levels.resize(k + 1);
        if (!levels[k].insert(s).second) return;
        if (k == 0) return;
        for (std::size_t i = 0; i <= k; ++i) add(s.face(i));
    };
    for (const auto& s : maximal) add(s);
    std::vector<std::vector<Simplex>> by_dim;
    for (auto& level : levels) by_dim.emplace_back(level.begin(), level.end());
    return SimplicialComplex(vertex_count, std::move(by_dim));
}

const std::vector<Simplex>& SimplicialComplex::simplices(int k) const {
    if (k < 0 || k > max_dim()) return kNoSimplices;
    return by_dim_[static_cast<std::size_t>(k)];
}

std::ptrdiff_t SimplicialComplex::index_of(const Simplex& s) const {
    const auto& level = simplices(s.dim());
    auto it = std::lower_bound(level.begin(), level.end(), s);
    if (it == level.end() || *it != s) return -1;
    return it - level.begin();
}

long SimplicialComplex::euler_characteristic() const {
    long chi = 0;
    for (int k = 0; k <= max_dim(); ++k)
        chi += (k % 2 == 0 ? 1 : -1) * static_cast<long>(count(k));
    return chi;
}

BoundaryOperator boundary(const SimplicialComplex& complex, int k) {
    BoundaryOperator op;
    op.k = k;
    const auto rows = static_cast<Eigen::Index>(complex.count(k - 1));
    const auto cols = static_cast<Eigen::Index>(complex.count(k));
    op.matrix.resize(rows, cols);
    if (k <= 0 || cols == 0) return op;

    std::vector<Eigen::Triplet<int>> entries;
    entries.reserve(static_cast<std::size_t>(cols) * static_cast<std::size_t>(k + 1));
    const auto& level = complex.simplices(k);
    for (std::size_t c = 0; c < level.size(); ++c) {
        for (std::size_t i = 0; i <= static_cast<std::size_t>(k); ++i) {
            const std::ptrdiff_t r = complex.index_of(level[c].face(i));
            entries.emplace_back(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c),
                                 i % 2 == 0 ? 1 : -1);
        }
    }
    op.matrix.setFromTriplets(entries.begin(), entries.end());
    return op;
}

void enumerate_rips(const DistanceMatrix& distances, double threshold, int max_dim,
                    std::vector<std::vector<Simplex>>& simplices,
                    std::vector<std::vector<double>>& diameters) {
    const auto n = static_cast<Vertex>(distances.rows());
    simplices.assign(static_cast<std::size_t>(max_dim) + 1, {});
    diameters.assign(static_cast<std::size_t>(max_dim) + 1, {});

    // upper neighbors, ascending
    std::vector<std::vector<Vertex>> upper(n);
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v)
            if (distances(u, v) <= threshold) upper[u].push_back(v);

    std::vector<Vertex> current;
    std::function<void(const std::vector<Vertex>&, double)> expand =
        [&](const std::vector<Vertex>& candidates, double diameter) {
            const auto k = current.size() - 1;
            simplices[k].emplace_back(Simplex(current));
            diameters[k].push_back(diameter);
            if (static_cast<int>(k) == max_dim) return;
            for (std::size_t c = 0; c < candidates.size(); ++c) {
                const Vertex v = candidates[c];
                double next_diameter = diameter;
                for (Vertex u : current) next_diameter = std::max(next_diameter, distances(u, v));
                std::vector<Vertex> next;
                std::set_intersection(candidates.begin() + static_cast<std::ptrdiff_t>(c) + 1,
                                      candidates.end(), upper[v].begin(), upper[v].end(),
                                      std::back_inserter(next));
                current.push_back(v);
                expand(next, next_diameter);
                current.pop_back();
            }
        };
    for (Vertex v = 0; v < n; ++v) {
        current = {v};
        expand(upper[v], 0.0);
    }
    // depth-first expansion with ascending candidates already yields
    // lexicographic order in every dimension
}

FiltrationComplex::FiltrationComplex(ScaleGrid grid, std::size_t vertex_count,
                                     std::vector<std::vector<Simplex>> simplices,
                                     std::vector<std::vector<double>> diameters)
    : grid_(std::move(grid)),
      vertex_count_(vertex_count),
      simplices_(std::move(simplices)),
      diameters_(std::move(diameters)) {
    births_.resize(simplices_.size());
    const auto& scales = grid_.values();
    for (std::size_t k = 0; k < simplices_.size(); ++k) {
        births_[k].reserve(simplices_[k].size());
        for (double d : diameters_[k]) {
            auto it = std::lower_bound(scales.begin(), scales.end(), d);
            if (it == scales.end())
                fail(ErrorKind::invalid_argument, "simplex diameter beyond the last grid scale");
            births_[k].push_back(static_cast<std::size_t>(it - scales.begin()));
        }
    }
}

SimplicialComplex FiltrationComplex::at(std::size_t j) const {
    std::vector<std::vector<Simplex>> by_dim(simplices_.size());
    for (std::size_t k = 0; k < simplices_.size(); ++k)
        for (std::size_t i = 0; i < simplices_[k].size(); ++i)
            if (births_[k][i] <= j) by_dim[k].push_back(simplices_[k][i]);
    return SimplicialComplex(vertex_count_, std::move(by_dim));
}

std::size_t FiltrationComplex::count(int k, std::size_t j) const {
    if (k < 0 || k > max_dim()) return 0;
    const auto& b = births_[static_cast<std::size_t>(k)];
    return static_cast<std::size_t>(std::count_if(b.begin(), b.end(), [j](std::size_t x) { return x <= j; }));
}

FiltrationComplex build_vr(const DistanceMatrix& distances, const ScaleGrid& grid, int max_dim) {
    if (max_dim < 0) fail(ErrorKind::invalid_argument, "max dimension must be >= 0");
    const auto n = static_cast<std::size_t>(distances.rows());
    if (static_cast<std::size_t>(max_dim) + 1 > n)
        fail(ErrorKind::invalid_argument, "dimension exceeds vertex count");
    std::vector<std::vector<Simplex>> simplices;
    std::vector<std::vector<double>> diameters;
    enumerate_rips(distances, grid.back(), max_dim, simplices, diameters);
    return FiltrationComplex(grid, n, std::move(simplices), std::move(diameters));
}

}  // namespace tdaq
