#ifndef RELWALK_MODELS_HPP
#define RELWALK_MODELS_HPP

// Standard finite models: cycles, complete graphs, Schreier actions, small
// triangulated surfaces.

#include <algorithm>
#include <array>
#include <cstddef>
#include <numeric>
#include <vector>

#include "random.hpp"
#include "relation.hpp"
#include "walk.hpp"

namespace relwalk {

using Triangle = std::array<int, 3>;

inline Graphing cycle_graphing(std::size_t n)
{
    Graphing g;
    for (std::size_t i = 0; i < n; ++i)
        g.edges.emplace_back(static_cast<int>(i), static_cast<int>((i + 1) % n));
    g.degree_bound = 2;
    return g;
}

inline Graphing complete_graphing(std::size_t n)
{
    Graphing g;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            g.edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
    return g;
}

/// Simple random walk on the n-cycle with uniform masses (n >= 3).
inline RandomWalk cycle_walk(std::size_t n)
{
    return regular_walk(std::make_shared<const FiniteRelation>(uniform_relation(n)), cycle_graphing(n));
}

inline RandomWalk complete_walk(std::size_t n)
{
    return regular_walk(std::make_shared<const FiniteRelation>(uniform_relation(n)), complete_graphing(n));
}

inline Permutation shift_permutation(std::size_t n, int by)
{
    Permutation s(n);
    for (std::size_t i = 0; i < n; ++i)
        s[i] = static_cast<int>((static_cast<long long>(i) + by + static_cast<long long>(n) * 4) % static_cast<long long>(n));
    return s;
}

inline Permutation random_permutation(std::size_t n, Rng& rng)
{
    Permutation s(n);
    std::iota(s.begin(), s.end(), 0);
    std::shuffle(s.begin(), s.end(), rng);
    return s;
}

struct GeneratorSet {
    std::vector<Permutation> generators;
    std::vector<double> probs;
};

/// k random permutations and their inverses, each with probability 1/(2k): a 2k-regular Schreier graph.
inline GeneratorSet random_schreier_generators(std::size_t n, int k, Rng& rng)
{
    GeneratorSet out;
    for (int i = 0; i < k; ++i) {
        auto s = random_permutation(n, rng);
        out.generators.push_back(s);
        out.generators.push_back(inverse(s));
    }
    out.probs.assign(out.generators.size(), 1.0 / static_cast<double>(out.generators.size()));
    return out;
}

inline ActionWalk schreier_walk(std::size_t n, int k, std::uint64_t seed)
{
    Rng rng(seed);
    auto gens = random_schreier_generators(n, k, rng);
    return cayley_action_walk(n, gens.generators, gens.probs);
}

inline std::vector<Triangle> tetrahedron_triangles()
{
    return {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
}

/// Octahedron boundary: poles 0 and 5 over the square 1-2-3-4.
inline std::vector<Triangle> octahedron_triangles()
{
    return {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 1, 4}, {5, 1, 2}, {5, 2, 3}, {5, 3, 4}, {5, 1, 4}};
}

/// Regular triangulation of the m x n torus (m, n >= 3); every vertex link is a 6-cycle.
inline std::vector<Triangle> torus_triangles(int m, int n)
{
    std::vector<Triangle> out;
    auto id = [&](int i, int j) { return ((i % m + m) % m) * n + ((j % n + n) % n); };
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            out.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            out.push_back({id(i, j), id(i, j + 1), id(i + 1, j + 1)});
        }
    }
    return out;
}

/// The 7-vertex torus: triangles {i, i+1, i+3} and {i, i+2, i+3} mod 7.
inline std::vector<Triangle> seven_vertex_torus()
{
    std::vector<Triangle> out;
    for (int i = 0; i < 7; ++i) {
        out.push_back({i, (i + 1) % 7, (i + 3) % 7});
        out.push_back({i, (i + 2) % 7, (i + 3) % 7});
    }
    return out;
}

}  // namespace relwalk

#endif
