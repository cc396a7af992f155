#ifndef RELWALK_REPRESENTATION_HPP
#define RELWALK_REPRESENTATION_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "random.hpp"
#include "relation.hpp"

namespace relwalk {

inline constexpr double kUnitaryTolerance = 1e-10;

/// Frobenius norm of V^* V - I.
inline double unitarity_defect(const Eigen::MatrixXcd& v)
{
    if (v.rows() != v.cols())
        return std::numeric_limits<double>::infinity();
    return (v.adjoint() * v - Eigen::MatrixXcd::Identity(v.rows(), v.cols())).norm();
}

/**
 * A unitary representation of a finite relation on the trivial bundle
 * X x C^d. Gauge mode stores U_x per point and sets pi(x, y) = U_x U_y^*.
 * Raw mode stores V(x, y) on the oriented edges of a graphing; a spanning
 * forest gauge is derived at build time and used to extend pi to pairs
 * joined by a path of edges.
 */
class Representation {
public:
    enum class Mode { gauge, raw };

    int dim() const noexcept { return dim_; }
    Mode mode() const noexcept { return mode_; }
    std::size_t size() const noexcept { return gauge_.size(); }
    double tolerance() const noexcept { return tolerance_; }
    /// Worst fundamental-cycle residual (raw mode), 0 in gauge mode.
    double cycle_residual() const noexcept { return cycle_residual_; }
    /// True when every block has zero imaginary part.
    bool is_real() const noexcept { return real_; }

    const Eigen::MatrixXcd& gauge(int x) const { return gauge_.at(static_cast<std::size_t>(x)); }
    const std::map<Edge, Eigen::MatrixXcd>& edge_blocks() const noexcept { return edges_; }

    bool has_block(int x, int y) const
    {
        if (x == y || mode_ == Mode::gauge)
            return true;
        return edges_.count({x, y}) > 0 || component_[static_cast<std::size_t>(x)] == component_[static_cast<std::size_t>(y)];
    }

    /// pi(x, y).
    Eigen::MatrixXcd block(int x, int y) const
    {
        if (x == y)
            return Eigen::MatrixXcd::Identity(dim_, dim_);
        if (mode_ == Mode::raw) {
            auto it = edges_.find({x, y});
            if (it != edges_.end())
                return it->second;
            if (component_.at(static_cast<std::size_t>(x)) != component_.at(static_cast<std::size_t>(y)))
                throw Error(ErrorKind::MissingEdgeBlock,
                            "no block for pair (" + std::to_string(x) + ", " + std::to_string(y) + ")");
        }
        return gauge(x) * gauge(y).adjoint();
    }

private:
    friend Representation gauge_representation(const FiniteRelation&, int, std::vector<Eigen::MatrixXcd>);
    friend Representation raw_representation(const FiniteRelation&, const Graphing&,
                                             const std::map<Edge, Eigen::MatrixXcd>&, double);

    int dim_ = 1;
    Mode mode_ = Mode::gauge;
    double tolerance_ = kUnitaryTolerance;
    double cycle_residual_ = 0.0;
    bool real_ = true;
    std::vector<Eigen::MatrixXcd> gauge_;
    std::map<Edge, Eigen::MatrixXcd> edges_;
    std::vector<int> component_;
};

namespace detail {

inline bool is_real_matrix(const Eigen::MatrixXcd& m)
{
    return (m.imag().array() == 0.0).all();
}

}  // namespace detail

inline Representation gauge_representation(const FiniteRelation& rel, int dim, std::vector<Eigen::MatrixXcd> unitaries)
{
    if (dim <= 0)
        throw Error(ErrorKind::InvalidArgument, "representation dimension must be positive");
    if (unitaries.size() != rel.size())
        throw Error(ErrorKind::DimensionMismatch, "need one unitary per point");
    Representation rep;
    rep.dim_ = dim;
    rep.mode_ = Representation::Mode::gauge;
    for (std::size_t x = 0; x < unitaries.size(); ++x) {
        const auto& u = unitaries[x];
        if (u.rows() != dim || u.cols() != dim)
            throw Error(ErrorKind::DimensionMismatch, "unitary at point " + std::to_string(x) + " has wrong size");
        const double defect = unitarity_defect(u);
        if (defect > kUnitaryTolerance)
            throw Error(ErrorKind::NotUnitary, "U at point " + std::to_string(x) + " is not unitary", defect);
        rep.real_ = rep.real_ && detail::is_real_matrix(u);
    }
    rep.gauge_ = std::move(unitaries);
    rep.component_.assign(rel.size(), 0);
    return rep;
}

/// d = 1, U_x = 1: the simple diffusion.
inline Representation trivial_representation(const FiniteRelation& rel)
{
    return gauge_representation(rel, 1, std::vector<Eigen::MatrixXcd>(rel.size(), Eigen::MatrixXcd::Identity(1, 1)));
}

/**
 * The regular representation on l^2 of the class. Identifying every fiber of
 * a class with functions on that class, pi(x, y) acts as the identity; d is
 * the largest class size and smaller classes are padded with the identity.
 */
inline Representation regular_representation(const FiniteRelation& rel)
{
    std::size_t d = 1;
    for (const auto& c : rel.classes())
        d = std::max(d, c.size());
    const auto dim = static_cast<int>(d);
    return gauge_representation(rel, dim, std::vector<Eigen::MatrixXcd>(rel.size(), Eigen::MatrixXcd::Identity(dim, dim)));
}

/// Gauge representation with Haar-random U_x.
inline Representation random_gauge_representation(const FiniteRelation& rel, int dim, Rng& rng)
{
    std::vector<Eigen::MatrixXcd> u;
    u.reserve(rel.size());
    for (std::size_t x = 0; x < rel.size(); ++x)
        u.push_back(random_unitary(dim, rng));
    return gauge_representation(rel, dim, std::move(u));
}

/**
 * Builds a raw representation from blocks on the oriented edges of K. Either
 * orientation of an edge may be given; the other is the adjoint. Cycle
 * consistency is checked over a fundamental cycle basis: a BFS spanning
 * forest fixes U_x, and every non-tree edge must satisfy
 * ||V(x, y) - U_x U_y^*||_F <= tol.
 */
inline Representation raw_representation(const FiniteRelation& rel, const Graphing& graphing,
                                         const std::map<Edge, Eigen::MatrixXcd>& blocks, double tol = 1e-9)
{
    require_valid_graphing(rel, graphing);
    if (blocks.empty())
        throw Error(ErrorKind::InvalidArgument, "raw representation needs at least one block");
    const auto dim = static_cast<int>(blocks.begin()->second.rows());
    if (dim <= 0)
        throw Error(ErrorKind::InvalidArgument, "representation dimension must be positive");

    Representation rep;
    rep.dim_ = dim;
    rep.mode_ = Representation::Mode::raw;
    rep.tolerance_ = tol;

    const auto edges = graphing.normalized();
    for (const auto& [e, v] : blocks) {
        auto [x, y] = e;
        const Edge key{std::min(x, y), std::max(x, y)};
        if (!std::binary_search(edges.begin(), edges.end(), key))
            throw Error(ErrorKind::InvalidArgument,
                        "block on (" + std::to_string(x) + ", " + std::to_string(y) + ") which is not an edge of K");
        if (v.rows() != dim || v.cols() != dim)
            throw Error(ErrorKind::DimensionMismatch,
                        "block on (" + std::to_string(x) + ", " + std::to_string(y) + ") has wrong size");
        const double defect = unitarity_defect(v);
        if (defect > kUnitaryTolerance)
            throw Error(ErrorKind::NotUnitary, "block on (" + std::to_string(x) + ", " + std::to_string(y) + ")", defect);
        rep.real_ = rep.real_ && detail::is_real_matrix(v);
    }
    double worst = 0.0;
    for (auto [x, y] : edges) {
        auto fwd = blocks.find({x, y});
        auto bwd = blocks.find({y, x});
        if (fwd == blocks.end() && bwd == blocks.end())
            throw Error(ErrorKind::MissingEdgeBlock, "edge (" + std::to_string(x) + ", " + std::to_string(y) + ")");
        Eigen::MatrixXcd v = fwd != blocks.end() ? fwd->second : Eigen::MatrixXcd(bwd->second.adjoint());
        if (fwd != blocks.end() && bwd != blocks.end())
            worst = std::max(worst, (bwd->second - fwd->second.adjoint()).norm());
        rep.edges_[{x, y}] = v;
        rep.edges_[{y, x}] = v.adjoint();
    }

    // Spanning forest gauge: U_root = I, U_child = V(parent, child)^* U_parent.
    const std::size_t n = rel.size();
    std::vector<std::vector<int>> adjacency(n);
    for (auto [x, y] : edges) {
        adjacency[static_cast<std::size_t>(x)].push_back(y);
        adjacency[static_cast<std::size_t>(y)].push_back(x);
    }
    rep.gauge_.assign(n, Eigen::MatrixXcd::Identity(dim, dim));
    rep.component_.assign(n, -1);
    std::vector<Edge> tree;
    int next_component = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (rep.component_[root] != -1)
            continue;
        std::queue<int> frontier;
        frontier.push(static_cast<int>(root));
        rep.component_[root] = next_component;
        while (!frontier.empty()) {
            const int p = frontier.front();
            frontier.pop();
            for (int c : adjacency[static_cast<std::size_t>(p)]) {
                if (rep.component_[static_cast<std::size_t>(c)] != -1)
                    continue;
                rep.component_[static_cast<std::size_t>(c)] = next_component;
                rep.gauge_[static_cast<std::size_t>(c)] =
                    rep.edges_.at({p, c}).adjoint() * rep.gauge_[static_cast<std::size_t>(p)];
                tree.emplace_back(std::min(p, c), std::max(p, c));
                frontier.push(c);
            }
        }
        ++next_component;
    }
    std::sort(tree.begin(), tree.end());
    for (auto [x, y] : edges) {
        if (std::binary_search(tree.begin(), tree.end(), Edge{x, y}))
            continue;
        const Eigen::MatrixXcd expected = rep.gauge_[static_cast<std::size_t>(x)] * rep.gauge_[static_cast<std::size_t>(y)].adjoint();
        worst = std::max(worst, (rep.edges_.at({x, y}) - expected).norm());
    }
    rep.cycle_residual_ = worst;
    if (worst > tol)
        throw Error(ErrorKind::CycleInconsistency, "worst fundamental-cycle residual " + std::to_string(worst), worst);
    return rep;
}

/// Raw blocks V(x, y) = U_x U_y^* read off a gauge representation along the edges of K.
inline std::map<Edge, Eigen::MatrixXcd> edge_blocks_from_gauge(const Representation& rep, const Graphing& graphing)
{
    std::map<Edge, Eigen::MatrixXcd> out;
    for (auto [x, y] : graphing.normalized())
        out[{x, y}] = rep.block(x, y);
    return out;
}

}  // namespace relwalk

#endif
