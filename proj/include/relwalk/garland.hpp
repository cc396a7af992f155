#ifndef RELWALK_GARLAND_HPP
#define RELWALK_GARLAND_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "diffusion.hpp"
#include "error.hpp"
#include "models.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "relation.hpp"
#include "spectrum.hpp"
#include "walk.hpp"

namespace relwalk {

/**
 * A 2-dimensional simplicial complex with vertex masses. Edges are derived
 * from triangles; the underlying relation has the connected components of
 * the 1-skeleton as classes (vertices in no triangle are singleton classes).
 */
class Complex2 {
public:
    const FiniteRelation& relation() const noexcept { return *rel_; }
    const std::shared_ptr<const FiniteRelation>& relation_ptr() const noexcept { return rel_; }
    std::size_t vertex_count() const noexcept { return rel_->size(); }
    double mass(int x) const { return rel_->mass(x); }

    const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const std::vector<int>& neighbors(int x) const { return neighbors_.at(static_cast<std::size_t>(x)); }

    /// Number of triangles containing edge {y, z}; 0 if it is not an edge.
    int tau(int y, int z) const
    {
        const Edge key{std::min(y, z), std::max(y, z)};
        auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
        if (it == edges_.end() || *it != key)
            return 0;
        return edge_tau_[static_cast<std::size_t>(it - edges_.begin())];
    }
    /// Number of triangles containing vertex x.
    int tau(int x) const { return vertex_tau_.at(static_cast<std::size_t>(x)); }

    std::size_t max_degree() const noexcept { return max_degree_; }
    std::optional<std::size_t> degree_bound() const noexcept { return degree_bound_; }

    /// Triangles containing x, as the pair of other vertices (sorted).
    const std::vector<Edge>& opposite_edges(int x) const { return opposite_.at(static_cast<std::size_t>(x)); }

private:
    friend Complex2 build_complex(std::span<const double>, std::vector<Triangle>, std::optional<std::size_t>);

    std::shared_ptr<const FiniteRelation> rel_;
    std::vector<Triangle> triangles_;
    std::vector<Edge> edges_;
    std::vector<int> edge_tau_;
    std::vector<int> vertex_tau_;
    std::vector<std::vector<int>> neighbors_;
    std::vector<std::vector<Edge>> opposite_;
    std::size_t max_degree_ = 0;
    std::optional<std::size_t> degree_bound_;
};

/**
 * Builds a complex from positive vertex masses (rescaled to a probability
 * vector) and vertex triples. Throws DegenerateTriangle on a repeated
 * vertex, DuplicateTriangle on a repeated triple, and InvalidGraphing when
 * a declared degree bound is exceeded.
 */
inline Complex2 build_complex(std::span<const double> masses, std::vector<Triangle> triangles,
                              std::optional<std::size_t> degree_bound = std::nullopt)
{
    if (masses.empty())
        throw Error(ErrorKind::InvalidArgument, "complex needs at least one vertex");
    double total = 0.0;
    for (std::size_t i = 0; i < masses.size(); ++i) {
        if (!(masses[i] > 0.0) || !std::isfinite(masses[i]))
            throw Error(ErrorKind::NonPositiveMass, "mass of vertex " + std::to_string(i) + " is not positive",
                        static_cast<double>(i));
        total += masses[i];
    }
    std::vector<double> normalized(masses.begin(), masses.end());
    for (auto& m : normalized)
        m /= total;
    // Fold the rounding residue into the largest mass so the vector sums to 1 within 1e-12.
    const double drift = 1.0 - std::accumulate(normalized.begin(), normalized.end(), 0.0);
    *std::max_element(normalized.begin(), normalized.end()) += drift;

    const std::size_t n = masses.size();
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        auto& tri = triangles[t];
        for (int v : tri)
            if (v < 0 || static_cast<std::size_t>(v) >= n)
                throw Error(ErrorKind::InvalidPoint, "triangle " + std::to_string(t) + " references a missing vertex");
        std::sort(tri.begin(), tri.end());
        if (tri[0] == tri[1] || tri[1] == tri[2])
            throw Error(ErrorKind::DegenerateTriangle, "triangle " + std::to_string(t) + " repeats a vertex",
                        static_cast<double>(t));
    }
    std::vector<Triangle> sorted = triangles;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t t = 1; t < sorted.size(); ++t)
        if (sorted[t] == sorted[t - 1])
            throw Error(ErrorKind::DuplicateTriangle, "triangle {" + std::to_string(sorted[t][0]) + ", " +
                                                          std::to_string(sorted[t][1]) + ", " +
                                                          std::to_string(sorted[t][2]) + "} listed twice");

    Complex2 c;
    c.triangles_ = std::move(sorted);
    std::vector<Edge> all_edges;
    for (const auto& t : c.triangles_) {
        all_edges.emplace_back(t[0], t[1]);
        all_edges.emplace_back(t[0], t[2]);
        all_edges.emplace_back(t[1], t[2]);
    }
    std::sort(all_edges.begin(), all_edges.end());
    c.edges_ = all_edges;
    c.edges_.erase(std::unique(c.edges_.begin(), c.edges_.end()), c.edges_.end());
    c.edge_tau_.assign(c.edges_.size(), 0);
    for (const auto& e : all_edges)
        ++c.edge_tau_[static_cast<std::size_t>(std::lower_bound(c.edges_.begin(), c.edges_.end(), e) - c.edges_.begin())];

    c.vertex_tau_.assign(n, 0);
    c.opposite_.assign(n, {});
    for (const auto& t : c.triangles_) {
        for (int k = 0; k < 3; ++k) {
            ++c.vertex_tau_[static_cast<std::size_t>(t[static_cast<std::size_t>(k)])];
            c.opposite_[static_cast<std::size_t>(t[static_cast<std::size_t>(k)])].emplace_back(
                t[static_cast<std::size_t>((k + 1) % 3)], t[static_cast<std::size_t>((k + 2) % 3)]);
        }
    }
    for (auto& opp : c.opposite_)
        for (auto& e : opp)
            if (e.first > e.second)
                std::swap(e.first, e.second);

    c.neighbors_.assign(n, {});
    for (auto [y, z] : c.edges_) {
        c.neighbors_[static_cast<std::size_t>(y)].push_back(z);
        c.neighbors_[static_cast<std::size_t>(z)].push_back(y);
    }
    for (auto& nb : c.neighbors_) {
        std::sort(nb.begin(), nb.end());
        c.max_degree_ = std::max(c.max_degree_, nb.size());
    }
    c.degree_bound_ = degree_bound;
    if (degree_bound && c.max_degree_ > *degree_bound)
        throw Error(ErrorKind::InvalidGraphing, "vertex degree exceeds the declared bound",
                    static_cast<double>(c.max_degree_));

    const auto component = connected_components(n, c.edges_);
    c.rel_ = std::make_shared<const FiniteRelation>(build_relation(normalized, component));
    return c;
}

inline Complex2 build_complex(const std::vector<double>& masses, std::vector<Triangle> triangles,
                              std::optional<std::size_t> degree_bound = std::nullopt)
{
    return build_complex(std::span<const double>(masses), std::move(triangles), degree_bound);
}

/**
 * Link of a vertex x: vertices are the neighbors y of x, edges are the pairs
 * {y, z} with {x, y, z} a triangle. Vertex y has valence tau(x, y).
 */
struct LinkGraph {
    int center = 0;
    std::vector<int> vertices;                // ambient vertex ids, sorted
    std::vector<std::pair<int, int>> edges;   // local indices into `vertices`
    std::vector<int> valence;
    int total = 0;                            // number of link edges = tau(x)

    /// Stationary measure of the uniform walk, valence / (2 * total).
    std::vector<double> stationary() const
    {
        std::vector<double> mu(valence.size());
        for (std::size_t i = 0; i < valence.size(); ++i)
            mu[i] = static_cast<double>(valence[i]) / (2.0 * total);
        return mu;
    }

    bool connected() const
    {
        if (vertices.empty())
            return false;
        std::vector<Edge> e(edges.begin(), edges.end());
        const auto comp = connected_components(vertices.size(), e);
        return *std::max_element(comp.begin(), comp.end()) == 0;
    }
};

inline LinkGraph link(const Complex2& c, int x)
{
    if (x < 0 || static_cast<std::size_t>(x) >= c.vertex_count())
        throw Error(ErrorKind::InvalidPoint, "vertex " + std::to_string(x) + " out of range");
    if (c.tau(x) == 0)
        throw Error(ErrorKind::EmptyLink, "vertex " + std::to_string(x) + " lies in no triangle", static_cast<double>(x));
    LinkGraph l;
    l.center = x;
    l.vertices = c.neighbors(x);
    auto local = [&](int v) {
        return static_cast<int>(std::lower_bound(l.vertices.begin(), l.vertices.end(), v) - l.vertices.begin());
    };
    for (auto [y, z] : c.opposite_edges(x))
        l.edges.emplace_back(local(y), local(z));
    std::sort(l.edges.begin(), l.edges.end());
    l.valence.assign(l.vertices.size(), 0);
    for (auto [a, b] : l.edges) {
        ++l.valence[static_cast<std::size_t>(a)];
        ++l.valence[static_cast<std::size_t>(b)];
    }
    l.total = static_cast<int>(l.edges.size());
    return l;
}

/// Eigenvalues of Delta_L = I - D_L (ascending), via the symmetrization by the stationary measure.
inline Eigen::VectorXd link_laplacian_spectrum(const LinkGraph& l)
{
    const auto m = static_cast<Eigen::Index>(l.vertices.size());
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(m, m);
    for (auto [a, b] : l.edges) {
        const double w = 1.0 / std::sqrt(static_cast<double>(l.valence[static_cast<std::size_t>(a)]) *
                                         static_cast<double>(l.valence[static_cast<std::size_t>(b)]));
        s(a, b) -= w;
        s(b, a) -= w;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::EigenFailure, "link eigensolve failed");
    return solver.eigenvalues();
}

/// Smallest nonzero eigenvalue of I - D_L; requires a connected link.
inline double link_lambda1(const LinkGraph& l)
{
    if (!l.connected())
        throw Error(ErrorKind::DisconnectedLink, "link of vertex " + std::to_string(l.center) + " is disconnected",
                    static_cast<double>(l.center));
    const auto ev = link_laplacian_spectrum(l);
    if (ev.size() < 2)
        throw Error(ErrorKind::DisconnectedLink, "link of vertex " + std::to_string(l.center) + " has one vertex",
                    static_cast<double>(l.center));
    return ev(1);
}

/// max over edges {y, z} of max(delta(y, z), delta(z, y)); 1 when there are no edges.
inline double delta_mu_bound(const Complex2& c)
{
    double bound = 1.0;
    for (auto [y, z] : c.edges()) {
        const double r = c.mass(y) / c.mass(z);
        bound = std::max({bound, r, 1.0 / r});
    }
    return bound;
}

/**
 * The two walks produced by integrating the link inequalities:
 *   tau_delta(y, z)  = sum over triangles {x, y, z} of delta(x, y)
 *   tau_delta(y)     = 1/2 sum_x delta(x, y) tau(x, y)
 *   tau_lower(y, z)  = sum over x with y, z in L_x of tau(x, y) tau(x, z) delta(x, y) / (2 tau(x))
 *   nu(y->z)         = tau_delta(y, z) / (2 tau_delta(y))
 *   nu_lower(y->z)   = tau_lower(y, z) / (2 tau_delta(y))
 * Both are symmetric for d mu~(y) = 2 tau_delta(y) d mu(y) (stored normalized).
 */
struct TriangleWalks {
    RandomWalk nu;
    RandomWalk nu_lower;
    std::vector<double> tau_delta_vertex;
    double base_normalization = 1.0;
};

inline TriangleWalks triangle_walks(const Complex2& c)
{
    const std::size_t n = c.vertex_count();
    for (std::size_t y = 0; y < n; ++y)
        if (c.tau(static_cast<int>(y)) == 0)
            throw Error(ErrorKind::IsolatedVertex, "vertex " + std::to_string(y) + " lies in no triangle",
                        static_cast<double>(y));
    auto delta = [&](int a, int b) { return c.mass(a) / c.mass(b); };

    std::vector<double> tau_vertex(n, 0.0);
    for (std::size_t y = 0; y < n; ++y)
        for (int x : c.neighbors(static_cast<int>(y)))
            tau_vertex[y] += 0.5 * delta(x, static_cast<int>(y)) * c.tau(x, static_cast<int>(y));

    KernelRows upper(n), lower(n);
    for (const auto& t : c.triangles()) {
        for (int k = 0; k < 3; ++k) {
            const int x = t[static_cast<std::size_t>(k)];
            const int y = t[static_cast<std::size_t>((k + 1) % 3)];
            const int z = t[static_cast<std::size_t>((k + 2) % 3)];
            upper[static_cast<std::size_t>(y)].push_back({z, delta(x, y)});
            upper[static_cast<std::size_t>(z)].push_back({y, delta(x, z)});
        }
    }
    for (std::size_t x = 0; x < n; ++x) {
        const int xi = static_cast<int>(x);
        const double two_tau = 2.0 * c.tau(xi);
        for (int y : c.neighbors(xi))
            for (int z : c.neighbors(xi))
                lower[static_cast<std::size_t>(y)].push_back(
                    {z, c.tau(xi, y) * static_cast<double>(c.tau(xi, z)) * delta(xi, y) / two_tau});
    }
    for (std::size_t y = 0; y < n; ++y) {
        detail::sort_and_merge(upper[y]);
        detail::sort_and_merge(lower[y]);
        for (auto& t : upper[y])
            t.p /= 2.0 * tau_vertex[y];
        for (auto& t : lower[y])
            t.p /= 2.0 * tau_vertex[y];
    }

    std::vector<double> raw(n);
    for (std::size_t y = 0; y < n; ++y)
        raw[y] = 2.0 * tau_vertex[y] * c.mass(static_cast<int>(y));
    auto [base, z] = detail::normalize_measure(std::move(raw));

    WalkOptions options;
    options.row_tolerance = 1e-12;
    auto nu = RandomWalk::from_rows(c.relation_ptr(), std::move(upper), base, BaseKind::triangle, z, options);
    auto nu_lower = RandomWalk::from_rows(c.relation_ptr(), std::move(lower), base, BaseKind::triangle, z, options);
    return TriangleWalks{std::move(nu), std::move(nu_lower), std::move(tau_vertex), z};
}

struct DominationReport {
    double max_ratio = 0.0;  ///< max over nu_lower > 0 of nu^2 / nu_lower
    double bound = 1.0;      ///< delta_mu^3
    double residual = 0.0;   ///< max_ratio - bound
};

inline constexpr double kDominationSlack = 1e-12;

/// Checks nu^2 <= delta_mu^3 nu_lower entrywise, and that nu^2 has no mass where nu_lower vanishes.
inline DominationReport step2_domination(const Complex2& c, const TriangleWalks& walks)
{
    const auto two_step = convolve(walks.nu, walks.nu);
    DominationReport r;
    const double d = delta_mu_bound(c);
    r.bound = d * d * d;
    for (std::size_t y = 0; y < two_step.size(); ++y) {
        for (const auto& t : two_step.row(static_cast<int>(y))) {
            const double low = walks.nu_lower.probability(static_cast<int>(y), t.to);
            if (low == 0.0)
                throw Error(ErrorKind::SupportViolation,
                            "nu^2(" + std::to_string(y) + "->" + std::to_string(t.to) + ") > 0 where nu_lower = 0");
            r.max_ratio = std::max(r.max_ratio, t.p / low);
        }
    }
    r.residual = r.max_ratio - r.bound;
    if (r.residual > kDominationSlack)
        throw Error(ErrorKind::InvariantViolation, "nu^2 exceeds delta_mu^3 nu_lower", r.residual);
    return r;
}

inline DominationReport step2_domination(const Complex2& c)
{
    return step2_domination(c, triangle_walks(c));
}

enum class ZukVerdict { certified, refuted_strict, inapplicable };

inline std::string_view to_string(ZukVerdict v)
{
    switch (v) {
    case ZukVerdict::certified: return "certified";
    case ZukVerdict::refuted_strict: return "refuted-strict";
    case ZukVerdict::inapplicable: return "inapplicable";
    }
    return "unknown";
}

struct LinkEntry {
    enum class Status { connected, disconnected, empty };
    int vertex = 0;
    Status status = Status::connected;
    std::optional<double> lambda1;
    std::size_t link_vertices = 0;
    int link_edges = 0;
};

inline std::string_view to_string(LinkEntry::Status s)
{
    switch (s) {
    case LinkEntry::Status::connected: return "connected";
    case LinkEntry::Status::disconnected: return "disconnected";
    case LinkEntry::Status::empty: return "empty";
    }
    return "unknown";
}

struct ZukOptions {
    std::uint64_t seed = 0;
    std::size_t random_fields = 50;
    /// Simple-diffusion eigenvectors are added to the Poincare check up to this many vertices.
    std::size_t eigenvector_limit = 1024;
    /// min lambda_1 must beat delta_mu^3 / 2 by more than this.
    double margin = 1e-9;
    unsigned threads = 1;
};

struct ZukReport {
    std::vector<LinkEntry> links;
    std::optional<double> min_lambda1;
    std::vector<int> connectivity_failures;
    double delta_mu = 1.0;
    double threshold = 0.5;
    ZukVerdict verdict = ZukVerdict::inapplicable;
    std::string statement;
    std::optional<double> kappa;     ///< simple diffusion of the triangle walk nu
    std::optional<double> c2_bound;  ///< 1 + kappa
    std::optional<DominationReport> domination;
    /// min over tested fields of (delta^3 / lambda) E_nu - E_{nu^2}; should be >= -1e-10.
    std::optional<double> poincare_worst_slack;
    std::size_t poincare_fields = 0;
    double margin = 1e-9;
    std::uint64_t seed = 0;
};

inline constexpr double kPoincareSlack = 1e-10;

/**
 * Local-to-global spectral criterion on a finite 2-complex: every link
 * connected and min lambda_1 > delta_mu^3 / 2. Link spectra run in parallel
 * and are reduced in vertex order.
 */
inline ZukReport zuk_report(const Complex2& c, const ZukOptions& opt = {})
{
    const std::size_t n = c.vertex_count();
    ZukReport r;
    r.margin = opt.margin;
    r.seed = opt.seed;
    r.links.resize(n);
    parallel_for(n, opt.threads, [&](std::size_t x) {
        auto& e = r.links[x];
        e.vertex = static_cast<int>(x);
        if (c.tau(static_cast<int>(x)) == 0) {
            e.status = LinkEntry::Status::empty;
            return;
        }
        const auto l = link(c, static_cast<int>(x));
        e.link_vertices = l.vertices.size();
        e.link_edges = l.total;
        if (!l.connected()) {
            e.status = LinkEntry::Status::disconnected;
            return;
        }
        e.lambda1 = link_lambda1(l);
    });
    for (const auto& e : r.links) {
        if (e.status != LinkEntry::Status::connected)
            r.connectivity_failures.push_back(e.vertex);
        else
            r.min_lambda1 = r.min_lambda1 ? std::min(*r.min_lambda1, *e.lambda1) : *e.lambda1;
    }
    r.delta_mu = delta_mu_bound(c);
    const double cube = r.delta_mu * r.delta_mu * r.delta_mu;
    r.threshold = cube / 2.0;

    if (!r.connectivity_failures.empty() || !r.min_lambda1) {
        r.verdict = ZukVerdict::inapplicable;
        r.statement = "criterion not applicable: " + std::to_string(r.connectivity_failures.size()) +
                      " vertex link(s) empty or disconnected";
    } else if (*r.min_lambda1 - r.threshold > opt.margin) {
        r.verdict = ZukVerdict::certified;
        r.statement = "criterion inequality holds: min lambda_1 > delta_mu^3 / 2";
    } else {
        r.verdict = ZukVerdict::refuted_strict;
        r.statement = "criterion inequality fails: min lambda_1 <= delta_mu^3 / 2";
    }

    bool has_isolated = false;
    for (std::size_t x = 0; x < n; ++x)
        has_isolated = has_isolated || c.tau(static_cast<int>(x)) == 0;
    if (has_isolated)
        return r;

    const auto walks = triangle_walks(c);
    r.domination = step2_domination(c, walks);

    const auto simple = simple_diffusion(walks.nu);
    const bool with_vectors = n <= opt.eigenvector_limit;
    const auto dec = decompose(simple, {}, with_vectors);
    r.kappa = dec.report.kappa;
    if (r.kappa)
        r.c2_bound = 1.0 + *r.kappa;

    if (r.connectivity_failures.empty() && r.min_lambda1 && *r.min_lambda1 > 0.0) {
        const auto two_step = convolve(walks.nu, walks.nu);
        const auto trivial = trivial_representation(c.relation());
        const double constant = cube / *r.min_lambda1;
        double worst = std::numeric_limits<double>::infinity();
        auto check = [&](const Field& xi) {
            const double lhs = gradient_energy(two_step, trivial, xi);
            const double rhs = constant * gradient_energy(walks.nu, trivial, xi);
            worst = std::min(worst, rhs - lhs);
            ++r.poincare_fields;
        };
        Rng rng(opt.seed);
        for (std::size_t k = 0; k < opt.random_fields; ++k)
            check(Field::scalar(random_real_vector(static_cast<Eigen::Index>(n), rng)));
        if (with_vectors) {
            for (std::size_t i = 0; i < dec.report.eigenvalues.size(); ++i) {
                if (std::abs(dec.report.eigenvalues[i] - 1.0) <= dec.report.tolerance)
                    continue;
                check(Field{1, dec.from_symmetric(dec.vectors.col(static_cast<Eigen::Index>(i)))});
            }
        }
        r.poincare_worst_slack = worst;
    }
    return r;
}

}  // namespace relwalk

#endif
