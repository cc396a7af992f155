#ifndef RELWALK_WALK_HPP
#define RELWALK_WALK_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "error.hpp"
#include "parallel.hpp"
#include "relation.hpp"

namespace relwalk {

/// Which measure a walk is symmetric with respect to.
enum class BaseKind {
    mu,        ///< the relation's own masses
    tilde,     ///< delta(x) mu(x), delta(x) = sum over support of sqrt(delta(y, x))
    triangle,  ///< 2 tau_delta(y) mu(y), the measure of the triangle walks of a 2-complex
};

inline std::string_view to_string(BaseKind k)
{
    switch (k) {
    case BaseKind::mu: return "mu";
    case BaseKind::tilde: return "tilde";
    case BaseKind::triangle: return "triangle";
    }
    return "unknown";
}

struct Transition {
    int to;
    double p;
};

using KernelRows = std::vector<std::vector<Transition>>;

struct WalkOptions {
    /// Declared lower bound eta for "symmetric bounded"; 0 means report-only.
    double eta_threshold = 0.0;
    double row_tolerance = 1e-12;
    /// Relative tolerance for base(x) nu(x->y) = base(y) nu(y->x).
    double balance_tolerance = 1e-10;
    bool check_balance = true;
};

/**
 * A row-stochastic kernel on the points of a relation, supported inside the
 * classes, together with the probability measure it is symmetric for.
 * Rows are sorted by target and hold only positive entries.
 */
class RandomWalk {
public:
    /// Validates and assembles a walk. Duplicate targets within a row are summed.
    static RandomWalk from_rows(std::shared_ptr<const FiniteRelation> rel, KernelRows rows, std::vector<double> base,
                                BaseKind kind, double base_normalization = 1.0, const WalkOptions& options = {});

    const FiniteRelation& relation() const noexcept { return *rel_; }
    const std::shared_ptr<const FiniteRelation>& relation_ptr() const noexcept { return rel_; }
    std::size_t size() const noexcept { return rows_.size(); }

    const std::vector<Transition>& row(int x) const { return rows_.at(static_cast<std::size_t>(x)); }
    const KernelRows& rows() const noexcept { return rows_; }

    double probability(int x, int y) const
    {
        const auto& r = row(x);
        auto it = std::lower_bound(r.begin(), r.end(), y, [](const Transition& t, int v) { return t.to < v; });
        return (it != r.end() && it->to == y) ? it->p : 0.0;
    }

    const std::vector<double>& base_mass() const noexcept { return base_; }
    double base(int x) const { return base_.at(static_cast<std::size_t>(x)); }
    BaseKind base_kind() const noexcept { return kind_; }
    /// Total of the unnormalized base measure before it was scaled to a probability vector.
    double base_normalization() const noexcept { return base_normalization_; }

    double eta() const noexcept { return eta_; }
    double eta_threshold() const noexcept { return eta_threshold_; }
    bool bounded() const noexcept { return eta_ > 0.0 && eta_ >= eta_threshold_; }

    /// Off-diagonal support as unordered edges (x < y), sorted.
    std::vector<Edge> support_edges() const
    {
        std::vector<Edge> out;
        for (std::size_t x = 0; x < rows_.size(); ++x)
            for (const auto& t : rows_[x])
                if (t.to > static_cast<int>(x))
                    out.emplace_back(static_cast<int>(x), t.to);
        return out;
    }

    Graphing support_graphing() const { return Graphing{support_edges(), std::nullopt}; }

    std::size_t nonzeros() const noexcept
    {
        std::size_t n = 0;
        for (const auto& r : rows_)
            n += r.size();
        return n;
    }

private:
    std::shared_ptr<const FiniteRelation> rel_;
    KernelRows rows_;
    std::vector<double> base_;
    BaseKind kind_ = BaseKind::mu;
    double base_normalization_ = 1.0;
    double eta_ = 0.0;
    double eta_threshold_ = 0.0;
};

namespace detail {

inline void sort_and_merge(std::vector<Transition>& row)
{
    std::sort(row.begin(), row.end(), [](const Transition& a, const Transition& b) { return a.to < b.to; });
    std::vector<Transition> merged;
    merged.reserve(row.size());
    for (const auto& t : row) {
        if (!merged.empty() && merged.back().to == t.to)
            merged.back().p += t.p;
        else
            merged.push_back(t);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(), [](const Transition& t) { return t.p == 0.0; }),
                 merged.end());
    row = std::move(merged);
}

inline std::pair<std::vector<double>, double> normalize_measure(std::vector<double> raw)
{
    const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
    for (auto& v : raw)
        v /= total;
    return {std::move(raw), total};
}

inline double probability_in(const std::vector<Transition>& r, int y)
{
    auto it = std::lower_bound(r.begin(), r.end(), y, [](const Transition& t, int v) { return t.to < v; });
    return (it != r.end() && it->to == y) ? it->p : 0.0;
}

}  // namespace detail

/// Largest |base(x) nu(x->y) - base(y) nu(y->x)| over ordered pairs.
inline double detailed_balance_violation(const RandomWalk& w)
{
    double worst = 0.0;
    for (std::size_t x = 0; x < w.size(); ++x) {
        for (const auto& t : w.row(static_cast<int>(x))) {
            const double forward = w.base(static_cast<int>(x)) * t.p;
            const double backward = w.base(t.to) * w.probability(t.to, static_cast<int>(x));
            worst = std::max(worst, std::abs(forward - backward));
        }
    }
    return worst;
}

inline RandomWalk RandomWalk::from_rows(std::shared_ptr<const FiniteRelation> rel, KernelRows rows,
                                        std::vector<double> base, BaseKind kind, double base_normalization,
                                        const WalkOptions& options)
{
    if (!rel)
        throw Error(ErrorKind::InvalidArgument, "walk without relation");
    const std::size_t n = rel->size();
    if (rows.size() != n || base.size() != n)
        throw Error(ErrorKind::DimensionMismatch, "kernel/base size does not match the relation");

    for (std::size_t x = 0; x < n; ++x) {
        for (const auto& t : rows[x]) {
            if (!rel->contains(t.to))
                throw Error(ErrorKind::InvalidPoint, "transition target " + std::to_string(t.to) + " out of range");
            if (!(t.p >= 0.0) || !std::isfinite(t.p))
                throw Error(ErrorKind::InvalidProbability,
                            "nu(" + std::to_string(x) + "->" + std::to_string(t.to) + ") is not a probability", t.p);
            if (!rel->equivalent(static_cast<int>(x), t.to))
                throw Error(ErrorKind::NotEquivalent,
                            "transition " + std::to_string(x) + "->" + std::to_string(t.to) + " leaves the class");
        }
        detail::sort_and_merge(rows[x]);
        double sum = 0.0;
        for (const auto& t : rows[x])
            sum += t.p;
        if (std::abs(sum - 1.0) > options.row_tolerance)
            throw Error(ErrorKind::RowSumError, "row " + std::to_string(x) + " sums to " + std::to_string(sum),
                        std::abs(sum - 1.0));
    }
    for (std::size_t x = 0; x < n; ++x) {
        if (!(base[x] > 0.0))
            throw Error(ErrorKind::NonPositiveMass, "base measure vanishes at point " + std::to_string(x),
                        static_cast<double>(x));
        for (const auto& t : rows[x])
            if (detail::probability_in(rows[static_cast<std::size_t>(t.to)], static_cast<int>(x)) == 0.0)
                throw Error(ErrorKind::AsymmetricSupport,
                            "nu(" + std::to_string(x) + "->" + std::to_string(t.to) + ") > 0 but reverse is 0");
    }

    RandomWalk w;
    w.rel_ = std::move(rel);
    w.rows_ = std::move(rows);
    w.base_ = std::move(base);
    w.kind_ = kind;
    w.base_normalization_ = base_normalization;
    w.eta_threshold_ = options.eta_threshold;
    w.eta_ = std::numeric_limits<double>::infinity();
    for (const auto& r : w.rows_)
        for (const auto& t : r)
            w.eta_ = std::min(w.eta_, t.p);

    if (options.check_balance) {
        double worst_rel = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
            for (const auto& t : w.rows_[x]) {
                const double forward = w.base_[x] * t.p;
                const double backward = w.base_[static_cast<std::size_t>(t.to)] * w.probability(t.to, static_cast<int>(x));
                worst_rel = std::max(worst_rel, std::abs(forward - backward) / std::max(forward, backward));
            }
        }
        if (worst_rel > options.balance_tolerance)
            throw Error(ErrorKind::DetailedBalanceViolation,
                        "relative detailed-balance residual " + std::to_string(worst_rel), detailed_balance_violation(w));
    }
    return w;
}

/// nu(x->x) = 1 with base mu.
inline RandomWalk identity_walk(std::shared_ptr<const FiniteRelation> rel)
{
    KernelRows rows(rel->size());
    for (std::size_t x = 0; x < rows.size(); ++x)
        rows[x].push_back({static_cast<int>(x), 1.0});
    auto base = rel->masses();
    return RandomWalk::from_rows(std::move(rel), std::move(rows), std::move(base), BaseKind::mu);
}

/**
 * The regular walk on a graphing: nu(x->y) proportional to sqrt(delta(y, x))
 * over the edges at x. It is symmetric for d mu~(x) = delta(x) d mu(x) with
 * delta(x) = sum_y sqrt(delta(y, x)); mu~ is stored normalized.
 */
inline RandomWalk regular_walk(std::shared_ptr<const FiniteRelation> rel, const Graphing& graphing,
                               const WalkOptions& options = {})
{
    require_valid_graphing(*rel, graphing);
    const std::size_t n = rel->size();
    std::vector<std::vector<int>> adjacency(n);
    for (auto [x, y] : graphing.normalized()) {
        adjacency[static_cast<std::size_t>(x)].push_back(y);
        adjacency[static_cast<std::size_t>(y)].push_back(x);
    }
    KernelRows rows(n);
    std::vector<double> raw_base(n);
    for (std::size_t x = 0; x < n; ++x) {
        if (adjacency[x].empty())
            throw Error(ErrorKind::IsolatedPoint, "point " + std::to_string(x) + " has no edge", static_cast<double>(x));
        double total = 0.0;
        for (int y : adjacency[x])
            total += std::sqrt(cocycle(*rel, y, static_cast<int>(x)));
        for (int y : adjacency[x])
            rows[x].push_back({y, std::sqrt(cocycle(*rel, y, static_cast<int>(x))) / total});
        raw_base[x] = total * rel->mass(static_cast<int>(x));
    }
    auto [base, z] = detail::normalize_measure(std::move(raw_base));
    return RandomWalk::from_rows(std::move(rel), std::move(rows), std::move(base), BaseKind::tilde, z, options);
}

/// Measure delta(x) mu(x) built from the off-diagonal support of `rows`.
inline std::pair<std::vector<double>, double> tilde_measure(const FiniteRelation& rel, const KernelRows& rows)
{
    std::vector<double> raw(rel.size(), 0.0);
    for (std::size_t x = 0; x < rows.size(); ++x) {
        double delta = 0.0;
        for (const auto& t : rows[x])
            if (t.to != static_cast<int>(x) && t.p > 0.0)
                delta += std::sqrt(cocycle(rel, t.to, static_cast<int>(x)));
        if (delta == 0.0)
            throw Error(ErrorKind::IsolatedPoint, "point " + std::to_string(x) + " has no off-diagonal transition",
                        static_cast<double>(x));
        raw[x] = delta * rel.mass(static_cast<int>(x));
    }
    return detail::normalize_measure(std::move(raw));
}

struct KernelEntry {
    int x;
    int y;
    double p;
};

/// A user-specified walk; base measure selected by `kind` (mu or tilde).
inline RandomWalk custom_walk(std::shared_ptr<const FiniteRelation> rel, const std::vector<KernelEntry>& entries,
                              BaseKind kind = BaseKind::mu, const WalkOptions& options = {})
{
    KernelRows rows(rel->size());
    for (const auto& e : entries) {
        if (!rel->contains(e.x) || !rel->contains(e.y))
            throw Error(ErrorKind::InvalidPoint,
                        "entry (" + std::to_string(e.x) + ", " + std::to_string(e.y) + ") out of range");
        rows[static_cast<std::size_t>(e.x)].push_back({e.y, e.p});
    }
    std::vector<double> base;
    double z = 1.0;
    switch (kind) {
    case BaseKind::mu:
        base = rel->masses();
        break;
    case BaseKind::tilde:
        std::tie(base, z) = tilde_measure(*rel, rows);
        break;
    case BaseKind::triangle:
        throw Error(ErrorKind::InvalidArgument, "triangle base measure is only produced by triangle_walks");
    }
    return RandomWalk::from_rows(std::move(rel), std::move(rows), std::move(base), kind, z, options);
}

namespace detail {

inline bool same_relation(const FiniteRelation& a, const FiniteRelation& b)
{
    return &a == &b || (a.masses() == b.masses() && a.class_ids() == b.class_ids());
}

inline bool same_measure(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > 1e-12 * std::max(std::abs(a[i]), std::abs(b[i])))
            return false;
    return true;
}

}  // namespace detail

/// Two-step chain (w1 * w2)(x->y) = sum_z w1(x->z) w2(z->y). Rows are independent; summation order is fixed.
inline RandomWalk convolve(const RandomWalk& w1, const RandomWalk& w2, unsigned threads = 1)
{
    if (!detail::same_relation(w1.relation(), w2.relation()))
        throw Error(ErrorKind::InvalidArgument, "walks live on different relations");
    if (!detail::same_measure(w1.base_mass(), w2.base_mass()))
        throw Error(ErrorKind::BaseMeasureMismatch, "walks are symmetric for different base measures");

    const std::size_t n = w1.size();
    KernelRows rows(n);
    parallel_for(n, threads, [&](std::size_t x) {
        std::vector<std::pair<int, double>> acc;
        for (const auto& a : w1.row(static_cast<int>(x)))
            for (const auto& b : w2.row(a.to))
                acc.emplace_back(b.to, a.p * b.p);
        std::stable_sort(acc.begin(), acc.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
        auto& row = rows[x];
        for (const auto& [y, p] : acc) {
            if (!row.empty() && row.back().to == y)
                row.back().p += p;
            else
                row.push_back({y, p});
        }
    });
    WalkOptions options;
    options.eta_threshold = w1.eta_threshold();
    options.row_tolerance = 1e-9;
    options.balance_tolerance = 1e-8;
    return RandomWalk::from_rows(w1.relation_ptr(), std::move(rows), w1.base_mass(), w1.base_kind(),
                                 w1.base_normalization(), options);
}

/// nu^n = nu^(n-1) * nu; n = 0 gives the identity walk with the same base.
inline RandomWalk power(const RandomWalk& w, int n, unsigned threads = 1)
{
    if (n < 0)
        throw Error(ErrorKind::InvalidArgument, "negative walk power");
    KernelRows id(w.size());
    for (std::size_t x = 0; x < id.size(); ++x)
        id[x].push_back({static_cast<int>(x), 1.0});
    WalkOptions options;
    options.eta_threshold = w.eta_threshold();
    RandomWalk result = RandomWalk::from_rows(w.relation_ptr(), std::move(id), w.base_mass(), w.base_kind(),
                                              w.base_normalization(), options);
    for (int k = 0; k < n; ++k)
        result = convolve(result, w, threads);
    return result;
}

using Permutation = std::vector<int>;

inline void check_permutation(const Permutation& s, std::size_t n, std::size_t index)
{
    if (s.size() != n)
        throw Error(ErrorKind::InvalidPermutation, "generator " + std::to_string(index) + " has wrong length");
    std::vector<bool> hit(n, false);
    for (int v : s) {
        if (v < 0 || static_cast<std::size_t>(v) >= n || hit[static_cast<std::size_t>(v)])
            throw Error(ErrorKind::InvalidPermutation, "generator " + std::to_string(index) + " is not a bijection");
        hit[static_cast<std::size_t>(v)] = true;
    }
}

inline Permutation inverse(const Permutation& s)
{
    Permutation inv(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        inv[static_cast<std::size_t>(s[i])] = static_cast<int>(i);
    return inv;
}

struct ActionWalk {
    std::shared_ptr<const FiniteRelation> relation;
    RandomWalk walk;
};

/**
 * Random walk of a finite permutation action: the relation is the orbit
 * partition with uniform masses, nu(x->y) = sum of prob(s) over generators
 * with s(x) = y. The generating measure must be symmetric, i.e. s and s^-1
 * carry equal total probability.
 */
inline ActionWalk cayley_action_walk(std::size_t n, const std::vector<Permutation>& generators,
                                     const std::vector<double>& probs)
{
    if (n == 0)
        throw Error(ErrorKind::InvalidArgument, "empty point set");
    if (generators.size() != probs.size() || generators.empty())
        throw Error(ErrorKind::InvalidArgument, "need one probability per generator");
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!(probs[i] > 0.0))
            throw Error(ErrorKind::InvalidProbability, "generator probability must be positive", probs[i]);
        total += probs[i];
        check_permutation(generators[i], n, i);
    }
    if (std::abs(total - 1.0) > kMassSumTolerance)
        throw Error(ErrorKind::ProbSumError, "generator probabilities sum to " + std::to_string(total), total);

    // Symmetry of the generating measure: weight(s) == weight(s^-1).
    auto weight_of = [&](const Permutation& s) {
        double wsum = 0.0;
        for (std::size_t j = 0; j < generators.size(); ++j)
            if (generators[j] == s)
                wsum += probs[j];
        return wsum;
    };
    for (std::size_t i = 0; i < generators.size(); ++i) {
        const double a = weight_of(generators[i]);
        const double b = weight_of(inverse(generators[i]));
        if (std::abs(a - b) > 1e-12)
            throw Error(ErrorKind::AsymmetricGeneratorSet,
                        "generator " + std::to_string(i) + " and its inverse carry different probabilities", a - b);
    }

    std::vector<Edge> orbit_edges;
    for (const auto& s : generators)
        for (std::size_t x = 0; x < n; ++x)
            if (s[x] != static_cast<int>(x))
                orbit_edges.emplace_back(static_cast<int>(x), s[x]);
    const auto orbit = connected_components(n, orbit_edges);
    std::vector<double> masses(n, 1.0 / static_cast<double>(n));
    auto rel = std::make_shared<const FiniteRelation>(build_relation(masses, orbit));

    KernelRows rows(n);
    for (std::size_t i = 0; i < generators.size(); ++i)
        for (std::size_t x = 0; x < n; ++x)
            rows[x].push_back({generators[i][x], probs[i]});
    auto base = rel->masses();
    auto walk = RandomWalk::from_rows(rel, std::move(rows), std::move(base), BaseKind::mu);
    return {rel, std::move(walk)};
}

}  // namespace relwalk

#endif
