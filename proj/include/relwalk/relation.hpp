#ifndef RELWALK_RELATION_HPP
#define RELWALK_RELATION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace relwalk {

/// Tolerance on the total mass of a probability vector.
inline constexpr double kMassSumTolerance = 1e-12;

using Edge = std::pair<int, int>;

/**
 * A finite probability space partitioned into classes. Points are dense
 * indices 0..N-1; class ids are dense indices 0..C-1 assigned in order of
 * first appearance. The Radon-Nikodym cocycle is derived from the masses,
 * delta(x, y) = mass(x) / mass(y), so the cocycle law holds by construction.
 *
 * Instances are immutable after construction.
 */
class FiniteRelation {
public:
    FiniteRelation() = default;

    std::size_t size() const noexcept { return mass_.size(); }
    std::size_t class_count() const noexcept { return classes_.size(); }

    double mass(int x) const { return mass_.at(static_cast<std::size_t>(x)); }
    const std::vector<double>& masses() const noexcept { return mass_; }

    int class_of(int x) const { return class_of_.at(static_cast<std::size_t>(x)); }
    const std::vector<int>& class_ids() const noexcept { return class_of_; }

    const std::vector<int>& members(int c) const { return classes_.at(static_cast<std::size_t>(c)); }
    const std::vector<std::vector<int>>& classes() const noexcept { return classes_; }

    bool contains(int x) const noexcept { return x >= 0 && static_cast<std::size_t>(x) < mass_.size(); }
    bool equivalent(int x, int y) const { return class_of(x) == class_of(y); }

    double class_mass(int c) const
    {
        double total = 0.0;
        for (int x : members(c))
            total += mass_[static_cast<std::size_t>(x)];
        return total;
    }

private:
    template <typename Label>
    friend FiniteRelation build_relation(std::span<const double>, std::span<const Label>);
    friend FiniteRelation build_relation_from_classes(std::span<const double>, const std::vector<std::vector<int>>&);

    std::vector<double> mass_;
    std::vector<int> class_of_;
    std::vector<std::vector<int>> classes_;
};

namespace detail {

inline void check_masses(std::span<const double> masses)
{
    if (masses.empty())
        throw Error(ErrorKind::InvalidArgument, "relation needs at least one point");
    for (std::size_t i = 0; i < masses.size(); ++i) {
        if (!(masses[i] > 0.0) || !std::isfinite(masses[i]))
            throw Error(ErrorKind::NonPositiveMass, "mass of point " + std::to_string(i) + " is not a positive finite number",
                        static_cast<double>(i));
    }
    const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
    if (std::abs(total - 1.0) > kMassSumTolerance)
        throw Error(ErrorKind::MassSumMismatch, "masses sum to " + std::to_string(total) + ", expected 1", total);
}

}  // namespace detail

/**
 * Builds a relation from point masses and a parallel array of class labels.
 * Labels may be any ordered type; they are renumbered densely in order of
 * first appearance.
 */
template <typename Label>
FiniteRelation build_relation(std::span<const double> masses, std::span<const Label> class_labels)
{
    detail::check_masses(masses);
    if (class_labels.size() != masses.size())
        throw Error(ErrorKind::InvalidArgument, "masses and classes have different lengths");

    FiniteRelation rel;
    rel.mass_.assign(masses.begin(), masses.end());
    rel.class_of_.resize(masses.size());
    std::map<Label, int> dense;
    for (std::size_t x = 0; x < class_labels.size(); ++x) {
        auto [it, inserted] = dense.emplace(class_labels[x], static_cast<int>(dense.size()));
        if (inserted)
            rel.classes_.emplace_back();
        rel.class_of_[x] = it->second;
        rel.classes_[static_cast<std::size_t>(it->second)].push_back(static_cast<int>(x));
    }
    return rel;
}

template <typename Label>
FiniteRelation build_relation(const std::vector<double>& masses, const std::vector<Label>& class_labels)
{
    return build_relation(std::span<const double>(masses), std::span<const Label>(class_labels));
}

/// Builds a relation from an explicit partition; every class must be nonempty.
inline FiniteRelation build_relation_from_classes(std::span<const double> masses,
                                                  const std::vector<std::vector<int>>& classes)
{
    detail::check_masses(masses);
    FiniteRelation rel;
    rel.mass_.assign(masses.begin(), masses.end());
    rel.class_of_.assign(masses.size(), -1);
    for (std::size_t c = 0; c < classes.size(); ++c) {
        if (classes[c].empty())
            throw Error(ErrorKind::EmptyClass, "class " + std::to_string(c) + " has no points", static_cast<double>(c));
        for (int x : classes[c]) {
            if (x < 0 || static_cast<std::size_t>(x) >= masses.size())
                throw Error(ErrorKind::InvalidPoint, "point " + std::to_string(x) + " out of range");
            if (rel.class_of_[static_cast<std::size_t>(x)] != -1)
                throw Error(ErrorKind::InvalidArgument, "point " + std::to_string(x) + " listed in two classes");
            rel.class_of_[static_cast<std::size_t>(x)] = static_cast<int>(c);
        }
        std::vector<int> sorted = classes[c];
        std::sort(sorted.begin(), sorted.end());
        rel.classes_.push_back(std::move(sorted));
    }
    for (std::size_t x = 0; x < masses.size(); ++x)
        if (rel.class_of_[x] == -1)
            throw Error(ErrorKind::InvalidArgument, "point " + std::to_string(x) + " belongs to no class");
    return rel;
}

/// A single class holding every point.
inline FiniteRelation single_class_relation(std::span<const double> masses)
{
    std::vector<int> labels(masses.size(), 0);
    return build_relation(masses, std::span<const int>(labels));
}

inline FiniteRelation uniform_relation(std::size_t n)
{
    std::vector<double> masses(n, 1.0 / static_cast<double>(n));
    return single_class_relation(masses);
}

/// Radon-Nikodym cocycle delta(x, y) = mass(x) / mass(y) for x ~ y.
inline double cocycle(const FiniteRelation& rel, int x, int y)
{
    if (!rel.contains(x) || !rel.contains(y))
        throw Error(ErrorKind::InvalidPoint, "cocycle point out of range");
    if (!rel.equivalent(x, y))
        throw Error(ErrorKind::NotEquivalent,
                    "points " + std::to_string(x) + " and " + std::to_string(y) + " lie in different classes");
    return rel.mass(x) / rel.mass(y);
}

/// Unordered edge set on the points of a relation.
struct Graphing {
    std::vector<Edge> edges;
    std::optional<std::size_t> degree_bound;

    /// Edges with (min, max) orientation, sorted and deduplicated; self-loops dropped.
    std::vector<Edge> normalized() const
    {
        std::vector<Edge> out;
        out.reserve(edges.size());
        for (auto [x, y] : edges) {
            if (x == y)
                continue;
            out.emplace_back(std::min(x, y), std::max(x, y));
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

/// Component label for each of n points, numbered in order of smallest member.
inline std::vector<int> connected_components(std::size_t n, const std::vector<Edge>& edges)
{
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[static_cast<std::size_t>(v)] != v) {
            parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
            v = parent[static_cast<std::size_t>(v)];
        }
        return v;
    };
    for (auto [x, y] : edges) {
        int a = find(x), b = find(y);
        if (a != b)
            parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
    std::vector<int> label(n, -1);
    int next = 0;
    std::vector<int> root_label(n, -1);
    for (std::size_t v = 0; v < n; ++v) {
        int r = find(static_cast<int>(v));
        if (root_label[static_cast<std::size_t>(r)] < 0)
            root_label[static_cast<std::size_t>(r)] = next++;
        label[v] = root_label[static_cast<std::size_t>(r)];
    }
    return label;
}

struct GraphingViolation {
    enum class Kind { OutOfRange, SelfLoop, Duplicate, CrossClass, DegreeExceeded };
    Kind kind;
    int x;
    int y;  // for DegreeExceeded: the degree
};

inline std::string_view to_string(GraphingViolation::Kind k)
{
    switch (k) {
    case GraphingViolation::Kind::OutOfRange: return "OutOfRange";
    case GraphingViolation::Kind::SelfLoop: return "SelfLoop";
    case GraphingViolation::Kind::Duplicate: return "Duplicate";
    case GraphingViolation::Kind::CrossClass: return "CrossClass";
    case GraphingViolation::Kind::DegreeExceeded: return "DegreeExceeded";
    }
    return "Unknown";
}

struct GraphingReport {
    std::vector<bool> class_connected;
    std::size_t max_degree = 0;
    std::optional<std::size_t> degree_bound;
    std::vector<GraphingViolation> violations;

    bool ok() const noexcept { return violations.empty(); }
    bool all_connected() const noexcept
    {
        return std::all_of(class_connected.begin(), class_connected.end(), [](bool b) { return b; });
    }
};

inline GraphingReport validate_graphing(const FiniteRelation& rel, const Graphing& graphing)
{
    using Kind = GraphingViolation::Kind;
    GraphingReport report;
    report.degree_bound = graphing.degree_bound;

    std::vector<Edge> seen;
    std::vector<Edge> valid;
    for (auto [x, y] : graphing.edges) {
        if (!rel.contains(x) || !rel.contains(y)) {
            report.violations.push_back({Kind::OutOfRange, x, y});
            continue;
        }
        if (x == y) {
            report.violations.push_back({Kind::SelfLoop, x, y});
            continue;
        }
        if (!rel.equivalent(x, y)) {
            report.violations.push_back({Kind::CrossClass, x, y});
            continue;
        }
        valid.emplace_back(std::min(x, y), std::max(x, y));
    }
    std::vector<Edge> sorted = valid;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] == sorted[i - 1])
            report.violations.push_back({Kind::Duplicate, sorted[i].first, sorted[i].second});
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    std::vector<std::size_t> degree(rel.size(), 0);
    for (auto [x, y] : sorted) {
        ++degree[static_cast<std::size_t>(x)];
        ++degree[static_cast<std::size_t>(y)];
    }
    for (std::size_t x = 0; x < degree.size(); ++x) {
        report.max_degree = std::max(report.max_degree, degree[x]);
        if (graphing.degree_bound && degree[x] > *graphing.degree_bound)
            report.violations.push_back({Kind::DegreeExceeded, static_cast<int>(x), static_cast<int>(degree[x])});
    }

    const auto component = connected_components(rel.size(), sorted);
    report.class_connected.resize(rel.class_count());
    for (std::size_t c = 0; c < rel.class_count(); ++c) {
        const auto& members = rel.members(static_cast<int>(c));
        const int first = component[static_cast<std::size_t>(members.front())];
        report.class_connected[c] = std::all_of(members.begin(), members.end(), [&](int x) {
            return component[static_cast<std::size_t>(x)] == first;
        });
    }
    return report;
}

/// Throws InvalidGraphing if the graphing has any violation.
inline void require_valid_graphing(const FiniteRelation& rel, const Graphing& graphing)
{
    auto report = validate_graphing(rel, graphing);
    if (!report.ok()) {
        const auto& v = report.violations.front();
        throw Error(ErrorKind::InvalidGraphing, std::string(to_string(v.kind)) + " at (" + std::to_string(v.x) + ", " +
                                                    std::to_string(v.y) + ")");
    }
}

}  // namespace relwalk

#endif
