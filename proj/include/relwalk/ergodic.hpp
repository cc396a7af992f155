#ifndef RELWALK_ERGODIC_HPP
#define RELWALK_ERGODIC_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "diffusion.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "relation.hpp"
#include "spectrum.hpp"
#include "walk.hpp"

namespace relwalk {

namespace detail {

inline std::vector<char> membership(std::size_t n, std::span<const int> a)
{
    if (a.empty())
        throw Error(ErrorKind::EmptySet, "point set is empty");
    std::vector<char> in(n, 0);
    for (int x : a) {
        if (x < 0 || static_cast<std::size_t>(x) >= n)
            throw Error(ErrorKind::InvalidPoint, "point " + std::to_string(x) + " out of range", static_cast<double>(x));
        in[static_cast<std::size_t>(x)] = 1;
    }
    return in;
}

inline double measure_of(const std::vector<double>& mu, const std::vector<char>& in)
{
    double total = 0.0;
    for (std::size_t x = 0; x < mu.size(); ++x)
        if (in[x])
            total += mu[x];
    return total;
}

}  // namespace detail

/// Exterior vertex boundary {y not in A : {x, y} in K for some x in A}, sorted.
inline std::vector<int> boundary(const FiniteRelation& rel, const Graphing& k, std::span<const int> a)
{
    const auto in = detail::membership(rel.size(), a);
    std::vector<char> out(rel.size(), 0);
    for (auto [x, y] : k.normalized()) {
        if (!rel.contains(x) || !rel.contains(y))
            throw Error(ErrorKind::InvalidPoint, "graphing edge leaves the relation");
        if (in[static_cast<std::size_t>(x)] && !in[static_cast<std::size_t>(y)])
            out[static_cast<std::size_t>(y)] = 1;
        if (in[static_cast<std::size_t>(y)] && !in[static_cast<std::size_t>(x)])
            out[static_cast<std::size_t>(x)] = 1;
    }
    std::vector<int> result;
    for (std::size_t y = 0; y < out.size(); ++y)
        if (out[y])
            result.push_back(static_cast<int>(y));
    return result;
}

/// Boundary with respect to the off-diagonal support of a walk.
inline std::vector<int> boundary(const RandomWalk& walk, std::span<const int> a)
{
    return boundary(walk.relation(), walk.support_graphing(), a);
}

struct AlmostFixedReport {
    Field field;                 ///< f = chi_{A-bar} - mu(A-bar), A-bar = A plus its boundary
    std::vector<int> closure;
    double mass = 0.0;           ///< mu(A)
    double closure_mass = 0.0;   ///< mu(A-bar)
    double diffusion_form = 0.0; ///< <D f, f>
    double lower_bound = 0.0;    ///< mu(A) - mu(A-bar)^2
    double norm2 = 0.0;          ///< ||f||^2 = mu(A-bar) - mu(A-bar)^2
    double rayleigh = 0.0;       ///< <D f, f> / ||f||^2
    double energy = 0.0;         ///< <(I - D) f, f>
};

inline constexpr double kSchmidtSlack = 1e-12;

/**
 * Schmidt's almost-fixed function of a set. mu is the walk's base measure,
 * for which D is self-adjoint; f is orthogonal to constants and
 * <D f, f> >= mu(A) - mu(A-bar)^2.
 */
inline AlmostFixedReport almost_fixed_from_set(const RandomWalk& walk, std::span<const int> a)
{
    const std::size_t n = walk.size();
    const auto in = detail::membership(n, a);
    AlmostFixedReport r;
    r.closure = boundary(walk, a);
    std::vector<char> closed = in;
    for (int y : r.closure)
        closed[static_cast<std::size_t>(y)] = 1;
    r.closure.clear();
    for (std::size_t x = 0; x < n; ++x)
        if (closed[x])
            r.closure.push_back(static_cast<int>(x));

    const auto& mu = walk.base_mass();
    r.mass = detail::measure_of(mu, in);
    r.closure_mass = detail::measure_of(mu, closed);
    if (r.closure_mass <= kSchmidtSlack || r.closure_mass >= 1.0 - kSchmidtSlack)
        throw Error(ErrorKind::DegenerateSet, "closure of the set has measure 0 or 1", r.closure_mass);

    Eigen::VectorXd f(static_cast<Eigen::Index>(n));
    for (std::size_t x = 0; x < n; ++x)
        f(static_cast<Eigen::Index>(x)) = (closed[x] ? 1.0 : 0.0) - r.closure_mass;
    r.field = Field::scalar(f);

    double form = 0.0, norm = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        double df = 0.0;
        for (const auto& t : walk.row(static_cast<int>(x)))
            df += t.p * f(t.to);
        form += mu[x] * df * f(static_cast<Eigen::Index>(x));
        norm += mu[x] * f(static_cast<Eigen::Index>(x)) * f(static_cast<Eigen::Index>(x));
    }
    r.diffusion_form = form;
    r.norm2 = norm;
    r.lower_bound = r.mass - r.closure_mass * r.closure_mass;
    r.rayleigh = form / norm;
    r.energy = norm - form;
    if (form < r.lower_bound - kSchmidtSlack)
        throw Error(ErrorKind::InvariantViolation, "almost-fixed bound <Df,f> >= mu(A) - mu(A-bar)^2 fails",
                    r.lower_bound - form);
    return r;
}

struct SweptSet {
    double threshold = 0.0;
    std::size_t size = 0;
    double mass = 0.0;
    double boundary_mass = 0.0;
    double ratio = 0.0;
    /// E(g) / ||g - g_bar||^2 for g = chi_Omega; absent when Omega is a union of walk components.
    std::optional<double> energy_ratio;
};

struct FolnerReport {
    std::vector<int> set;
    double mass = 0.0;
    std::vector<int> boundary;
    double boundary_mass = 0.0;
    double ratio = 0.0;
    double epsilon = 0.0;
    double mass_cap = 1.0;
    bool found = false;
    /// Which transform of which eigenvector produced the set (folner_search only).
    std::string source;
    std::vector<SweptSet> swept;
    /// Layer-cake premise sum |f(y) - f(x)| nu(x->y) mu(x) < eta * eps * ||f||_1.
    double cfw_variation = 0.0;
    double cfw_budget = 0.0;
    bool cfw_premise = false;
    std::optional<double> gap;  ///< lambda used for the Cheeger consistency check
};

inline constexpr double kCheegerSlack = 1e-10;

/**
 * Layer-cake sweep over Omega_a = {f >= a}, a running over the distinct
 * values of f in decreasing order. Returns the admissible set
 * (mu(Omega) <= mass_cap) of least boundary ratio, ties toward smaller mass.
 * When `gap` is given, every swept set is checked against
 * E(g) >= gap * ||g - g_bar||^2.
 */
inline FolnerReport sweep_folner(const RandomWalk& walk, const std::vector<double>& f, double epsilon,
                                 double mass_cap = 1.0, std::optional<double> gap = std::nullopt)
{
    const std::size_t n = walk.size();
    if (f.size() != n)
        throw Error(ErrorKind::DimensionMismatch, "field length differs from walk size");
    double fmax = 0.0;
    for (double v : f) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw Error(ErrorKind::InvalidArgument, "sweep field must be finite and nonnegative", v);
        fmax = std::max(fmax, v);
    }
    if (fmax == 0.0)
        throw Error(ErrorKind::ZeroField, "sweep field vanishes identically");

    const auto& mu = walk.base_mass();
    FolnerReport r;
    r.epsilon = epsilon;
    r.mass_cap = mass_cap;
    r.gap = gap;

    double l1 = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        l1 += mu[x] * f[x];
        for (const auto& t : walk.row(static_cast<int>(x)))
            r.cfw_variation += std::abs(f[static_cast<std::size_t>(t.to)] - f[x]) * t.p * mu[x];
    }
    r.cfw_budget = walk.eta() * epsilon * l1;
    r.cfw_premise = r.cfw_variation < r.cfw_budget;

    // Walk components carry the fixed space of the simple diffusion.
    const auto component = connected_components(n, walk.support_edges());
    const int component_count = n ? *std::max_element(component.begin(), component.end()) + 1 : 0;
    std::vector<double> component_mass(static_cast<std::size_t>(component_count), 0.0);
    for (std::size_t x = 0; x < n; ++x)
        component_mass[static_cast<std::size_t>(component[x])] += mu[x];
    std::vector<double> inside_mass(component_mass.size(), 0.0);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] > f[b]; });

    std::vector<char> in(n, 0);
    std::vector<int> inside_neighbors(n, 0);
    double mass = 0.0, boundary_mass = 0.0, cut = 0.0;
    std::optional<std::size_t> best;
    std::size_t pos = 0;
    while (pos < n) {
        const double a = f[order[pos]];
        for (; pos < n && f[order[pos]] == a; ++pos) {
            const std::size_t x = order[pos];
            const int xi = static_cast<int>(x);
            double out_p = 0.0, in_p = 0.0;
            for (const auto& t : walk.row(xi)) {
                if (t.to == xi)
                    continue;
                (in[static_cast<std::size_t>(t.to)] ? in_p : out_p) += t.p;
            }
            cut += mu[x] * (out_p - in_p);
            if (inside_neighbors[x] > 0)
                boundary_mass -= mu[x];
            in[x] = 1;
            mass += mu[x];
            inside_mass[static_cast<std::size_t>(component[x])] += mu[x];
            for (const auto& t : walk.row(xi)) {
                const auto y = static_cast<std::size_t>(t.to);
                if (t.to == xi || in[y])
                    continue;
                if (inside_neighbors[y]++ == 0)
                    boundary_mass += mu[y];
            }
        }
        SweptSet s;
        s.threshold = a;
        s.size = pos;
        s.mass = mass;
        s.boundary_mass = std::max(0.0, boundary_mass);
        s.ratio = s.boundary_mass / mass;
        double variance = 0.0;
        for (std::size_t c = 0; c < component_mass.size(); ++c)
            variance += inside_mass[c] - inside_mass[c] * inside_mass[c] / component_mass[c];
        if (variance > 1e-14)
            s.energy_ratio = std::max(0.0, cut) / variance;
        if (gap && s.energy_ratio && *s.energy_ratio < *gap - kCheegerSlack)
            throw Error(ErrorKind::InvariantViolation,
                        "swept set has energy ratio " + std::to_string(*s.energy_ratio) + " below the gap",
                        *gap - *s.energy_ratio);
        r.swept.push_back(s);
        if (s.mass <= mass_cap) {
            const auto& cur = r.swept.back();
            if (!best || cur.ratio < r.swept[*best].ratio ||
                (cur.ratio == r.swept[*best].ratio && cur.mass < r.swept[*best].mass))
                best = r.swept.size() - 1;
        }
    }

    if (r.cfw_premise) {
        double least = std::numeric_limits<double>::infinity();
        for (const auto& s : r.swept)
            least = std::min(least, s.ratio);
        if (!(least < epsilon))
            throw Error(ErrorKind::InvariantViolation, "layer-cake premise holds but no swept set has ratio < eps",
                        least);
    }

    if (best) {
        const auto& s = r.swept[*best];
        r.set.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s.size));
        std::sort(r.set.begin(), r.set.end());
        r.mass = s.mass;
        r.boundary = boundary(walk, r.set);
        r.boundary_mass = s.boundary_mass;
        r.ratio = s.ratio;
        r.found = r.ratio <= epsilon;
    }
    return r;
}

namespace detail {

inline bool better_folner(const FolnerReport& candidate, const FolnerReport& current)
{
    if (candidate.set.empty())
        return false;
    if (current.set.empty())
        return true;
    if (candidate.found != current.found)
        return candidate.found;
    if (candidate.ratio != current.ratio)
        return candidate.ratio < current.ratio;
    return candidate.mass < current.mass;
}

}  // namespace detail

struct FolnerSearchOptions {
    /// Eigenvectors tried from the top of the non-fixed spectrum.
    std::size_t eigenvectors = 4;
    SpectrumOptions spectrum;
};

/**
 * Constructive direction of the amenability criterion. Walk components of
 * mass <= cap are Folner with ratio 0. Otherwise the top non-fixed
 * eigenvectors xi of the simple diffusion are swept through |xi|, xi^2, and
 * the positive and negative parts of xi; the best admissible set wins.
 */
inline FolnerReport folner_search(const RandomWalk& walk, double epsilon, double mass_cap,
                                  const FolnerSearchOptions& opt = {})
{
    const std::size_t n = walk.size();
    const auto& mu = walk.base_mass();
    const auto component = connected_components(n, walk.support_edges());
    const int count = n ? *std::max_element(component.begin(), component.end()) + 1 : 0;
    if (count > 1) {
        std::vector<double> cmass(static_cast<std::size_t>(count), 0.0);
        for (std::size_t x = 0; x < n; ++x)
            cmass[static_cast<std::size_t>(component[x])] += mu[x];
        std::optional<int> pick;
        for (int c = 0; c < count; ++c)
            if (cmass[static_cast<std::size_t>(c)] <= mass_cap &&
                (!pick || cmass[static_cast<std::size_t>(c)] < cmass[static_cast<std::size_t>(*pick)]))
                pick = c;
        if (pick) {
            FolnerReport r;
            for (std::size_t x = 0; x < n; ++x)
                if (component[x] == *pick)
                    r.set.push_back(static_cast<int>(x));
            r.mass = cmass[static_cast<std::size_t>(*pick)];
            r.epsilon = epsilon;
            r.mass_cap = mass_cap;
            r.found = true;
            r.source = "component";
            return r;
        }
    }

    const auto d = simple_diffusion(walk);
    const auto dec = decompose(d, opt.spectrum, true);
    FolnerReport best;
    best.epsilon = epsilon;
    best.mass_cap = mass_cap;
    if (!dec.report.kappa)
        return best;
    const std::optional<double> gap = dec.report.lambda;

    std::vector<Eigen::Index> columns;
    for (Eigen::Index i = static_cast<Eigen::Index>(dec.report.eigenvalues.size()) - 1; i >= 0; --i) {
        if (std::abs(dec.report.eigenvalues[static_cast<std::size_t>(i)] - 1.0) <= dec.report.tolerance)
            continue;
        columns.push_back(i);
        if (columns.size() >= opt.eigenvectors)
            break;
    }

    struct Transform {
        const char* name;
        double (*apply)(double);
    };
    const Transform transforms[] = {
        {"abs", [](double v) { return std::abs(v); }},
        {"square", [](double v) { return v * v; }},
        {"positive", [](double v) { return std::max(v, 0.0); }},
        {"negative", [](double v) { return std::max(-v, 0.0); }},
    };
    for (auto c : columns) {
        const Eigen::VectorXcd xi = dec.from_symmetric(dec.vectors.col(c));
        // Rotate the phase so the largest entry is real; eigenvectors of real operators are then real.
        Eigen::Index arg = 0;
        xi.cwiseAbs().maxCoeff(&arg);
        const Complex phase = std::abs(xi(arg)) > 0 ? std::conj(xi(arg)) / std::abs(xi(arg)) : Complex(1.0);
        const Eigen::VectorXd re = (xi * phase).real();
        for (const auto& tr : transforms) {
            std::vector<double> f(n);
            for (std::size_t x = 0; x < n; ++x)
                f[x] = tr.apply(re(static_cast<Eigen::Index>(x)));
            if (*std::max_element(f.begin(), f.end()) == 0.0)
                continue;
            auto r = sweep_folner(walk, f, epsilon, mass_cap, gap);
            r.source = std::string(tr.name) + " of eigenvector " + std::to_string(c);
            if (detail::better_folner(r, best))
                best = std::move(r);
        }
    }
    best.epsilon = epsilon;
    best.mass_cap = mass_cap;
    best.gap = gap;
    return best;
}

struct ObservableMass {
    std::string observable;
    double mean = 0.0;
    double mass = 0.0;       ///< mu{|f - mean| <= eps}
    double variance = 0.0;
    double chebyshev = 0.0;  ///< max(0, 1 - variance / eps^2) <= mass
};

struct FieldConcentration {
    std::vector<ObservableMass> observables;
    double minimum = 1.0;
    double first_moment = 0.0;  ///< integral of ||xi_x|| d mu
};

/**
 * Concentration masses along linear observables Re<xi_x, eta> and norm
 * observables ||xi_x - c||. Every observable is 1-Lipschitz, so the
 * minimum is an upper bound on the infimum over all 1-Lipschitz functions.
 */
struct ConcentrationReport {
    std::vector<FieldConcentration> fields;
    double minimum = 1.0;
    double epsilon = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline ObservableMass concentrate(std::string name, const std::vector<double>& values, const std::vector<double>& mu,
                                  double epsilon)
{
    ObservableMass o;
    o.observable = std::move(name);
    for (std::size_t x = 0; x < values.size(); ++x)
        o.mean += mu[x] * values[x];
    for (std::size_t x = 0; x < values.size(); ++x) {
        const double dev = values[x] - o.mean;
        o.variance += mu[x] * dev * dev;
        if (std::abs(dev) <= epsilon)
            o.mass += mu[x];
    }
    o.mass = std::min(1.0, o.mass);
    o.chebyshev = std::max(0.0, 1.0 - o.variance / (epsilon * epsilon));
    return o;
}

}  // namespace detail

/**
 * Observables per field, in order: coordinate directions e_j and i e_j, then
 * `samples` seeded random unit directions, then `samples` norm observables
 * centered at field values of seeded random points. Each field draws from
 * its own stream seeded by (seed, field index), so adding samples only
 * appends observables and never raises the minimum.
 */
inline ConcentrationReport concentration_report(const std::vector<Field>& fields, const FiniteRelation& rel,
                                                double epsilon, std::size_t samples, std::uint64_t seed = 0,
                                                unsigned threads = 1)
{
    if (!(epsilon > 0.0))
        throw Error(ErrorKind::InvalidArgument, "concentration needs eps > 0", epsilon);
    const std::size_t n = rel.size();
    const auto& mu = rel.masses();
    ConcentrationReport r;
    r.epsilon = epsilon;
    r.samples = samples;
    r.seed = seed;
    r.fields.resize(fields.size());
    for (const auto& xi : fields)
        if (xi.points() != n || xi.dim < 1)
            throw Error(ErrorKind::DimensionMismatch, "field does not match the relation");

    parallel_for(fields.size(), threads, [&](std::size_t k) {
        const Field& xi = fields[k];
        const int d = xi.dim;
        auto& out = r.fields[k];
        std::vector<double> values(n);
        auto linear = [&](const Eigen::VectorXcd& eta) {
            for (std::size_t x = 0; x < n; ++x)
                values[x] = eta.dot(xi.at(static_cast<int>(x))).real();
            return values;
        };
        for (int j = 0; j < d; ++j) {
            Eigen::VectorXcd e = Eigen::VectorXcd::Zero(d);
            e(j) = 1.0;
            out.observables.push_back(detail::concentrate("re e" + std::to_string(j), linear(e), mu, epsilon));
            e(j) = Complex(0.0, 1.0);
            out.observables.push_back(detail::concentrate("im e" + std::to_string(j), linear(e), mu, epsilon));
        }
        Rng directions(seed ^ (0x9e3779b97f4a7c15ULL * (k + 1)));
        Rng centers(seed ^ (0xc2b2ae3d27d4eb4fULL * (k + 1)));
        for (std::size_t s = 0; s < samples; ++s) {
            Eigen::VectorXcd eta = random_complex_vector(d, directions);
            eta.normalize();
            out.observables.push_back(detail::concentrate("random " + std::to_string(s), linear(eta), mu, epsilon));
        }
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t s = 0; s < samples; ++s) {
            const int c = static_cast<int>(pick(centers));
            for (std::size_t x = 0; x < n; ++x)
                values[x] = (xi.at(static_cast<int>(x)) - xi.at(c)).norm();
            out.observables.push_back(
                detail::concentrate("norm at " + std::to_string(c), values, mu, epsilon));
        }
        for (std::size_t x = 0; x < n; ++x)
            out.first_moment += mu[x] * xi.at(static_cast<int>(x)).norm();
        for (const auto& o : out.observables)
            out.minimum = std::min(out.minimum, o.mass);
    });
    for (const auto& f : r.fields)
        r.minimum = std::min(r.minimum, f.minimum);
    return r;
}

}  // namespace relwalk

#endif
