#ifndef RELWALK_SPECTRUM_HPP
#define RELWALK_SPECTRUM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "diffusion.hpp"
#include "eigen.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace relwalk {

struct SpectrumOptions {
    /// Eigenvalue-1 clustering tolerance.
    double tolerance = 1e-9;
    /// c_n is tabulated for n = 2..max_poincare_n.
    int max_poincare_n = 8;
    /// Cross-check fixed_dim against a rank-revealing QR of I - S on the dense path.
    bool rank_check = true;
    EigenOptions eigen;
};

/// sum_{k<n} t^k.
inline double geometric_sum(double t, int n)
{
    double total = 0.0, power = 1.0;
    for (int k = 0; k < n; ++k) {
        total += power;
        power *= t;
    }
    return total;
}

struct SpectrumReport {
    std::vector<double> eigenvalues;  ///< ascending; eigenvalues of W^{1/2} D W^{-1/2}
    std::size_t dimension = 0;
    std::size_t fixed_dim = 0;
    std::optional<double> kappa;
    std::optional<double> lambda;
    std::optional<double> c_inf;
    /// (n, sum_{k<n} kappa^k) for n = 2..max.
    std::vector<std::pair<int, double>> c_n;
    bool degenerate = false;
    bool partial = false;
    std::string method;
    double tolerance = 1e-9;
    std::optional<std::size_t> rank_deficiency;
    double self_adjoint_residual = 0.0;
    double spectral_radius = 0.0;
    std::vector<std::string> warnings;
};

/**
 * Spectrum plus eigenvectors. Vectors live in symmetrized coordinates
 * u = W^{1/2} xi, where the weighted inner product becomes the standard one.
 */
struct SpectralDecomposition {
    SpectrumReport report;
    Eigen::MatrixXcd vectors;
    Eigen::VectorXd sqrt_weights;

    Eigen::VectorXcd to_symmetric(const Eigen::VectorXcd& xi) const
    {
        return sqrt_weights.cast<Complex>().cwiseProduct(xi);
    }
    Eigen::VectorXcd from_symmetric(const Eigen::VectorXcd& u) const
    {
        return sqrt_weights.cwiseInverse().cast<Complex>().cwiseProduct(u);
    }

    /// Columns of `vectors` whose eigenvalue is within tolerance of 1.
    std::vector<Eigen::Index> fixed_columns() const
    {
        std::vector<Eigen::Index> out;
        for (std::size_t i = 0; i < report.eigenvalues.size(); ++i)
            if (std::abs(report.eigenvalues[i] - 1.0) <= report.tolerance)
                out.push_back(static_cast<Eigen::Index>(i));
        return out;
    }

    /// Weighted orthogonal projection of xi onto the eigenvalue-1 eigenspace.
    Eigen::VectorXcd fixed_projection(const Eigen::VectorXcd& xi) const
    {
        Eigen::VectorXcd u = to_symmetric(xi);
        Eigen::VectorXcd p = Eigen::VectorXcd::Zero(u.size());
        for (auto c : fixed_columns())
            p += vectors.col(c) * vectors.col(c).dot(u);
        return from_symmetric(p);
    }
};

namespace detail {

inline SpectrumReport summarize(const EigenResult& eig, const DiffusionOperator& d, const SpectrumOptions& opt)
{
    SpectrumReport r;
    r.dimension = static_cast<std::size_t>(d.size());
    r.tolerance = opt.tolerance;
    r.method = eig.method;
    r.partial = eig.partial;
    r.self_adjoint_residual = d.self_adjoint_residual();
    r.eigenvalues.assign(eig.values.data(), eig.values.data() + eig.values.size());
    for (double t : r.eigenvalues) {
        r.spectral_radius = std::max(r.spectral_radius, std::abs(t));
        if (std::abs(t - 1.0) <= opt.tolerance)
            ++r.fixed_dim;
        else if (t <= 1.0 - opt.tolerance)
            r.kappa = r.kappa ? std::max(*r.kappa, t) : t;
    }
    if (r.spectral_radius > 1.0 + 1e-9)
        r.warnings.push_back("spectral radius " + std::to_string(r.spectral_radius) + " exceeds 1");
    if (!r.kappa) {
        r.degenerate = true;
    } else {
        r.lambda = 1.0 - *r.kappa;
        r.c_inf = 1.0 / *r.lambda;
        for (int n = 2; n <= opt.max_poincare_n; ++n)
            r.c_n.emplace_back(n, geometric_sum(*r.kappa, n));
    }
    return r;
}

/// Kernel dimension of I - S: pivots of a column-pivoted QR at most `tol` in absolute value (dense sizes only).
template <typename Matrix>
std::size_t small_pivots(const Matrix& m, double tol)
{
    Eigen::ColPivHouseholderQR<Matrix> qr(m);
    const auto diag = qr.matrixQR().diagonal().cwiseAbs();
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < diag.size(); ++i)
        count += diag(i) <= tol ? 1 : 0;
    return count;
}

inline std::optional<std::size_t> rank_deficiency(const SparseMatrixC& s, bool real, double tol)
{
    const Eigen::Index n = s.rows();
    if (n > 2048)
        return std::nullopt;
    if (real)
        return small_pivots(Eigen::MatrixXd(Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd(s.real())), tol);
    return small_pivots(Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(n, n) - Eigen::MatrixXcd(s)), tol);
}

}  // namespace detail

inline SpectralDecomposition decompose(const DiffusionOperator& d, const SpectrumOptions& opt = {}, bool vectors = true)
{
    const SparseMatrixC s = d.symmetrized();
    EigenOptions eo = opt.eigen;
    eo.fixed_tolerance = opt.tolerance;
    eo.want_vectors = vectors;
    const EigenResult eig = hermitian_eigen(s, d.is_real(), eo);

    SpectralDecomposition out;
    out.report = detail::summarize(eig, d, opt);
    out.vectors = eig.vectors;
    out.sqrt_weights = d.weights().cwiseSqrt();
    if (eig.method == "dense" && opt.rank_check) {
        out.report.rank_deficiency = detail::rank_deficiency(s, d.is_real(), opt.tolerance);
        if (out.report.rank_deficiency && *out.report.rank_deficiency != out.report.fixed_dim)
            out.report.warnings.push_back("fixed_dim " + std::to_string(out.report.fixed_dim) +
                                          " differs from rank deficiency of I - D (" +
                                          std::to_string(*out.report.rank_deficiency) + ")");
    }
    return out;
}

inline SpectrumReport spectrum(const DiffusionOperator& d, const SpectrumOptions& opt = {})
{
    return decompose(d, opt, false).report;
}

struct PoincareReport {
    int n = 2;
    double c_n_measured = 0.0;
    double c_n_formula = 0.0;
    bool satisfied = false;
    bool partial = false;
};

/**
 * c_n_measured is the optimal constant in E_n <= c E over the computed
 * spectrum, max_{t != 1} sum_{k<n} t^k; c_n_formula is sum_{k<n} kappa^k.
 * They agree for n = 2 and whenever kappa >= 0.
 */
inline PoincareReport poincare_report(const SpectrumReport& s, int n)
{
    if (n < 2)
        throw Error(ErrorKind::InvalidArgument, "Poincare constants need n >= 2");
    if (!s.kappa)
        throw Error(ErrorKind::DegenerateSpectrum, "spectrum has no eigenvalue other than 1");
    PoincareReport r;
    r.n = n;
    r.partial = s.partial;
    r.c_n_formula = geometric_sum(*s.kappa, n);
    double best = -std::numeric_limits<double>::infinity();
    for (double t : s.eigenvalues)
        if (t <= 1.0 - s.tolerance)
            best = std::max(best, geometric_sum(t, n));
    r.c_n_measured = best;
    r.satisfied = r.c_n_measured < static_cast<double>(n);
    return r;
}

inline PoincareReport poincare_report(const DiffusionOperator& d, int n, const SpectrumOptions& opt = {})
{
    return poincare_report(spectrum(d, opt), n);
}

struct DirichletReport {
    double c_inf = 0.0;
    double max_violation = 0.0;
    std::size_t samples = 0;
    bool satisfied = false;
};

inline constexpr double kDirichletSlack = 1e-9;

/// ||xi - xi_bar||^2 - c E(xi) for one field, xi_bar the projection on fixed fields.
inline double dirichlet_gap(const DiffusionOperator& d, const SpectralDecomposition& dec, const Field& xi, double c)
{
    const Eigen::VectorXcd bar = dec.fixed_projection(xi.values);
    return d.norm2(xi.values - bar) - c * energy(d, xi);
}

/**
 * Checks ||xi - xi_bar||^2 <= c_inf E(xi), c_inf = 1 / (1 - kappa), on
 * `samples` seeded random fields plus the kappa eigenvector (the extremal case).
 */
inline DirichletReport dirichlet_report(const DiffusionOperator& d, std::size_t samples = 100, std::uint64_t seed = 0,
                                        const SpectrumOptions& opt = {})
{
    const auto dec = decompose(d, opt, true);
    const auto& s = dec.report;
    if (!s.kappa)
        throw Error(ErrorKind::DegenerateSpectrum, "spectrum has no eigenvalue other than 1");
    if (*s.kappa >= 1.0 - s.tolerance)
        throw Error(ErrorKind::NoGap, "kappa is within tolerance of 1", *s.kappa);

    DirichletReport r;
    r.c_inf = 1.0 / (1.0 - *s.kappa);
    r.max_violation = -std::numeric_limits<double>::infinity();
    Rng rng(seed);
    for (std::size_t k = 0; k < samples; ++k) {
        Field xi = Field::random(d.points(), d.dim(), rng);
        xi.values /= std::sqrt(d.norm2(xi.values));
        r.max_violation = std::max(r.max_violation, dirichlet_gap(d, dec, xi, r.c_inf));
    }
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
        if (s.eigenvalues[i] == *s.kappa) {
            Field xi{d.dim(), dec.from_symmetric(dec.vectors.col(static_cast<Eigen::Index>(i)))};
            r.max_violation = std::max(r.max_violation, dirichlet_gap(d, dec, xi, r.c_inf));
        }
    }
    r.samples = samples;
    r.satisfied = r.max_violation <= kDirichletSlack;
    return r;
}

/// Representations over which c2_criterion takes its supremum.
struct RepresentationFamily {
    bool trivial = true;
    bool regular = true;
    int random_gauge = 8;
    /// Random gauge representations cycle through dimensions 1..max_dim.
    int max_dim = 4;
    std::uint64_t seed = 0;
    /// Skip members whose operator order N*d exceeds this (the regular representation grows with the class size).
    Eigen::Index max_order = 4096;
};

struct C2Member {
    std::string name;
    int dim = 1;
    bool skipped = false;
    std::optional<double> kappa;
    std::optional<double> c2;
};

struct C2Report {
    std::optional<double> c2;
    bool property_T_certified = false;
    bool degenerate = false;
    /// Always set: a finite family of representations on a finite model is evidence, not proof.
    bool finite_model_evidence = true;
    std::vector<C2Member> members;
};

/**
 * sup over a finite family of representations of c_2 = 1 + kappa_pi.
 * Certified when the supremum is < 2. Per-member eigensolves run in
 * parallel; the result does not depend on the thread count.
 */
inline C2Report c2_criterion(const RandomWalk& walk, const RepresentationFamily& family = {}, unsigned threads = 1,
                             const SpectrumOptions& opt = {})
{
    if (!(walk.eta() > 0.0))
        throw Error(ErrorKind::InvalidArgument, "c2 criterion needs a bounded walk (eta > 0)");
    const auto& rel = walk.relation();

    std::vector<std::pair<std::string, Representation>> reps;
    std::vector<C2Member> members;
    if (family.trivial)
        reps.emplace_back("trivial", trivial_representation(rel));
    if (family.regular)
        reps.emplace_back("regular", regular_representation(rel));
    Rng rng(family.seed);
    for (int k = 0; k < family.random_gauge; ++k) {
        const int dim = 1 + k % std::max(1, family.max_dim);
        reps.emplace_back("random_gauge_" + std::to_string(k), random_gauge_representation(rel, dim, rng));
    }

    members.resize(reps.size());
    parallel_for(reps.size(), threads, [&](std::size_t i) {
        auto& m = members[i];
        m.name = reps[i].first;
        m.dim = reps[i].second.dim();
        if (static_cast<Eigen::Index>(walk.size()) * m.dim > family.max_order) {
            m.skipped = true;
            return;
        }
        SpectrumOptions member_opt = opt;
        member_opt.rank_check = false;
        const auto s = spectrum(DiffusionOperator(walk, reps[i].second), member_opt);
        m.kappa = s.kappa;
        if (s.kappa)
            m.c2 = 1.0 + *s.kappa;
    });

    C2Report r;
    r.members = std::move(members);
    for (const auto& m : r.members)
        if (m.c2)
            r.c2 = r.c2 ? std::max(*r.c2, *m.c2) : *m.c2;
    r.degenerate = !r.c2;
    r.property_T_certified = r.c2 && *r.c2 < 2.0;
    return r;
}

}  // namespace relwalk

#endif
