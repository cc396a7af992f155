#ifndef RELWALK_EIGEN_HPP
#define RELWALK_EIGEN_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "error.hpp"
#include "random.hpp"

namespace relwalk {

struct EigenOptions {
    /// Matrices up to this order are solved densely.
    Eigen::Index dense_limit = 4096;
    bool force_iterative = false;
    /// Eigenvalues within this distance of 1 are treated as fixed.
    double fixed_tolerance = 1e-9;
    /// Lanczos residual tolerance ||S y - theta y||.
    double convergence_tolerance = 1e-10;
    /// Iterative mode: eigenvalues resolved at each end of the non-fixed spectrum.
    Eigen::Index extremes = 8;
    std::uint64_t seed = 0;
    bool want_vectors = false;
};

/**
 * Eigenpairs of a Hermitian matrix, ascending. In iterative mode only the
 * fixed eigenvalues (within fixed_tolerance of 1) plus the extreme ends of
 * the remaining spectrum are resolved and `partial` is set; each Lanczos
 * run sees one copy of a repeated eigenvalue, except for the fixed space,
 * which is counted exactly by locking.
 */
struct EigenResult {
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;  ///< columns match `values`; empty unless requested
    bool partial = false;
    std::string method;
    std::size_t iterations = 0;
};

namespace detail {

inline EigenResult dense_hermitian(const Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor>& s, bool real,
                                   bool want_vectors)
{
    EigenResult out;
    out.method = "dense";
    const auto mode = want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
    if (real) {
        Eigen::MatrixXd m = Eigen::MatrixXd(s.real());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, mode);
        if (solver.info() != Eigen::Success)
            throw Error(ErrorKind::EigenFailure, "dense symmetric eigensolver did not converge");
        out.values = solver.eigenvalues();
        if (want_vectors)
            out.vectors = solver.eigenvectors().cast<std::complex<double>>();
    } else {
        Eigen::MatrixXcd m = Eigen::MatrixXcd(s);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, mode);
        if (solver.info() != Eigen::Success)
            throw Error(ErrorKind::EigenFailure, "dense Hermitian eigensolver did not converge");
        out.values = solver.eigenvalues();
        if (want_vectors)
            out.vectors = solver.eigenvectors();
    }
    return out;
}

struct LanczosOutcome {
    Eigen::VectorXd ritz;         // ascending
    Eigen::VectorXd residual;     // per Ritz value
    Eigen::MatrixXcd ritz_vectors;
    bool exhausted = false;       // Krylov space became invariant
    std::size_t steps = 0;
};

/**
 * Lanczos with full reorthogonalization against the basis and the locked
 * vectors. Stops when the `want` largest and `want` smallest Ritz values
 * have residual below tol, when the Krylov space is invariant, or after
 * max_steps.
 */
inline LanczosOutcome lanczos(const Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor>& a,
                              const Eigen::MatrixXcd& locked, Eigen::VectorXcd start, Eigen::Index want,
                              Eigen::Index max_steps, double tol)
{
    const Eigen::Index n = a.rows();
    auto project_out = [&](Eigen::VectorXcd& v, const Eigen::MatrixXcd& basis, Eigen::Index cols) {
        if (cols == 0)
            return;
        for (int pass = 0; pass < 2; ++pass)
            v.noalias() -= basis.leftCols(cols) * (basis.leftCols(cols).adjoint() * v);
    };

    Eigen::MatrixXcd q(n, max_steps);
    std::vector<double> alpha, beta;
    project_out(start, locked, locked.cols());
    double nrm = start.norm();
    if (nrm == 0.0)
        throw Error(ErrorKind::EigenFailure, "Lanczos start vector vanished after deflation");
    q.col(0) = start / nrm;

    LanczosOutcome out;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    Eigen::Index m = 0;
    for (Eigen::Index j = 0; j < max_steps; ++j) {
        Eigen::VectorXcd w = a * q.col(j);
        const double aj = q.col(j).dot(w).real();
        w -= aj * q.col(j);
        if (j > 0)
            w -= beta.back() * q.col(j - 1);
        project_out(w, q, j + 1);
        project_out(w, locked, locked.cols());
        alpha.push_back(aj);
        const double bj = w.norm();
        m = j + 1;

        const bool invariant = bj < 1e-12;
        const bool check = invariant || j + 1 == max_steps || (m >= 2 * want && m % 10 == 0);
        if (check) {
            Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
            Eigen::VectorXd off = m > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1))
                                        : Eigen::VectorXd();
            tri.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
            if (tri.info() != Eigen::Success)
                throw Error(ErrorKind::EigenFailure, "tridiagonal eigensolve failed");
            Eigen::VectorXd res = (bj * tri.eigenvectors().row(m - 1).transpose()).cwiseAbs();
            bool done = invariant;
            if (!done) {
                const Eigen::Index k = std::min(want, m);
                done = true;
                for (Eigen::Index i = 0; i < k; ++i)
                    if (res(i) > tol || res(m - 1 - i) > tol)
                        done = false;
            }
            if (done || j + 1 == max_steps) {
                out.ritz = tri.eigenvalues();
                out.residual = invariant ? Eigen::VectorXd::Zero(m) : res;
                out.ritz_vectors = q.leftCols(m) * tri.eigenvectors().cast<std::complex<double>>();
                out.exhausted = invariant;
                out.steps = static_cast<std::size_t>(m);
                return out;
            }
        }
        if (invariant)
            break;
        beta.push_back(bj);
        q.col(j + 1) = w / bj;
    }
    return out;
}

inline EigenResult lanczos_hermitian(const Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor>& s,
                                     const EigenOptions& opt)
{
    const Eigen::Index n = s.rows();
    const Eigen::Index max_total = 10 * n;
    // Basis memory: keep n * steps below ~2e7 complex entries.
    const Eigen::Index cap = std::max<Eigen::Index>(std::min<Eigen::Index>(n, 120), std::min<Eigen::Index>(n, 20000000 / std::max<Eigen::Index>(n, 1)));
    Rng rng(opt.seed);

    EigenResult out;
    out.method = "lanczos";
    out.partial = true;
    Eigen::MatrixXcd locked(n, 0);
    std::vector<double> fixed_values;
    std::size_t total = 0;

    while (true) {
        const Eigen::Index room = n - locked.cols();
        if (room <= 0) {
            out.partial = false;
            break;
        }
        const Eigen::Index steps = std::min(room, cap);
        auto run = lanczos(s, locked, random_complex_vector(n, rng), opt.extremes, steps, opt.convergence_tolerance);
        total += run.steps;
        if (static_cast<Eigen::Index>(total) > max_total)
            throw Error(ErrorKind::EigenFailure, "Lanczos exceeded 10*N*d iterations");

        // Newly converged fixed vectors are locked and the search restarts on the complement.
        std::vector<Eigen::Index> fixed_now;
        for (Eigen::Index i = run.ritz.size() - 1; i >= 0; --i) {
            if (run.ritz(i) < 1.0 - opt.fixed_tolerance)
                break;
            if (run.residual(i) <= opt.convergence_tolerance)
                fixed_now.push_back(i);
        }
        if (!fixed_now.empty()) {
            Eigen::MatrixXcd grown(n, locked.cols() + static_cast<Eigen::Index>(fixed_now.size()));
            grown.leftCols(locked.cols()) = locked;
            Eigen::Index c = locked.cols();
            for (auto i : fixed_now) {
                Eigen::VectorXcd v = run.ritz_vectors.col(i);
                for (int pass = 0; pass < 2; ++pass)
                    v -= grown.leftCols(c) * (grown.leftCols(c).adjoint() * v);
                grown.col(c++) = v.normalized();
                fixed_values.push_back(run.ritz(i));
            }
            locked = std::move(grown);
            continue;
        }

        const Eigen::Index top = run.ritz.size() - 1;
        if (top >= 0 && run.ritz(top) >= 1.0 - opt.fixed_tolerance)
            throw Error(ErrorKind::EigenFailure, "Lanczos did not resolve an eigenvalue near 1");
        if (top >= 0 && run.residual(top) > opt.convergence_tolerance)
            throw Error(ErrorKind::EigenFailure, "Lanczos did not converge to the top of the spectrum", run.residual(top));

        std::vector<Eigen::Index> keep;
        const Eigen::Index m = run.ritz.size();
        for (Eigen::Index i = 0; i < m; ++i)
            if (run.residual(i) <= opt.convergence_tolerance && (i < opt.extremes || i >= m - opt.extremes || run.exhausted))
                keep.push_back(i);
        const bool complete = run.exhausted && m == room;
        out.partial = !complete;

        const Eigen::Index total_count = static_cast<Eigen::Index>(fixed_values.size() + keep.size());
        out.values.resize(total_count);
        if (opt.want_vectors)
            out.vectors.resize(n, total_count);
        Eigen::Index c = 0;
        for (auto i : keep) {
            out.values(c) = run.ritz(i);
            if (opt.want_vectors)
                out.vectors.col(c) = run.ritz_vectors.col(i);
            ++c;
        }
        for (std::size_t f = 0; f < fixed_values.size(); ++f) {
            out.values(c) = fixed_values[f];
            if (opt.want_vectors)
                out.vectors.col(c) = locked.col(static_cast<Eigen::Index>(f));
            ++c;
        }
        break;
    }
    if (out.values.size() == 0 && locked.cols() > 0) {
        // Everything was fixed.
        out.values = Eigen::Map<Eigen::VectorXd>(fixed_values.data(), static_cast<Eigen::Index>(fixed_values.size()));
        if (opt.want_vectors)
            out.vectors = locked;
    }
    out.iterations = total;

    // Sort ascending, carrying vectors along.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(out.values.size()));
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = static_cast<Eigen::Index>(i);
    std::stable_sort(order.begin(), order.end(), [&](auto l, auto r) { return out.values(l) < out.values(r); });
    Eigen::VectorXd sorted(out.values.size());
    Eigen::MatrixXcd sorted_vectors(opt.want_vectors ? n : 0, opt.want_vectors ? out.values.size() : 0);
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted(static_cast<Eigen::Index>(i)) = out.values(order[i]);
        if (opt.want_vectors)
            sorted_vectors.col(static_cast<Eigen::Index>(i)) = out.vectors.col(order[i]);
    }
    out.values = std::move(sorted);
    out.vectors = std::move(sorted_vectors);
    return out;
}

}  // namespace detail

/// Eigen-decomposition of a Hermitian sparse matrix, dense below the size limit and Lanczos above it.
inline EigenResult hermitian_eigen(const Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor>& s, bool real,
                                   const EigenOptions& opt = {})
{
    if (s.rows() != s.cols())
        throw Error(ErrorKind::DimensionMismatch, "eigensolver needs a square matrix");
    if (!opt.force_iterative && s.rows() <= opt.dense_limit)
        return detail::dense_hermitian(s, real, opt.want_vectors);
    return detail::lanczos_hermitian(s, opt);
}

}  // namespace relwalk

#endif
