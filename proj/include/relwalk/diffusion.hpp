#ifndef RELWALK_DIFFUSION_HPP
#define RELWALK_DIFFUSION_HPP

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "error.hpp"
#include "random.hpp"
#include "representation.hpp"
#include "walk.hpp"

namespace relwalk {

using Complex = std::complex<double>;
using SparseMatrixC = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

/// A section of the trivial bundle X x C^d, stored point-major: values[x*d + i].
struct Field {
    int dim = 1;
    Eigen::VectorXcd values;

    std::size_t points() const noexcept
    {
        return dim > 0 ? static_cast<std::size_t>(values.size()) / static_cast<std::size_t>(dim) : 0;
    }
    auto at(int x) { return values.segment(static_cast<Eigen::Index>(x) * dim, dim); }
    auto at(int x) const { return values.segment(static_cast<Eigen::Index>(x) * dim, dim); }

    static Field zeros(std::size_t n, int dim)
    {
        return Field{dim, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n) * dim)};
    }

    static Field constant(std::size_t n, const Eigen::VectorXcd& v)
    {
        Field f = zeros(n, static_cast<int>(v.size()));
        for (std::size_t x = 0; x < n; ++x)
            f.at(static_cast<int>(x)) = v;
        return f;
    }

    static Field scalar(const Eigen::VectorXd& v) { return Field{1, v.cast<Complex>()}; }

    static Field random(std::size_t n, int dim, Rng& rng)
    {
        return Field{dim, random_complex_vector(static_cast<Eigen::Index>(n) * dim, rng)};
    }
};

/**
 * (D xi)_x = sum_y nu(x->y) pi(x, y) xi_y, acting on sections weighted by the
 * walk's base measure. Built once as a sparse (N d) x (N d) block matrix.
 */
class DiffusionOperator {
public:
    DiffusionOperator(RandomWalk walk, Representation rep) : walk_(std::move(walk)), rep_(std::move(rep))
    {
        if (rep_.size() != walk_.size())
            throw Error(ErrorKind::DimensionMismatch, "representation and walk have different point counts");
        const int d = rep_.dim();
        const auto n = static_cast<Eigen::Index>(walk_.size());
        std::vector<Eigen::Triplet<Complex>> triplets;
        triplets.reserve(walk_.nonzeros() * static_cast<std::size_t>(d * d));
        for (Eigen::Index x = 0; x < n; ++x) {
            for (const auto& t : walk_.row(static_cast<int>(x))) {
                if (!rep_.has_block(static_cast<int>(x), t.to))
                    throw Error(ErrorKind::MissingEdgeBlock, "walk moves " + std::to_string(x) + "->" +
                                                                 std::to_string(t.to) + " but the representation has no block");
                const Eigen::MatrixXcd b = rep_.block(static_cast<int>(x), t.to);
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j)
                        if (b(i, j) != Complex(0.0))
                            triplets.emplace_back(x * d + i, static_cast<Eigen::Index>(t.to) * d + j, t.p * b(i, j));
            }
        }
        matrix_.resize(n * d, n * d);
        matrix_.setFromTriplets(triplets.begin(), triplets.end());
        matrix_.makeCompressed();

        weights_.resize(n * d);
        for (Eigen::Index x = 0; x < n; ++x)
            weights_.segment(x * d, d).setConstant(walk_.base(static_cast<int>(x)));

        // Self-adjointness in the weighted inner product: w_i D_ij = conj(w_j D_ji).
        SparseMatrixC weighted = weights_.cast<Complex>().asDiagonal() * matrix_;
        SparseMatrixC adj = weighted.adjoint();
        self_adjoint_residual_ = 0.0;
        SparseMatrixC diff = weighted - adj;
        for (Eigen::Index k = 0; k < diff.outerSize(); ++k)
            for (SparseMatrixC::InnerIterator it(diff, k); it; ++it)
                self_adjoint_residual_ = std::max(self_adjoint_residual_, std::abs(it.value()));
        if (self_adjoint_residual_ > 1e-10)
            throw Error(ErrorKind::InvariantViolation, "diffusion is not self-adjoint for the base measure",
                        self_adjoint_residual_);
    }

    const RandomWalk& walk() const noexcept { return walk_; }
    const Representation& representation() const noexcept { return rep_; }
    int dim() const noexcept { return rep_.dim(); }
    std::size_t points() const noexcept { return walk_.size(); }
    Eigen::Index size() const noexcept { return matrix_.rows(); }
    const SparseMatrixC& matrix() const noexcept { return matrix_; }
    const Eigen::VectorXd& weights() const noexcept { return weights_; }
    double self_adjoint_residual() const noexcept { return self_adjoint_residual_; }
    bool is_real() const noexcept { return rep_.is_real(); }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const { return matrix_ * v; }

    /// S = W^{1/2} D W^{-1/2}, Hermitian by detailed balance; averaged with its adjoint to remove rounding asymmetry.
    SparseMatrixC symmetrized() const
    {
        const Eigen::VectorXcd sq = weights_.cwiseSqrt().cast<Complex>();
        const Eigen::VectorXcd inv = weights_.cwiseSqrt().cwiseInverse().cast<Complex>();
        SparseMatrixC s = sq.asDiagonal() * matrix_ * inv.asDiagonal();
        SparseMatrixC st = s.adjoint();
        return SparseMatrixC(0.5 * (s + st));
    }

    /// <a, b> = sum_i w_i a_i conj(b_i).
    Complex inner(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) const
    {
        Complex acc{0.0, 0.0};
        for (Eigen::Index i = 0; i < a.size(); ++i)
            acc += weights_(i) * a(i) * std::conj(b(i));
        return acc;
    }

    double norm2(const Eigen::VectorXcd& a) const { return (a.cwiseAbs2().cwiseProduct(weights_)).sum(); }

private:
    RandomWalk walk_;
    Representation rep_;
    SparseMatrixC matrix_;
    Eigen::VectorXd weights_;
    double self_adjoint_residual_ = 0.0;
};

inline DiffusionOperator diffusion(const RandomWalk& walk, const Representation& rep)
{
    return DiffusionOperator(walk, rep);
}

/// Diffusion with the trivial representation.
inline DiffusionOperator simple_diffusion(const RandomWalk& walk)
{
    return DiffusionOperator(walk, trivial_representation(walk.relation()));
}

namespace detail {

inline void check_field(const DiffusionOperator& d, const Field& xi)
{
    if (xi.dim != d.dim() || xi.values.size() != d.size())
        throw Error(ErrorKind::DimensionMismatch, "field does not match the operator's bundle");
}

}  // namespace detail

/// <(I - D) xi, xi> in the weighted inner product.
inline double energy(const DiffusionOperator& d, const Field& xi)
{
    detail::check_field(d, xi);
    return d.norm2(xi.values) - d.inner(d.apply(xi.values), xi.values).real();
}

/// <(I - D^n) xi, xi>.
inline double energy_n(const DiffusionOperator& d, const Field& xi, int n)
{
    detail::check_field(d, xi);
    if (n < 0)
        throw Error(ErrorKind::InvalidArgument, "energy_n needs n >= 0");
    Eigen::VectorXcd v = xi.values;
    for (int k = 0; k < n; ++k)
        v = d.apply(v);
    return d.norm2(xi.values) - d.inner(v, xi.values).real();
}

/// 1/2 sum_x base(x) sum_y nu(x->y) ||pi(x, y) xi_y - xi_x||^2, computed edge by edge.
inline double gradient_energy(const RandomWalk& walk, const Representation& rep, const Field& xi)
{
    if (xi.dim != rep.dim() || xi.points() != walk.size() || rep.size() != walk.size())
        throw Error(ErrorKind::DimensionMismatch, "field does not match walk and representation");
    double total = 0.0;
    for (std::size_t x = 0; x < walk.size(); ++x) {
        const int xi_x = static_cast<int>(x);
        double local = 0.0;
        for (const auto& t : walk.row(xi_x)) {
            const Eigen::VectorXcd grad = rep.block(xi_x, t.to) * xi.at(t.to) - xi.at(xi_x);
            local += t.p * grad.squaredNorm();
        }
        total += walk.base(xi_x) * local;
    }
    return 0.5 * total;
}

/// Weighted squared norm of a field with the walk's base measure.
inline double field_norm2(const RandomWalk& walk, const Field& xi)
{
    double total = 0.0;
    for (std::size_t x = 0; x < walk.size(); ++x)
        total += walk.base(static_cast<int>(x)) * xi.at(static_cast<int>(x)).squaredNorm();
    return total;
}

}  // namespace relwalk

#endif
