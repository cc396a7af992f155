#ifndef RELWALK_RANDOM_HPP
#define RELWALK_RANDOM_HPP

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace relwalk {

/// All randomness in the library flows from engines of this type, seeded explicitly.
using Rng = std::mt19937_64;

inline Eigen::VectorXcd random_complex_vector(Eigen::Index n, Rng& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        v(i) = {re, im};
    }
    return v;
}

inline Eigen::VectorXd random_real_vector(Eigen::Index n, Rng& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v(i) = normal(rng);
    return v;
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases of R's diagonal folded into Q.
inline Eigen::MatrixXcd random_unitary(Eigen::Index d, Rng& rng)
{
    Eigen::MatrixXcd g(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
        g.col(j) = random_complex_vector(d, rng);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(d, d);
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < d; ++i) {
        const std::complex<double> diag = r(i, i);
        const double mag = std::abs(diag);
        if (mag > 0.0)
            q.col(i) *= diag / mag;
    }
    return q;
}

}  // namespace relwalk

#endif
