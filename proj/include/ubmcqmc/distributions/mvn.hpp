#pragma once

#include <cmath>
#include <span>

#include <Eigen/Dense>

#include "ubmcqmc/distributions/normal.hpp"
#include "ubmcqmc/errors.hpp"

namespace ubmcqmc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Lower Cholesky factor of a symmetric positive definite matrix. On failure
/// adds jitter = 1e-12 * trace/p to the diagonal, growing tenfold up to
/// 1e-6 * trace/p.
inline Matrix spd_cholesky(const Matrix& sigma) {
    const Eigen::Index p = sigma.rows();
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    const double scale = sigma.trace() / static_cast<double>(p);
    for (double eps = 1e-12; eps <= 1e-6 * 1.0000001; eps *= 10.0) {
        llt.compute(sigma + Matrix::Identity(p, p) * (eps * scale));
        if (llt.info() == Eigen::Success) return llt.matrixL();
    }
    throw NumericalError("covariance matrix is not positive definite");
}

/// N(mean, L L^T) with a fixed lower factor L.
struct Mvn {
    Vector mean;
    Matrix chol;  // lower triangular

    /// Draw mean + L Phi^{-1}(u), one uniform per coordinate.
    Vector sample(std::span<const double> u) const {
        const Eigen::Index p = mean.size();
        Vector z(p);
        for (Eigen::Index i = 0; i < p; ++i) z[i] = normal_inv_cdf(clamp_unit(u[i]));
        return mean + chol.triangularView<Eigen::Lower>() * z;
    }

    /// Log density without the -p/2 log(2 pi) constant.
    double log_density(const Vector& x) const {
        const Vector w = chol.triangularView<Eigen::Lower>().solve(x - mean);
        return -0.5 * w.squaredNorm() - chol.diagonal().array().log().sum();
    }
};

}  // namespace ubmcqmc
