#pragma once

#include <cmath>
#include <limits>

#include "ubmcqmc/distributions/normal.hpp"
#include "ubmcqmc/errors.hpp"

namespace ubmcqmc {

/// Inverse-CDF draw from a univariate law restricted to [a, b]:
/// F^{-1}(F(a) + u (F(b) - F(a))).
template <class Cdf, class Quantile>
double sample_truncated(Cdf&& cdf, Quantile&& quantile, double a, double b, double u) {
    if (!(a < b)) throw NumericalError("truncation interval is empty");
    const double fa = cdf(a), fb = cdf(b);
    if (!(fb > fa)) throw NumericalError("truncation interval has zero mass");
    return quantile(fa + clamp_unit(u) * (fb - fa));
}

/// N(mean, 1) restricted to [lower, upper]; one bound may be infinite.
struct TruncatedNormal {
    double mean;
    double lower;
    double upper;

    /// log P(lower <= N(mean, 1) <= upper)
    double log_mass() const {
        const double a = lower - mean, b = upper - mean;
        if (std::isinf(b)) return log_normal_cdf(-a);
        if (std::isinf(a)) return log_normal_cdf(b);
        if (a > 0.0) return log_normal_cdf(-a) + std::log1p(-std::exp(log_normal_cdf(-b) - log_normal_cdf(-a)));
        if (b < 0.0) return log_normal_cdf(b) + std::log1p(-std::exp(log_normal_cdf(a) - log_normal_cdf(b)));
        return std::log(normal_cdf(b) - normal_cdf(a));
    }

    double log_density(double x) const {
        if (x < lower || x > upper) return -std::numeric_limits<double>::infinity();
        const double d = x - mean;
        return -0.5 * d * d - 0.5 * std::log(2.0 * std::numbers::pi) - log_mass();
    }

    /// Inversion, working in whichever tail keeps the arithmetic stable.
    double sample(double u) const {
        u = clamp_unit(u);
        const double a = lower - mean, b = upper - mean;
        double z;
        if (std::isinf(b)) {
            // Z >= a. For a > 0 invert the upper tail: Z = -Phi^{-1}(Phi(-a)(1-u)).
            if (a > 0.0) {
                z = -normal_inv_cdf(normal_cdf(-a) * (1.0 - u));
            } else {
                const double fa = normal_cdf(a);
                z = normal_inv_cdf(fa + u * (1.0 - fa));
            }
        } else if (std::isinf(a)) {
            // Z <= b, mirror image of the case above.
            if (b < 0.0) {
                z = normal_inv_cdf(normal_cdf(b) * u);
            } else {
                const double fb = normal_cdf(-b);
                z = -normal_inv_cdf(fb + (1.0 - u) * (1.0 - fb));
            }
        } else if (a > 0.0) {
            const double ta = normal_cdf(-a), tb = normal_cdf(-b);
            z = -normal_inv_cdf(ta - u * (ta - tb));
        } else {
            const double fa = normal_cdf(a), fb = normal_cdf(b);
            z = normal_inv_cdf(fa + u * (fb - fa));
        }
        if (!std::isfinite(z)) throw NumericalError("truncated normal inversion failed");
        return mean + std::clamp(z, a, b);
    }
};

}  // namespace ubmcqmc
