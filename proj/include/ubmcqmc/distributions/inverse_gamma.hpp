#pragma once

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "ubmcqmc/distributions/normal.hpp"
#include "ubmcqmc/errors.hpp"

namespace ubmcqmc {

/// IG(shape, scale): density proportional to x^{-shape-1} exp(-scale / x).
struct InverseGamma {
    double shape;
    double scale;

    void validate() const {
        if (!(shape > 0.0) || !(scale > 0.0))
            throw NumericalError("inverse gamma parameters must be positive");
    }

    double cdf(double x) const {
        if (x <= 0.0) return 0.0;
        return boost::math::gamma_q(shape, scale / x);
    }

    double quantile(double u) const { return scale / boost::math::gamma_q_inv(shape, u); }

    double log_density(double x) const {
        if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
        return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) -
               scale / x;
    }
};

/// Inverse-CDF draw from IG(shape, scale).
inline double sample_inverse_gamma(double shape, double scale, double u) {
    const InverseGamma ig{shape, scale};
    ig.validate();
    return ig.quantile(clamp_unit(u));
}

}  // namespace ubmcqmc
