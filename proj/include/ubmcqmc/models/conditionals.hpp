#pragma once

#include <cmath>
#include <limits>
#include <span>

#include "ubmcqmc/distributions/inverse_gamma.hpp"
#include "ubmcqmc/distributions/mvn.hpp"
#include "ubmcqmc/distributions/normal.hpp"
#include "ubmcqmc/distributions/polya_gamma.hpp"
#include "ubmcqmc/distributions/truncated.hpp"
#include "ubmcqmc/random_streams.hpp"

namespace ubmcqmc {

struct MvnConditional {
    using value_type = Vector;
    Mvn dist;
    Vector sample(std::span<const double> u, IidStream&) const { return dist.sample(u); }
    double log_density(const Vector& x) const { return dist.log_density(x); }
};

struct NormalConditional {
    using value_type = double;
    double mean;
    double sd;
    double sample(std::span<const double> u, IidStream&) const { return sample_normal(mean, sd, u[0]); }
    double log_density(double x) const {
        const double z = (x - mean) / sd;
        return -0.5 * z * z - std::log(sd);
    }
};

struct InverseGammaConditional {
    using value_type = double;
    InverseGamma dist;
    double sample(std::span<const double> u, IidStream&) const { return dist.quantile(clamp_unit(u[0])); }
    double log_density(double x) const { return dist.log_density(x); }
};

struct TruncatedNormalConditional {
    using value_type = double;
    TruncatedNormal dist;
    double sample(std::span<const double> u, IidStream&) const { return dist.sample(u[0]); }
    double log_density(double x) const { return dist.log_density(x); }
};

struct PgConditional {
    using value_type = double;
    double c;
    PgOptions options;
    double sample(std::span<const double> u, IidStream& aux) const { return sample_pg(c, u, aux, options); }
    double log_density(double x) const {
        if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
        return pg_log_density_ratio(c, x);
    }
};

/// N(mean, cov) draw from IID uniforms.
inline Vector sample_mvn_iid(const Vector& mean, const Matrix& chol, IidStream& s) {
    Vector z(mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal_inv_cdf(s.uniform_open());
    return mean + chol.triangularView<Eigen::Lower>() * z;
}

}  // namespace ubmcqmc
