#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

#include "ubmcqmc/distributions/normal.hpp"
#include "ubmcqmc/errors.hpp"
#include "ubmcqmc/random_streams.hpp"

namespace ubmcqmc {

/// How driving uniforms enter the PG(1, c) sampler.
enum class PgApproach {
    iid_selector = 1,  // component chosen by an IID uniform, driving u feeds the first proposal
    two_column = 2,    // driving (u_1, u_2) choose the component and feed the first proposal
    inversion = 3,     // driving u inverts the full proposal mixture CDF
};

inline int pg_columns(PgApproach a) { return a == PgApproach::two_column ? 2 : 1; }

struct PgOptions {
    PgApproach approach = PgApproach::inversion;
    double tolerance = 1e-10;  // |F(x) - u| for the mixture inversion
    int max_iterations = 200;
};

/// Audit counters for the PG sampler.
struct PgStats {
    std::uint64_t draws = 0;
    std::uint64_t proposals = 0;
    std::uint64_t max_series_terms = 0;
};

/// log cosh(x) without overflow.
inline double log_cosh(double x) {
    const double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

/// Log density of PG(1, c) up to a term that depends on x only.
inline double pg_log_density_ratio(double c, double x) {
    return log_cosh(0.5 * c) - 0.5 * c * c * x;
}

namespace pg_detail {

inline constexpr double trunc = 0.64;
inline constexpr double pi = std::numbers::pi;

inline double log_sum_exp(double a, double b) {
    const double m = std::max(a, b);
    if (m == -std::numeric_limits<double>::infinity()) return m;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

/// log CDF of the inverse Gaussian IG(mean 1/z, shape 1) at x.
inline double log_ig_cdf(double x, double z) {
    const double rx = std::sqrt(x);
    return log_sum_exp(log_normal_cdf((x * z - 1.0) / rx), 2.0 * z + log_normal_cdf(-(x * z + 1.0) / rx));
}

inline double ig_pdf(double x, double z) {
    const double d = x * z - 1.0;
    return std::exp(-d * d / (2.0 * x)) / std::sqrt(2.0 * pi * x * x * x);
}

/// n-th coefficient of the alternating series for J*(1, z); piecewise at trunc.
inline double series_term(int n, double x) {
    const double k = n + 0.5;
    if (x > trunc) return pi * k * std::exp(-0.5 * k * k * pi * pi * x);
    return pi * k * std::pow(2.0 / (pi * x), 1.5) * std::exp(-2.0 * k * k / x);
}

/// Proposal: exponential tail on (trunc, inf) with rate K, truncated IG on (0, trunc).
struct Mixture {
    double z;
    double rate;       // K
    double w_exp;      // probability of the exponential component
    double log_ig_t;   // log F_IG(trunc)

    explicit Mixture(double c) : z(0.5 * std::abs(c)) {
        rate = pi * pi / 8.0 + 0.5 * z * z;
        log_ig_t = log_ig_cdf(trunc, z);
        const double log_p = std::log(pi / (2.0 * rate)) - rate * trunc;
        const double log_q = std::numbers::ln2 - z + log_ig_t;
        w_exp = 1.0 / (1.0 + std::exp(log_q - log_p));
    }

    double cdf(double x) const {
        if (x <= 0.0) return 0.0;
        if (x <= trunc) return (1.0 - w_exp) * std::exp(log_ig_cdf(x, z) - log_ig_t);
        return (1.0 - w_exp) + w_exp * -std::expm1(-rate * (x - trunc));
    }

    double pdf(double x) const {
        if (x <= 0.0) return 0.0;
        if (x <= trunc) return (1.0 - w_exp) * ig_pdf(x, z) * std::exp(-log_ig_t);
        return w_exp * rate * std::exp(-rate * (x - trunc));
    }

    double exp_from_uniform(double u) const { return trunc - std::log1p(-u) / rate; }

    /// Safeguarded Newton solve of cdf(x) = u.
    double inverse_cdf(double u, double tol, int max_iter) const {
        u = clamp_unit(u);
        const double w_ig = 1.0 - w_exp;
        if (u >= w_ig) {
            const double v = std::min((u - w_ig) / w_exp, unit_clamp_hi);
            return exp_from_uniform(v);
        }
        // Solve log F_IG(x) = target on (0, trunc).
        const double target = std::log(u / w_ig) + log_ig_t;
        double lo = 0.0, hi = trunc;
        const double q = normal_inv_cdf(std::clamp(0.5 * std::exp(target), 1e-300, 0.5));
        double x = (q < 0.0) ? std::clamp(1.0 / (q * q), 1e-3 * trunc, trunc) : 0.5 * trunc;
        for (int it = 0; it < max_iter; ++it) {
            const double lf = log_ig_cdf(x, z);
            const double g = lf - target;
            // Relative error in F below tol also bounds |F(x) - u| by tol.
            if (std::abs(g) <= tol) return x;
            if (g > 0.0) hi = x; else lo = x;
            const double slope = ig_pdf(x, z) / std::exp(lf);
            double next = x - g / slope;
            if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
            if (hi - lo < 1e-15 * trunc) return next;
            x = next;
        }
        throw NumericalError("PG mixture inversion did not converge");
    }
};

inline bool series_accept(double x, double v, PgStats* stats) {
    double s = series_term(0, x);
    const double y = v * s;
    for (int n = 1;; ++n) {
        const double a = series_term(n, x);
        if (stats) stats->max_series_terms = std::max<std::uint64_t>(stats->max_series_terms, n + 1);
        if (n % 2 == 1) {
            s -= a;
            if (y <= s) return true;
        } else {
            s += a;
            if (y > s) return false;
        }
        if (n > 10000) throw NumericalError("PG series failed to decide");
    }
}

inline double exp_iid(IidStream& aux) { return -std::log(aux.uniform_open()); }

/// IG(1/z, 1) truncated to (0, trunc). `first` (if in [0,1)) replaces the
/// first uniform consumed by the proposal; everything after is IID.
inline double truncated_ig(double z, IidStream& aux, double first) {
    const bool driven = first >= 0.0;
    const double mu = (z > 0.0) ? 1.0 / z : std::numeric_limits<double>::infinity();
    if (mu > trunc) {
        bool use_first = driven;
        for (;;) {
            double e1, e2;
            do {
                e1 = use_first ? -std::log1p(-clamp_unit(first)) : exp_iid(aux);
                use_first = false;
                e2 = exp_iid(aux);
            } while (e1 * e1 > 2.0 * e2 / trunc);
            const double r = 1.0 + trunc * e1;
            const double x = trunc / (r * r);
            if (aux.uniform() <= std::exp(-0.5 * z * z * x)) return x;
        }
    }
    bool use_first = driven;
    for (;;) {
        const double n = use_first ? normal_inv_cdf(clamp_unit(first)) : normal_inv_cdf(aux.uniform_open());
        use_first = false;
        const double y = n * n;
        const double my = mu * y;
        double x = mu + 0.5 * mu * my - 0.5 * mu * std::sqrt(4.0 * my + my * my);
        if (aux.uniform() > mu / (mu + x)) x = mu * mu / x;
        if (x < trunc) return x;
    }
}

}  // namespace pg_detail

/// Standard PG(1, c) draw using only the IID stream.
inline double sample_pg_iid(double c, IidStream& aux, PgStats* stats = nullptr) {
    const pg_detail::Mixture mix(c);
    if (stats) ++stats->draws;
    for (;;) {
        if (stats) ++stats->proposals;
        const double x = (aux.uniform() < mix.w_exp)
                             ? pg_detail::trunc + pg_detail::exp_iid(aux) / mix.rate
                             : pg_detail::truncated_ig(mix.z, aux, -1.0);
        if (pg_detail::series_accept(x, aux.uniform(), stats)) return 0.25 * x;
    }
}

/// PG(1, c) draw whose first proposal is driven by `u` (pg_columns(approach)
/// entries); accept/reject and any further proposals use `aux`.
inline double sample_pg(double c, std::span<const double> u, IidStream& aux,
                        const PgOptions& opt = {}, PgStats* stats = nullptr) {
    const pg_detail::Mixture mix(c);
    double x;
    switch (opt.approach) {
        case PgApproach::iid_selector:
        case PgApproach::two_column: {
            const bool two = opt.approach == PgApproach::two_column;
            const double sel = two ? u[0] : aux.uniform();
            const double first = two ? u[1] : u[0];
            x = (sel < mix.w_exp) ? mix.exp_from_uniform(clamp_unit(first))
                                  : pg_detail::truncated_ig(mix.z, aux, first);
            break;
        }
        case PgApproach::inversion:
            x = mix.inverse_cdf(u[0], opt.tolerance, opt.max_iterations);
            break;
        default:
            throw Error("unknown PG approach");
    }
    if (stats) {
        ++stats->draws;
        ++stats->proposals;
    }
    if (pg_detail::series_accept(x, aux.uniform(), stats)) return 0.25 * x;
    PgStats* inner = stats;
    if (inner) --inner->draws;
    return sample_pg_iid(c, aux, inner);
}

/// Exact mean of PG(1, c).
inline double pg_mean(double c) {
    const double a = std::abs(c);
    if (a < 1e-6) return 0.25 - a * a / 48.0;
    return std::tanh(0.5 * a) / (2.0 * a);
}

}  // namespace ubmcqmc
