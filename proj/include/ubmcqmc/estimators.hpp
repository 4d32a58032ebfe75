#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ubmcqmc/coupling.hpp"
#include "ubmcqmc/errors.hpp"

namespace ubmcqmc {

struct UnbiasedEstimate {
    Eigen::VectorXd value;
    Eigen::VectorXd mcmc_part;
    Eigen::VectorXd bc_part;
    std::size_t tau = 0;
    double cost = 0.0;
};

/// 2(tau - 1) + max(1, m + 1 - tau)
inline double trajectory_cost(std::size_t tau, std::size_t m) {
    const double t = static_cast<double>(tau), mm = static_cast<double>(m);
    return 2.0 * (t - 1.0) + std::max(1.0, mm + 1.0 - t);
}

/// Time-averaged unbiased estimator. `f_x(t)` and `f_y(t)` give f(X_t) and
/// f(Y_t); they are queried for t in [k, max(m, tau - 1)] and [k, tau - 2].
template <class FX, class FY>
UnbiasedEstimate f_km(FX&& f_x, FY&& f_y, std::size_t k, std::size_t m, std::size_t tau) {
    if (m < k) throw Error("f_km needs m >= k");
    UnbiasedEstimate e;
    e.tau = tau;
    e.cost = trajectory_cost(tau, m);
    const double len = static_cast<double>(m - k + 1);
    e.mcmc_part = f_x(k);
    for (std::size_t l = k + 1; l <= m; ++l) e.mcmc_part += f_x(l);
    e.mcmc_part /= len;
    e.bc_part = Eigen::VectorXd::Zero(e.mcmc_part.size());
    for (std::size_t l = k + 1; l + 1 <= tau; ++l) {
        const double w = std::min(1.0, static_cast<double>(l - k) / len);
        e.bc_part += w * (f_x(l) - f_y(l - 1));
    }
    e.value = e.mcmc_part + e.bc_part;
    return e;
}

inline UnbiasedEstimate f_km(const CoupledTrajectory& tr) {
    if (tr.tau > tr.length() + 1 && tr.tau != 0) throw Error("trajectory shorter than tau");
    return f_km([&](std::size_t t) { return tr.f_x(t); },
                [&](std::size_t t) { return tr.f_y(t); }, tr.k, tr.m, tr.tau);
}

struct PooledReport {
    Eigen::VectorXd mean;
    Eigen::VectorXd sigma;  // per component
    double sigma_total = 0.0;
    std::size_t R = 0;
    std::size_t N = 0;
    std::size_t k = 0;
};

/// Rows are repetitions, columns components.
inline PooledReport pool(const Eigen::MatrixXd& estimates, std::size_t N = 0, std::size_t k = 0) {
    const auto R = estimates.rows();
    if (R < 2) throw Error("pooling needs at least two repetitions");
    PooledReport rep;
    rep.R = static_cast<std::size_t>(R);
    rep.N = N;
    rep.k = k;
    rep.mean = estimates.colwise().mean().transpose();
    const Eigen::MatrixXd centered = estimates.rowwise() - rep.mean.transpose();
    const Eigen::VectorXd var =
        centered.array().square().colwise().sum().transpose() / (double(R) * double(R - 1));
    rep.sigma = var.array().sqrt();
    rep.sigma_total = std::sqrt(var.sum());
    return rep;
}

inline double expected_cost(std::span<const std::size_t> taus, std::size_t m) {
    if (taus.empty()) throw Error("expected_cost needs at least one meeting time");
    double s = 0.0;
    for (std::size_t t : taus) s += trajectory_cost(t, m);
    return s / static_cast<double>(taus.size());
}

inline double loss_of_efficiency(double cost_ratio, double expected_cost_value, double var_total,
                                 double v_inf_total) {
    if (!(v_inf_total > 0.0)) throw Error("asymptotic variance must be positive");
    if (!(cost_ratio > 0.0) || !(expected_cost_value > 0.0) || !(var_total >= 0.0))
        throw Error("loss of efficiency inputs must be positive");
    return cost_ratio * expected_cost_value * var_total / v_inf_total;
}

struct AsymptoticVariance {
    Eigen::VectorXd per_component;
    double total = 0.0;
};

/// V_inf = chain length x sample variance of per-chain averages (rows = chains).
inline AsymptoticVariance asymptotic_variance(const Eigen::MatrixXd& chain_means,
                                              std::size_t chain_length) {
    const auto L = chain_means.rows();
    if (L < 2) throw Error("asymptotic variance needs at least two chains");
    const Eigen::RowVectorXd mean = chain_means.colwise().mean();
    const Eigen::MatrixXd c = chain_means.rowwise() - mean;
    AsymptoticVariance v;
    v.per_component = c.array().square().colwise().sum().transpose() / double(L - 1) *
                      static_cast<double>(chain_length);
    v.total = v.per_component.sum();
    return v;
}

/// Least-squares slope of log2(y) against log2(x).
inline double log2_slope(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw Error("slope fit needs matched points");
    const std::size_t n = xs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw Error("slope fit needs positive values");
        const double a = std::log2(xs[i]), b = std::log2(ys[i]);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw Error("slope fit needs distinct sizes");
    return (n * sxy - sx * sy) / den;
}

inline double fit_rate(std::span<const double> Ns, std::span<const double> rmses) {
    if (Ns.size() < 3) throw Error("rate fit needs at least three sizes");
    return log2_slope(Ns, rmses);
}

struct BcDecay {
    double slope = 0.0;
    bool degenerate = false;
    std::vector<double> second_moments;
};

/// Slope of log E[BC^2] against log N; `bc_samples[i]` holds BC totals at Ns[i].
inline BcDecay bc_second_moment(std::span<const double> Ns,
                                const std::vector<std::vector<double>>& bc_samples) {
    if (Ns.size() < 3 || bc_samples.size() != Ns.size())
        throw Error("BC decay needs at least three sizes");
    BcDecay out;
    for (const auto& s : bc_samples) {
        double m2 = 0.0;
        for (double b : s) m2 += b * b;
        out.second_moments.push_back(s.empty() ? 0.0 : m2 / static_cast<double>(s.size()));
    }
    if (std::any_of(out.second_moments.begin(), out.second_moments.end(),
                    [](double v) { return v <= 0.0; })) {
        out.degenerate = true;
        return out;
    }
    out.slope = log2_slope(Ns, out.second_moments);
    return out;
}

/// k = 2 x the order statistic at index ceil(0.99 n) of the pilot meeting times.
inline std::size_t select_k(std::vector<std::size_t> taus) {
    if (taus.size() < 100) throw Error("select_k needs at least 100 pilot meeting times");
    std::sort(taus.begin(), taus.end());
    const auto idx = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(taus.size())));
    return 2 * taus[std::min(idx, taus.size()) - 1];
}

/// Ratio of RMSEs, baseline over candidate.
inline double rmse_reduction_factor(double baseline_sigma_total, double sigma_total) {
    if (!(sigma_total > 0.0)) throw Error("RMSE reduction factor needs a positive RMSE");
    return baseline_sigma_total / sigma_total;
}

}  // namespace ubmcqmc
