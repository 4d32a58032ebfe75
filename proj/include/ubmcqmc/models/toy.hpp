#pragma once

#include <array>
#include <tuple>

#include "ubmcqmc/models/conditionals.hpp"

namespace ubmcqmc {

/// Two-coordinate Gaussian target N(mean, precision^{-1}) updated one
/// coordinate at a time. Built as the posterior of y_i = a + b x_i + e_i
/// with known unit noise and an N(0, 10^2 I) prior, so the posterior mean
/// is available in closed form.
class ToyGibbs {
public:
    using State = Vector;

    ToyGibbs(Vector mean, Matrix precision, bool reverse_order = false)
        : mean_(std::move(mean)), precision_(std::move(precision)) {
        order_ = reverse_order ? std::array<int, 2>{1, 0} : std::array<int, 2>{0, 1};
    }

    std::size_t driving_dim() const { return 2; }
    std::size_t target_dim() const { return 2; }
    Vector target(const State& s) const { return s; }
    const Vector& posterior_mean() const { return mean_; }
    Matrix posterior_covariance() const { return precision_.inverse(); }

    /// Independent N(0, 10^2) coordinates.
    State initial(IidStream& s) const {
        State x(2);
        x[0] = 10.0 * normal_inv_cdf(s.uniform_open());
        x[1] = 10.0 * normal_inv_cdf(s.uniform_open());
        return x;
    }

    NormalConditional coordinate_conditional(const State& s, int i) const {
        const int o = 1 - i;
        const double lii = precision_(i, i);
        return {mean_[i] - precision_(i, o) / lii * (s[o] - mean_[o]), 1.0 / std::sqrt(lii)};
    }

    struct CoordinateGroup {
        const ToyGibbs* m;
        std::size_t count() const { return 2; }
        std::size_t width() const { return 1; }
        NormalConditional conditional(const State& s, std::size_t j) const {
            return m->coordinate_conditional(s, m->order_[j]);
        }
        void assign(State& s, std::size_t j, double v) const { s[m->order_[j]] = v; }
    };

    std::tuple<CoordinateGroup> groups() const { return {CoordinateGroup{this}}; }

private:
    Vector mean_;
    Matrix precision_;
    std::array<int, 2> order_{};
};

/// Toy regression posterior from n synthetic points with covariates
/// x_i ~ N(1.5, 1), slope 1 and intercept 0.5.
inline ToyGibbs toy_conjugate_model(std::uint64_t seed, std::size_t n = 20, bool reverse_order = false) {
    IidStream s(seed, 0, StreamRole::data);
    Matrix D(static_cast<Eigen::Index>(n), 2);
    Vector y(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < D.rows(); ++i) {
        const double x = 1.5 + normal_inv_cdf(s.uniform_open());
        D(i, 0) = 1.0;
        D(i, 1) = x;
        y[i] = 0.5 + x + normal_inv_cdf(s.uniform_open());
    }
    const Matrix precision = D.transpose() * D + 0.01 * Matrix::Identity(2, 2);
    const Vector mean = precision.llt().solve(D.transpose() * y);
    return ToyGibbs(mean, precision, reverse_order);
}

}  // namespace ubmcqmc
