#pragma once

#include <tuple>

#include "ubmcqmc/errors.hpp"
#include "ubmcqmc/models/conditionals.hpp"

namespace ubmcqmc {

/// Probit regression with latent z_i ~ N(D_i beta, 1), y_i = 1{z_i > 0},
/// flat prior on beta.
struct ProbitModelSpec {
    Matrix D;
    Vector y;  // entries 0 or 1
};

/// State (beta, z_1..z_n); blocks beta then each z_i.
class ProbitGibbs {
public:
    using State = Vector;

    explicit ProbitGibbs(ProbitModelSpec spec) : spec_(std::move(spec)) {
        if (spec_.y.size() != spec_.D.rows()) throw ConfigError("response length does not match design");
        for (double v : spec_.y)
            if (v != 0.0 && v != 1.0) throw ConfigError("probit response must be 0 or 1");
        const Matrix DtD = spec_.D.transpose() * spec_.D;
        const Eigen::LLT<Matrix> llt(DtD);
        if (llt.info() != Eigen::Success) throw ConfigError("D^T D is not invertible");
        const Matrix cov = llt.solve(Matrix::Identity(DtD.rows(), DtD.cols()));
        chol_ = spd_cholesky(0.5 * (cov + cov.transpose()));
        projector_ = llt.solve(spec_.D.transpose());
    }

    std::size_t p() const { return static_cast<std::size_t>(spec_.D.cols()); }
    std::size_t n() const { return static_cast<std::size_t>(spec_.D.rows()); }
    std::size_t driving_dim() const { return p() + n(); }
    std::size_t target_dim() const { return p(); }
    const ProbitModelSpec& spec() const { return spec_; }

    Vector target(const State& s) const { return s.head(static_cast<Eigen::Index>(p())); }

    /// beta = 0, then z drawn once from its conditional.
    State initial(IidStream& s) const {
        State x = State::Zero(static_cast<Eigen::Index>(p() + n()));
        for (std::size_t i = 0; i < n(); ++i)
            x[static_cast<Eigen::Index>(p() + i)] = latent_conditional(x, i).dist.sample(s.uniform());
        return x;
    }

    MvnConditional beta_conditional(const State& s) const {
        return {Mvn{projector_ * s.tail(static_cast<Eigen::Index>(n())), chol_}};
    }

    TruncatedNormalConditional latent_conditional(const State& s, std::size_t i) const {
        const auto ii = static_cast<Eigen::Index>(i);
        const double mean = spec_.D.row(ii).dot(s.head(static_cast<Eigen::Index>(p())));
        constexpr double inf = std::numeric_limits<double>::infinity();
        if (spec_.y[ii] == 1.0) return {TruncatedNormal{mean, 0.0, inf}};
        return {TruncatedNormal{mean, -inf, 0.0}};
    }

    struct BetaGroup {
        const ProbitGibbs* m;
        std::size_t count() const { return 1; }
        std::size_t width() const { return m->p(); }
        MvnConditional conditional(const State& s, std::size_t) const { return m->beta_conditional(s); }
        void assign(State& s, std::size_t, const Vector& v) const {
            s.head(static_cast<Eigen::Index>(m->p())) = v;
        }
    };

    struct LatentGroup {
        const ProbitGibbs* m;
        std::size_t count() const { return m->n(); }
        std::size_t width() const { return 1; }
        TruncatedNormalConditional conditional(const State& s, std::size_t i) const {
            return m->latent_conditional(s, i);
        }
        void assign(State& s, std::size_t i, double v) const { s[static_cast<Eigen::Index>(m->p() + i)] = v; }
    };

    std::tuple<BetaGroup, LatentGroup> groups() const { return {BetaGroup{this}, LatentGroup{this}}; }

private:
    ProbitModelSpec spec_;
    Matrix chol_;       // lower factor of (D^T D)^{-1}
    Matrix projector_;  // (D^T D)^{-1} D^T
};

}  // namespace ubmcqmc
