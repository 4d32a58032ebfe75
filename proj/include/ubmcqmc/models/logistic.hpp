#pragma once

#include <tuple>

#include "ubmcqmc/errors.hpp"
#include "ubmcqmc/models/conditionals.hpp"

namespace ubmcqmc {

/// Logistic regression with Polya-Gamma augmentation, prior beta ~ N(b, B).
struct LogisticPgSpec {
    Matrix D;
    Vector y;  // entries 0 or 1
    Vector b;
    Matrix B;
    PgOptions pg;

    static LogisticPgSpec with_defaults(Matrix D, Vector y, PgApproach approach) {
        LogisticPgSpec s;
        const auto p = D.cols();
        s.D = std::move(D);
        s.y = std::move(y);
        s.b = Vector::Zero(p);
        s.B = 10.0 * Matrix::Identity(p, p);
        s.pg.approach = approach;
        return s;
    }
};

/// State (beta, W_1..W_n); blocks beta then each W_i.
class LogisticPgGibbs {
public:
    using State = Vector;

    explicit LogisticPgGibbs(LogisticPgSpec spec) : spec_(std::move(spec)) {
        const auto p = spec_.D.cols();
        if (spec_.y.size() != spec_.D.rows()) throw ConfigError("response length does not match design");
        for (double v : spec_.y)
            if (v != 0.0 && v != 1.0) throw ConfigError("logistic response must be 0 or 1");
        if (spec_.b.size() != p || spec_.B.rows() != p || spec_.B.cols() != p)
            throw ConfigError("prior dimensions do not match design");
        const Eigen::LLT<Matrix> llt(spec_.B);
        if (llt.info() != Eigen::Success) throw ConfigError("prior covariance is not positive definite");
        Binv_ = llt.solve(Matrix::Identity(p, p));
        rhs_ = spec_.D.transpose() * (spec_.y.array() - 0.5).matrix() + Binv_ * spec_.b;
    }

    std::size_t p() const { return static_cast<std::size_t>(spec_.D.cols()); }
    std::size_t n() const { return static_cast<std::size_t>(spec_.D.rows()); }
    std::size_t pg_width() const { return static_cast<std::size_t>(pg_columns(spec_.pg.approach)); }
    std::size_t driving_dim() const { return p() + pg_width() * n(); }
    std::size_t target_dim() const { return p(); }
    const LogisticPgSpec& spec() const { return spec_; }

    Vector target(const State& s) const { return s.head(static_cast<Eigen::Index>(p())); }

    /// beta = 0, W_i ~ PG(1, 0).
    State initial(IidStream& s) const {
        State x = State::Zero(static_cast<Eigen::Index>(p() + n()));
        for (std::size_t i = 0; i < n(); ++i) x[static_cast<Eigen::Index>(p() + i)] = sample_pg_iid(0.0, s);
        return x;
    }

    MvnConditional beta_conditional(const State& s) const {
        const auto W = s.tail(static_cast<Eigen::Index>(n()));
        const Matrix DW = spec_.D.array().colwise() * W.array();
        Matrix precision = Binv_;
        precision.noalias() += spec_.D.transpose() * DW;
        const Eigen::LLT<Matrix> llt(precision);
        if (llt.info() != Eigen::Success) throw NumericalError("posterior precision is not positive definite");
        const Matrix cov = llt.solve(Matrix::Identity(precision.rows(), precision.cols()));
        return {Mvn{llt.solve(rhs_), spd_cholesky(0.5 * (cov + cov.transpose()))}};
    }

    PgConditional latent_conditional(const State& s, std::size_t i) const {
        const double c = spec_.D.row(static_cast<Eigen::Index>(i)).dot(s.head(static_cast<Eigen::Index>(p())));
        return {std::abs(c), spec_.pg};
    }

    struct BetaGroup {
        const LogisticPgGibbs* m;
        std::size_t count() const { return 1; }
        std::size_t width() const { return m->p(); }
        MvnConditional conditional(const State& s, std::size_t) const { return m->beta_conditional(s); }
        void assign(State& s, std::size_t, const Vector& v) const {
            s.head(static_cast<Eigen::Index>(m->p())) = v;
        }
    };

    struct LatentGroup {
        const LogisticPgGibbs* m;
        std::size_t count() const { return m->n(); }
        std::size_t width() const { return m->pg_width(); }
        PgConditional conditional(const State& s, std::size_t i) const { return m->latent_conditional(s, i); }
        void assign(State& s, std::size_t i, double v) const { s[static_cast<Eigen::Index>(m->p() + i)] = v; }
    };

    std::tuple<BetaGroup, LatentGroup> groups() const { return {BetaGroup{this}, LatentGroup{this}}; }

private:
    LogisticPgSpec spec_;
    Matrix Binv_;
    Vector rhs_;  // D^T (y - 1/2) + B^{-1} b
};

}  // namespace ubmcqmc
