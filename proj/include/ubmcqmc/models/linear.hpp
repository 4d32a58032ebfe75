#pragma once

#include <tuple>

#include "ubmcqmc/errors.hpp"
#include "ubmcqmc/models/conditionals.hpp"

namespace ubmcqmc {

/// Bayesian linear regression y = D beta + e, e ~ N(0, sigma^2 I), with
/// beta ~ N(b0, B0) and sigma^2 ~ IG(n0/2, s0/2).
struct LinearModelSpec {
    Matrix D;
    Vector y;
    Vector b0;
    Matrix B0;
    double n0 = 5.0;
    double s0 = 0.01;

    static LinearModelSpec with_defaults(Matrix D, Vector y) {
        LinearModelSpec s;
        const auto p = D.cols();
        s.D = std::move(D);
        s.y = std::move(y);
        s.b0 = Vector::Zero(p);
        s.B0 = 100.0 * Matrix::Identity(p, p);
        return s;
    }
};

/// State (beta, sigma^2); blocks beta then sigma^2.
class LinearGibbs {
public:
    using State = Vector;

    explicit LinearGibbs(LinearModelSpec spec) : spec_(std::move(spec)) {
        const auto p = spec_.D.cols();
        if (spec_.y.size() != spec_.D.rows()) throw ConfigError("response length does not match design");
        if (spec_.b0.size() != p || spec_.B0.rows() != p || spec_.B0.cols() != p)
            throw ConfigError("prior dimensions do not match design");
        if (!(spec_.n0 > 0.0) || !(spec_.s0 > 0.0)) throw ConfigError("n0 and s0 must be positive");
        Eigen::LLT<Matrix> llt(spec_.B0);
        if (llt.info() != Eigen::Success) throw ConfigError("prior covariance is not positive definite");
        prior_chol_ = llt.matrixL();
        B0inv_ = llt.solve(Matrix::Identity(p, p));
        B0inv_b0_ = B0inv_ * spec_.b0;
        DtD_ = spec_.D.transpose() * spec_.D;
        Dty_ = spec_.D.transpose() * spec_.y;
        yty_ = spec_.y.squaredNorm();
    }

    std::size_t p() const { return static_cast<std::size_t>(spec_.D.cols()); }
    std::size_t n() const { return static_cast<std::size_t>(spec_.D.rows()); }
    std::size_t driving_dim() const { return p() + 1; }
    std::size_t target_dim() const { return p(); }
    const LinearModelSpec& spec() const { return spec_; }

    Vector target(const State& s) const { return s.head(static_cast<Eigen::Index>(p())); }

    /// beta and sigma^2 from the prior.
    State initial(IidStream& s) const {
        State x(p() + 1);
        x.head(static_cast<Eigen::Index>(p())) = sample_mvn_iid(spec_.b0, prior_chol_, s);
        x[static_cast<Eigen::Index>(p())] = InverseGamma{0.5 * spec_.n0, 0.5 * spec_.s0}.quantile(s.uniform_open());
        return x;
    }

    /// N(b1, B1) given sigma^2.
    MvnConditional beta_conditional(double sigma2) const {
        const Matrix precision = B0inv_ + DtD_ / sigma2;
        const Eigen::LLT<Matrix> llt(precision);
        if (llt.info() != Eigen::Success) throw NumericalError("posterior precision is not positive definite");
        const Matrix cov = llt.solve(Matrix::Identity(precision.rows(), precision.cols()));
        Vector mean = llt.solve(B0inv_b0_ + Dty_ / sigma2);
        return {Mvn{std::move(mean), spd_cholesky(0.5 * (cov + cov.transpose()))}};
    }

    /// IG(n1/2, s1/2) given beta, s1 = s0 + |y - D beta|^2.
    InverseGammaConditional sigma_conditional(const Vector& beta) const {
        const double rss = std::max(0.0, yty_ - 2.0 * beta.dot(Dty_) + beta.dot(DtD_ * beta));
        return {InverseGamma{0.5 * (spec_.n0 + static_cast<double>(n())), 0.5 * (spec_.s0 + rss)}};
    }

    struct BetaGroup {
        const LinearGibbs* m;
        std::size_t count() const { return 1; }
        std::size_t width() const { return m->p(); }
        MvnConditional conditional(const State& s, std::size_t) const {
            return m->beta_conditional(s[static_cast<Eigen::Index>(m->p())]);
        }
        void assign(State& s, std::size_t, const Vector& v) const {
            s.head(static_cast<Eigen::Index>(m->p())) = v;
        }
    };

    struct SigmaGroup {
        const LinearGibbs* m;
        std::size_t count() const { return 1; }
        std::size_t width() const { return 1; }
        InverseGammaConditional conditional(const State& s, std::size_t) const {
            return m->sigma_conditional(s.head(static_cast<Eigen::Index>(m->p())));
        }
        void assign(State& s, std::size_t, double v) const { s[static_cast<Eigen::Index>(m->p())] = v; }
    };

    std::tuple<BetaGroup, SigmaGroup> groups() const { return {BetaGroup{this}, SigmaGroup{this}}; }

private:
    LinearModelSpec spec_;
    Matrix prior_chol_, B0inv_, DtD_;
    Vector B0inv_b0_, Dty_;
    double yty_ = 0.0;
};

}  // namespace ubmcqmc
