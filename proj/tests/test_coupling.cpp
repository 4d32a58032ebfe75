#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ubmcqmc/coupling.hpp"
#include "ubmcqmc/datasets.hpp"
#include "ubmcqmc/distributions/normal.hpp"
#include "ubmcqmc/estimators.hpp"
#include "ubmcqmc/models/logistic.hpp"
#include "ubmcqmc/models/toy.hpp"
#include "ubmcqmc/stats.hpp"

using namespace ubmcqmc;

namespace {

struct Uniform {
    using value_type = double;
    double a, b;
    double sample(std::span<const double> u, IidStream&) const { return a + u[0] * (b - a); }
    double log_density(double v) const {
        return (v >= a && v < b) ? -std::log(b - a) : -std::numeric_limits<double>::infinity();
    }
};

double coupling_rate(const auto& p, const auto& q, std::size_t trials, std::uint64_t seed) {
    IidStream u(seed, 0, StreamRole::burn_in), aux(seed, 0, StreamRole::x_aux),
        c(seed, 0, StreamRole::coupling), y(seed, 0, StreamRole::y_chain);
    std::size_t hits = 0;
    double row[1];
    for (std::size_t i = 0; i < trials; ++i) {
        row[0] = u.uniform();
        hits += maximal_coupling_block(p, q, std::span<const double>(row, 1), aux, c, y).identical;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

/// One scalar coordinate moved by a state-dependent uniform step.
template <class Step>
struct ScalarModel {
    using State = Vector;
    Step step;

    struct Group {
        const ScalarModel* m;
        std::size_t count() const { return 1; }
        std::size_t width() const { return 1; }
        Uniform conditional(const State& s, std::size_t) const { return m->step(s[0]); }
        void assign(State& s, std::size_t, double v) const { s[0] = v; }
    };
    std::tuple<Group> groups() const { return {Group{this}}; }
    std::size_t driving_dim() const { return 1; }
    std::size_t target_dim() const { return 1; }
    State initial(IidStream& s) const { return State::Constant(1, s.uniform()); }
    Vector target(const State& s) const { return s; }
};

auto make_scalar(auto step) { return ScalarModel<decltype(step)>{step}; }

ToyGibbs independent_toy() {
    Matrix precision(2, 2);
    precision << 2.0, 0.0, 0.0, 0.5;
    return ToyGibbs(Vector::Constant(2, 1.0), precision);
}

}  // namespace

TEST(MaximalCoupling, OverlappingUniformsMeetWithProbabilityOneHalf) {
    const double rate = coupling_rate(Uniform{0.0, 1.0}, Uniform{0.5, 1.5}, 100000, 1);
    EXPECT_NEAR(rate, 0.5, 3.0 * std::sqrt(0.25 / 100000));
}

TEST(MaximalCoupling, IdenticalLawsAlwaysMeet) {
    IidStream aux(2, 0, StreamRole::x_aux), c(2, 0, StreamRole::coupling), y(2, 0, StreamRole::y_chain);
    const NormalConditional p{0.3, 1.7};
    for (int i = 0; i < 1000; ++i) {
        const double u = (i + 0.5) / 1000.0;
        const auto d = maximal_coupling_block(p, p, std::span<const double>(&u, 1), aux, c, y);
        EXPECT_TRUE(d.identical);
        EXPECT_EQ(d.x, d.y);
    }
}

TEST(MaximalCoupling, DisjointSupportsNeverMeet) {
    IidStream aux(3, 0, StreamRole::x_aux), c(3, 0, StreamRole::coupling), y(3, 0, StreamRole::y_chain);
    const Uniform p{0.0, 1.0}, q{2.0, 3.0};
    for (int i = 0; i < 1000; ++i) {
        const double u = (i + 0.5) / 1000.0;
        const auto d = maximal_coupling_block(p, q, std::span<const double>(&u, 1), aux, c, y);
        EXPECT_FALSE(d.identical);
        EXPECT_GE(d.y, 2.0);
        EXPECT_LT(d.y, 3.0);
    }
}

TEST(MaximalCoupling, NormalMeetingRateMatchesOverlap) {
    double previous = 0.0;
    for (double gap : {3.0, 1.5, 0.8, 0.2}) {
        const double rate = coupling_rate(NormalConditional{0.0, 1.0}, NormalConditional{gap, 1.0}, 40000, 7);
        const double overlap = 2.0 * normal_cdf(-gap / 2.0);
        EXPECT_NEAR(rate, overlap, 3.5 * std::sqrt(overlap * (1 - overlap) / 40000) + 1e-9) << gap;
        EXPECT_GT(rate, previous);
        previous = rate;
    }
}

TEST(MaximalCoupling, XDrawIgnoresTheOtherLaw) {
    const double u = 0.37;
    IidStream aux(4, 0, StreamRole::x_aux), c(4, 0, StreamRole::coupling), y(4, 0, StreamRole::y_chain);
    const NormalConditional p{1.0, 2.0};
    const double alone = p.sample(std::span<const double>(&u, 1), aux);
    for (double gap : {0.0, 0.5, 5.0}) {
        const auto d =
            maximal_coupling_block(p, NormalConditional{1.0 + gap, 2.0}, std::span<const double>(&u, 1), aux, c, y);
        EXPECT_EQ(d.x, alone);
    }
}

TEST(MaximalCoupling, YMarginalFollowsItsLaw) {
    IidStream u(5, 0, StreamRole::burn_in), aux(5, 0, StreamRole::x_aux), c(5, 0, StreamRole::coupling),
        y(5, 0, StreamRole::y_chain);
    const NormalConditional p{0.0, 1.0}, q{1.0, 1.5};
    std::vector<double> ys;
    for (int i = 0; i < 20000; ++i) {
        const double r = u.uniform();
        ys.push_back(maximal_coupling_block(p, q, std::span<const double>(&r, 1), aux, c, y).y);
    }
    EXPECT_GT(ks_test(ys, [](double v) { return normal_cdf((v - 1.0) / 1.5); }).p_value, 0.001);
}

TEST(CoupledChain, StateIgnoringChainsMeetAtTwo) {
    const ToyGibbs model = independent_toy();
    for (std::uint64_t chain = 0; chain < 50; ++chain) {
        RowProvider rows(model.driving_dim(), 11, chain);
        const auto tr = run_coupled_chain(model, 1, 5, rows, 11, chain);
        EXPECT_EQ(tr.tau, 2u);
        EXPECT_EQ(tr.length(), 5u);
    }
}

TEST(CoupledChain, XTrajectoryMatchesSingleChain) {
    const ToyGibbs toy = toy_conjugate_model(3);
    for (std::uint64_t chain = 0; chain < 20; ++chain) {
        RowProvider a(2, 9, chain), b(2, 9, chain);
        const auto tr = run_coupled_chain(toy, 3, 40, a, 9, chain);
        const Eigen::MatrixXd fx = run_single_chain(toy, tr.length(), b, 9, chain);
        EXPECT_EQ(tr.fx, fx);
    }
}

TEST(CoupledChain, XTrajectoryMatchesSingleChainWithAuxiliaryDraws) {
    const auto data = synthetic_regression(ModelKind::logistic, 30, 3, 17);
    const LogisticPgGibbs model(LogisticPgSpec::with_defaults(data.D, data.y, PgApproach::iid_selector));
    for (std::uint64_t chain = 0; chain < 5; ++chain) {
        RowProvider a(model.driving_dim(), 4, chain), b(model.driving_dim(), 4, chain);
        const auto tr = run_coupled_chain(model, 2, 10, a, 4, chain);
        EXPECT_EQ(tr.fx, run_single_chain(model, tr.length(), b, 4, chain));
    }
}

TEST(CoupledChain, ChainsStayGluedAfterMeeting) {
    const ToyGibbs toy = toy_conjugate_model(3);
    for (std::uint64_t chain = 0; chain < 20; ++chain) {
        RowProvider rows(2, 5, chain);
        std::size_t met_at = 0;
        bool glued = true;
        ChainOptions opt;
        opt.trace = [&](std::size_t t, const Eigen::VectorXd& x, const Eigen::VectorXd& y, bool met) {
            if (met && met_at == 0) met_at = t;
            if (met_at) glued = glued && (x == y);
        };
        const auto tr = run_coupled_chain(toy, 1, 60, rows, 5, chain, opt);
        EXPECT_EQ(met_at, tr.tau);
        EXPECT_TRUE(glued);
        EXPECT_EQ(static_cast<std::size_t>(tr.fy.cols()) + 1, tr.tau);
        for (std::size_t t = tr.tau - 1; t < tr.length(); ++t) EXPECT_EQ(tr.f_y(t), tr.f_x(t + 1));
    }
}

TEST(CoupledChain, YChainHasTheSameMarginalAsX) {
    const ToyGibbs toy = toy_conjugate_model(3);
    std::vector<double> ys, xs;
    for (std::uint64_t chain = 0; chain < 3000; ++chain) {
        RowProvider rows(2, 21, chain);
        const auto tr = run_coupled_chain(toy, 1, 4, rows, 21, chain);
        ys.push_back(tr.f_y(2)[1]);
        RowProvider other(2, 22, chain);
        xs.push_back(run_single_chain(toy, 2, other, 22, chain)(1, 2));
    }
    EXPECT_GT(ks_two_sample(xs, ys).p_value, 0.001);
}

TEST(CoupledChain, MeetingTimesHaveAGeometricTail) {
    const ToyGibbs toy = toy_conjugate_model(3);
    std::vector<std::size_t> taus;
    for (std::uint64_t chain = 0; chain < 2000; ++chain) {
        RowProvider rows(2, 31, chain);
        taus.push_back(run_coupled_chain(toy, 1, 1, rows, 31, chain).tau);
    }
    std::sort(taus.begin(), taus.end());
    const std::size_t q50 = taus[taus.size() / 2];
    auto survival = [&](std::size_t t) {
        return static_cast<double>(taus.end() - std::upper_bound(taus.begin(), taus.end(), t)) /
               static_cast<double>(taus.size());
    };
    EXPECT_LT(survival(2 * q50), 0.05);
    EXPECT_LT(survival(4 * q50), 0.002);
}

TEST(CoupledChain, NeverMeetingChainsStopAtTheCap) {
    const auto model = make_scalar([](double s) { return Uniform{std::floor(s) + 1.0, std::floor(s) + 2.0}; });
    RowProvider rows(1, 1, 0);
    ChainOptions opt;
    opt.cap = 50;
    try {
        run_coupled_chain(model, 1, 10, rows, 1, 0, opt);
        FAIL() << "expected the cap to trigger";
    } catch (const UncoupledAtCap& e) {
        EXPECT_EQ(e.trajectory.length(), 50u);
    }
}

TEST(CoupledChain, RejectsInconsistentArguments) {
    const ToyGibbs toy = independent_toy();
    RowProvider rows(2, 1, 0), wide(3, 1, 0);
    EXPECT_THROW(run_coupled_chain(toy, 0, 5, rows, 1, 0), Error);
    EXPECT_THROW(run_coupled_chain(toy, 6, 5, rows, 1, 0), Error);
    EXPECT_THROW(run_coupled_chain(toy, 1, 5, wide, 1, 0), Error);
    ChainOptions opt;
    opt.cap = 3;
    EXPECT_THROW(run_coupled_chain(toy, 1, 5, rows, 1, 0, opt), Error);
}

TEST(CoupledChain, PooledEstimatorIsCenteredOnThePosteriorMean) {
    const ToyGibbs toy = toy_conjugate_model(3);
    const std::size_t R = 2000;
    Eigen::MatrixXd est(R, 2);
    for (std::size_t r = 0; r < R; ++r) {
        RowProvider rows(2, 41, r);
        est.row(static_cast<Eigen::Index>(r)) = f_km(run_coupled_chain(toy, 2, 10, rows, 41, r)).value.transpose();
    }
    const auto rep = pool(est);
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(rep.mean[j], toy.posterior_mean()[j], 4.0 * rep.sigma[j]);
}
