#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ubmcqmc/distributions/normal.hpp"
#include "ubmcqmc/estimators.hpp"
#include "ubmcqmc/models/toy.hpp"

using namespace ubmcqmc;

namespace {

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

/// Average over l = k..m of H_l = f(X_l) + sum_{t=l+1}^{tau-1} (f(X_t) - f(Y_{t-1})).
double average_of_h(const std::vector<double>& fx, const std::vector<double>& fy, std::size_t k, std::size_t m,
                    std::size_t tau) {
    double total = 0.0;
    for (std::size_t l = k; l <= m; ++l) {
        double h = fx[l];
        for (std::size_t t = l + 1; t + 1 <= tau; ++t) h += fx[t] - fy[t - 1];
        total += h;
    }
    return total / static_cast<double>(m - k + 1);
}

}  // namespace

TEST(Fkm, HandComputedExample) {
    const std::vector<double> fx{1.0, 2.0}, fy{3.0};
    const auto e = f_km([&](std::size_t t) { return scalar(fx[t]); }, [&](std::size_t t) { return scalar(fy[t]); },
                        0, 0, 2);
    EXPECT_DOUBLE_EQ(e.value[0], 0.0);
    EXPECT_DOUBLE_EQ(e.mcmc_part[0], 1.0);
    EXPECT_DOUBLE_EQ(e.bc_part[0], -1.0);
}

TEST(Fkm, EarlyMeetingGivesThePlainAverage) {
    const std::vector<double> fx{5, 1, 2, 3, 4, 5, 6};
    for (std::size_t tau = 1; tau <= 3; ++tau) {
        const auto e = f_km([&](std::size_t t) { return scalar(fx[t]); }, [](std::size_t) { return scalar(100.0); },
                            2, 6, tau);
        EXPECT_DOUBLE_EQ(e.value[0], (2 + 3 + 4 + 5 + 6) / 5.0);
        EXPECT_EQ(e.bc_part[0], 0.0);
    }
}

TEST(Fkm, MatchingDifferencesCancel) {
    std::vector<double> fx(30);
    std::iota(fx.begin(), fx.end(), 0.0);
    const auto e = f_km([&](std::size_t t) { return scalar(fx[t]); },
                        [&](std::size_t t) { return scalar(fx[t + 1]); }, 3, 10, 25);
    EXPECT_EQ(e.bc_part[0], 0.0);
    EXPECT_DOUBLE_EQ(e.value[0], e.mcmc_part[0]);
}

TEST(Fkm, AgreesWithTheTelescopedDefinition) {
    IidStream s(1, 0, StreamRole::data);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t k = s() % 6, m = k + s() % 12, tau = 1 + s() % 25;
        const std::size_t len = std::max(m, tau) + 2;
        std::vector<double> fx(len), fy(len);
        for (auto& v : fx) v = normal_inv_cdf(s.uniform_open());
        for (auto& v : fy) v = normal_inv_cdf(s.uniform_open());
        const auto e = f_km([&](std::size_t t) { return scalar(fx[t]); },
                            [&](std::size_t t) { return scalar(fy[t]); }, k, m, tau);
        EXPECT_NEAR(e.value[0], average_of_h(fx, fy, k, m, tau), 1e-12);
        EXPECT_NEAR(e.value[0], e.mcmc_part[0] + e.bc_part[0], 1e-15);
        EXPECT_EQ(e.cost, trajectory_cost(tau, m));
    }
}

TEST(Fkm, RejectsMBelowK) {
    EXPECT_THROW(f_km([](std::size_t) { return scalar(0); }, [](std::size_t) { return scalar(0); }, 3, 2, 1), Error);
}

TEST(Pool, HandComputedExample) {
    Eigen::MatrixXd est(2, 1);
    est << 0.0, 2.0;
    const auto r = pool(est);
    EXPECT_DOUBLE_EQ(r.mean[0], 1.0);
    EXPECT_DOUBLE_EQ(r.sigma[0] * r.sigma[0], 1.0);
    EXPECT_DOUBLE_EQ(r.sigma_total, 1.0);
}

TEST(Pool, IdenticalEstimatesHaveZeroSpread) {
    const Eigen::MatrixXd est = Eigen::MatrixXd::Constant(7, 3, 2.5);
    EXPECT_EQ(pool(est).sigma_total, 0.0);
}

TEST(Pool, PermutationInvariant) {
    Eigen::MatrixXd est(5, 2);
    est << 1, 2, 3, 4, 0.5, -1, 7, 7, 2, 3;
    Eigen::MatrixXd perm(5, 2);
    const int order[] = {3, 0, 4, 1, 2};
    for (int i = 0; i < 5; ++i) perm.row(i) = est.row(order[i]);
    const auto a = pool(est), b = pool(perm);
    EXPECT_NEAR((a.mean - b.mean).norm(), 0.0, 1e-14);
    EXPECT_NEAR(a.sigma_total, b.sigma_total, 1e-14);
}

TEST(Pool, RefusesASingleRepetition) { EXPECT_THROW(pool(Eigen::MatrixXd::Ones(1, 2)), Error); }

TEST(Pool, VarianceOfTheMeanIsUnbiased) {
    const double v = 4.0;
    const int R = 10, meta = 4000;
    IidStream s(2, 0, StreamRole::data);
    std::vector<double> s2;
    for (int i = 0; i < meta; ++i) {
        Eigen::MatrixXd est(R, 1);
        for (int r = 0; r < R; ++r) est(r, 0) = std::sqrt(v) * normal_inv_cdf(s.uniform_open());
        const double sig = pool(est).sigma[0];
        s2.push_back(sig * sig);
    }
    const double mean = std::accumulate(s2.begin(), s2.end(), 0.0) / meta;
    double var = 0.0;
    for (double x : s2) var += (x - mean) * (x - mean);
    const double se = std::sqrt(var / (meta - 1) / meta);
    EXPECT_NEAR(mean, v / R, 3.0 * se);
}

TEST(Cost, Examples) {
    const std::vector<std::size_t> ones(5, 1);
    EXPECT_DOUBLE_EQ(expected_cost(ones, 10), 10.0);
    const std::vector<std::size_t> late(3, 12);
    EXPECT_DOUBLE_EQ(expected_cost(late, 10), 2.0 * 11 + 1);
    const std::vector<std::size_t> boston{3};
    EXPECT_DOUBLE_EQ(expected_cost(boston, 127), 129.0);
    EXPECT_THROW(expected_cost(std::vector<std::size_t>{}, 3), Error);
}

TEST(LossOfEfficiency, Examples) {
    EXPECT_DOUBLE_EQ(loss_of_efficiency(1.0, 1.0, 0.3, 0.3), 1.0);
    const double v_inf = 129 * 3.32e-7 / 1.07;
    EXPECT_NEAR(loss_of_efficiency(1.0, 129, 3.32e-7, v_inf), 1.07, 1e-12);
    EXPECT_NEAR(loss_of_efficiency(2.0, 129, 3.32e-7 / 2, v_inf), 1.07, 1e-12);
    EXPECT_THROW(loss_of_efficiency(1.0, 1.0, 1.0, 0.0), Error);
}

namespace {

/// Per-chain averages of an AR(1) chain x_t = rho x_{t-1} + e_t started at stationarity.
Eigen::MatrixXd ar1_means(double rho, std::size_t chains, std::size_t length, std::uint64_t seed) {
    Eigen::MatrixXd means(static_cast<Eigen::Index>(chains), 1);
    const double sd0 = 1.0 / std::sqrt(1.0 - rho * rho);
    for (std::size_t c = 0; c < chains; ++c) {
        IidStream s(seed, c, StreamRole::data);
        double x = sd0 * normal_inv_cdf(s.uniform_open()), acc = 0.0;
        for (std::size_t t = 0; t < length; ++t) {
            x = rho * x + normal_inv_cdf(s.uniform_open());
            acc += x;
        }
        means(static_cast<Eigen::Index>(c), 0) = acc / static_cast<double>(length);
    }
    return means;
}

}  // namespace

TEST(AsymptoticVariance, IidUniformChain) {
    const std::size_t chains = 1000, length = 10000;
    Eigen::MatrixXd means(chains, 1);
    for (std::size_t c = 0; c < chains; ++c) {
        IidStream s(3, c, StreamRole::data);
        double acc = 0.0;
        for (std::size_t t = 0; t < length; ++t) acc += s.uniform();
        means(static_cast<Eigen::Index>(c), 0) = acc / length;
    }
    const auto v = asymptotic_variance(means, length);
    EXPECT_NEAR(v.total, 1.0 / 12.0, 0.05 / 12.0);
}

TEST(AsymptoticVariance, Ar1Chain) {
    const double rho = 0.5;
    const auto v = asymptotic_variance(ar1_means(rho, 1000, 10000, 4), 10000);
    const double stationary = 1.0 / (1.0 - rho * rho);
    EXPECT_NEAR(v.total / stationary, (1 + rho) / (1 - rho), 0.1 * (1 + rho) / (1 - rho));
}

TEST(AsymptoticVariance, StableUnderLongerChains) {
    const double rho = 0.5;
    const std::size_t chains = 1000;
    const double a = asymptotic_variance(ar1_means(rho, chains, 5000, 5), 5000).total;
    const double b = asymptotic_variance(ar1_means(rho, chains, 10000, 6), 10000).total;
    const double se = std::sqrt(2.0 / (chains - 1));
    EXPECT_LT(std::abs(a - b), 2.0 * std::sqrt(a * a * se * se + b * b * se * se));
}

TEST(AsymptoticVariance, NeedsTwoChains) { EXPECT_THROW(asymptotic_variance(Eigen::MatrixXd::Ones(1, 1), 5), Error); }

TEST(Rate, ExactPowerLaws) {
    const std::vector<double> Ns{1024, 4096, 16384};
    std::vector<double> inv, inv_sqrt;
    for (double n : Ns) {
        inv.push_back(1.0 / n);
        inv_sqrt.push_back(1.0 / std::sqrt(n));
    }
    EXPECT_NEAR(fit_rate(Ns, inv), -1.0, 1e-12);
    EXPECT_NEAR(fit_rate(Ns, inv_sqrt), -0.5, 1e-12);
    EXPECT_THROW(fit_rate(std::vector<double>{1, 2}, std::vector<double>{1, 2}), Error);
}

TEST(BcDecay, RecoversAnInverseSquareLaw) {
    const std::vector<double> Ns{64, 256, 1024};
    std::vector<std::vector<double>> samples;
    for (double n : Ns) samples.push_back({3.0 / n, -3.0 / n, 0.0});
    const auto d = bc_second_moment(Ns, samples);
    EXPECT_FALSE(d.degenerate);
    EXPECT_NEAR(d.slope, -2.0, 1e-12);
}

TEST(BcDecay, AllZeroIsDegenerate) {
    const std::vector<double> Ns{64, 256, 1024};
    const std::vector<std::vector<double>> samples(3, std::vector<double>(4, 0.0));
    EXPECT_TRUE(bc_second_moment(Ns, samples).degenerate);
}

TEST(BcDecay, LargerBurnInShrinksTheCorrection) {
    const ToyGibbs toy = toy_conjugate_model(3);
    std::vector<std::size_t> taus;
    for (std::uint64_t c = 0; c < 1000; ++c) {
        RowProvider rows(2, 8, (std::uint64_t{1} << 40) + c);
        taus.push_back(run_coupled_chain(toy, 1, 1, rows, 8, (std::uint64_t{1} << 40) + c).tau);
    }
    std::sort(taus.begin(), taus.end());
    const std::size_t q50 = taus[499], q99 = taus[989];
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t k : {std::size_t{1}, q50, q99}) {
        double m2 = 0.0;
        for (std::uint64_t c = 0; c < 2000; ++c) {
            RowProvider rows(2, 9, c);
            m2 += f_km(run_coupled_chain(toy, k, k + 63, rows, 9, c)).bc_part.squaredNorm();
        }
        EXPECT_LT(m2, previous) << "k = " << k;
        previous = m2;
    }
}

TEST(SelectK, TwiceTheUpperQuantile) {
    std::vector<std::size_t> taus(100);
    std::iota(taus.begin(), taus.end(), 1);
    std::reverse(taus.begin(), taus.end());
    EXPECT_EQ(select_k(taus), 198u);
    std::vector<std::size_t> many(1000, 2);
    many[3] = 50;
    EXPECT_EQ(select_k(many), 4u);
    EXPECT_THROW(select_k(std::vector<std::size_t>(99, 1)), Error);
}

TEST(Rrf, BaselineOverMethod) {
    EXPECT_DOUBLE_EQ(rmse_reduction_factor(2.0, 0.5), 4.0);
    EXPECT_THROW(rmse_reduction_factor(1.0, 0.0), Error);
}
