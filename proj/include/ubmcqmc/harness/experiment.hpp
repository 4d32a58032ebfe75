#pragma once

#include <chrono>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ubmcqmc/coupling.hpp"
#include "ubmcqmc/estimators.hpp"
#include "ubmcqmc/harness/config.hpp"
#include "ubmcqmc/harness/model_factory.hpp"
#include "ubmcqmc/harness/parallel.hpp"
#include "ubmcqmc/lfsr.hpp"
#include "ubmcqmc/sobol.hpp"
#include "ubmcqmc/variable_matrix.hpp"

namespace ubmcqmc {

/// Chain ids at and above this value are reserved for pilot runs.
inline constexpr std::uint64_t pilot_chain_base = std::uint64_t{1} << 62;

/// Seed of outer repetition `rep` of a sweep.
inline std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t rep) {
    return mix64(seed ^ mix64(rep + 0x5851f42d4c957f2dULL));
}

/// Produces the per-chain driving rows of one method: an unrandomized core
/// matrix is built once and each chain gets its own randomized copy.
class DrivingSource {
public:
    DrivingSource(Method method, std::size_t N, std::size_t dim, const ExperimentConfig& c)
        : method_(method), dim_(dim) {
        switch (method) {
            case Method::ubmcmc:
            case Method::mcmc:
                break;
            case Method::ubmcqmc_liao: {
                const auto dirs = SobolDirections::load(c.sobol_path());
                if (dim > dirs.max_dim())
                    throw ConfigError("Sobol' directions cover " + std::to_string(dirs.max_dim()) +
                                      " dimensions, model needs " + std::to_string(dim));
                std::vector<std::size_t> identity(N);
                for (std::size_t i = 0; i < N; ++i) identity[i] = i;
                base_ = std::make_shared<const VariableMatrix>(liao_matrix(dirs, N, dim, identity));
                break;
            }
            case Method::ubmcqmc_harase:
            case Method::mcqmc_harase: {
                ExperimentConfig probe = c;
                probe.N = N;
                probe.require_harase_size(N);
                base_ = std::make_shared<const VariableMatrix>(harase_matrix(c.lfsr_tables().at(probe.log2_N()), dim));
                break;
            }
        }
    }

    Method method() const { return method_; }
    std::size_t dim() const { return dim_; }
    std::shared_ptr<const VariableMatrix> base() const { return base_; }

    /// Randomized core for one chain, or null for IID driving.
    std::shared_ptr<const VariableMatrix> core(std::uint64_t seed, std::uint64_t chain) const {
        if (!base_) return nullptr;
        IidStream s(seed, chain, StreamRole::randomization);
        if (base_->provenance() == Provenance::liao) {
            const auto perm = random_permutation(base_->rows(), s);
            const auto z = random_shift_vector(dim_, s);
            std::vector<double> data(base_->rows() * dim_);
            for (std::size_t i = 0; i < base_->rows(); ++i) {
                const auto r = base_->row(perm[i]);
                std::copy(r.begin(), r.end(), data.begin() + static_cast<std::ptrdiff_t>(i * dim_));
            }
            return std::make_shared<const VariableMatrix>(
                random_shift(VariableMatrix(base_->rows(), dim_, std::move(data), Provenance::liao), z));
        }
        return std::make_shared<const VariableMatrix>(digital_shift(*base_, random_shift_vector(dim_, s)));
    }

    RowProvider provider(std::size_t k, std::uint64_t seed, std::uint64_t chain, BurnInPolicy policy) const {
        if (!base_) return RowProvider(dim_, seed, chain);
        return RowProvider(core(seed, chain), k, seed, chain, policy);
    }

private:
    Method method_;
    std::size_t dim_;
    std::shared_ptr<const VariableMatrix> base_;
};

struct ChainOutcome {
    bool ok = false;
    UnbiasedEstimate estimate;
    double seconds = 0.0;
    std::string error;
};

template <GibbsModel M>
ChainOutcome run_unbiased_chain(const M& model, const DrivingSource& src, std::size_t k, std::size_t N,
                                std::uint64_t seed, std::uint64_t chain, BurnInPolicy policy,
                                std::size_t cap) {
    ChainOutcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
        RowProvider rows = src.provider(k, seed, chain, policy);
        ChainOptions opt;
        opt.cap = std::max(cap, N + k - 1);
        out.estimate = f_km(run_coupled_chain(model, k, N + k - 1, rows, seed, chain, opt));
        out.ok = true;
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        out.error = e.what();
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

struct PilotResult {
    std::size_t k = 0;
    std::vector<std::size_t> taus;  // coupled chains only, in chain order
    std::size_t count = 0;
    std::size_t uncoupled = 0;
};

/// Meeting times of `count` IID-driven coupled chains and the burn-in they imply.
inline PilotResult pilot_run(const ExperimentConfig& c, const BuiltModel& built) {
    if (c.pilot_count < 100) throw ConfigError("pilot_count must be at least 100");
    const std::size_t n = c.pilot_count;
    std::vector<std::size_t> taus(n, 0);
    parallel_for(n, c.jobs, [&](std::size_t i) {
        std::visit(
            [&](const auto& model) {
                RowProvider rows(model.driving_dim(), c.seed, pilot_chain_base + i);
                ChainOptions opt;
                opt.cap = c.cap;
                try {
                    taus[i] = run_coupled_chain(model, 1, 1, rows, c.seed, pilot_chain_base + i, opt).tau;
                } catch (const UncoupledAtCap&) {
                    taus[i] = 0;
                } catch (const NumericalError&) {
                    taus[i] = 0;
                }
            },
            built.model);
    });
    PilotResult r;
    r.count = n;
    for (std::size_t t : taus) {
        if (t == 0) ++r.uncoupled;
        else r.taus.push_back(t);
    }
    if (static_cast<double>(r.taus.size()) < 0.9 * static_cast<double>(n))
        throw ExperimentError("pilot run: " + std::to_string(r.uncoupled) + " of " + std::to_string(n) +
                              " chains did not couple");
    r.k = select_k(r.taus);
    return r;
}

inline PilotResult pilot_run(const ExperimentConfig& c) { return pilot_run(c, build_model(c)); }

struct ExperimentReport {
    ExperimentConfig config;  // k resolved
    std::string dataset;
    std::string checksum;
    bool synthetic_data = false;
    std::size_t d = 0;
    std::size_t m = 0;
    std::optional<PilotResult> pilot;

    PooledReport pooled;
    Eigen::MatrixXd estimates;  // successful chains x components
    Eigen::VectorXd mcmc_part_mean;
    Eigen::VectorXd bc_part_mean;
    std::vector<double> bc_squared;  // |BC part|^2 per successful chain
    std::vector<std::size_t> taus;
    std::vector<std::size_t> failed_chains;
    std::vector<std::string> failures;
    double expected_cost = 0.0;
    double var_total = 0.0;  // summed per-component variance of one estimator
    std::optional<double> rrf;
    std::optional<double> loss_of_efficiency;
    std::optional<Vector> exact_mean;

    std::vector<double> seconds;
    double mean_seconds = 0.0;

    std::size_t N() const { return config.N; }
    std::size_t k() const { return *config.k; }
};

/// R coupled chains of the configured method, pooled in chain order.
inline ExperimentReport run_experiment(ExperimentConfig c, const BuiltModel& built,
                                       std::optional<PilotResult> pilot = std::nullopt) {
    c.validate();
    if (!is_unbiased(c.method)) throw ConfigError("run needs an unbiased method, got " + to_string(c.method));
    if (!c.k) {
        if (!pilot) pilot = pilot_run(c, built);
        c.k = pilot->k;
    }
    ExperimentReport rep;
    rep.config = c;
    rep.dataset = built.dataset;
    rep.checksum = built.checksum;
    rep.synthetic_data = built.synthetic;
    rep.d = built.driving_dim();
    rep.m = c.N + *c.k - 1;
    rep.pilot = pilot;
    rep.exact_mean = built.exact_mean;

    const DrivingSource src(c.method, c.N, rep.d, c);
    std::vector<ChainOutcome> out(c.R);
    parallel_for(c.R, c.jobs, [&](std::size_t r) {
        std::visit(
            [&](const auto& model) {
                out[r] = run_unbiased_chain(model, src, *c.k, c.N, c.seed, r, c.burn_in_policy, c.cap);
            },
            built.model);
    });

    std::vector<const ChainOutcome*> ok;
    for (std::size_t r = 0; r < c.R; ++r) {
        rep.seconds.push_back(out[r].seconds);
        if (out[r].ok) {
            ok.push_back(&out[r]);
        } else {
            rep.failed_chains.push_back(r);
            rep.failures.push_back(out[r].error);
        }
    }
    if (static_cast<double>(rep.failed_chains.size()) > 0.01 * static_cast<double>(c.R))
        throw ExperimentError(std::to_string(rep.failed_chains.size()) + " of " + std::to_string(c.R) +
                              " chains failed; first error: " + rep.failures.front());
    if (ok.size() < 2) throw ExperimentError("fewer than two chains completed");

    const auto p = ok.front()->estimate.value.size();
    rep.estimates.resize(static_cast<Eigen::Index>(ok.size()), p);
    rep.mcmc_part_mean = Vector::Zero(p);
    rep.bc_part_mean = Vector::Zero(p);
    for (std::size_t i = 0; i < ok.size(); ++i) {
        const auto& e = ok[i]->estimate;
        rep.estimates.row(static_cast<Eigen::Index>(i)) = e.value.transpose();
        rep.mcmc_part_mean += e.mcmc_part;
        rep.bc_part_mean += e.bc_part;
        rep.bc_squared.push_back(e.bc_part.squaredNorm());
        rep.taus.push_back(e.tau);
    }
    rep.mcmc_part_mean /= static_cast<double>(ok.size());
    rep.bc_part_mean /= static_cast<double>(ok.size());
    rep.pooled = pool(rep.estimates, c.N, *c.k);
    rep.expected_cost = expected_cost(rep.taus, rep.m);
    rep.var_total = static_cast<double>(ok.size()) * rep.pooled.sigma_total * rep.pooled.sigma_total;
    if (c.v_inf_total)
        rep.loss_of_efficiency = loss_of_efficiency(c.cost_ratio, rep.expected_cost, rep.var_total, *c.v_inf_total);
    double total = 0.0;
    for (double s : rep.seconds) total += s;
    rep.mean_seconds = total / static_cast<double>(rep.seconds.size());
    return rep;
}

inline ExperimentReport run_experiment(const ExperimentConfig& c) { return run_experiment(c, build_model(c)); }

/// Sets rep.rrf to baseline sigma_total / rep sigma_total. Both reports must
/// share model, dataset, N, k and R.
inline double attach_rrf(ExperimentReport& rep, const ExperimentReport& baseline) {
    const auto& a = rep.config;
    const auto& b = baseline.config;
    if (a.model != b.model || rep.dataset != baseline.dataset || a.N != b.N || a.k != b.k || a.R != b.R)
        throw ConfigError("RRF needs reports with the same model, dataset, N, k and R");
    rep.rrf = rmse_reduction_factor(baseline.pooled.sigma_total, rep.pooled.sigma_total);
    return *rep.rrf;
}

struct RateScanRow {
    Method method;
    std::size_t N = 0;
    double sigma_total = 0.0;
    double expected_cost = 0.0;
    double mean_seconds = 0.0;
};

struct RateScanReport {
    ExperimentConfig config;
    std::size_t k = 0;
    std::optional<PilotResult> pilot;
    std::vector<RateScanRow> rows;
    std::vector<std::pair<Method, double>> slopes;
    std::string checksum;

    double slope(Method m) const {
        for (const auto& [mm, s] : slopes)
            if (mm == m) return s;
        throw Error("no slope for method " + to_string(m));
    }
};

/// One experiment per (method, N) with a shared burn-in.
inline RateScanReport rate_scan(ExperimentConfig c, std::vector<std::size_t> Ns = {}) {
    if (Ns.empty()) Ns = c.scan_Ns;
    if (Ns.empty()) throw ConfigError("rate scan needs a list of N values");
    std::vector<Method> methods = c.scan_methods.empty() ? std::vector<Method>{c.method} : c.scan_methods;
    const BuiltModel built = build_model(c);
    RateScanReport rep;
    rep.checksum = built.checksum;
    if (!c.k) {
        rep.pilot = pilot_run(c, built);
        c.k = rep.pilot->k;
    }
    rep.k = *c.k;
    rep.config = c;
    for (Method m : methods) {
        std::vector<double> xs, ys;
        for (std::size_t N : Ns) {
            ExperimentConfig ci = c;
            ci.method = m;
            ci.N = N;
            const auto r = run_experiment(ci, built);
            rep.rows.push_back({m, N, r.pooled.sigma_total, r.expected_cost, r.mean_seconds});
            xs.push_back(static_cast<double>(N));
            ys.push_back(r.pooled.sigma_total);
        }
        rep.slopes.emplace_back(m, Ns.size() >= 3 ? fit_rate(xs, ys) : std::nan(""));
    }
    return rep;
}

struct SweepCell {
    std::size_t k = 0;
    BurnInPolicy policy = BurnInPolicy::iid;
    Method method = Method::ubmcmc;
    std::vector<double> rmse;  // one total RMSE per outer repetition
    double mean_rmse = 0.0;
    double cv = 0.0;
    std::optional<double> rrf;
};

struct SweepReport {
    ExperimentConfig config;
    std::size_t kbar = 0;
    std::optional<PilotResult> pilot;
    std::vector<SweepCell> cells;
    std::string checksum;

    const SweepCell& cell(std::size_t k, BurnInPolicy p, Method m) const {
        for (const auto& c : cells)
            if (c.k == k && c.policy == p && c.method == m) return c;
        throw Error("no such sweep cell");
    }
};

/// "1", "kbar", "2kbar", ... resolved against the pilot burn-in.
inline std::size_t resolve_k(const std::string& token, std::size_t kbar) {
    const auto pos = token.find("kbar");
    if (pos == std::string::npos) return config_detail::to_size(token, "sweep.ks");
    if (pos + 4 != token.size()) throw ConfigError("bad burn-in token: " + token);
    const std::size_t mult = pos == 0 ? 1 : config_detail::to_size(token.substr(0, pos), "sweep.ks");
    return mult * kbar;
}

inline double coefficient_of_variation(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    return std::sqrt(v / static_cast<double>(xs.size() - 1)) / m;
}

/// Outer repetitions of R-chain experiments over burn-ins, burn-in row
/// policies and methods.
inline SweepReport burnin_sweep(ExperimentConfig c) {
    const BuiltModel built = build_model(c);
    SweepReport rep;
    rep.checksum = built.checksum;
    if (c.k) {
        rep.kbar = *c.k;
    } else {
        rep.pilot = pilot_run(c, built);
        rep.kbar = rep.pilot->k;
    }
    rep.config = c;
    for (const auto& token : c.sweep_ks) {
        const std::size_t k = resolve_k(token, rep.kbar);
        for (BurnInPolicy policy : c.sweep_cases) {
            for (Method m : c.sweep_methods) {
                SweepCell cell{k, policy, m, {}, 0.0, 0.0, std::nullopt};
                for (std::size_t o = 0; o < c.sweep_outer; ++o) {
                    ExperimentConfig ci = c;
                    ci.k = k;
                    ci.method = m;
                    ci.burn_in_policy = policy;
                    ci.seed = derived_seed(c.seed, o);
                    cell.rmse.push_back(run_experiment(ci, built).pooled.sigma_total);
                }
                for (double v : cell.rmse) cell.mean_rmse += v;
                cell.mean_rmse /= static_cast<double>(cell.rmse.size());
                cell.cv = coefficient_of_variation(cell.rmse);
                rep.cells.push_back(std::move(cell));
            }
        }
    }
    for (auto& cell : rep.cells) {
        for (const auto& base : rep.cells)
            if (base.method == Method::ubmcmc && base.k == cell.k && base.policy == cell.policy)
                cell.rrf = rmse_reduction_factor(base.mean_rmse, cell.mean_rmse);
    }
    return rep;
}

struct BaselineReport {
    ExperimentConfig config;
    std::string dataset;
    std::string checksum;
    Eigen::MatrixXd chain_means;  // chains x components
    PooledReport pooled;
    AsymptoticVariance v_inf;
    double mean_seconds = 0.0;
};

/// Averages of f(X_t), t = B+1..B+L, from independent single chains. With
/// MCQMC-H driving, rows B+1..B+L come from a randomized Harase matrix.
inline BaselineReport mcmc_baseline(const ExperimentConfig& c, const BuiltModel& built) {
    if (c.baseline_length < 1) throw ConfigError("baseline length must be positive");
    if (c.baseline_chains < 2) throw ConfigError("baseline needs at least two chains");
    if (c.baseline_driving != Method::mcmc && c.baseline_driving != Method::mcqmc_harase)
        throw ConfigError("baseline driving must be MCMC or MCQMC-H");
    const std::size_t B = c.baseline_burn_in, L = c.baseline_length;
    const DrivingSource src(c.baseline_driving, L, built.driving_dim(), c);
    const std::size_t chains = c.baseline_chains;
    std::vector<Vector> means(chains);
    std::vector<double> secs(chains);
    parallel_for(chains, c.jobs, [&](std::size_t r) {
        const auto start = std::chrono::steady_clock::now();
        std::visit(
            [&](const auto& model) {
                RowProvider rows = src.provider(B + 1, c.seed, r, BurnInPolicy::iid);
                auto x = initial_pair(model, c.seed, r).first;
                Vector acc = Vector::Zero(static_cast<Eigen::Index>(model.target_dim()));
                for (std::size_t t = 1; t <= B + L; ++t) {
                    gibbs_update(model, x, rows.row(t), rows.aux());
                    if (t > B) acc += model.target(x);
                }
                means[r] = acc / static_cast<double>(L);
            },
            built.model);
        secs[r] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });
    BaselineReport rep;
    rep.config = c;
    rep.dataset = built.dataset;
    rep.checksum = built.checksum;
    rep.chain_means.resize(static_cast<Eigen::Index>(chains), means.front().size());
    for (std::size_t r = 0; r < chains; ++r) rep.chain_means.row(static_cast<Eigen::Index>(r)) = means[r].transpose();
    rep.pooled = pool(rep.chain_means, L, B);
    rep.v_inf = asymptotic_variance(rep.chain_means, L);
    for (double s : secs) rep.mean_seconds += s;
    rep.mean_seconds /= static_cast<double>(chains);
    return rep;
}

inline BaselineReport mcmc_baseline(const ExperimentConfig& c) { return mcmc_baseline(c, build_model(c)); }

}  // namespace ubmcqmc
