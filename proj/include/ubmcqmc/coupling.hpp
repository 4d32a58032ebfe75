#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <span>
#include <sstream>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "ubmcqmc/errors.hpp"
#include "ubmcqmc/random_streams.hpp"
#include "ubmcqmc/row_provider.hpp"

namespace ubmcqmc {

/// Full conditional of one block: a sampler driven by uniforms (plus the
/// caller's auxiliary IID stream) and a log density up to a constant that is
/// shared between the two chains being coupled.
template <class C>
concept BlockConditional = requires(const C& c, std::span<const double> u, IidStream& s,
                                    const typename C::value_type& v) {
    typename C::value_type;
    { c.sample(u, s) } -> std::convertible_to<typename C::value_type>;
    { c.log_density(v) } -> std::convertible_to<double>;
};

/// Sequential-scan Gibbs sampler described by a tuple of block groups.
template <class M>
concept GibbsModel = requires(const M& m, const typename M::State& cs, IidStream& s) {
    typename M::State;
    { m.groups() };
    { m.driving_dim() } -> std::convertible_to<std::size_t>;
    { m.target_dim() } -> std::convertible_to<std::size_t>;
    { m.initial(s) } -> std::convertible_to<typename M::State>;
    { m.target(cs) } -> std::convertible_to<Eigen::VectorXd>;
};

template <class T>
struct CoupledDraw {
    T x;
    T y;
    bool identical;
    std::uint64_t rejections;
};

namespace detail {

inline double as_log_density(double v, const char* which) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
        throw NumericalError(std::string("non-finite log density at the ") + which + " draw");
    }
    return v;
}

template <class T>
bool bitwise_equal(const T& a, const T& b) {
    if constexpr (std::is_arithmetic_v<T>) {
        return std::memcmp(&a, &b, sizeof(T)) == 0;
    } else {
        return a.size() == b.size() &&
               std::memcmp(a.data(), b.data(), sizeof(a.data()[0]) * a.size()) == 0;
    }
}

}  // namespace detail

/// Maximal coupling of p (X chain) and q (Y chain). The X draw is exactly
/// p.sample(u, x_aux); the Y residual loop uses only y_stream.
template <BlockConditional P, BlockConditional Q>
CoupledDraw<typename P::value_type> maximal_coupling_block(const P& p, const Q& q,
                                                           std::span<const double> u,
                                                           IidStream& x_aux, IidStream& coupling,
                                                           IidStream& y_stream) {
    using T = typename P::value_type;
    T x = p.sample(u, x_aux);
    const double lpx = detail::as_log_density(p.log_density(x), "X");
    const double lqx = detail::as_log_density(q.log_density(x), "X");
    if (std::log(coupling.uniform_open()) + lpx <= lqx) return {x, x, true, 0};

    std::vector<double> w(u.size());
    for (std::uint64_t rejections = 0;; ++rejections) {
        y_stream.fill(w);
        T y = q.sample(w, y_stream);
        const double lqy = detail::as_log_density(q.log_density(y), "Y");
        const double lpy = detail::as_log_density(p.log_density(y), "Y");
        if (std::log(y_stream.uniform_open()) + lqy > lpy) return {std::move(x), std::move(y), false, rejections};
    }
}

template <class Tuple, class F>
void for_each_group(const Tuple& t, F&& f) {
    std::apply([&](const auto&... g) { (f(g), ...); }, t);
}

/// Single-chain sweep over all blocks, consuming u_row left to right.
template <GibbsModel M>
void gibbs_update(const M& model, typename M::State& x, std::span<const double> u_row,
                  IidStream& x_aux) {
    if (u_row.size() != model.driving_dim()) throw Error("driving row has the wrong length");
    std::size_t col = 0;
    for_each_group(model.groups(), [&](const auto& g) {
        const std::size_t w = g.width();
        for (std::size_t j = 0, n = g.count(); j < n; ++j, col += w) {
            g.assign(x, j, g.conditional(x, j).sample(u_row.subspan(col, w), x_aux));
        }
    });
}

struct CoupledStepResult {
    bool met = true;
    std::uint64_t rejections = 0;
};

/// One coupled sweep. The X half is identical to gibbs_update with the same
/// u_row and x_aux.
template <GibbsModel M>
CoupledStepResult coupled_gibbs_step(const M& model, typename M::State& x, typename M::State& y,
                                     std::span<const double> u_row, IidStream& x_aux,
                                     IidStream& coupling, IidStream& y_stream) {
    if (u_row.size() != model.driving_dim()) throw Error("driving row has the wrong length");
    CoupledStepResult r;
    std::size_t col = 0;
    for_each_group(model.groups(), [&](const auto& g) {
        const std::size_t w = g.width();
        for (std::size_t j = 0, n = g.count(); j < n; ++j, col += w) {
            const auto p = g.conditional(x, j);
            const auto q = g.conditional(y, j);
            auto d = maximal_coupling_block(p, q, u_row.subspan(col, w), x_aux, coupling, y_stream);
            r.met = r.met && d.identical;
            r.rejections += d.rejections;
            g.assign(x, j, d.x);
            g.assign(y, j, d.y);
        }
    });
    return r;
}

/// f(X_t) for t = 0..T and f(Y_t) up to the meeting; Y_t = X_{t+1} afterwards.
struct CoupledTrajectory {
    std::size_t k = 0;
    std::size_t m = 0;
    std::size_t tau = 0;
    Eigen::MatrixXd fx;  // target_dim x (T + 1)
    Eigen::MatrixXd fy;  // target_dim x (tau - 1)
    std::uint64_t x_updates = 0;
    std::uint64_t y_updates = 0;
    std::uint64_t rejections = 0;

    std::size_t length() const { return static_cast<std::size_t>(fx.cols()) - 1; }

    Eigen::VectorXd f_x(std::size_t t) const {
        if (t > length()) throw Error("X index beyond trajectory");
        return fx.col(static_cast<Eigen::Index>(t));
    }
    Eigen::VectorXd f_y(std::size_t t) const {
        if (t < static_cast<std::size_t>(fy.cols())) return fy.col(static_cast<Eigen::Index>(t));
        return f_x(t + 1);
    }
};

class UncoupledAtCap : public Error {
public:
    UncoupledAtCap(const std::string& what, CoupledTrajectory partial)
        : Error(what), trajectory(std::move(partial)) {}
    CoupledTrajectory trajectory;
};

struct ChainOptions {
    std::size_t cap = 1'000'000;
    /// Optional per-step callback (t, X_t, Y_{t-1}, met) for trajectory dumps.
    std::function<void(std::size_t, const Eigen::VectorXd&, const Eigen::VectorXd&, bool)> trace;
};

template <GibbsModel M>
std::pair<typename M::State, typename M::State> initial_pair(const M& model, std::uint64_t seed,
                                                             std::uint64_t chain) {
    const IidStream init(seed, chain, StreamRole::initial);
    IidStream sx = init.substream(0), sy = init.substream(1);
    return {model.initial(sx), model.initial(sy)};
}

/// Lag-one coupled chain (X_0, Y_0 independent from the initial law,
/// X_1 = update(X_0, row 1)) run until max(m, tau).
template <GibbsModel M>
CoupledTrajectory run_coupled_chain(const M& model, std::size_t k, std::size_t m,
                                    RowProvider& rows, std::uint64_t seed, std::uint64_t chain,
                                    const ChainOptions& opt = {}) {
    if (k < 1 || m < k) throw Error("need m >= k >= 1");
    if (opt.cap < m) throw Error("cap must be at least m");
    if (rows.dim() != model.driving_dim()) throw Error("row provider width does not match model");

    auto [x, y] = initial_pair(model, seed, chain);
    IidStream coupling(seed, chain, StreamRole::coupling);
    IidStream y_stream(seed, chain, StreamRole::y_chain);

    std::vector<Eigen::VectorXd> fx{model.target(x)}, fy{model.target(y)};
    gibbs_update(model, x, rows.row(1), rows.aux());
    fx.push_back(model.target(x));

    CoupledTrajectory tr;
    tr.k = k;
    tr.m = m;
    tr.x_updates = 1;
    std::size_t tau = 0;
    if (detail::bitwise_equal(x, y)) tau = 1;
    if (opt.trace) opt.trace(1, x, y, tau == 1);

    for (std::size_t t = 1; t < std::max(m, tau) || tau == 0; ++t) {
        if (t >= opt.cap) {
            tr.tau = std::numeric_limits<std::size_t>::max();
            tr.fx.resize(static_cast<Eigen::Index>(fx[0].size()), static_cast<Eigen::Index>(fx.size()));
            for (std::size_t i = 0; i < fx.size(); ++i) tr.fx.col(static_cast<Eigen::Index>(i)) = fx[i];
            std::ostringstream msg;
            msg << "uncoupled at cap " << opt.cap << " (chain " << chain << ")";
            throw UncoupledAtCap(msg.str(), std::move(tr));
        }
        // Here x = X_t and y = Y_{t-1}.
        if (tau == 0) {
            const auto step = coupled_gibbs_step(model, x, y, rows.row(t + 1), rows.aux(), coupling, y_stream);
            ++tr.x_updates;
            ++tr.y_updates;
            tr.rejections += step.rejections;
            fx.push_back(model.target(x));
            if (step.met || detail::bitwise_equal(x, y)) {
                tau = t + 1;
            } else {
                fy.push_back(model.target(y));
            }
            if (opt.trace) opt.trace(t + 1, x, y, tau != 0);
        } else {
            gibbs_update(model, x, rows.row(t + 1), rows.aux());
            ++tr.x_updates;
            fx.push_back(model.target(x));
            if (opt.trace) opt.trace(t + 1, x, x, true);
        }
    }

    tr.tau = tau;
    const auto p = static_cast<Eigen::Index>(model.target_dim());
    tr.fx.resize(p, static_cast<Eigen::Index>(fx.size()));
    for (std::size_t i = 0; i < fx.size(); ++i) tr.fx.col(static_cast<Eigen::Index>(i)) = fx[i];
    tr.fy.resize(p, static_cast<Eigen::Index>(fy.size()));
    for (std::size_t i = 0; i < fy.size(); ++i) tr.fy.col(static_cast<Eigen::Index>(i)) = fy[i];
    return tr;
}

/// X chain alone, same streams as run_coupled_chain: f(X_0..X_T).
template <GibbsModel M>
Eigen::MatrixXd run_single_chain(const M& model, std::size_t length, RowProvider& rows,
                                 std::uint64_t seed, std::uint64_t chain) {
    auto x = initial_pair(model, seed, chain).first;
    Eigen::MatrixXd fx(static_cast<Eigen::Index>(model.target_dim()), static_cast<Eigen::Index>(length + 1));
    fx.col(0) = model.target(x);
    for (std::size_t t = 1; t <= length; ++t) {
        gibbs_update(model, x, rows.row(t), rows.aux());
        fx.col(static_cast<Eigen::Index>(t)) = model.target(x);
    }
    return fx;
}

}  // namespace ubmcqmc
