#pragma once

#include <optional>
#include <string>
#include <variant>

#include "ubmcqmc/datasets.hpp"
#include "ubmcqmc/harness/config.hpp"
#include "ubmcqmc/models/linear.hpp"
#include "ubmcqmc/models/logistic.hpp"
#include "ubmcqmc/models/probit.hpp"
#include "ubmcqmc/models/toy.hpp"

namespace ubmcqmc {

using AnyModel = std::variant<LinearGibbs, ProbitGibbs, LogisticPgGibbs, ToyGibbs>;

struct BuiltModel {
    AnyModel model;
    std::string dataset;
    std::string checksum;
    bool synthetic = false;
    std::size_t n = 0;
    std::size_t p = 0;
    std::optional<Vector> exact_mean;  // known posterior mean (toy model)

    std::size_t driving_dim() const {
        return std::visit([](const auto& m) { return m.driving_dim(); }, model);
    }
};

inline BuiltModel build_model(const ExperimentConfig& c) {
    if (c.model == "toy") {
        ToyGibbs toy = toy_conjugate_model(c.toy_data_seed, c.toy_n);
        BuiltModel b{toy, "toy", data_checksum(toy.posterior_covariance(), toy.posterior_mean()), true,
                     c.toy_n, 2, toy.posterior_mean()};
        return b;
    }
    const Dataset data = load_dataset(find_dataset(c.dataset), c.data_dir);
    auto wrap = [&](AnyModel m) {
        return BuiltModel{std::move(m), data.name, data.checksum, data.synthetic, data.n(), data.p(), std::nullopt};
    };
    if (c.model == "linear") return wrap(LinearGibbs(LinearModelSpec::with_defaults(data.D, data.y)));
    if (c.model == "probit") return wrap(ProbitGibbs(ProbitModelSpec{data.D, data.y}));
    if (c.model == "logistic") {
        auto spec = LogisticPgSpec::with_defaults(data.D, data.y, c.pg_approach);
        spec.pg.tolerance = c.pg_tolerance;
        return wrap(LogisticPgGibbs(std::move(spec)));
    }
    throw ConfigError("unknown model: " + c.model);
}

}  // namespace ubmcqmc
