#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "ubmcqmc/harness/experiment.hpp"

namespace ubmcqmc {

using Json = nlohmann::json;

inline Json to_json(const Eigen::VectorXd& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

inline Json to_json(const PooledReport& p) {
    return {{"mean", to_json(p.mean)}, {"sigma", to_json(p.sigma)}, {"sigma_total", p.sigma_total},
            {"R", p.R}, {"N", p.N}, {"k", p.k}};
}

inline Json to_json(const PilotResult& p) {
    return {{"k", p.k}, {"count", p.count}, {"uncoupled", p.uncoupled}, {"taus", p.taus}};
}

inline Json config_json(const ExperimentConfig& c, const std::string& checksum) {
    return {{"ini", c.to_ini()}, {"seed", c.seed}, {"data_checksum", checksum}};
}

/// Everything that must be reproducible, without timing.
inline Json results_json(const ExperimentReport& r) {
    Json j = {{"method", to_string(r.config.method)},
              {"model", r.config.model},
              {"dataset", r.dataset},
              {"synthetic_data", r.synthetic_data},
              {"N", r.N()},
              {"k", r.k()},
              {"m", r.m},
              {"driving_dim", r.d},
              {"pooled", to_json(r.pooled)},
              {"mcmc_part_mean", to_json(r.mcmc_part_mean)},
              {"bc_part_mean", to_json(r.bc_part_mean)},
              {"taus", r.taus},
              {"expected_cost", r.expected_cost},
              {"var_total", r.var_total},
              {"failed_chains", r.failed_chains},
              {"failures", r.failures}};
    if (r.pilot) j["pilot"] = to_json(*r.pilot);
    if (r.rrf) j["rrf"] = *r.rrf;
    if (r.loss_of_efficiency) j["loss_of_efficiency"] = *r.loss_of_efficiency;
    if (r.exact_mean) j["exact_mean"] = to_json(*r.exact_mean);
    return j;
}

inline Json to_json(const ExperimentReport& r) {
    return {{"config", config_json(r.config, r.checksum)},
            {"results", results_json(r)},
            {"timing", {{"mean_seconds_per_chain", r.mean_seconds}, {"seconds", r.seconds}}}};
}

inline Json results_json(const RateScanReport& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"method", to_string(row.method)}, {"N", row.N}, {"rmse", row.sigma_total},
                        {"expected_cost", row.expected_cost}});
    Json slopes = Json::object();
    for (const auto& [m, s] : r.slopes) slopes[to_string(m)] = std::isnan(s) ? Json() : Json(s);
    Json j = {{"k", r.k}, {"rows", rows}, {"slopes", slopes}};
    if (r.pilot) j["pilot"] = to_json(*r.pilot);
    return j;
}

inline Json to_json(const RateScanReport& r) {
    Json timing = Json::array();
    for (const auto& row : r.rows)
        timing.push_back({{"method", to_string(row.method)}, {"N", row.N}, {"mean_seconds_per_chain", row.mean_seconds}});
    return {{"config", config_json(r.config, r.checksum)}, {"results", results_json(r)}, {"timing", timing}};
}

inline Json results_json(const SweepReport& r) {
    Json cells = Json::array();
    for (const auto& c : r.cells) {
        Json j = {{"k", c.k}, {"case", to_string(c.policy)}, {"method", to_string(c.method)},
                  {"rmse", c.rmse}, {"mean_rmse", c.mean_rmse}, {"cv", c.cv}};
        if (c.rrf) j["rrf"] = *c.rrf;
        cells.push_back(j);
    }
    Json j = {{"kbar", r.kbar}, {"cells", cells}};
    if (r.pilot) j["pilot"] = to_json(*r.pilot);
    return j;
}

inline Json to_json(const SweepReport& r) {
    return {{"config", config_json(r.config, r.checksum)}, {"results", results_json(r)}};
}

inline Json results_json(const BaselineReport& r) {
    return {{"driving", to_string(r.config.baseline_driving)},
            {"dataset", r.dataset},
            {"burn_in", r.config.baseline_burn_in},
            {"length", r.config.baseline_length},
            {"chains", r.config.baseline_chains},
            {"pooled", to_json(r.pooled)},
            {"v_inf", to_json(r.v_inf.per_component)},
            {"v_inf_total", r.v_inf.total}};
}

inline Json to_json(const BaselineReport& r) {
    return {{"config", config_json(r.config, r.checksum)},
            {"results", results_json(r)},
            {"timing", {{"mean_seconds_per_chain", r.mean_seconds}}}};
}

/// Per-component table: component, mean, sigma.
inline std::string pooled_csv(const PooledReport& p) {
    std::ostringstream o;
    o.precision(17);
    o << "component,mean,sigma\n";
    for (Eigen::Index i = 0; i < p.mean.size(); ++i) o << i << ',' << p.mean[i] << ',' << p.sigma[i] << '\n';
    return o.str();
}

/// Plot data as (x, y, series).
inline std::string rate_scan_csv(const RateScanReport& r) {
    std::ostringstream o;
    o.precision(17);
    o << "x,y,series\n";
    for (const auto& row : r.rows) o << row.N << ',' << row.sigma_total << ',' << to_string(row.method) << '\n';
    return o.str();
}

inline std::string sweep_csv(const SweepReport& r) {
    std::ostringstream o;
    o.precision(17);
    o << "k,case,method,mean_rmse,cv,rrf\n";
    for (const auto& c : r.cells) {
        o << c.k << ',' << to_string(c.policy) << ',' << to_string(c.method) << ',' << c.mean_rmse << ',' << c.cv
          << ',';
        if (c.rrf) o << *c.rrf;
        o << '\n';
    }
    return o.str();
}

inline std::string taus_csv(const std::vector<std::size_t>& taus) {
    std::ostringstream o;
    o << "chain,tau\n";
    for (std::size_t i = 0; i < taus.size(); ++i) o << i << ',' << taus[i] << '\n';
    return o.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

}  // namespace ubmcqmc
