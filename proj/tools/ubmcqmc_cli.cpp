// Command-line front end for the experiment harness.
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "ubmcqmc/harness/report.hpp"

using namespace ubmcqmc;
namespace fs = std::filesystem;

namespace {

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs;
    std::optional<std::string> out;
};

ExperimentConfig resolve(const Common& o) {
    ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : ExperimentConfig::load(o.config_path);
    if (o.seed) c.seed = *o.seed;
    if (o.jobs) c.jobs = *o.jobs == 0 ? max_jobs() : *o.jobs;
    if (o.out) c.out_dir = *o.out;
    c.validate();
    return c;
}

void emit(const ExperimentConfig& c, const std::string& stem, const Json& j) {
    const fs::path dir(c.out_dir);
    write_text(dir / (c.name + "_" + stem + ".json"), j.dump(2) + "\n");
    write_text(dir / (c.name + "_" + stem + ".ini"), c.to_ini());
}

int cmd_pilot(const ExperimentConfig& c) {
    const auto built = build_model(c);
    const auto p = pilot_run(c, built);
    emit(c, "pilot", {{"config", config_json(c, built.checksum)}, {"results", to_json(p)}});
    write_text(fs::path(c.out_dir) / (c.name + "_pilot_taus.csv"), taus_csv(p.taus));
    std::cout << "k = " << p.k << " (" << p.uncoupled << " of " << p.count << " chains uncoupled)\n";
    return 0;
}

int cmd_run(const ExperimentConfig& c) {
    auto rep = run_experiment(c);
    emit(c, "run", to_json(rep));
    write_text(fs::path(c.out_dir) / (c.name + "_run.csv"), pooled_csv(rep.pooled));
    write_text(fs::path(c.out_dir) / (c.name + "_run_taus.csv"), taus_csv(rep.taus));
    std::cout << to_string(c.method) << " N=" << rep.N() << " k=" << rep.k() << " R=" << rep.pooled.R
              << " sigma_total=" << rep.pooled.sigma_total << " expected_cost=" << rep.expected_cost;
    if (rep.loss_of_efficiency) std::cout << " loss=" << *rep.loss_of_efficiency;
    if (!rep.failed_chains.empty()) std::cout << " failed=" << rep.failed_chains.size();
    std::cout << '\n';
    return 0;
}

int cmd_rate_scan(const ExperimentConfig& c) {
    const auto rep = rate_scan(c);
    emit(c, "rate_scan", to_json(rep));
    write_text(fs::path(c.out_dir) / (c.name + "_rate_scan.csv"), rate_scan_csv(rep));
    for (const auto& [m, s] : rep.slopes) std::cout << to_string(m) << " slope " << s << '\n';
    return 0;
}

int cmd_sweep(const ExperimentConfig& c) {
    const auto rep = burnin_sweep(c);
    emit(c, "burnin_sweep", to_json(rep));
    write_text(fs::path(c.out_dir) / (c.name + "_burnin_sweep.csv"), sweep_csv(rep));
    std::cout << sweep_csv(rep);
    return 0;
}

int cmd_baseline(const ExperimentConfig& c) {
    const auto rep = mcmc_baseline(c);
    emit(c, "baseline", to_json(rep));
    write_text(fs::path(c.out_dir) / (c.name + "_baseline.csv"), pooled_csv(rep.pooled));
    std::cout << "v_inf_total = " << rep.v_inf.total << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unbiased MCMC and MCQMC experiments for Gibbs samplers"};
    app.require_subcommand(1);
    Common opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "INI experiment config")->check(CLI::ExistingFile);
        sub->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& v) { opt.seed = v; },
                                                "master seed");
        sub->add_option_function<std::size_t>("--jobs", [&](const std::size_t& v) { opt.jobs = v; },
                                              "worker threads (0 = all cores)");
        sub->add_option_function<std::string>("--out", [&](const std::string& v) { opt.out = v; },
                                              "output directory");
    };

    struct Sub {
        const char* name;
        const char* help;
        int (*run)(const ExperimentConfig&);
    };
    const Sub subs[] = {
        {"pilot", "choose the burn-in from IID pilot meeting times", cmd_pilot},
        {"run", "R coupled chains of one method", cmd_run},
        {"rate-scan", "RMSE against N with a shared burn-in", cmd_rate_scan},
        {"burnin-sweep", "burn-in and burn-in row policy comparison", cmd_sweep},
        {"baseline", "standard MCMC averages and asymptotic variance", cmd_baseline},
    };
    std::vector<std::pair<CLI::App*, const Sub*>> registered;
    for (const auto& s : subs) {
        auto* sub = app.add_subcommand(s.name, s.help);
        add_common(sub);
        registered.emplace_back(sub, &s);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        const ExperimentConfig c = resolve(opt);
        for (const auto& [sub, s] : registered)
            if (sub->parsed()) return s->run(c);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "experiment error: " << e.what() << '\n';
        return 2;
    }
    return 3;
}
