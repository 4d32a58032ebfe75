#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ubmcqmc/distributions/polya_gamma.hpp"
#include "ubmcqmc/errors.hpp"
#include "ubmcqmc/lfsr.hpp"
#include "ubmcqmc/row_provider.hpp"

#ifndef UBMCQMC_DATA_DIR
#define UBMCQMC_DATA_DIR "data"
#endif

namespace ubmcqmc {

enum class Method { ubmcmc, ubmcqmc_liao, ubmcqmc_harase, mcmc, mcqmc_harase };

inline std::string to_string(Method m) {
    switch (m) {
        case Method::ubmcmc: return "ubMCMC";
        case Method::ubmcqmc_liao: return "ubMCQMC-L";
        case Method::ubmcqmc_harase: return "ubMCQMC-H";
        case Method::mcmc: return "MCMC";
        case Method::mcqmc_harase: return "MCQMC-H";
    }
    return "?";
}

inline Method parse_method(const std::string& s) {
    for (Method m : {Method::ubmcmc, Method::ubmcqmc_liao, Method::ubmcqmc_harase, Method::mcmc,
                     Method::mcqmc_harase})
        if (boost::iequals(s, to_string(m))) return m;
    throw ConfigError("unknown method: " + s);
}

inline bool is_unbiased(Method m) {
    return m == Method::ubmcmc || m == Method::ubmcqmc_liao || m == Method::ubmcqmc_harase;
}

inline std::string to_string(BurnInPolicy p) { return p == BurnInPolicy::wcud ? "case1" : "case2"; }

inline BurnInPolicy parse_policy(const std::string& s) {
    if (boost::iequals(s, "case1")) return BurnInPolicy::wcud;
    if (boost::iequals(s, "case2")) return BurnInPolicy::iid;
    throw ConfigError("burn_in_policy must be case1 or case2, got " + s);
}

struct ExperimentConfig {
    std::string name = "experiment";
    std::string model = "linear";  // linear | probit | logistic | toy
    std::string dataset = "boston";
    Method method = Method::ubmcmc;
    std::size_t N = 1024;
    std::optional<std::size_t> k;  // empty: choose by pilot run
    std::size_t R = 100;
    PgApproach pg_approach = PgApproach::inversion;
    double pg_tolerance = 1e-10;
    BurnInPolicy burn_in_policy = BurnInPolicy::iid;
    std::uint64_t seed = 20240101;
    std::size_t jobs = 1;
    std::size_t pilot_count = 1000;
    std::size_t cap = 1'000'000;

    std::string data_dir = UBMCQMC_DATA_DIR;
    std::string out_dir = "out";
    std::string lfsr_table;        // comma-separated; default both tables in data_dir
    std::string sobol_directions;  // default <data_dir>/joe_kuo_d1100.txt

    std::size_t toy_n = 20;
    std::uint64_t toy_data_seed = 1;

    std::vector<std::size_t> scan_Ns;
    std::vector<Method> scan_methods;

    std::vector<std::string> sweep_ks{"1", "kbar", "2kbar", "4kbar"};
    std::vector<BurnInPolicy> sweep_cases{BurnInPolicy::wcud, BurnInPolicy::iid};
    std::vector<Method> sweep_methods{Method::ubmcmc, Method::ubmcqmc_liao, Method::ubmcqmc_harase};
    std::size_t sweep_outer = 25;

    Method baseline_driving = Method::mcmc;
    std::size_t baseline_burn_in = 1000;
    std::size_t baseline_length = 100000;
    std::size_t baseline_chains = 1000;
    std::optional<double> v_inf_total;  // enables loss of efficiency in reports
    double cost_ratio = 1.0;

    std::string lfsr_table_path() const {
        return lfsr_table.empty() ? data_dir + "/lfsr_params.txt," + data_dir + "/lfsr_params_small.txt"
                                  : lfsr_table;
    }
    LfsrTable lfsr_tables() const {
        LfsrTable merged;
        std::stringstream ss(lfsr_table_path());
        std::string file;
        while (std::getline(ss, file, ',')) {
            if (file.empty()) continue;
            const auto t = LfsrTable::load(file);
            for (int n : t.orders())
                if (!merged.contains(n)) merged.add(t.at(n));
        }
        return merged;
    }
    std::string sobol_path() const {
        return sobol_directions.empty() ? data_dir + "/joe_kuo_d1100.txt" : sobol_directions;
    }

    /// log2 N when N is a power of two, otherwise -1.
    int log2_N() const {
        if (N == 0 || (N & (N - 1))) return -1;
        int n = 0;
        while ((std::size_t{1} << n) < N) ++n;
        return n;
    }

    void validate() const {
        if (model != "linear" && model != "probit" && model != "logistic" && model != "toy")
            throw ConfigError("unknown model: " + model);
        if (N < 1) throw ConfigError("N must be positive");
        if (R < 1) throw ConfigError("R must be positive");
        if (k && *k < 1) throw ConfigError("k must be at least 1");
        if (jobs < 1) throw ConfigError("jobs must be at least 1");
        if (!(pg_tolerance > 0.0)) throw ConfigError("pg_tolerance must be positive");
        if (cap < 1) throw ConfigError("cap must be positive");
        if (method == Method::ubmcqmc_harase || method == Method::mcqmc_harase) require_harase_size(N);
    }

    /// Harase matrices exist only for N = 2^n with parameters in the LFSR table.
    void require_harase_size(std::size_t n_rows) const {
        ExperimentConfig c = *this;
        c.N = n_rows;
        const int n = c.log2_N();
        if (n < 1) throw ConfigError("Harase driving needs N = 2^n, got " + std::to_string(n_rows));
        if (!lfsr_tables().contains(n))
            throw ConfigError("no LFSR parameters for N = 2^" + std::to_string(n) + " in " + lfsr_table_path());
    }

    static ExperimentConfig from_ptree(const boost::property_tree::ptree& pt);
    static ExperimentConfig from_string(const std::string& ini) {
        std::istringstream in(ini);
        boost::property_tree::ptree pt;
        try {
            boost::property_tree::read_ini(in, pt);
        } catch (const boost::property_tree::ini_parser_error& e) {
            throw ConfigError(std::string("config parse error: ") + e.what());
        }
        return from_ptree(pt);
    }
    static ExperimentConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return from_string(ss.str());
    }
    std::string to_ini() const;
};

namespace config_detail {

inline std::vector<std::string> list(const std::string& s) {
    std::vector<std::string> out;
    boost::split(out, s, boost::is_any_of(", "), boost::token_compress_on);
    out.erase(std::remove_if(out.begin(), out.end(), [](const std::string& v) { return v.empty(); }), out.end());
    return out;
}

template <class T>
T get(const boost::property_tree::ptree& pt, const std::string& key, const T& fallback) {
    try {
        return pt.get<T>(key, fallback);
    } catch (const boost::property_tree::ptree_error& e) {
        throw ConfigError("bad value for " + key + ": " + e.what());
    }
}

inline std::size_t to_size(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const auto v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw ConfigError("bad integer for " + key + ": " + s);
    }
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::ostringstream o;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) o << ", ";
        if constexpr (std::is_same_v<T, Method> || std::is_same_v<T, BurnInPolicy>) o << to_string(v[i]);
        else o << v[i];
    }
    return o.str();
}

}  // namespace config_detail

inline ExperimentConfig ExperimentConfig::from_ptree(const boost::property_tree::ptree& pt) {
    using config_detail::get;
    using config_detail::list;
    using config_detail::to_size;
    ExperimentConfig c;
    c.name = get<std::string>(pt, "experiment.name", c.name);
    c.model = get<std::string>(pt, "experiment.model", c.model);
    c.dataset = get<std::string>(pt, "experiment.dataset", c.dataset);
    c.method = parse_method(get<std::string>(pt, "experiment.method", to_string(c.method)));
    c.N = to_size(get<std::string>(pt, "experiment.N", std::to_string(c.N)), "N");
    const auto k = get<std::string>(pt, "experiment.k", "auto");
    if (k != "auto") c.k = to_size(k, "k");
    c.R = to_size(get<std::string>(pt, "experiment.R", std::to_string(c.R)), "R");
    const int approach = get<int>(pt, "experiment.pg_approach", static_cast<int>(c.pg_approach));
    if (approach < 1 || approach > 3) throw ConfigError("pg_approach must be 1, 2 or 3");
    c.pg_approach = static_cast<PgApproach>(approach);
    c.pg_tolerance = get<double>(pt, "experiment.pg_tolerance", c.pg_tolerance);
    c.burn_in_policy = parse_policy(get<std::string>(pt, "experiment.burn_in_policy", to_string(c.burn_in_policy)));
    c.seed = get<std::uint64_t>(pt, "experiment.seed", c.seed);
    c.jobs = to_size(get<std::string>(pt, "experiment.jobs", std::to_string(c.jobs)), "jobs");
    c.pilot_count = to_size(get<std::string>(pt, "experiment.pilot_count", std::to_string(c.pilot_count)), "pilot_count");
    c.cap = to_size(get<std::string>(pt, "experiment.cap", std::to_string(c.cap)), "cap");

    c.data_dir = get<std::string>(pt, "paths.data_dir", c.data_dir);
    c.out_dir = get<std::string>(pt, "paths.out_dir", c.out_dir);
    c.lfsr_table = get<std::string>(pt, "paths.lfsr_table", c.lfsr_table);
    c.sobol_directions = get<std::string>(pt, "paths.sobol_directions", c.sobol_directions);

    c.toy_n = to_size(get<std::string>(pt, "toy.n", std::to_string(c.toy_n)), "toy.n");
    c.toy_data_seed = get<std::uint64_t>(pt, "toy.data_seed", c.toy_data_seed);

    for (const auto& s : list(get<std::string>(pt, "scan.Ns", ""))) c.scan_Ns.push_back(to_size(s, "scan.Ns"));
    for (const auto& s : list(get<std::string>(pt, "scan.methods", ""))) c.scan_methods.push_back(parse_method(s));

    if (auto ks = list(get<std::string>(pt, "sweep.ks", "")); !ks.empty()) c.sweep_ks = ks;
    if (auto cs = list(get<std::string>(pt, "sweep.cases", "")); !cs.empty()) {
        c.sweep_cases.clear();
        for (const auto& s : cs) c.sweep_cases.push_back(parse_policy(s));
    }
    if (auto ms = list(get<std::string>(pt, "sweep.methods", "")); !ms.empty()) {
        c.sweep_methods.clear();
        for (const auto& s : ms) c.sweep_methods.push_back(parse_method(s));
    }
    c.sweep_outer = to_size(get<std::string>(pt, "sweep.outer", std::to_string(c.sweep_outer)), "sweep.outer");

    c.baseline_driving = parse_method(get<std::string>(pt, "baseline.driving", to_string(c.baseline_driving)));
    c.baseline_burn_in = to_size(get<std::string>(pt, "baseline.burn_in", std::to_string(c.baseline_burn_in)), "baseline.burn_in");
    c.baseline_length = to_size(get<std::string>(pt, "baseline.length", std::to_string(c.baseline_length)), "baseline.length");
    c.baseline_chains = to_size(get<std::string>(pt, "baseline.chains", std::to_string(c.baseline_chains)), "baseline.chains");
    if (auto v = pt.get_optional<double>("baseline.v_inf_total")) c.v_inf_total = *v;
    c.cost_ratio = get<double>(pt, "baseline.cost_ratio", c.cost_ratio);

    c.validate();
    return c;
}

inline std::string ExperimentConfig::to_ini() const {
    using config_detail::join;
    std::ostringstream o;
    o.precision(17);
    o << "[experiment]\n"
      << "name = " << name << "\n"
      << "model = " << model << "\n"
      << "dataset = " << dataset << "\n"
      << "method = " << to_string(method) << "\n"
      << "N = " << N << "\n"
      << "k = " << (k ? std::to_string(*k) : std::string("auto")) << "\n"
      << "R = " << R << "\n"
      << "pg_approach = " << static_cast<int>(pg_approach) << "\n"
      << "pg_tolerance = " << pg_tolerance << "\n"
      << "burn_in_policy = " << to_string(burn_in_policy) << "\n"
      << "seed = " << seed << "\n"
      << "jobs = " << jobs << "\n"
      << "pilot_count = " << pilot_count << "\n"
      << "cap = " << cap << "\n\n"
      << "[paths]\n"
      << "data_dir = " << data_dir << "\n"
      << "out_dir = " << out_dir << "\n"
      << "lfsr_table = " << lfsr_table_path() << "\n"
      << "sobol_directions = " << sobol_path() << "\n\n"
      << "[toy]\n"
      << "n = " << toy_n << "\n"
      << "data_seed = " << toy_data_seed << "\n\n"
      << "[scan]\n"
      << "Ns = " << join(scan_Ns) << "\n"
      << "methods = " << join(scan_methods) << "\n\n"
      << "[sweep]\n"
      << "ks = " << join(sweep_ks) << "\n"
      << "cases = " << join(sweep_cases) << "\n"
      << "methods = " << join(sweep_methods) << "\n"
      << "outer = " << sweep_outer << "\n\n"
      << "[baseline]\n"
      << "driving = " << to_string(baseline_driving) << "\n"
      << "burn_in = " << baseline_burn_in << "\n"
      << "length = " << baseline_length << "\n"
      << "chains = " << baseline_chains << "\n"
      << "cost_ratio = " << cost_ratio << "\n";
    if (v_inf_total) o << "v_inf_total = " << *v_inf_total << "\n";
    return o.str();
}

}  // namespace ubmcqmc
