#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/crc.hpp>

#include "ubmcqmc/distributions/mvn.hpp"
#include "ubmcqmc/distributions/normal.hpp"
#include "ubmcqmc/errors.hpp"
#include "ubmcqmc/random_streams.hpp"

namespace ubmcqmc {

enum class ModelKind { linear, probit, logistic };

inline std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::linear: return "linear";
        case ModelKind::probit: return "probit";
        case ModelKind::logistic: return "logistic";
    }
    return "?";
}

inline ModelKind parse_model_kind(const std::string& s) {
    if (s == "linear") return ModelKind::linear;
    if (s == "probit") return ModelKind::probit;
    if (s == "logistic") return ModelKind::logistic;
    throw ConfigError("unknown model kind: " + s);
}

/// A synthetic design used when the data file is absent.
struct SyntheticFallback {
    ModelKind kind = ModelKind::linear;
    std::size_t n = 0;
    std::size_t p = 0;  // including the intercept
    std::uint64_t seed = 1;
};

struct DatasetSpec {
    std::string name;
    std::string path;
    std::string response;
    std::vector<std::string> predictors;   // empty: every column except the response
    std::vector<std::string> categorical;  // expanded to indicator columns
    std::vector<std::string> log_columns;  // replaced by their natural log
    std::string positive_label;            // maps a non-numeric response to {0, 1}
    bool has_header = true;
    bool add_intercept = true;
    std::size_t expected_n = 0;  // 0: not checked
    std::size_t expected_p = 0;
    std::optional<SyntheticFallback> fallback;
};

struct Dataset {
    std::string name;
    Matrix D;
    Vector y;
    std::vector<std::string> columns;
    std::size_t dropped_rows = 0;
    bool synthetic = false;
    std::string checksum;

    std::size_t n() const { return static_cast<std::size_t>(D.rows()); }
    std::size_t p() const { return static_cast<std::size_t>(D.cols()); }
};

/// CRC-32 of the processed design and response, as 8 hex digits.
inline std::string data_checksum(const Matrix& D, const Vector& y) {
    boost::crc_32_type crc;
    for (Eigen::Index i = 0; i < D.rows(); ++i)
        for (Eigen::Index j = 0; j < D.cols(); ++j) {
            const double v = D(i, j);
            crc.process_bytes(&v, sizeof v);
        }
    crc.process_bytes(y.data(), sizeof(double) * static_cast<std::size_t>(y.size()));
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", crc.checksum());
    return buf;
}

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw ConfigError("missing column: " + name);
        return static_cast<std::size_t>(it - header.begin());
    }
};

namespace data_detail {

inline std::string trim(std::string s) {
    auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(s.back())) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && issp(s[i])) ++i;
    s.erase(0, i);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

inline std::vector<std::string> split(const std::string& line, bool comma) {
    std::vector<std::string> out;
    if (comma) {
        std::string cell;
        bool quoted = false;
        for (char c : line) {
            if (c == '"') quoted = !quoted;
            if (c == ',' && !quoted) {
                out.push_back(trim(cell));
                cell.clear();
            } else {
                cell += c;
            }
        }
        out.push_back(trim(cell));
    } else {
        std::istringstream in(line);
        std::string cell;
        while (in >> cell) out.push_back(trim(cell));
    }
    return out;
}

inline bool is_missing(const std::string& s) { return s.empty() || s == "NA" || s == "?" || s == "NaN"; }

inline std::optional<double> to_number(const std::string& s) {
    if (is_missing(s)) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') return std::nullopt;
    return v;
}

}  // namespace data_detail

/// Comma-separated when the first line contains a comma, whitespace otherwise.
inline RawTable read_table(const std::string& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open data file " + path);
    RawTable t;
    std::string line;
    std::optional<bool> comma;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (!comma) comma = line.find(',') != std::string::npos;
        auto cells = data_detail::split(line, *comma);
        if (t.header.empty() && has_header) {
            t.header = std::move(cells);
            continue;
        }
        if (t.header.empty()) {
            for (std::size_t j = 0; j < cells.size(); ++j) t.header.push_back("V" + std::to_string(j + 1));
        }
        if (cells.size() != t.header.size())
            throw ConfigError("row " + std::to_string(t.rows.size() + 1) + " of " + path + " has " +
                              std::to_string(cells.size()) + " fields, expected " +
                              std::to_string(t.header.size()));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

struct ExpandedColumns {
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;  // one vector per output column
};

/// Numeric columns pass through; a categorical column with c levels becomes
/// c - 1 indicators (first-seen level dropped).
inline ExpandedColumns expand_categorical(const RawTable& t, const std::vector<std::string>& columns,
                                          const std::vector<std::string>& categorical) {
    ExpandedColumns out;
    for (const auto& name : columns) {
        const std::size_t j = t.column(name);
        const bool cat = std::find(categorical.begin(), categorical.end(), name) != categorical.end();
        if (!cat) {
            std::vector<double> col;
            for (const auto& r : t.rows) {
                auto v = data_detail::to_number(r[j]);
                if (!v) throw ConfigError("non-numeric value '" + r[j] + "' in column " + name);
                col.push_back(*v);
            }
            out.names.push_back(name);
            out.values.push_back(std::move(col));
            continue;
        }
        std::vector<std::string> levels;
        for (const auto& r : t.rows)
            if (std::find(levels.begin(), levels.end(), r[j]) == levels.end()) levels.push_back(r[j]);
        for (std::size_t l = 1; l < levels.size(); ++l) {
            std::vector<double> col;
            for (const auto& r : t.rows) col.push_back(r[j] == levels[l] ? 1.0 : 0.0);
            out.names.push_back(name + "=" + levels[l]);
            out.values.push_back(std::move(col));
        }
    }
    return out;
}

/// D has an intercept column followed by p - 1 standard-normal covariates.
struct SyntheticData {
    Matrix D;
    Vector y;
    Vector beta;
};

inline Vector default_synthetic_beta(std::size_t p) {
    Vector b(static_cast<Eigen::Index>(p));
    for (std::size_t j = 0; j < p; ++j) b[static_cast<Eigen::Index>(j)] = (j % 2 ? 0.8 : -0.6) / std::sqrt(1.0 + j);
    return b;
}

inline SyntheticData synthetic_regression(ModelKind kind, std::size_t n, std::size_t p, std::uint64_t seed,
                                          std::optional<Vector> beta = std::nullopt, double noise_sd = 1.0) {
    if (p < 1 || n < p) throw ConfigError("synthetic data needs n >= p >= 1");
    IidStream s(seed, 0, StreamRole::data);
    SyntheticData out;
    out.beta = beta ? *beta : default_synthetic_beta(p);
    if (static_cast<std::size_t>(out.beta.size()) != p) throw ConfigError("beta length must equal p");
    const auto N = static_cast<Eigen::Index>(n), P = static_cast<Eigen::Index>(p);
    out.D.resize(N, P);
    out.y.resize(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        out.D(i, 0) = 1.0;
        for (Eigen::Index j = 1; j < P; ++j) out.D(i, j) = normal_inv_cdf(s.uniform_open());
    }
    const Vector eta = out.D * out.beta;
    for (Eigen::Index i = 0; i < N; ++i) {
        const double u = s.uniform_open();
        switch (kind) {
            case ModelKind::linear: out.y[i] = eta[i] + noise_sd * normal_inv_cdf(u); break;
            case ModelKind::probit: out.y[i] = u < normal_cdf(eta[i]) ? 1.0 : 0.0; break;
            case ModelKind::logistic: out.y[i] = u < 1.0 / (1.0 + std::exp(-eta[i])) ? 1.0 : 0.0; break;
        }
    }
    return out;
}

/// Loads `spec` (relative paths resolved against `data_dir`), falling back
/// to the synthetic design when the file is absent and a fallback exists.
inline Dataset load_dataset(const DatasetSpec& spec, const std::string& data_dir = "") {
    namespace fs = std::filesystem;
    fs::path path = spec.path;
    if (path.is_relative() && !data_dir.empty()) path = fs::path(data_dir) / path;

    Dataset ds;
    ds.name = spec.name;
    if (!fs::exists(path)) {
        if (!spec.fallback) throw ConfigError("data file not found: " + path.string());
        const auto& f = *spec.fallback;
        auto syn = synthetic_regression(f.kind, f.n, f.p, f.seed);
        ds.D = std::move(syn.D);
        ds.y = std::move(syn.y);
        ds.columns.push_back("(Intercept)");
        for (std::size_t j = 1; j < f.p; ++j) ds.columns.push_back("x" + std::to_string(j));
        ds.synthetic = true;
    } else {
        RawTable t = read_table(path.string(), spec.has_header);
        std::vector<std::string> predictors = spec.predictors;
        if (predictors.empty())
            for (const auto& h : t.header)
                if (h != spec.response) predictors.push_back(h);

        // Reject rows with missing values in any used column.
        std::vector<std::size_t> used{t.column(spec.response)};
        for (const auto& c : predictors) used.push_back(t.column(c));
        std::vector<std::vector<std::string>> kept;
        for (auto& r : t.rows) {
            const bool missing = std::any_of(used.begin(), used.end(),
                                             [&](std::size_t j) { return data_detail::is_missing(r[j]); });
            if (missing) ++ds.dropped_rows;
            else kept.push_back(std::move(r));
        }
        t.rows = std::move(kept);

        for (const auto& c : spec.log_columns) {
            const std::size_t j = t.column(c);
            for (auto& r : t.rows) {
                const auto v = data_detail::to_number(r[j]);
                if (!v || !(*v > 0.0)) throw ConfigError("log transform needs positive values in " + c);
                std::ostringstream o;
                o.precision(17);
                o << std::log(*v);
                r[j] = o.str();
            }
        }

        const ExpandedColumns x = expand_categorical(t, predictors, spec.categorical);
        const auto n = static_cast<Eigen::Index>(t.rows.size());
        const auto p = static_cast<Eigen::Index>(x.values.size() + (spec.add_intercept ? 1 : 0));
        ds.D.resize(n, p);
        Eigen::Index j0 = 0;
        if (spec.add_intercept) {
            ds.D.col(0).setOnes();
            ds.columns.push_back("(Intercept)");
            j0 = 1;
        }
        for (std::size_t c = 0; c < x.values.size(); ++c) {
            for (Eigen::Index i = 0; i < n; ++i) ds.D(i, j0 + static_cast<Eigen::Index>(c)) = x.values[c][i];
            ds.columns.push_back(x.names[c]);
        }
        const std::size_t jr = t.column(spec.response);
        ds.y.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const std::string& cell = t.rows[i][jr];
            if (!spec.positive_label.empty()) {
                ds.y[i] = (cell == spec.positive_label) ? 1.0 : 0.0;
            } else {
                const auto v = data_detail::to_number(cell);
                if (!v) throw ConfigError("non-numeric response '" + cell + "'");
                ds.y[i] = *v;
            }
        }
    }

    if (spec.expected_n && ds.n() != spec.expected_n)
        throw ConfigError(spec.name + ": expected n = " + std::to_string(spec.expected_n) + ", loaded " +
                          std::to_string(ds.n()) + " (" + std::to_string(ds.dropped_rows) +
                          " rows dropped for missing values)");
    if (spec.expected_p && ds.p() != spec.expected_p)
        throw ConfigError(spec.name + ": expected p = " + std::to_string(spec.expected_p) + ", loaded " +
                          std::to_string(ds.p()));
    ds.checksum = data_checksum(ds.D, ds.y);
    return ds;
}

/// Built-in dataset descriptions; file names are relative to the data directory.
inline std::map<std::string, DatasetSpec> dataset_registry() {
    std::map<std::string, DatasetSpec> r;

    DatasetSpec boston;
    boston.name = "boston";
    boston.path = "boston.csv";
    boston.response = "medv";
    boston.expected_n = 506;
    boston.expected_p = 14;
    r[boston.name] = boston;

    DatasetSpec california;
    california.name = "california";
    california.path = "california.csv";
    california.response = "MedHouseVal";
    california.predictors = {"MedInc", "HouseAge", "AveRooms", "AveBedrms",
                             "Population", "AveOccup", "Latitude", "Longitude"};
    california.expected_n = 20640;
    california.expected_p = 9;
    california.fallback = SyntheticFallback{ModelKind::linear, 20640, 9, 20640};
    r[california.name] = california;

    DatasetSpec vaso;
    vaso.name = "vaso";
    vaso.path = "vaso.csv";
    vaso.response = "Y";
    vaso.predictors = {"Volume", "Rate"};
    vaso.expected_n = 39;
    vaso.expected_p = 3;
    r[vaso.name] = vaso;

    DatasetSpec vaso_log = vaso;
    vaso_log.name = "vaso_log";
    vaso_log.log_columns = {"Volume", "Rate"};
    r[vaso_log.name] = vaso_log;

    DatasetSpec mroz;
    mroz.name = "mroz";
    mroz.path = "mroz.csv";
    mroz.response = "inlf";
    mroz.predictors = {"nwifeinc", "educ", "exper", "expersq", "age", "kidslt6", "kidsge6"};
    mroz.expected_n = 753;
    mroz.expected_p = 8;
    r[mroz.name] = mroz;

    DatasetSpec pima;
    pima.name = "pima";
    pima.path = "pima.csv";
    pima.response = "diabetes";
    pima.positive_label = "pos";
    pima.expected_n = 392;
    pima.expected_p = 9;
    pima.fallback = SyntheticFallback{ModelKind::logistic, 392, 9, 392};
    r[pima.name] = pima;

    DatasetSpec german;
    german.name = "german";
    german.path = "german.data";
    german.has_header = false;
    german.response = "V21";
    german.positive_label = "2";
    german.categorical = {"V1", "V3", "V4", "V6", "V7", "V9", "V10", "V12", "V14", "V15", "V17", "V19", "V20"};
    german.expected_n = 1000;
    german.expected_p = 49;
    german.fallback = SyntheticFallback{ModelKind::logistic, 1000, 49, 1000};
    r[german.name] = german;

    return r;
}

inline DatasetSpec find_dataset(const std::string& name) {
    const auto reg = dataset_registry();
    auto it = reg.find(name);
    if (it == reg.end()) throw ConfigError("unknown dataset: " + name);
    return it->second;
}

}  // namespace ubmcqmc
