#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "ubmcqmc/datasets.hpp"

using namespace ubmcqmc;
namespace fs = std::filesystem;

namespace {

class TempFile {
public:
    TempFile(const std::string& name, const std::string& text)
        : path_(fs::temp_directory_path() / ("ubmcqmc_" + std::to_string(::getpid()) + "_" + name)) {
        std::ofstream(path_) << text;
    }
    ~TempFile() { fs::remove(path_); }
    std::string str() const { return path_.string(); }

private:
    fs::path path_;
};

DatasetSpec spec_for(const TempFile& f, const std::string& response) {
    DatasetSpec s;
    s.name = "tmp";
    s.path = f.str();
    s.response = response;
    return s;
}

}  // namespace

TEST(Registry, BostonShape) {
    const auto d = load_dataset(find_dataset("boston"), UBMCQMC_DATA_DIR);
    EXPECT_EQ(d.n(), 506u);
    EXPECT_EQ(d.p(), 14u);
    EXPECT_FALSE(d.synthetic);
    EXPECT_TRUE((d.D.col(0).array() == 1.0).all());
    EXPECT_EQ(d.columns.front(), "(Intercept)");
    EXPECT_DOUBLE_EQ(d.y[0], 24.0);
}

TEST(Registry, VasoShapeAndTransform) {
    const auto raw = load_dataset(find_dataset("vaso"), UBMCQMC_DATA_DIR);
    const auto logged = load_dataset(find_dataset("vaso_log"), UBMCQMC_DATA_DIR);
    EXPECT_EQ(raw.n(), 39u);
    EXPECT_EQ(raw.p(), 3u);
    EXPECT_TRUE((raw.y.array() == 0.0 || raw.y.array() == 1.0).all());
    for (Eigen::Index i = 0; i < 39; ++i)
        for (Eigen::Index j = 1; j < 3; ++j) EXPECT_NEAR(logged.D(i, j), std::log(raw.D(i, j)), 1e-14);
    EXPECT_NE(raw.checksum, logged.checksum);
}

TEST(Registry, MrozShape) {
    const auto d = load_dataset(find_dataset("mroz"), UBMCQMC_DATA_DIR);
    EXPECT_EQ(d.n(), 753u);
    EXPECT_EQ(d.p(), 8u);
    EXPECT_TRUE((d.y.array() == 0.0 || d.y.array() == 1.0).all());
}

TEST(Registry, PimaGermanCaliforniaShapes) {
    for (auto [name, n, p] : {std::tuple{"pima", 392u, 9u}, std::tuple{"german", 1000u, 49u},
                              std::tuple{"california", 20640u, 9u}}) {
        const auto d = load_dataset(find_dataset(name), UBMCQMC_DATA_DIR);
        EXPECT_EQ(d.n(), n) << name;
        EXPECT_EQ(d.p(), p) << name;
        EXPECT_EQ(d.columns.size(), p) << name;
    }
}

TEST(Registry, UnknownNameIsAConfigError) { EXPECT_THROW(find_dataset("iris"), ConfigError); }

TEST(Registry, ChecksumIsStable) {
    const auto a = load_dataset(find_dataset("boston"), UBMCQMC_DATA_DIR);
    const auto b = load_dataset(find_dataset("boston"), UBMCQMC_DATA_DIR);
    EXPECT_EQ(a.checksum, b.checksum);
    EXPECT_EQ(a.checksum.size(), 8u);
    Vector y = a.y;
    y[0] += 1e-9;
    EXPECT_NE(data_checksum(a.D, y), a.checksum);
}

TEST(Loader, CategoricalExpansionDropsTheFirstLevel) {
    TempFile f("cat.csv", "x,colour,y\n1,red,0\n2,green,1\n3,blue,1\n4,green,0\n");
    auto s = spec_for(f, "y");
    s.categorical = {"colour"};
    const auto d = load_dataset(s);
    ASSERT_EQ(d.p(), 4u);
    EXPECT_EQ(d.columns, (std::vector<std::string>{"(Intercept)", "x", "colour=green", "colour=blue"}));
    Matrix expected(4, 4);
    expected << 1, 1, 0, 0, 1, 2, 1, 0, 1, 3, 0, 1, 1, 4, 1, 0;
    EXPECT_EQ(d.D, expected);
}

TEST(Loader, WhitespaceTablesWithoutHeader) {
    TempFile f("ws.data", "A11 6 1\nA12 48 2\nA11 12 1\n");
    DatasetSpec s = spec_for(f, "V3");
    s.has_header = false;
    s.categorical = {"V1"};
    s.positive_label = "2";
    const auto d = load_dataset(s);
    EXPECT_EQ(d.columns, (std::vector<std::string>{"(Intercept)", "V1=A12", "V2"}));
    EXPECT_EQ(d.y, (Vector{{0.0, 1.0, 0.0}}));
}

TEST(Loader, RowsWithMissingValuesAreDropped) {
    TempFile f("na.csv", "a,b,y\n1,2,3\nNA,2,3\n4,,5\n6,7,8\n");
    const auto d = load_dataset(spec_for(f, "y"));
    EXPECT_EQ(d.n(), 2u);
    EXPECT_EQ(d.dropped_rows, 2u);
    EXPECT_DOUBLE_EQ(d.D(1, 1), 6.0);
}

TEST(Loader, RaggedRowsAreRejected) {
    TempFile f("ragged.csv", "a,y\n1,2\n3\n");
    EXPECT_THROW(load_dataset(spec_for(f, "y")), ConfigError);
}

TEST(Loader, ExpectedShapeIsEnforced) {
    TempFile f("shape.csv", "a,y\n1,2\n3,4\n");
    auto s = spec_for(f, "y");
    s.expected_n = 3;
    EXPECT_THROW(load_dataset(s), ConfigError);
}

TEST(Loader, LogOfNonPositiveIsRejected) {
    TempFile f("log.csv", "a,y\n1,2\n0,4\n");
    auto s = spec_for(f, "y");
    s.log_columns = {"a"};
    EXPECT_THROW(load_dataset(s), ConfigError);
}

TEST(Loader, MissingFileWithoutFallbackIsAConfigError) {
    DatasetSpec s;
    s.name = "nothing";
    s.path = "/nonexistent/file.csv";
    s.response = "y";
    EXPECT_THROW(load_dataset(s), ConfigError);
}

TEST(Loader, MissingFileUsesTheFallback) {
    DatasetSpec s;
    s.name = "fallback";
    s.path = "/nonexistent/file.csv";
    s.fallback = SyntheticFallback{ModelKind::logistic, 50, 4, 9};
    const auto d = load_dataset(s);
    EXPECT_TRUE(d.synthetic);
    EXPECT_EQ(d.n(), 50u);
    EXPECT_EQ(d.p(), 4u);
}

TEST(Synthetic, DeterministicInTheSeed) {
    const auto a = synthetic_regression(ModelKind::linear, 40, 3, 5);
    const auto b = synthetic_regression(ModelKind::linear, 40, 3, 5);
    const auto c = synthetic_regression(ModelKind::linear, 40, 3, 6);
    EXPECT_EQ(a.D, b.D);
    EXPECT_EQ(a.y, b.y);
    EXPECT_NE(a.y, c.y);
}

TEST(Synthetic, ZeroEffectProbitIsBalanced) {
    const std::size_t n = 20000;
    const auto d = synthetic_regression(ModelKind::probit, n, 3, 7, Vector::Zero(3));
    const double frac = d.y.mean();
    EXPECT_NEAR(frac, 0.5, 3.0 * std::sqrt(0.25 / n));
}

TEST(Synthetic, LeastSquaresRecoversTheCoefficients) {
    const std::size_t n = 20000;
    const auto d = synthetic_regression(ModelKind::linear, n, 4, 8, std::nullopt, 0.5);
    const Vector bhat = (d.D.transpose() * d.D).ldlt().solve(d.D.transpose() * d.y);
    EXPECT_LT((bhat - d.beta).cwiseAbs().maxCoeff(), 5.0 * 0.5 / std::sqrt(double(n)));
}

TEST(Synthetic, RejectsImpossibleShapes) {
    EXPECT_THROW(synthetic_regression(ModelKind::linear, 2, 3, 1), ConfigError);
    EXPECT_THROW(synthetic_regression(ModelKind::linear, 10, 3, 1, Vector::Zero(2)), ConfigError);
}

TEST(ModelKinds, RoundTrip) {
    for (auto k : {ModelKind::linear, ModelKind::probit, ModelKind::logistic})
        EXPECT_EQ(parse_model_kind(to_string(k)), k);
    EXPECT_THROW(parse_model_kind("poisson"), ConfigError);
}
