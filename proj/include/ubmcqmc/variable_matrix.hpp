#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ubmcqmc/errors.hpp"
#include "ubmcqmc/lfsr.hpp"
#include "ubmcqmc/random_streams.hpp"
#include "ubmcqmc/sobol.hpp"

namespace ubmcqmc {

enum class Provenance { iid, liao, harase };

enum class RandomizationKind { none, random_shift, digital_shift };

inline std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::iid: return "iid";
        case Provenance::liao: return "liao";
        case Provenance::harase: return "harase";
    }
    return "?";
}

inline std::string to_string(RandomizationKind k) {
    switch (k) {
        case RandomizationKind::none: return "none";
        case RandomizationKind::random_shift: return "random_shift";
        case RandomizationKind::digital_shift: return "digital_shift";
    }
    return "?";
}

/// N x d matrix of driving variables in [0, 1), stored row-major.
class VariableMatrix {
public:
    VariableMatrix() = default;
    VariableMatrix(std::size_t rows, std::size_t cols, std::vector<double> data,
                   Provenance provenance)
        : rows_(rows), cols_(cols), data_(std::move(data)), provenance_(provenance) {
        if (data_.size() != rows_ * cols_) throw Error("variable matrix shape mismatch");
        for (double v : data_)
            if (!(v >= 0.0 && v < 1.0)) throw Error("variable matrix entry outside [0, 1)");
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Provenance provenance() const { return provenance_; }
    RandomizationKind randomization() const { return randomization_; }
    const std::vector<double>& shift() const { return shift_; }

    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    std::span<const double> values() const { return data_; }

    /// Rows r..r+count-1 of dimensions 0..dim-1, flattened (for discrepancy checks).
    std::vector<double> block(std::size_t r, std::size_t count, std::size_t dim) const {
        std::vector<double> out;
        out.reserve(count * dim);
        for (std::size_t i = r; i < r + count; ++i)
            for (std::size_t j = 0; j < dim; ++j) out.push_back((*this)(i, j));
        return out;
    }

    friend VariableMatrix random_shift(const VariableMatrix& m, std::span<const double> z);
    friend VariableMatrix digital_shift(const VariableMatrix& m, std::span<const double> z);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
    Provenance provenance_ = Provenance::iid;
    RandomizationKind randomization_ = RandomizationKind::none;
    std::vector<double> shift_;
};

inline void check_shift(const VariableMatrix& m, std::span<const double> z) {
    if (z.size() != m.cols()) throw Error("shift length does not match matrix width");
    for (double v : z)
        if (!(v >= 0.0 && v < 1.0)) throw Error("shift entry outside [0, 1)");
}

/// Rotation modulo 1: a + z (mod 1) entrywise per column.
inline VariableMatrix random_shift(const VariableMatrix& m, std::span<const double> z) {
    check_shift(m, z);
    VariableMatrix out = m;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            double s = m(i, j) + z[j];
            if (s >= 1.0) s -= 1.0;
            out.data_[i * m.cols() + j] = s;
        }
    out.randomization_ = RandomizationKind::random_shift;
    out.shift_.assign(z.begin(), z.end());
    return out;
}

inline std::uint32_t to_digits(double v) {
    return static_cast<std::uint32_t>(std::ldexp(v, 32));
}

/// Bitwise XOR of the leading 32 binary digits.
inline VariableMatrix digital_shift(const VariableMatrix& m, std::span<const double> z) {
    check_shift(m, z);
    VariableMatrix out = m;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            out.data_[i * m.cols() + j] = (to_digits(m(i, j)) ^ to_digits(z[j])) * 0x1.0p-32;
    out.randomization_ = RandomizationKind::digital_shift;
    out.shift_.assign(z.begin(), z.end());
    return out;
}

inline std::vector<double> random_shift_vector(std::size_t dim, IidStream& stream) {
    std::vector<double> z(dim);
    stream.fill(z);
    return z;
}

inline VariableMatrix iid_matrix(std::size_t rows, std::size_t cols, IidStream& stream) {
    std::vector<double> data(rows * cols);
    stream.fill(data);
    return {rows, cols, std::move(data), Provenance::iid};
}

/// Fisher-Yates permutation of 0..n-1.
inline std::vector<std::size_t> random_permutation(std::size_t n, IidStream& stream) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(stream.uniform() * static_cast<double>(i));
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

/// Row i of the result is row perm[i] of the first N Sobol' points.
inline VariableMatrix liao_matrix(const SobolDirections& dirs, std::size_t rows, std::size_t cols,
                                  std::span<const std::size_t> perm) {
    if (perm.size() != rows) throw Error("permutation length does not match row count");
    const std::vector<double> pts = sobol_points(dirs, cols, rows);
    std::vector<double> data(rows * cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) data[i * cols + j] = pts[perm[i] * cols + j];
    return {rows, cols, std::move(data), Provenance::liao};
}

/// Randomized Liao matrix: random row order followed by a random shift.
inline VariableMatrix liao_matrix(const SobolDirections& dirs, std::size_t rows, std::size_t cols,
                                  IidStream& stream) {
    const auto perm = random_permutation(rows, stream);
    const auto z = random_shift_vector(cols, stream);
    return random_shift(liao_matrix(dirs, rows, cols, perm), z);
}

/// Unrandomized 2^n x d matrix built from successive d-blocks of one full
/// LFSR period, first row zero. When gcd(d, 2^n - 1) > 1 the period is split
/// into gcd loops, loop j starting at value j.
inline VariableMatrix harase_matrix(const LfsrParams& p, std::size_t cols) {
    if (cols == 0) throw Error("Harase matrix needs at least one column");
    const std::uint64_t period = p.period();
    const std::size_t rows = static_cast<std::size_t>(period) + 1;
    const std::uint64_t loops = std::gcd(static_cast<std::uint64_t>(cols), period);
    const std::uint64_t rows_per_loop = period / loops;
    std::vector<double> data(rows * cols, 0.0);
    std::size_t r = 1;
    for (std::uint64_t j = 0; j < loops; ++j) {
        LfsrGenerator gen(p);
        gen.discard(j);
        for (std::uint64_t t = 0; t < rows_per_loop; ++t, ++r)
            for (std::size_t c = 0; c < cols; ++c) data[r * cols + c] = gen.next();
    }
    return {rows, cols, std::move(data), Provenance::harase};
}

inline VariableMatrix harase_matrix(const LfsrParams& p, std::size_t cols, IidStream& stream) {
    const auto z = random_shift_vector(cols, stream);
    return digital_shift(harase_matrix(p, cols), z);
}

}  // namespace ubmcqmc
