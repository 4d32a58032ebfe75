#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ubmcqmc/errors.hpp"

namespace ubmcqmc {

namespace gf2 {

/// Product of two polynomials of degree < n, reduced modulo x^n + low(x).
/// `low` holds the coefficients of x^0..x^{n-1}.
inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t low, int n) {
    const std::uint64_t top = std::uint64_t{1} << (n - 1);
    const std::uint64_t mask = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
    std::uint64_t r = 0;
    while (b) {
        if (b & 1) r ^= a;
        b >>= 1;
        const bool carry = a & top;
        a = (a << 1) & mask;
        if (carry) a ^= low;
    }
    return r;
}

/// x^e modulo x^n + low(x).
inline std::uint64_t xpow(std::uint64_t e, std::uint64_t low, int n) {
    std::uint64_t result = 1;
    std::uint64_t base = (n == 1) ? low : 2;
    while (e) {
        if (e & 1) result = mulmod(result, base, low, n);
        base = mulmod(base, base, low, n);
        e >>= 1;
    }
    return result;
}

inline std::vector<std::uint64_t> prime_factors(std::uint64_t v) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = 2; p * p <= v; ++p) {
        if (v % p == 0) {
            out.push_back(p);
            while (v % p == 0) v /= p;
        }
    }
    if (v > 1) out.push_back(v);
    return out;
}

/// True when x^n + low(x) is primitive over GF(2).
inline bool is_primitive(std::uint64_t low, int n) {
    if (n < 1 || n > 32 || !(low & 1)) return false;
    const std::uint64_t period = (std::uint64_t{1} << n) - 1;
    if (xpow(period, low, n) != 1) return false;
    for (std::uint64_t r : prime_factors(period)) {
        if (xpow(period / r, low, n) == 1) return false;
    }
    return true;
}

}  // namespace gf2

/// Linear feedback shift register b_i = sum_j a_j b_{i-n+j} (mod 2) with
/// output offset g and w = 32 output digits.
struct LfsrParams {
    int order = 0;             // n
    std::uint64_t offset = 0;  // g
    std::uint64_t coeffs = 0;  // bit j holds a_j, j = 0..n-1

    std::uint64_t period() const { return (std::uint64_t{1} << order) - 1; }

    void validate() const {
        if (order < 1 || order > 32) throw ConfigError("LFSR order must be in [1, 32]");
        if (coeffs >> order) throw ConfigError("LFSR coefficients exceed the order");
        if (!gf2::is_primitive(coeffs, order))
            throw ConfigError("LFSR characteristic polynomial is not primitive");
        if (offset == 0 || std::gcd(offset, period()) != 1)
            throw ConfigError("LFSR offset must be coprime to 2^n - 1");
    }

    /// "n g a_{n-1}...a_0", coefficient string most significant first.
    std::string to_string() const {
        std::string bits(order, '0');
        for (int j = 0; j < order; ++j)
            if ((coeffs >> j) & 1) bits[order - 1 - j] = '1';
        return std::to_string(order) + " " + std::to_string(offset) + " " + bits;
    }

    static LfsrParams parse(const std::string& line) {
        std::istringstream in(line);
        LfsrParams p;
        std::string bits;
        if (!(in >> p.order >> p.offset >> bits) || static_cast<int>(bits.size()) != p.order)
            throw ConfigError("malformed LFSR parameter line: " + line);
        for (int j = 0; j < p.order; ++j) {
            const char c = bits[p.order - 1 - j];
            if (c != '0' && c != '1') throw ConfigError("malformed LFSR coefficients: " + bits);
            if (c == '1') p.coeffs |= std::uint64_t{1} << j;
        }
        p.validate();
        return p;
    }
};

/// LFSR parameters keyed by order n. Lines starting with '#' are comments.
class LfsrTable {
public:
    LfsrTable() = default;

    static LfsrTable load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open LFSR parameter file " + path);
        LfsrTable t;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            t.add(LfsrParams::parse(line));
        }
        return t;
    }

    void add(const LfsrParams& p) { by_order_[p.order] = p; }
    bool contains(int order) const { return by_order_.count(order) != 0; }

    const LfsrParams& at(int order) const {
        auto it = by_order_.find(order);
        if (it == by_order_.end())
            throw ConfigError("no LFSR parameters for n = " + std::to_string(order));
        return it->second;
    }

    std::vector<int> orders() const {
        std::vector<int> out;
        for (const auto& [n, _] : by_order_) out.push_back(n);
        return out;
    }

private:
    std::map<int, LfsrParams> by_order_;
};

/// Generates v_1, v_2, ... where v_i uses bits b_{(i-1)g}..b_{(i-1)g+31}.
/// The state word keeps b_k..b_{k+n-1} in bits 0..n-1.
class LfsrGenerator {
public:
    explicit LfsrGenerator(const LfsrParams& p, std::uint64_t seed_state = 1)
        : n_(p.order), coeffs_(p.coeffs), state_(seed_state) {
        if (seed_state == 0 || (seed_state >> n_))
            throw ConfigError("LFSR seed state must be a nonzero n-bit word");
        jump_ = matrix_power(companion(), p.offset);
    }

    /// Next value as a 32-bit integer (value = integer * 2^-32).
    std::uint32_t next_bits() {
        const std::uint32_t v = output(state_);
        state_ = apply(jump_, state_);
        return v;
    }

    double next() { return next_bits() * 0x1.0p-32; }

    /// Skip `count` values.
    void discard(std::uint64_t count) {
        std::vector<std::uint64_t> m = jump_;
        while (count) {
            if (count & 1) state_ = apply(m, state_);
            m = multiply(m, m);
            count >>= 1;
        }
    }

    std::uint64_t state() const { return state_; }

    /// Advance the raw bit sequence by one position.
    static std::uint64_t clock(std::uint64_t s, std::uint64_t coeffs, int n) {
        const std::uint64_t fb = std::popcount(s & coeffs) & 1;
        return (s >> 1) | (fb << (n - 1));
    }

private:
    using Matrix = std::vector<std::uint64_t>;  // row r is a mask over input bits

    std::uint32_t output(std::uint64_t s) const {
        std::uint32_t v = 0;
        for (int j = 0; j < 32; ++j) {
            v = (v << 1) | static_cast<std::uint32_t>(s & 1);
            s = clock(s, coeffs_, n_);
        }
        return v;
    }

    Matrix companion() const {
        Matrix a(n_);
        for (int r = 0; r + 1 < n_; ++r) a[r] = std::uint64_t{1} << (r + 1);
        a[n_ - 1] = coeffs_;
        return a;
    }

    Matrix identity() const {
        Matrix m(n_);
        for (int r = 0; r < n_; ++r) m[r] = std::uint64_t{1} << r;
        return m;
    }

    std::uint64_t apply(const Matrix& m, std::uint64_t s) const {
        std::uint64_t out = 0;
        for (int r = 0; r < n_; ++r)
            out |= static_cast<std::uint64_t>(std::popcount(m[r] & s) & 1) << r;
        return out;
    }

    // (a * b) applied to s equals a(b(s)).
    Matrix multiply(const Matrix& a, const Matrix& b) const {
        Matrix out(n_, 0);
        for (int r = 0; r < n_; ++r) {
            std::uint64_t row = a[r];
            while (row) {
                const int c = std::countr_zero(row);
                out[r] ^= b[c];
                row &= row - 1;
            }
        }
        return out;
    }

    Matrix matrix_power(Matrix base, std::uint64_t e) const {
        Matrix result = identity();
        while (e) {
            if (e & 1) result = multiply(result, base);
            base = multiply(base, base);
            e >>= 1;
        }
        return result;
    }

    int n_;
    std::uint64_t coeffs_;
    std::uint64_t state_;
    Matrix jump_;
};

/// The first `count` output values of the LFSR started from `seed_state`.
inline std::vector<double> lfsr_sequence(const LfsrParams& p, std::size_t count,
                                         std::uint64_t seed_state = 1) {
    LfsrGenerator gen(p, seed_state);
    std::vector<double> out(count);
    for (double& v : out) v = gen.next();
    return out;
}

}  // namespace ubmcqmc
