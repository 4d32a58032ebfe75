#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ubmcqmc/errors.hpp"

namespace ubmcqmc {

/// Sobol' direction numbers in the Joe-Kuo file layout
/// ("d s a m_1 ... m_s" per line, dimension 1 implicit).
class SobolDirections {
public:
    static constexpr int bits = 32;

    SobolDirections() { v_.push_back(first_dimension()); }

    static SobolDirections load(const std::string& path, std::size_t max_dim = 0) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open Sobol' direction file " + path);
        SobolDirections dirs;
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            if (max_dim && dirs.max_dim() >= max_dim) break;
            std::istringstream row(line);
            unsigned d = 0, s = 0;
            std::uint64_t a = 0;
            if (!(row >> d >> s >> a)) continue;
            std::vector<std::uint32_t> m(s);
            for (auto& mi : m)
                if (!(row >> mi)) throw ConfigError("malformed direction line: " + line);
            dirs.add(s, a, m);
        }
        return dirs;
    }

    /// Append a dimension with primitive polynomial degree s, interior
    /// coefficient word a and initial odd integers m_1..m_s.
    void add(unsigned s, std::uint64_t a, const std::vector<std::uint32_t>& m) {
        if (s == 0 || m.size() != s) throw ConfigError("bad Sobol' direction entry");
        std::vector<std::uint32_t> v(bits);
        for (unsigned i = 0; i < bits; ++i) {
            if (i < s) {
                v[i] = m[i] << (bits - 1 - i);
            } else {
                v[i] = v[i - s] ^ (v[i - s] >> s);
                for (unsigned k = 1; k < s; ++k)
                    if ((a >> (s - 1 - k)) & 1) v[i] ^= v[i - k];
            }
        }
        v_.push_back(std::move(v));
    }

    std::size_t max_dim() const { return v_.size(); }
    const std::vector<std::uint32_t>& direction(std::size_t dim) const { return v_.at(dim); }

private:
    static std::vector<std::uint32_t> first_dimension() {
        std::vector<std::uint32_t> v(bits);
        for (int i = 0; i < bits; ++i) v[i] = std::uint32_t{1} << (bits - 1 - i);
        return v;
    }

    std::vector<std::vector<std::uint32_t>> v_;
};

/// First `count` Sobol' points in Gray-code order, row-major count x dim,
/// starting at the origin.
inline std::vector<double> sobol_points(const SobolDirections& dirs, std::size_t dim,
                                        std::size_t count) {
    if (dim == 0 || dim > dirs.max_dim())
        throw ConfigError("Sobol' dimension " + std::to_string(dim) + " exceeds available " +
                          std::to_string(dirs.max_dim()));
    if (count > (std::uint64_t{1} << SobolDirections::bits))
        throw ConfigError("too many Sobol' points requested");
    std::vector<double> out(count * dim);
    std::vector<std::uint32_t> x(dim, 0);
    for (std::size_t i = 0; i < count; ++i) {
        if (i > 0) {
            const int c = std::countr_one(static_cast<std::uint64_t>(i - 1));
            for (std::size_t j = 0; j < dim; ++j) x[j] ^= dirs.direction(j)[c];
        }
        for (std::size_t j = 0; j < dim; ++j) out[i * dim + j] = x[j] * 0x1.0p-32;
    }
    return out;
}

}  // namespace ubmcqmc
