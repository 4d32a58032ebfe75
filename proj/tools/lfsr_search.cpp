// Random search for LFSR parameters (primitive polynomial and output offset)
// with small t-values for consecutive low-dimensional projections.
//
//   lfsr_search --min-order 10 --max-order 20 --candidates 300 --dims 12 > data/lfsr_params.txt

#include <array>
#include <cstdint>
#include <iostream>
#include <numeric>
#include <vector>

#include <CLI11.hpp>

#include "ubmcqmc/lfsr.hpp"
#include "ubmcqmc/random_streams.hpp"

using namespace ubmcqmc;

namespace {

struct Basis {
    std::array<std::uint64_t, 64> rows{};
    bool insert(std::uint64_t v) {
        while (v) {
            const int hi = 63 - std::countl_zero(v);
            if (!rows[hi]) {
                rows[hi] = v;
                return true;
            }
            v ^= rows[hi];
        }
        return false;
    }
};

// gen[l][j] = linear functional giving digit j of coordinate l.
using Generators = std::vector<std::vector<std::uint64_t>>;

bool all_independent(const Generators& gen, std::size_t coord, std::size_t s, int remaining,
                     const Basis& basis) {
    if (coord + 1 == s) {
        Basis b = basis;
        for (int j = 0; j < remaining; ++j)
            if (!b.insert(gen[coord][j])) return false;
        return true;
    }
    Basis b = basis;
    for (int d = 0; d <= remaining; ++d) {
        if (d > 0 && !b.insert(gen[coord][d - 1])) return false;
        if (!all_independent(gen, coord + 1, s, remaining - d, b)) return false;
    }
    return true;
}

Generators generators(const LfsrParams& p, std::size_t dims) {
    Generators gen(dims, std::vector<std::uint64_t>(p.order));
    for (std::size_t l = 0; l < dims; ++l) {
        const std::uint64_t base = gf2::xpow((l * p.offset) % p.period(), p.coeffs, p.order);
        std::uint64_t r = base;
        for (int j = 0; j < p.order; ++j) {
            gen[l][j] = r;
            r = gf2::mulmod(r, 2, p.coeffs, p.order);
        }
    }
    return gen;
}

// Sum of t-values of the projections onto the first s coordinates,
// s = 2..dims. Stops early once the sum exceeds `bound`.
int figure_of_merit(const LfsrParams& p, std::size_t dims, int bound) {
    const Generators gen = generators(p, dims);
    int t = 0, total = 0;
    for (std::size_t s = 2; s <= dims; ++s) {
        while (t < p.order && !all_independent(gen, 0, s, p.order - t, Basis{})) ++t;
        total += t;
        if (total > bound) return total;
    }
    return total;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LFSR parameter search"};
    int min_order = 10, max_order = 20, candidates = 200;
    std::size_t dims = 12;
    std::uint64_t seed = 12345;
    app.add_option("--min-order", min_order);
    app.add_option("--max-order", max_order);
    app.add_option("--candidates", candidates);
    app.add_option("--dims", dims);
    app.add_option("--seed", seed);
    CLI11_PARSE(app, argc, argv);

    std::cout << "# n g a_{n-1}..a_0   (sum of t-values over consecutive projections s = 2.."
              << dims << ")\n";
    for (int n = min_order; n <= max_order; ++n) {
        IidStream rng(seed, n, StreamRole::data);
        const std::uint64_t period = (std::uint64_t{1} << n) - 1;
        LfsrParams best;
        int best_fom = 1 << 30;
        for (int c = 0; c < candidates;) {
            LfsrParams p;
            p.order = n;
            p.coeffs = (rng() & (period >> 0)) | 1;
            p.coeffs &= period;
            if (!gf2::is_primitive(p.coeffs, n)) continue;
            do {
                p.offset = rng() % period;
            } while (p.offset < static_cast<std::uint64_t>(n) || std::gcd(p.offset, period) != 1);
            ++c;
            const int fom = figure_of_merit(p, dims, best_fom);
            if (fom < best_fom) {
                best_fom = fom;
                best = p;
            }
        }
        std::cout << best.to_string() << "   # " << best_fom << "\n" << std::flush;
        std::cerr << "n=" << n << " merit=" << best_fom << "\n";
    }
}
