#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "ubmcqmc/errors.hpp"
#include "ubmcqmc/random_streams.hpp"

namespace ubmcqmc {

namespace detail {

// Local discrepancy of the anchored box [0, corner) and [0, corner].
inline double box_gap(std::span<const double> pts, std::size_t dim, const double* corner) {
    const std::size_t n = pts.size() / dim;
    double vol = 1.0;
    for (std::size_t j = 0; j < dim; ++j) vol *= corner[j];
    std::size_t open = 0, closed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        bool in_open = true, in_closed = true;
        for (std::size_t j = 0; j < dim && in_closed; ++j) {
            const double x = pts[i * dim + j];
            if (x >= corner[j]) in_open = false;
            if (x > corner[j]) in_closed = false;
        }
        open += in_open;
        closed += in_closed;
    }
    const double nn = static_cast<double>(n);
    return std::max(vol - open / nn, closed / nn - vol);
}

}  // namespace detail

/// Exact star discrepancy of `pts` (row-major, n x dim) for dim <= 3.
/// Dimension 3 enumerates the full critical grid and is limited to n <= 1024.
inline double star_discrepancy(std::span<const double> pts, std::size_t dim) {
    if (dim == 0 || pts.size() % dim != 0) throw Error("bad point set shape");
    const std::size_t n = pts.size() / dim;
    if (n == 0) return 1.0;
    const double nn = static_cast<double>(n);

    if (dim == 1) {
        std::vector<double> x(pts.begin(), pts.end());
        std::sort(x.begin(), x.end());
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            d = std::max({d, (i + 1) / nn - x[i], x[i] - i / nn});
        return d;
    }

    if (dim == 2) {
        std::vector<std::pair<double, double>> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = {pts[2 * i], pts[2 * i + 1]};
        std::sort(p.begin(), p.end());
        std::vector<double> xs;
        for (const auto& q : p) xs.push_back(q.first);
        xs.push_back(1.0);
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        std::vector<double> ys;  // y coordinates of points with x < current corner
        double d = 0.0;
        std::size_t next = 0;
        for (double cx : xs) {
            // Open count uses points with x < cx, closed count uses x <= cx.
            std::vector<double> below = ys;
            std::size_t hi = next;
            while (hi < n && p[hi].first <= cx) ++hi;
            std::vector<double> upto = ys;
            for (std::size_t i = next; i < hi; ++i) upto.push_back(p[i].second);
            std::sort(upto.begin(), upto.end());
            std::vector<double> cand = upto;
            cand.push_back(1.0);
            std::sort(cand.begin(), cand.end());
            cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
            for (double cy : cand) {
                const double vol = cx * cy;
                const auto open = std::lower_bound(below.begin(), below.end(), cy) - below.begin();
                const auto closed = std::upper_bound(upto.begin(), upto.end(), cy) - upto.begin();
                d = std::max({d, vol - open / nn, closed / nn - vol});
            }
            ys = std::move(upto);
            next = hi;
        }
        return d;
    }

    if (dim == 3) {
        if (n > 1024) throw Error("exact 3-dimensional star discrepancy limited to 1024 points");
        std::vector<std::vector<double>> grid(3);
        for (std::size_t j = 0; j < 3; ++j) {
            for (std::size_t i = 0; i < n; ++i) grid[j].push_back(pts[i * 3 + j]);
            grid[j].push_back(1.0);
            std::sort(grid[j].begin(), grid[j].end());
            grid[j].erase(std::unique(grid[j].begin(), grid[j].end()), grid[j].end());
        }
        double d = 0.0;
        double c[3];
        for (double a : grid[0]) {
            c[0] = a;
            for (double b : grid[1]) {
                c[1] = b;
                for (double e : grid[2]) {
                    c[2] = e;
                    d = std::max(d, detail::box_gap(pts, 3, c));
                }
            }
        }
        return d;
    }

    throw Error("exact star discrepancy implemented for dimension <= 3");
}

/// Lower bound on the star discrepancy from `trials` random critical boxes.
inline double star_discrepancy_lower_bound(std::span<const double> pts, std::size_t dim,
                                           std::size_t trials, IidStream& stream) {
    if (dim == 0 || pts.size() % dim != 0) throw Error("bad point set shape");
    const std::size_t n = pts.size() / dim;
    std::vector<double> c(dim);
    double d = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        for (std::size_t j = 0; j < dim; ++j) {
            const std::size_t i = static_cast<std::size_t>(stream.uniform() * (n + 1));
            c[j] = (i == n) ? 1.0 : pts[i * dim + j];
        }
        d = std::max(d, detail::box_gap(pts, dim, c.data()));
    }
    return d;
}

struct ConcatenationBound {
    double lhs = 0.0;  // D* of all non-overlapping d-blocks of v followed by u
    double rhs = 0.0;  // weighted discrepancies of the v blocks, u blocks and the boundary block
};

/// Both sides of the block decomposition bound for the concatenation of `v`
/// and `u` cut into non-overlapping d-tuples, the boundary tuple straddling
/// the join.
inline ConcatenationBound concatenation_bound(std::span<const double> v, std::span<const double> u,
                                             std::size_t d) {
    const std::size_t n = v.size(), m = u.size();
    if (d == 0 || d > 3) throw Error("concatenation bound needs 1 <= d <= 3");
    const std::size_t np = n / d, l = n % d;
    if (np == 0 || m + l < 2 * d) throw Error("sequences too short for the concatenation bound");
    const std::size_t mp = (m + l - d) / d;

    std::vector<double> x(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(np * d));
    std::vector<double> z(v.begin() + static_cast<std::ptrdiff_t>(np * d), v.end());
    z.insert(z.end(), u.begin(), u.begin() + static_cast<std::ptrdiff_t>(d - l));
    std::vector<double> y;
    for (std::size_t j = 1; j <= mp; ++j) {
        const std::size_t start = j * d - l;
        y.insert(y.end(), u.begin() + static_cast<std::ptrdiff_t>(start),
                 u.begin() + static_cast<std::ptrdiff_t>(start + d));
    }
    std::vector<double> all = x;
    all.insert(all.end(), z.begin(), z.end());
    all.insert(all.end(), y.begin(), y.end());

    const double kp = static_cast<double>(np + mp + 1);
    ConcatenationBound out;
    out.lhs = star_discrepancy(all, d);
    out.rhs = static_cast<double>(np) / kp * star_discrepancy(x, d) +
              (mp ? static_cast<double>(mp) / kp * star_discrepancy(y, d) : 0.0) + star_discrepancy(z, d) / kp;
    return out;
}

}  // namespace ubmcqmc
