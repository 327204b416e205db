// SPDX-License-Identifier: MIT
#ifndef LATCOH_CUBES_HPP
#define LATCOH_CUBES_HPP

/**
 * @file cubes.hpp
 * @brief Sublevel cube complexes of the weight function of a characteristic
 *        vector.
 *
 * Fix a base characteristic vector k0 with pairing coordinates a0 and let
 * A = -M.  Lattice points u in Z^s parametrize the characteristic vectors
 * k0 + 2*sum u_j E_j, whose weight exceeds that of k0 by
 *
 *     W(u) = (a0^T u + u^T A u) / 2   (an integer).
 *
 * The unit cube (u, I), I a subset of {0..s-1}, spans the corners u + e_J
 * for J a subset of I.  Its weight is the maximum corner weight, and it
 * belongs to the sublevel complex at level m iff every corner has W <= m.
 * Both quantities satisfy one-step recursions over I, computed here by
 * dynamic programming over bitmasks.
 *
 * Two builders are provided:
 *  - build_sublevel: negative definite forms; the point set { W <= cap }
 *    is finite and enumerated exactly (ellipsoid enumeration);
 *  - build_sublevel_box: any form; points are restricted to the box
 *    [-radius, radius]^s, which models pairs (S cut to a box, its boundary)
 *    for compactly supported cohomology.
 */

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "latcoh/charlat.hpp"
#include "latcoh/enumerate.hpp"
#include "latcoh/matrix.hpp"

namespace latcoh {

/** @brief Weight W(u) = (a0^T u + u^T A u)/2 of a lattice point, exactly. */
inline Rat point_weight(const IntMat& big_a, const CharVec& a0, const std::vector<Int>& u) {
    const std::size_t s = big_a.rows();
    if (a0.size() != s || u.size() != s)
        throw std::invalid_argument("point_weight: dimension mismatch");
    Int lin = 0;
    for (std::size_t i = 0; i < s; ++i) lin += a0[i] * u[i];
    return Rat(lin + quad_form(big_a, u)) / 2;
}

/** @brief Weight of the cube (u, I): the maximum weight over its 2^|I| corners. */
inline Rat cube_weight(const IntMat& big_a, const CharVec& a0, const std::vector<Int>& u,
                       std::uint32_t mask) {
    std::vector<Int> corner(u);
    Rat best(0);
    bool first = true;
    // Iterate subsets of mask.
    std::uint32_t sub = mask;
    for (;;) {
        for (std::size_t j = 0; j < u.size(); ++j)
            corner[j] = u[j] + ((sub >> j) & 1u ? 1 : 0);
        Rat w = point_weight(big_a, a0, corner);
        if (first || w > best) best = w;
        first = false;
        if (sub == 0) break;
        sub = (sub - 1) & mask;
    }
    return best;
}

/**
 * @brief A finite family of lattice points with all unit cubes among them,
 *        weighted and filtered by a level cap.
 *
 * Points are stored sorted lexicographically; cube data lives in per-point
 * arrays indexed by the direction bitmask.  A cube is "present" when all of
 * its corners are points of the family with weight <= cap; its weight is
 * the maximum corner weight.  Levels m <= cap carve out subcomplexes by
 * the cube weight, so one build serves a whole tower of levels.
 */
struct SublevelComplex {
    std::size_t s = 0;
    long long cap = 0;    ///< level cap used for presence
    bool boxed = false;   ///< true when built inside a box
    long radius = 0;      ///< box radius when boxed
    std::vector<std::vector<Int>> pts;             ///< sorted lexicographically
    std::vector<long long> wpt;                    ///< W(u) per point
    std::vector<std::vector<std::uint64_t>> present;  ///< per point, bit per mask
    std::vector<std::vector<long long>> cubew;        ///< per point, weight per mask
    std::vector<std::vector<std::int64_t>> nbr;   ///< index of u + e_j, or -1
    std::vector<std::vector<std::int64_t>> rnbr;  ///< index of u - e_j, or -1

    std::size_t mask_count() const { return std::size_t(1) << s; }

    bool cube_present(std::size_t p, std::uint32_t mask) const {
        return (present[p][mask >> 6] >> (mask & 63u)) & 1u;
    }
    long long cube_w(std::size_t p, std::uint32_t mask) const { return cubew[p][mask]; }

    /** @brief Binary search for a point; nullopt if absent. */
    std::optional<std::size_t> find_point(const std::vector<Int>& u) const {
        auto it = std::lower_bound(pts.begin(), pts.end(), u);
        if (it == pts.end() || *it != u) return std::nullopt;
        return std::size_t(it - pts.begin());
    }

    /** @brief Number of present cubes of each dimension at a level. */
    std::vector<long long> cells_per_dim(long long level) const {
        std::vector<long long> n(s + 1, 0);
        for (std::size_t p = 0; p < pts.size(); ++p)
            for (std::uint32_t mask = 0; mask < mask_count(); ++mask)
                if (cube_present(p, mask) && cubew[p][mask] <= level)
                    ++n[std::size_t(__builtin_popcount(mask))];
        return n;
    }

    /** @brief Smallest point weight, i.e. the lowest nonempty level. */
    long long min_weight() const {
        if (pts.empty()) throw std::domain_error("min_weight: empty complex");
        long long m = wpt[0];
        for (long long w : wpt) m = std::min(m, w);
        return m;
    }
};

/**
 * @brief Fill presence, cube weights and neighbor tables from pts/wpt/cap.
 *
 * pts must be sorted lexicographically and duplicate-free.  Exposed
 * separately so tests can hand-craft complexes with chosen weights.
 */
inline void finalize_complex(SublevelComplex& cx) {
    const std::size_t s = cx.s, n = cx.pts.size();
    if (s >= 25) throw std::domain_error("finalize_complex: too many vertices");
    const std::size_t masks = std::size_t(1) << s;
    if (n > 0 && n * masks > std::size_t(30'000'000))
        throw std::domain_error("finalize_complex: complex too large");
    cx.nbr.assign(n, std::vector<std::int64_t>(std::max<std::size_t>(s, 1), -1));
    cx.rnbr.assign(n, std::vector<std::int64_t>(std::max<std::size_t>(s, 1), -1));
    for (std::size_t p = 0; p < n; ++p) {
        std::vector<Int> v = cx.pts[p];
        for (std::size_t j = 0; j < s; ++j) {
            v[j] += 1;
            auto up = cx.find_point(v);
            if (up) {
                cx.nbr[p][j] = (std::int64_t)*up;
                cx.rnbr[*up][j] = (std::int64_t)p;
            }
            v[j] -= 1;
        }
    }
    cx.present.assign(n, std::vector<std::uint64_t>((masks + 63) / 64, 0));
    cx.cubew.assign(n, std::vector<long long>(masks, std::numeric_limits<long long>::min()));
    auto set_present = [&](std::size_t p, std::uint32_t mask) {
        cx.present[p][mask >> 6] |= (std::uint64_t(1) << (mask & 63u));
    };
    for (std::size_t p = 0; p < n; ++p) {
        if (cx.wpt[p] <= cx.cap) {
            set_present(p, 0);
            cx.cubew[p][0] = cx.wpt[p];
        }
    }
    for (std::uint32_t mask = 1; mask < masks; ++mask) {
        const std::uint32_t low = mask & (~mask + 1);
        const std::uint32_t rest = mask ^ low;
        const std::size_t j = std::size_t(__builtin_ctz(mask));
        for (std::size_t p = 0; p < n; ++p) {
            if (!cx.cube_present(p, rest)) continue;
            const std::int64_t q = cx.nbr[p][j];
            if (q < 0 || !cx.cube_present(std::size_t(q), rest)) continue;
            set_present(p, mask);
            cx.cubew[p][mask] = std::max(cx.cubew[p][rest], cx.cubew[std::size_t(q)][rest]);
        }
    }
}

/**
 * @brief Sublevel complex { W <= cap } for a negative definite form.
 *
 * @param big_a  A = -M, positive definite
 * @param a0     pairing coordinates of the base characteristic vector
 * @param cap    level cap (integer-valued weights required)
 * @throws std::domain_error if weights are non-integral (non-characteristic
 *         base) or the form is not positive definite.
 */
inline SublevelComplex build_sublevel(const IntMat& big_a, const CharVec& a0, const Rat& cap) {
    SublevelComplex cx;
    cx.s = big_a.rows();
    cx.cap = to_ll(floor_rat(cap));
    std::vector<std::pair<std::vector<Int>, long long>> found;
    enumerate_sublevel(big_a, a0, cap, [&](const std::vector<Int>& u, const Rat& w) {
        if (!is_integer(w))
            throw std::domain_error("build_sublevel: non-integral weight (base not characteristic)");
        found.emplace_back(u, to_ll(to_int(w)));
    });
    std::sort(found.begin(), found.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    for (auto& [u, w] : found) {
        cx.pts.push_back(u);
        cx.wpt.push_back(w);
    }
    finalize_complex(cx);
    return cx;
}

/**
 * @brief Sublevel complex cut to the box [-radius, radius]^s (any form).
 *
 * Contains exactly the points of the box with W <= cap; cubes leaving the
 * box are absent.  Used for compactly supported cohomology of indefinite
 * forms via the pair (S cut to the box, cells on the box boundary).
 */
inline SublevelComplex build_sublevel_box(const IntMat& big_a, const CharVec& a0, const Rat& cap,
                                          long radius) {
    const std::size_t s = big_a.rows();
    if (radius < 0) throw std::invalid_argument("build_sublevel_box: negative radius");
    double est = 1;
    for (std::size_t i = 0; i < s; ++i) est *= double(2 * radius + 1);
    if (est > 2e7) throw std::domain_error("build_sublevel_box: box too large");
    SublevelComplex cx;
    cx.s = s;
    cx.cap = to_ll(floor_rat(cap));
    cx.boxed = true;
    cx.radius = radius;
    std::vector<Int> u(s, Int(-radius));
    const long side = 2 * radius + 1;
    long total = 1;
    for (std::size_t i = 0; i < s; ++i) total *= side;
    for (long code = 0; code < total; ++code) {
        long c = code;
        for (std::size_t i = 0; i < s; ++i) {
            u[i] = Int(c % side - radius);
            c /= side;
        }
        Rat w = point_weight(big_a, a0, u);
        if (w > cap) continue;
        if (!is_integer(w))
            throw std::domain_error("build_sublevel_box: non-integral weight");
        cx.pts.push_back(u);
        cx.wpt.push_back(to_ll(to_int(w)));
    }
    // Sort points lexicographically, carrying weights along.
    std::vector<std::size_t> order(cx.pts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return cx.pts[x] < cx.pts[y]; });
    std::vector<std::vector<Int>> pts2;
    std::vector<long long> w2;
    for (std::size_t i : order) {
        pts2.push_back(cx.pts[i]);
        w2.push_back(cx.wpt[i]);
    }
    cx.pts = std::move(pts2);
    cx.wpt = std::move(w2);
    finalize_complex(cx);
    return cx;
}

}  // namespace latcoh

#endif  // LATCOH_CUBES_HPP
