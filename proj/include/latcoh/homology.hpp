// SPDX-License-Identifier: MIT
#ifndef LATCOH_HOMOLOGY_HPP
#define LATCOH_HOMOLOGY_HPP

/**
 * @file homology.hpp
 * @brief Integral (co)homology of cubical sublevel complexes.
 *
 * The input is a SublevelComplex together with a level and an optional
 * relative structure (a subcomplex A whose cells are dropped): either no
 * subcomplex, the slice { u_j = c } used by relative towers, or the cells
 * on the boundary of the enclosing box used for compactly supported
 * cohomology of indefinite forms.
 *
 * Pipeline: free-face collapses shrink closed complexes without changing
 * the homotopy type (in a cubical complex a cell with exactly one
 * codimension-one coface is automatically a free face, because any higher
 * coface would contribute a second one through the cube face diamond);
 * the remaining boundary matrices are reduced by sparse eliminations on
 * +-1 pivots, which are unimodular and preserve the Smith normal form; a
 * dense Smith normal form of the small remainder yields ranks and torsion.
 *
 * Cohomology is read off by universal coefficients: rank H^q = rank H_q
 * and torsion H^q = torsion H_{q-1} (cellular chain groups are free and
 * all complexes are finite).
 *
 * The same file provides H_0 persistence over the weight filtration (the
 * interval structure of the degree-zero tower) and, for small complexes,
 * explicit cocycle bases with level-to-level restriction matrices.
 */

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "latcoh/cubes.hpp"
#include "latcoh/matrix.hpp"

namespace latcoh {

/** @brief A cell of a SublevelComplex: base point index plus direction mask. */
struct CellRef {
    std::uint32_t point = 0;
    std::uint32_t mask = 0;
    bool operator==(const CellRef& o) const { return point == o.point && mask == o.mask; }
    bool operator<(const CellRef& o) const {
        return point != o.point ? point < o.point : mask < o.mask;
    }
};

/** @brief Which subcomplex A is removed when computing relative homology. */
enum class RelMode {
    None,         ///< absolute homology of the level subcomplex
    Slice,        ///< A = cells lying in the hyperplane u_j = c
    BoxBoundary,  ///< A = cells on the boundary of the enclosing box
};

/** @brief A level subcomplex of a SublevelComplex with an optional removed part. */
struct ComplexView {
    const SublevelComplex* cx = nullptr;
    long long level = 0;
    RelMode rel = RelMode::None;
    std::size_t slice_dir = 0;  ///< for RelMode::Slice
    Int slice_val = 0;          ///< for RelMode::Slice

    /** @brief Cell lies in the level subcomplex S (including A-cells). */
    bool in_s(std::size_t p, std::uint32_t mask) const {
        return cx->cube_present(p, mask) && cx->cube_w(p, mask) <= level;
    }

    /** @brief Cell belongs to the removed subcomplex A. */
    bool in_a(std::size_t p, std::uint32_t mask) const {
        switch (rel) {
            case RelMode::None:
                return false;
            case RelMode::Slice:
                return ((mask >> slice_dir) & 1u) == 0 && cx->pts[p][slice_dir] == slice_val;
            case RelMode::BoxBoundary: {
                if (!cx->boxed) throw std::logic_error("BoxBoundary view on unboxed complex");
                for (std::size_t j = 0; j < cx->s; ++j) {
                    if ((mask >> j) & 1u) continue;
                    if (cx->pts[p][j] == cx->radius || cx->pts[p][j] == -cx->radius) return true;
                }
                return false;
            }
        }
        return false;
    }

    /** @brief Cell contributes to the (relative) chain complex. */
    bool alive(std::size_t p, std::uint32_t mask) const {
        return in_s(p, mask) && !in_a(p, mask);
    }
};

/** @brief Live cells of a view, grouped by dimension, in deterministic order. */
inline std::vector<std::vector<CellRef>> live_cells(const ComplexView& v) {
    const SublevelComplex& cx = *v.cx;
    std::vector<std::vector<CellRef>> out(cx.s + 1);
    for (std::size_t p = 0; p < cx.pts.size(); ++p)
        for (std::uint32_t mask = 0; mask < cx.mask_count(); ++mask)
            if (v.alive(p, mask))
                out[std::size_t(__builtin_popcount(mask))].push_back(
                    {std::uint32_t(p), mask});
    return out;
}

/** @brief Sparse integer matrix stored by columns. */
struct SparseMat {
    std::size_t rows = 0, cols = 0;
    std::vector<std::vector<std::pair<std::uint32_t, Int>>> col;
};

/**
 * @brief Boundary matrix from dimension q to q-1 of the cells listed.
 *
 * For the cube (u, I) with I = { j_1 < ... < j_q } the boundary is
 *     sum_l (-1)^l [ (u, I \ j_l)  -  (u + e_{j_l}, I \ j_l) ];
 * faces that are not alive in the view (relative cells) are dropped.
 * The index maps must cover all live cells of both dimensions.
 */
inline SparseMat boundary_sparse(const ComplexView& v,
                                 const std::vector<CellRef>& cells_q,
                                 const std::vector<CellRef>& cells_qm1) {
    const SublevelComplex& cx = *v.cx;
    std::map<CellRef, std::uint32_t> row_of;
    for (std::uint32_t i = 0; i < cells_qm1.size(); ++i) row_of[cells_qm1[i]] = i;
    SparseMat m;
    m.rows = cells_qm1.size();
    m.cols = cells_q.size();
    m.col.resize(m.cols);
    for (std::size_t c = 0; c < cells_q.size(); ++c) {
        const auto [p, mask] = cells_q[c];
        int l = 0;
        for (std::size_t j = 0; j < cx.s; ++j) {
            if (!((mask >> j) & 1u)) continue;
            ++l;
            const int sign = (l % 2 == 0) ? 1 : -1;
            const std::uint32_t rest = mask ^ (1u << j);
            auto add = [&](std::size_t pp, int coef) {
                if (!v.alive(pp, rest)) return;
                auto it = row_of.find({std::uint32_t(pp), rest});
                if (it == row_of.end())
                    throw std::logic_error("boundary_sparse: face not indexed");
                m.col[c].emplace_back(it->second, Int(coef));
            };
            add(p, sign);
            const std::int64_t top = cx.nbr[p][j];
            if (top >= 0) add(std::size_t(top), -sign);
        }
        std::sort(m.col[c].begin(), m.col[c].end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    return m;
}

/** @brief Rank and invariant factors (those > 1) of an integer matrix. */
struct RankFactors {
    long long rank = 0;
    std::vector<Int> factors;
};

/**
 * @brief Exact rank and invariant factors of a sparse integer matrix.
 *
 * Pivots on +-1 entries first (unimodular row/column eliminations, each
 * contributing an invariant factor 1), then runs a dense Smith normal form
 * on whatever remains.
 */
inline RankFactors integer_rank_factors(const SparseMat& m0) {
    RankFactors out;
    // Column-major working copy with row occupancy lists.
    std::vector<std::map<std::uint32_t, Int>> cols(m0.cols);
    std::vector<std::map<std::uint32_t, char>> rows(m0.rows);
    for (std::uint32_t c = 0; c < m0.cols; ++c)
        for (const auto& [r, v] : m0.col[c])
            if (v != 0) {
                cols[c][r] = v;
                rows[r][c] = 1;
            }
    std::vector<char> col_dead(m0.cols, 0), row_dead(m0.rows, 0);

    for (;;) {
        // Find a unit pivot with the smallest Markowitz-style fill score.
        long long best_score = -1;
        std::uint32_t pr = 0, pc = 0;
        for (std::uint32_t c = 0; c < m0.cols; ++c) {
            if (col_dead[c]) continue;
            for (const auto& [r, v] : cols[c]) {
                if (!(v == 1 || v == -1)) continue;
                long long score =
                    (long long)(rows[r].size() - 1) * (long long)(cols[c].size() - 1);
                if (best_score < 0 || score < best_score) {
                    best_score = score;
                    pr = r;
                    pc = c;
                }
                if (best_score == 0) break;
            }
            if (best_score == 0) break;
        }
        if (best_score < 0) break;

        const Int piv = cols[pc][pr];  // +-1
        // Eliminate row pr from every other column holding it.
        std::vector<std::uint32_t> touched;
        for (const auto& [c2, ignored] : rows[pr])
            if (c2 != pc && !col_dead[c2]) touched.push_back(c2);
        for (std::uint32_t c2 : touched) {
            const Int factor = cols[c2][pr] / piv;
            for (const auto& [r, v] : cols[pc]) {
                if (r == pr) continue;
                Int& cell = cols[c2][r];
                const bool was = (cell != 0);
                cell -= factor * v;
                if (cell == 0) {
                    cols[c2].erase(r);
                    if (was) rows[r].erase(c2);
                } else if (!was) {
                    rows[r][c2] = 1;
                }
            }
            cols[c2].erase(pr);
            rows[pr].erase(c2);
        }
        // Retire the pivot row and column.
        for (const auto& [r, v] : cols[pc]) rows[r].erase(pc);
        cols[pc].clear();
        col_dead[pc] = 1;
        row_dead[pr] = 1;
        rows[pr].clear();
        ++out.rank;
    }

    // Dense remainder.
    std::vector<std::uint32_t> live_r, live_c;
    for (std::uint32_t r = 0; r < m0.rows; ++r)
        if (!row_dead[r] && !rows[r].empty()) live_r.push_back(r);
    for (std::uint32_t c = 0; c < m0.cols; ++c)
        if (!col_dead[c] && !cols[c].empty()) live_c.push_back(c);
    if (!live_r.empty() && !live_c.empty()) {
        if (live_r.size() > 3000 || live_c.size() > 3000)
            throw std::domain_error("integer_rank_factors: dense remainder too large");
        IntMat dense(live_r.size(), live_c.size());
        std::map<std::uint32_t, std::uint32_t> rpos;
        for (std::uint32_t i = 0; i < live_r.size(); ++i) rpos[live_r[i]] = i;
        for (std::uint32_t j = 0; j < live_c.size(); ++j)
            for (const auto& [r, v] : cols[live_c[j]]) dense(rpos[r], j) = v;
        SmithForm snf = smith_normal_form(dense);
        out.rank += (long long)snf.rank;
        for (std::size_t i = 0; i < snf.rank; ++i) {
            Int d = abs(Int(snf.d(i, i)));
            if (d > 1) out.factors.push_back(d);
        }
    }
    std::sort(out.factors.begin(), out.factors.end());
    return out;
}

/** @brief Integral homology of a (relative) level complex. */
struct HomologyResult {
    std::vector<long long> rank;            ///< rank of H_q, q = 0..s
    std::vector<std::vector<Int>> torsion;  ///< torsion of H_q (factors of d_{q+1})
    long long cells = 0;                    ///< live cells before collapsing
    long long cells_collapsed = 0;          ///< live cells after collapsing

    long long coh_rank(std::size_t q) const { return q < rank.size() ? rank[q] : 0; }
    /** @brief Torsion of H^q = torsion of H_{q-1} (universal coefficients). */
    std::vector<Int> coh_torsion(std::size_t q) const {
        if (q == 0 || q - 1 >= torsion.size()) return {};
        return torsion[q - 1];
    }
    bool reduced_trivial() const {
        if (rank.empty() || rank[0] != 1) return false;
        for (std::size_t q = 1; q < rank.size(); ++q)
            if (rank[q] != 0) return false;
        for (const auto& t : torsion)
            if (!t.empty()) return false;
        return true;
    }
    bool same_as(const HomologyResult& o) const { return rank == o.rank && torsion == o.torsion; }
};

namespace detail {

/**
 * @brief Free-face collapsing on a level complex or pair.
 *
 * Kills pairs (a, b) where the live cell a has exactly one live
 * codimension-one coface b.  Valid whenever the dropped cells form a
 * subcomplex closed under taking faces, which holds for every view mode:
 * absolute views drop nothing, slice views drop the cells spanned inside a
 * coordinate hyperplane, box views drop the cells resting on the box walls.
 * Closure gives the two facts the collapse relies on: a live cell's cofaces
 * inside the level set are live (a dropped coface would force the cell
 * itself to be dropped), and the cubical diamond property then guarantees
 * that the unique live coface of a free face has no live cofaces of its
 * own, so removing the pair is an elementary collapse of the (relative)
 * chain complex.
 */
inline void collapse_free_faces(const ComplexView& v,
                                std::vector<std::vector<CellRef>>& cells,
                                std::vector<std::vector<char>>& alive) {
    const SublevelComplex& cx = *v.cx;
    const std::size_t masks = cx.mask_count();
    // Dense per-(point,mask) arrays: local cell order within live cells.
    std::vector<std::vector<std::int32_t>> idx(
        cx.pts.size(), std::vector<std::int32_t>(masks, -1));
    for (std::size_t q = 0; q < cells.size(); ++q)
        for (std::size_t i = 0; i < cells[q].size(); ++i)
            idx[cells[q][i].point][cells[q][i].mask] = (std::int32_t)i;

    auto is_alive = [&](std::size_t p, std::uint32_t mask) {
        std::int32_t i = idx[p][mask];
        if (i < 0) return false;
        return alive[std::size_t(__builtin_popcount(mask))][std::size_t(i)] != 0;
    };
    auto coface_scan = [&](std::size_t p, std::uint32_t mask, auto&& fn) {
        for (std::size_t j = 0; j < cx.s; ++j) {
            if ((mask >> j) & 1u) continue;
            const std::uint32_t up = mask | (1u << j);
            if (is_alive(p, up)) fn(p, up);
            const std::int64_t back = cx.rnbr[p][j];
            if (back >= 0 && is_alive(std::size_t(back), up)) fn(std::size_t(back), up);
        }
    };
    auto face_scan = [&](std::size_t p, std::uint32_t mask, auto&& fn) {
        for (std::size_t j = 0; j < cx.s; ++j) {
            if (!((mask >> j) & 1u)) continue;
            const std::uint32_t down = mask ^ (1u << j);
            if (is_alive(p, down)) fn(p, down);
            const std::int64_t top = cx.nbr[p][j];
            if (top >= 0 && is_alive(std::size_t(top), down)) fn(std::size_t(top), down);
        }
    };

    // Coface counts and the work queue.
    std::vector<std::vector<std::uint16_t>> nco(cells.size());
    std::deque<CellRef> queue;
    for (std::size_t q = 0; q < cells.size(); ++q) {
        nco[q].assign(cells[q].size(), 0);
        for (std::size_t i = 0; i < cells[q].size(); ++i) {
            std::uint16_t cnt = 0;
            coface_scan(cells[q][i].point, cells[q][i].mask,
                        [&](std::size_t, std::uint32_t) { ++cnt; });
            nco[q][i] = cnt;
            if (cnt == 1) queue.push_back(cells[q][i]);
        }
    }
    auto kill = [&](std::size_t p, std::uint32_t mask) {
        const std::size_t q = std::size_t(__builtin_popcount(mask));
        alive[q][std::size_t(idx[p][mask])] = 0;
        face_scan(p, mask, [&](std::size_t fp, std::uint32_t fmask) {
            const std::size_t fq = q - 1;
            std::uint16_t& c = nco[fq][std::size_t(idx[fp][fmask])];
            if (c > 0) --c;
            if (c == 1) queue.push_back({std::uint32_t(fp), fmask});
        });
    };
    while (!queue.empty()) {
        CellRef a = queue.front();
        queue.pop_front();
        const std::size_t q = std::size_t(__builtin_popcount(a.mask));
        if (!is_alive(a.point, a.mask)) continue;
        if (nco[q][std::size_t(idx[a.point][a.mask])] != 1) continue;
        // Find the unique live coface and collapse the pair.
        bool done = false;
        coface_scan(a.point, a.mask, [&](std::size_t bp, std::uint32_t bmask) {
            if (done) return;
            done = true;
            kill(bp, bmask);
            kill(a.point, a.mask);
        });
    }
}

}  // namespace detail

/**
 * @brief Integral homology of a level complex or pair.
 *
 * @param v        the level view (absolute or relative)
 * @param collapse run the free-face pre-pass (absolute views only)
 */
inline HomologyResult homology_of_view(const ComplexView& v, bool collapse = true) {
    const SublevelComplex& cx = *v.cx;
    std::vector<std::vector<CellRef>> cells = live_cells(v);
    std::vector<std::vector<char>> alive(cells.size());
    for (std::size_t q = 0; q < cells.size(); ++q) alive[q].assign(cells[q].size(), 1);

    HomologyResult res;
    for (const auto& c : cells) res.cells += (long long)c.size();
    if (collapse && res.cells > 0) detail::collapse_free_faces(v, cells, alive);

    std::vector<std::vector<CellRef>> live(cells.size());
    for (std::size_t q = 0; q < cells.size(); ++q)
        for (std::size_t i = 0; i < cells[q].size(); ++i)
            if (alive[q][i]) live[q].push_back(cells[q][i]);
    for (const auto& c : live) res.cells_collapsed += (long long)c.size();

    // After collapsing, faces outside the live set would break boundary
    // assembly.  Collapsing preserves the invariant that every surviving
    // cell's undropped faces survive (see collapse_free_faces); the dangling
    // check below is the run-time tripwire for that invariant.
    const std::size_t s = cx.s;
    std::vector<RankFactors> del(s + 2);  // del[q]: boundary C_q -> C_{q-1}
    for (std::size_t q = 1; q <= s; ++q) {
        if (live[q].empty()) continue;
        SparseMat m;
        m.rows = live[q - 1].size();
        m.cols = live[q].size();
        m.col.resize(m.cols);
        std::map<CellRef, std::uint32_t> row_of;
        for (std::uint32_t i = 0; i < live[q - 1].size(); ++i) row_of[live[q - 1][i]] = i;
        for (std::size_t c = 0; c < live[q].size(); ++c) {
            const auto [p, mask] = live[q][c];
            int l = 0;
            for (std::size_t j = 0; j < s; ++j) {
                if (!((mask >> j) & 1u)) continue;
                ++l;
                const int sign = (l % 2 == 0) ? 1 : -1;
                const std::uint32_t rest = mask ^ (1u << j);
                auto add = [&](std::size_t pp, int coef) {
                    CellRef f{std::uint32_t(pp), rest};
                    if (!v.alive(pp, rest)) return;        // relative: dropped face
                    auto it = row_of.find(f);
                    if (it == row_of.end()) {
                        // Face was collapsed away; cannot happen on closed
                        // complexes (collapse removes cofaces with faces).
                        throw std::logic_error("homology_of_view: dangling face");
                    }
                    m.col[c].emplace_back(it->second, Int(coef));
                };
                add(p, sign);
                const std::int64_t top = cx.nbr[p][j];
                if (top >= 0 && v.alive(std::size_t(top), rest)) add(std::size_t(top), -sign);
            }
        }
        del[q] = integer_rank_factors(m);
    }

    res.rank.assign(s + 1, 0);
    res.torsion.assign(s + 1, {});
    for (std::size_t q = 0; q <= s; ++q) {
        const long long nq = (long long)live[q].size();
        const long long rq = del[q].rank;          // rank of boundary out of C_q
        const long long rq1 = del[q + 1].rank;     // rank of boundary into C_q
        res.rank[q] = nq - rq - rq1;
        res.torsion[q] = del[q + 1].factors;
    }
    return res;
}

/** @brief Convenience: homology of the full complex at a level. */
inline HomologyResult level_homology(const SublevelComplex& cx, long long level,
                                     bool collapse = true) {
    ComplexView v;
    v.cx = &cx;
    v.level = level;
    return homology_of_view(v, collapse);
}

/** @brief One bar of the degree-zero persistence over the weight filtration. */
struct H0Interval {
    long long birth = 0;        ///< weight at which the component appears
    long long death = 0;        ///< weight at which it merges (exclusive)
    bool essential = false;     ///< never merges (death unused)
};

/**
 * @brief Interval decomposition of H_0 across all levels of the complex.
 *
 * Standard union-find persistence: vertices enter at their weight, edges
 * at the maximum of their endpoint weights; on a merge the younger
 * component dies (elder rule, ties broken by the smaller minimal point
 * index, which is deterministic because points are sorted).  Zero-length
 * bars are dropped.
 */
inline std::vector<H0Interval> h0_persistence(const SublevelComplex& cx) {
    const std::size_t n = cx.pts.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    // birth weight and oldest point per component root
    std::vector<long long> birth(cx.wpt);
    std::vector<std::size_t> oldest(n);
    std::iota(oldest.begin(), oldest.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    struct Edge {
        long long w;
        std::size_t a, b;
    };
    std::vector<Edge> edges;
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t j = 0; j < cx.s; ++j) {
            const std::int64_t t = cx.nbr[p][j];
            if (t < 0) continue;
            if (!cx.cube_present(p, 1u << j)) continue;
            edges.push_back({std::max(cx.wpt[p], cx.wpt[std::size_t(t)]), p, std::size_t(t)});
        }
    std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
        if (x.w != y.w) return x.w < y.w;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });

    std::vector<H0Interval> bars;
    for (const Edge& e : edges) {
        std::size_t ra = find(e.a), rb = find(e.b);
        if (ra == rb) continue;
        // Younger (larger birth; tie: larger oldest index) dies.
        bool a_elder = birth[ra] != birth[rb] ? birth[ra] < birth[rb] : oldest[ra] < oldest[rb];
        std::size_t keep = a_elder ? ra : rb, drop = a_elder ? rb : ra;
        if (e.w > birth[drop]) bars.push_back({birth[drop], e.w, false});
        parent[drop] = keep;
    }
    for (std::size_t p = 0; p < n; ++p)
        if (find(p) == p) bars.push_back({birth[p], 0, true});
    std::sort(bars.begin(), bars.end(), [](const H0Interval& x, const H0Interval& y) {
        if (x.essential != y.essential) return x.essential > y.essential;
        if (x.birth != y.birth) return x.birth < y.birth;
        return x.death < y.death;
    });
    return bars;
}

/**
 * @brief Explicit cocycle basis of H^q at one level (free part).
 *
 * Built without collapsing, so coordinates refer to all live q-cells in
 * deterministic order.  The free part of H^q is presented by `free_gens`
 * (rows = generators, columns = q-cells): integer cocycles whose classes
 * form a basis modulo torsion and coboundaries.
 */
struct CocycleBasis {
    std::vector<CellRef> cells;                  ///< q-cells, fixed order
    std::vector<std::vector<Int>> kernel;        ///< basis of cocycles (saturated)
    IntMat u = IntMat(0, 0);                     ///< SNF row transform on kernel coords
    std::vector<Int> inv;                        ///< invariant factors of the coboundary image
    std::size_t rank = 0;                        ///< rank of the image inside the kernel
    std::vector<std::vector<Int>> free_gens;     ///< representatives of a free basis

    std::size_t free_rank() const { return kernel.size() - rank; }

    /**
     * @brief Coordinates of a cocycle's class in the free basis (mod torsion).
     */
    std::vector<Int> project(const std::vector<Int>& cocycle) const {
        // Solve kernel coords, then apply u and keep the free tail.
        const std::size_t n = cells.size(), k = kernel.size();
        IntMat z(n, k);
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t i = 0; i < n; ++i) z(i, j) = kernel[j][i];
        std::vector<Rat> b(n);
        for (std::size_t i = 0; i < n; ++i) b[i] = Rat(cocycle[i]);
        bool ok = false;
        std::vector<Rat> x = solve_q(z, b, &ok);
        if (!ok) throw std::domain_error("project: vector is not a cocycle");
        std::vector<Int> xi(k);
        for (std::size_t i = 0; i < k; ++i) {
            if (!is_integer(x[i]))
                throw std::logic_error("project: non-integer kernel coordinates");
            xi[i] = to_int(x[i]);
        }
        std::vector<Int> y(k, 0);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) y[i] += u(i, j) * xi[j];
        return std::vector<Int>(y.begin() + (std::ptrdiff_t)rank, y.end());
    }
};

/**
 * @brief Cocycle basis of H^q of a level view (use on small complexes only).
 */
inline CocycleBasis cocycle_basis(const ComplexView& v, std::size_t q) {
    const std::size_t s = v.cx->s;
    std::vector<std::vector<CellRef>> cells = live_cells(v);
    CocycleBasis out;
    out.cells = cells[q];
    const std::size_t n = out.cells.size();

    // delta_q = transpose of the boundary from (q+1)-cells.
    SparseMat bnd;
    if (q + 1 <= s)
        bnd = boundary_sparse(v, cells[q + 1], cells[q]);
    else
        bnd = SparseMat{n, 0, {}};
    IntMat delta(bnd.cols == 0 ? 0 : bnd.cols, n);
    if (bnd.cols > 0) {
        delta = IntMat(bnd.cols, n);
        for (std::size_t c = 0; c < bnd.cols; ++c)
            for (const auto& [r, val] : bnd.col[c]) delta(c, r) = val;
    }
    // Kernel of delta: saturated basis of cocycles.
    std::vector<std::vector<Int>> ker;
    if (delta.rows() == 0) {
        ker.resize(n, std::vector<Int>(n, 0));
        for (std::size_t i = 0; i < n; ++i) ker[i][i] = 1;
    } else {
        ker = kernel_basis(delta);
    }
    out.kernel = ker;
    const std::size_t k = ker.size();

    // Image of delta_{q-1} expressed in kernel coordinates.
    std::vector<std::vector<Int>> image_cols;
    if (q >= 1 && !cells[q - 1].empty() && n > 0) {
        SparseMat down = boundary_sparse(v, cells[q], cells[q - 1]);
        // delta_{q-1}(e_i) over q-cells is row i of the boundary matrix.
        std::vector<std::vector<Int>> rows_of_down(cells[q - 1].size(),
                                                   std::vector<Int>(n, 0));
        std::vector<char> nz(cells[q - 1].size(), 0);
        for (std::size_t c = 0; c < down.cols; ++c)
            for (const auto& [r, val] : down.col[c]) {
                rows_of_down[r][c] = val;
                if (val != 0) nz[r] = 1;
            }
        for (std::size_t i = 0; i < rows_of_down.size(); ++i)
            if (nz[i]) image_cols.push_back(std::move(rows_of_down[i]));
    }
    IntMat zmat(n, k);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < n; ++i) zmat(i, j) = ker[j][i];
    IntMat xmat(k, image_cols.size());
    for (std::size_t c = 0; c < image_cols.size(); ++c) {
        std::vector<Rat> b(n);
        for (std::size_t i = 0; i < n; ++i) b[i] = Rat(image_cols[c][i]);
        bool ok = false;
        std::vector<Rat> x = solve_q(zmat, b, &ok);
        if (!ok) throw std::logic_error("cocycle_basis: coboundary not a cocycle");
        for (std::size_t i = 0; i < k; ++i) {
            if (!is_integer(x[i]))
                throw std::logic_error("cocycle_basis: non-integer coboundary coords");
            xmat(i, c) = to_int(x[i]);
        }
    }
    SmithForm snf = smith_normal_form(xmat);
    out.u = snf.u;
    out.rank = snf.rank;
    for (std::size_t i = 0; i < snf.rank; ++i) out.inv.push_back(abs(Int(snf.d(i, i))));

    // Free generators: kernel combinations given by rows rank..k-1 of U^{-1};
    // equivalently columns of U^{-1}.  Compute U^{-1} exactly.
    if (k > 0) {
        MatQ uin = inverse_q(out.u);
        for (std::size_t g = out.rank; g < k; ++g) {
            std::vector<Int> coef(k);
            for (std::size_t i = 0; i < k; ++i) {
                if (!is_integer(uin[i][g]))
                    throw std::logic_error("cocycle_basis: U not unimodular");
                coef[i] = to_int(uin[i][g]);
            }
            std::vector<Int> gen(n, 0);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t t = 0; t < n; ++t) gen[t] += coef[i] * ker[i][t];
            out.free_gens.push_back(std::move(gen));
        }
    }
    return out;
}

/**
 * @brief Matrix of the restriction H^q(level hi) -> H^q(level lo), lo <= hi,
 *        on free parts (torsion discarded).
 *
 * Columns = free generators upstairs; rows = free coordinates downstairs.
 * This is the degree-lowering module action between adjacent levels.
 */
inline IntMat restriction_matrix(const SublevelComplex& cx, std::size_t q, long long hi,
                                 long long lo) {
    if (lo > hi) throw std::invalid_argument("restriction_matrix: lo > hi");
    ComplexView vh, vl;
    vh.cx = &cx;
    vh.level = hi;
    vl.cx = &cx;
    vl.level = lo;
    CocycleBasis bh = cocycle_basis(vh, q);
    CocycleBasis bl = cocycle_basis(vl, q);
    std::map<CellRef, std::size_t> lo_index;
    for (std::size_t i = 0; i < bl.cells.size(); ++i) lo_index[bl.cells[i]] = i;
    IntMat m(bl.free_rank(), bh.free_rank());
    for (std::size_t c = 0; c < bh.free_gens.size(); ++c) {
        std::vector<Int> restricted(bl.cells.size(), 0);
        for (std::size_t i = 0; i < bh.cells.size(); ++i) {
            auto it = lo_index.find(bh.cells[i]);
            if (it != lo_index.end()) restricted[it->second] = bh.free_gens[c][i];
        }
        std::vector<Int> coords = bl.project(restricted);
        for (std::size_t r = 0; r < coords.size(); ++r) m(r, c) = coords[r];
    }
    return m;
}

}  // namespace latcoh

#endif  // LATCOH_HOMOLOGY_HPP
