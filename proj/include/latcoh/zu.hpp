// SPDX-License-Identifier: MIT
#ifndef LATCOH_ZU_HPP
#define LATCOH_ZU_HPP

/**
 * @file zu.hpp
 * @brief Graded Z[U]-modules assembled from towers of sublevel-set cohomology.
 *
 * For a class of characteristic vectors on a plumbing graph the sublevel
 * sets S_m of the weight function form an increasing family of cube
 * complexes, and the direct sum over m of H^q(S_m) is a graded module over
 * Z[U], with U acting as the restriction H^q(S_{m+1}) -> H^q(S_m), a map of
 * degree -2.
 *
 * Gradings.  The summand H^q(S_m) sits in raw degree 2*(q0 + m), where q0
 * is the weight of the representative at the lattice origin; this equals
 * twice the weight of k + 2u at any point u of level m and therefore does
 * not depend on the chosen representative.  The canonical grading adds
 * (K^2 + s)/4, with K the canonical characteristic vector.  Every module
 * carries both: degrees in `levels` are raw, `canonical_shift` converts.
 *
 * Negative definite forms.  Levels are computed from the minimum weight of
 * the class upward until the reduced cohomology of two consecutive sublevel
 * sets vanishes; past that point the tower repeats a single Z in degree
 * zero and contributes the infinite summand T+_d = Z[U,U^-1]/U.Z[U] whose
 * lowest degree is the d-invariant d = 2 min q.  The detected start of the
 * tail is cross-checked against the d-invariant obtained independently
 * from the minimal representative; a mismatch is a hard error.
 *
 * Indefinite nondegenerate forms.  The lattice is cut to a box [-r, r]^s
 * and each level contributes the cohomology of the pair (S_m cut to the
 * box, its intersection with the box boundary), a model for compactly
 * supported cohomology.  For large m the pair is the full (box, boundary),
 * giving an eventual Z in cohomological degree s: a T+ tail.  The reported
 * groups must agree between radii r and r+2 to be marked stable.
 */

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "latcoh/charlat.hpp"
#include "latcoh/cubes.hpp"
#include "latcoh/graph.hpp"
#include "latcoh/homology.hpp"
#include "latcoh/matrix.hpp"
#include "latcoh/rational.hpp"

namespace latcoh {

/** @brief Cohomology of one sublevel set in a tower. */
struct LevelGroup {
    long long level = 0;                    ///< weight value m defining S_m
    Rat degree;                             ///< raw module degree 2*(q0 + m)
    std::vector<long long> rank;            ///< rank of H^q, q = 0..s
    std::vector<std::vector<Int>> torsion;  ///< torsion factors of H^q, q = 0..s
};

/** @brief Row shape of a level whose reduced cohomology vanishes. */
inline bool reduced_trivial_row(const LevelGroup& r) {
    if (r.rank.empty() || r.rank[0] != 1) return false;
    for (std::size_t q = 1; q < r.rank.size(); ++q)
        if (r.rank[q] != 0) return false;
    for (const auto& t : r.torsion)
        if (!t.empty()) return false;
    return true;
}

/** @brief Row with no cohomology at all (empty or fully cancelled pair). */
inline bool zero_row(const LevelGroup& r) {
    for (long long v : r.rank)
        if (v != 0) return false;
    for (const auto& t : r.torsion)
        if (!t.empty()) return false;
    return true;
}

/** @brief One infinite summand T+_{base} living in cohomological degree q. */
struct TailSummand {
    std::size_t q = 0;  ///< cohomological degree carrying the tail
    Rat base;           ///< lowest raw module degree of the tail

    bool operator==(const TailSummand& o) const { return q == o.q && base == o.base; }
};

/** @brief One finite cyclic summand Z[U]/(U^length) of the degree-zero part. */
struct H0Summand {
    Rat base;              ///< lowest raw module degree
    long long length = 0;  ///< number of U-steps: Z-rank of the summand

    bool operator==(const H0Summand& o) const { return base == o.base && length == o.length; }
};

/** @brief Splitting of the degree-zero part into a tail and finite pieces. */
struct H0Decomposition {
    std::vector<TailSummand> tails;
    std::vector<H0Summand> finite;
};

/**
 * @brief A graded Z[U]-module presented by a tower of level cohomologies.
 *
 * `levels` lists consecutive weight levels with their cohomology; `tails`
 * records the detected infinite summands, whose contribution repeats
 * verbatim beyond the listed range.  For negative definite forms the
 * listed range starts at the minimal weight of the class and `d` is the
 * d-invariant in the raw grading; `h0_bars` holds the persistence
 * intervals of the degree-zero tower used by decompose_h0.  When
 * `has_umatrices` is set, `umat[i][q]` is the matrix of the restriction
 * H^q(S_{levels[i+1]}) -> H^q(S_{levels[i]}) on free parts, i.e. the
 * U-action between consecutive levels in deterministic bases.
 */
struct GradedZUModule {
    std::size_t s = 0;                ///< lattice rank; H^q indexed q = 0..s
    bool negative_definite = false;   ///< tower mode (ellipsoid sublevels)
    bool boxed = false;               ///< box-pair mode for indefinite forms
    long radius = 0;                  ///< box radius when boxed
    bool stabilized = false;          ///< tail certified within the computed data
    long long stable_from = 0;        ///< first level of the repeating tail
    CharVec representative;           ///< representative the levels refer to
    std::optional<Int> class_id;      ///< class id in the residue enumeration
    Rat q0;                           ///< weight of the representative
    Rat canonical_shift;              ///< (K^2 + s)/4; raw + shift = canonical
    std::optional<Rat> d;             ///< raw d-invariant (negative definite)
    std::vector<LevelGroup> levels;   ///< consecutive levels, ascending
    std::vector<TailSummand> tails;   ///< infinite summands
    std::vector<H0Interval> h0_bars;  ///< degree-zero persistence intervals
    bool has_umatrices = false;
    std::vector<std::vector<IntMat>> umat;  ///< umat[i][q]: level i+1 -> level i

    /** @brief d-invariant in the canonical grading. */
    Rat d_canonical() const {
        if (!d) throw std::domain_error("d_canonical: no d-invariant (indefinite form?)");
        return *d + canonical_shift;
    }

    /** @brief Convert a raw degree to the canonical grading. */
    Rat to_canonical(const Rat& raw_degree) const { return raw_degree + canonical_shift; }

    /**
     * @brief Z-rank of the reduced part of H^q: level ranks minus the tails.
     *
     * Sums rank H^q(S_m) over the listed levels, subtracting one for every
     * tail in degree q that has started at or below the level.  Beyond the
     * listed range tails account for everything once `stabilized` holds.
     */
    long long reduced_rank(std::size_t q) const {
        long long total = 0;
        for (const auto& row : levels) {
            long long r = q < row.rank.size() ? row.rank[q] : 0;
            for (const auto& t : tails)
                if (t.q == q && row.degree >= t.base) r -= 1;
            total += r;
        }
        return total;
    }

    /** @brief Total torsion subgroup count over levels in H^q (reported, not reduced). */
    long long torsion_count(std::size_t q) const {
        long long total = 0;
        for (const auto& row : levels)
            if (q < row.torsion.size()) total += (long long)row.torsion[q].size();
        return total;
    }
};

/** @brief Tower computation controls. */
struct TowerOptions {
    /// Compute exactly this many levels from the minimum and skip the
    /// stabilization search (negative definite mode).
    std::optional<long long> levels;
    /// Stabilization search gives up past this level.
    long long max_levels = 500;
    /// Also compute U-matrices between consecutive levels (small complexes).
    bool umatrices = false;
    /// Live-cell budget above which a U-matrix request is refused.
    std::size_t umatrix_cell_budget = 20000;
    /// First box radius tried for indefinite forms.
    long min_radius = 4;
    /// Largest box radius tried before giving up on radius stability.
    long max_radius = 12;
};

/**
 * @brief Validate a tower and derive degrees, tails and stabilization.
 *
 * Expects `s`, `negative_definite`, `boxed`, `representative`, `q0`,
 * `canonical_shift`, `levels` (and optionally `umat`) to be filled.
 * Degrees are recomputed from q0.  In negative definite mode the trailing
 * run of reduced-trivial rows certifies the tail T+ based at the lowest
 * degree, and `stabilized` requires at least two such rows.  In box mode
 * leading zero rows are dropped and the trailing run of rows equal to a
 * single Z in degree s becomes a T+ tail; radius stability is the caller's
 * responsibility and `stabilized` is left untouched.
 *
 * @throws std::invalid_argument on inconsistent shapes.
 * @throws std::logic_error if U-matrices on the trivial tail are not unit.
 */
inline GradedZUModule assemble(GradedZUModule m) {
    const std::size_t s = m.s;
    for (std::size_t i = 0; i < m.levels.size(); ++i) {
        LevelGroup& row = m.levels[i];
        if (row.rank.size() != s + 1 || row.torsion.size() != s + 1)
            throw std::invalid_argument("assemble: level row has wrong arity");
        if (i > 0 && m.levels[i - 1].level + 1 != row.level)
            throw std::invalid_argument("assemble: levels are not consecutive");
        row.degree = (m.q0 + Rat((long)row.level)) * 2;
    }
    if (m.has_umatrices) {
        if (m.umat.size() + 1 != m.levels.size())
            throw std::invalid_argument("assemble: U-matrix count mismatch");
        for (std::size_t i = 0; i < m.umat.size(); ++i) {
            if (m.umat[i].size() != s + 1)
                throw std::invalid_argument("assemble: U-matrix arity mismatch");
            for (std::size_t q = 0; q <= s; ++q)
                if ((long long)m.umat[i][q].rows() != m.levels[i].rank[q] ||
                    (long long)m.umat[i][q].cols() != m.levels[i + 1].rank[q])
                    throw std::invalid_argument("assemble: U-matrix shape mismatch");
        }
    }

    m.tails.clear();
    if (m.negative_definite) {
        if (m.levels.empty()) throw std::invalid_argument("assemble: empty tower");
        m.d = m.levels.front().degree;
        // Trailing run of reduced-trivial rows.
        std::size_t t = m.levels.size();
        while (t > 0 && reduced_trivial_row(m.levels[t - 1])) --t;
        const std::size_t run = m.levels.size() - t;
        m.stabilized = run >= 2;
        if (run > 0) {
            m.stable_from = m.levels[t].level;
            // On the trivial tail the restriction between rank-1 groups
            // must be an isomorphism.
            if (m.has_umatrices)
                for (std::size_t i = t; i + 1 < m.levels.size(); ++i) {
                    const IntMat& u = m.umat[i][0];
                    if (u.rows() != 1 || u.cols() != 1 || (u(0, 0) != 1 && u(0, 0) != -1))
                        throw std::logic_error("assemble: tail restriction is not unit");
                }
        }
        m.tails.push_back({0, *m.d});
    } else {
        // Drop leading zero rows; they carry no cohomology.
        std::size_t lead = 0;
        while (lead < m.levels.size() && zero_row(m.levels[lead])) ++lead;
        m.levels.erase(m.levels.begin(), m.levels.begin() + (long)lead);
        if (m.has_umatrices && lead > 0)
            m.umat.erase(m.umat.begin(), m.umat.begin() + (long)std::min(lead, m.umat.size()));
        // Trailing run of rows equal to a single Z in top degree s.
        auto top_row = [&](const LevelGroup& r) {
            if (!r.rank.empty() && r.rank[s] != 1) return false;
            for (std::size_t q = 0; q < s; ++q)
                if (r.rank[q] != 0) return false;
            for (const auto& tor : r.torsion)
                if (!tor.empty()) return false;
            return !r.rank.empty();
        };
        std::size_t t = m.levels.size();
        while (t > 0 && top_row(m.levels[t - 1])) --t;
        if (t < m.levels.size()) {
            m.stable_from = m.levels[t].level;
            m.tails.push_back({s, m.levels[t].degree});
        }
    }
    return m;
}

namespace detail {

/** @brief Level rows of a complex over an inclusive level range. */
inline std::vector<LevelGroup> level_rows(const SublevelComplex& cx, long long lo, long long hi,
                                          RelMode rel) {
    std::vector<LevelGroup> rows;
    for (long long mlev = lo; mlev <= hi; ++mlev) {
        ComplexView v;
        v.cx = &cx;
        v.level = mlev;
        v.rel = rel;
        HomologyResult h = homology_of_view(v);
        LevelGroup row;
        row.level = mlev;
        row.rank = h.rank;
        row.torsion.resize(cx.s + 1);
        for (std::size_t q = 0; q <= cx.s; ++q) row.torsion[q] = h.coh_torsion(q);
        rows.push_back(std::move(row));
    }
    return rows;
}

/** @brief Total live cell count of the full complex at one level. */
inline std::size_t live_cell_count(const SublevelComplex& cx, long long level) {
    ComplexView v;
    v.cx = &cx;
    v.level = level;
    std::size_t total = 0;
    for (const auto& cs : live_cells(v)) total += cs.size();
    return total;
}

/** @brief Negative definite tower: ellipsoid sublevels from the minimum up. */
inline GradedZUModule tower_negdef(const PlumbingGraph& g, const CharVec& kbar,
                                   const TowerOptions& opt) {
    const IntMat big_a = -g.intersection_form();
    const CharVec k0 = class_min(g, kbar);

    GradedZUModule m;
    m.s = g.size();
    m.negative_definite = true;
    m.representative = k0;
    m.class_id = CharClasses(g).class_of(k0);
    m.q0 = weight_q(g.intersection_form(), k0);
    m.canonical_shift = canonical_shift(g);

    long long cap = opt.levels ? std::max<long long>(*opt.levels - 1, 0) : 2;
    for (;;) {
        SublevelComplex cx = build_sublevel(big_a, k0, Rat((long)cap));
        std::vector<LevelGroup> rows = level_rows(cx, 0, cap, RelMode::None);

        // First index t with rows t..cap all reduced-trivial.
        std::size_t t = rows.size();
        while (t > 0 && reduced_trivial_row(rows[t - 1])) --t;

        const bool found = t + 2 <= rows.size();
        if (opt.levels || found) {
            if (!opt.levels) rows.resize(t + 2);  // keep exactly two trivial rows
            const long long top = rows.back().level;
            if (opt.umatrices) {
                const std::size_t cells = live_cell_count(cx, top);
                if (cells > opt.umatrix_cell_budget)
                    throw std::domain_error("lattice_cohomology: U-matrix cell budget exceeded");
                m.umat.clear();
                for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
                    std::vector<IntMat> per_q;
                    for (std::size_t q = 0; q <= m.s; ++q)
                        per_q.push_back(
                            restriction_matrix(cx, q, rows[i + 1].level, rows[i].level));
                    m.umat.push_back(std::move(per_q));
                }
                m.has_umatrices = true;
            }
            m.h0_bars = h0_persistence(cx);
            m.levels = std::move(rows);
            break;
        }
        if (cap >= opt.max_levels)
            throw std::runtime_error(
                "lattice_cohomology: tower did not stabilize within the level budget");
        cap = std::min<long long>(opt.max_levels, cap * 2);
    }
    return assemble(std::move(m));
}

/** @brief One boxed module at a fixed radius (indefinite forms). */
inline GradedZUModule tower_boxed_at(const PlumbingGraph& g, const CharVec& kbar, long radius,
                                     const TowerOptions& opt) {
    if (opt.umatrices)
        throw std::domain_error("lattice_cohomology: U-matrices unsupported in box mode");
    const IntMat big_a = -g.intersection_form();
    const std::size_t s = g.size();

    // Upper bound for the weight over the box, so every box point enters.
    Int bound = 0;
    for (std::size_t i = 0; i < s; ++i) bound += abs(kbar[i]);
    bound *= radius;
    Int quad = 0;
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) quad += abs(big_a(i, j));
    bound += quad * radius * radius;
    SublevelComplex cx = build_sublevel_box(big_a, kbar, Rat(bound) / 2, radius);

    long long lo = cx.min_weight();
    long long hi = lo;
    for (long long w : cx.wpt) hi = std::max(hi, w);

    GradedZUModule m;
    m.s = s;
    m.negative_definite = false;
    m.boxed = true;
    m.radius = radius;
    m.representative = kbar;
    m.class_id = CharClasses(g).class_of(kbar);
    m.q0 = weight_q(g.intersection_form(), kbar);
    m.canonical_shift = canonical_shift(g);
    m.levels = level_rows(cx, lo, hi, RelMode::BoxBoundary);
    return assemble(std::move(m));
}

/** @brief Group content used to compare boxed towers across radii. */
inline bool same_boxed_content(const GradedZUModule& a, const GradedZUModule& b) {
    if (a.tails != b.tails) return false;
    auto rows_of = [](const GradedZUModule& m) {
        std::vector<LevelGroup> rows;
        for (const auto& row : m.levels) {
            LevelGroup residual = row;
            for (const auto& t : m.tails)
                if (row.degree >= t.base) residual.rank[t.q] -= 1;
            if (!zero_row(residual)) rows.push_back(row);
        }
        return rows;
    };
    std::vector<LevelGroup> ra = rows_of(a), rb = rows_of(b);
    if (ra.size() != rb.size()) return false;
    for (std::size_t i = 0; i < ra.size(); ++i)
        if (ra[i].degree != rb[i].degree || ra[i].rank != rb[i].rank ||
            ra[i].torsion != rb[i].torsion)
            return false;
    return true;
}

/** @brief Indefinite driver: grow the box radius until the content repeats. */
inline GradedZUModule tower_boxed(const PlumbingGraph& g, const CharVec& kbar,
                                  const TowerOptions& opt) {
    GradedZUModule prev = tower_boxed_at(g, kbar, opt.min_radius, opt);
    for (long r = opt.min_radius + 2; r <= opt.max_radius; r += 2) {
        GradedZUModule cur = tower_boxed_at(g, kbar, r, opt);
        if (same_boxed_content(prev, cur)) {
            cur.stabilized = true;
            return cur;
        }
        prev = std::move(cur);
    }
    return prev;  // stabilized stays false: radius budget exhausted
}

}  // namespace detail

/**
 * @brief Lattice cohomology of the class of a characteristic vector.
 *
 * Negative definite forms use the tower of ellipsoid sublevel sets of the
 * minimal representative; indefinite nondegenerate forms use box pairs
 * with radius stabilization.  See GradedZUModule for the result layout.
 *
 * @throws std::domain_error on non-characteristic input or a degenerate
 *         intersection form.
 * @throws std::runtime_error if the negative definite tower fails to
 *         stabilize within the level budget.
 */
inline GradedZUModule lattice_cohomology(const PlumbingGraph& g, const CharVec& kbar,
                                         const TowerOptions& opt = {}) {
    if (!is_characteristic(g, kbar))
        throw std::domain_error("lattice_cohomology: vector is not characteristic");
    if (g.degenerate())
        throw std::domain_error("lattice_cohomology: degenerate intersection form");
    if (g.negative_definite()) return detail::tower_negdef(g, kbar, opt);
    return detail::tower_boxed(g, kbar, opt);
}

/** @brief Lattice cohomology of the class with the given residue id. */
inline GradedZUModule lattice_cohomology_class(const PlumbingGraph& g, const Int& class_id,
                                               const TowerOptions& opt = {}) {
    return lattice_cohomology(g, CharClasses(g).representative(class_id), opt);
}

/**
 * @brief Split the degree-zero part into T+_{d} and finite cyclic summands.
 *
 * Essential persistence intervals give tails, finite intervals [b, e) give
 * Z[U]/(U^{e-b}) based at raw degree 2*(q0 + b).  Exactly one essential
 * interval must exist and its base must equal the d-invariant; a mismatch
 * means the tower stabilization was wrong and raises an error.  A module
 * without persistence data (hand-assembled) decomposes only if its reduced
 * degree-zero rank vanishes.
 *
 * @throws std::domain_error unless negative definite and stabilized.
 * @throws std::runtime_error if the detected tail start disagrees with d.
 */
inline H0Decomposition decompose_h0(const GradedZUModule& m) {
    if (!m.negative_definite)
        throw std::domain_error("decompose_h0: needs a negative definite tower");
    if (!m.stabilized) throw std::domain_error("decompose_h0: tower is not stabilized");
    if (!m.d) throw std::domain_error("decompose_h0: missing d-invariant");

    H0Decomposition out;
    if (m.h0_bars.empty()) {
        if (m.reduced_rank(0) != 0)
            throw std::domain_error("decompose_h0: persistence data missing");
        out.tails.push_back({0, *m.d});
        return out;
    }

    long long essentials = 0;
    for (const H0Interval& bar : m.h0_bars) {
        const Rat base = (m.q0 + Rat((long)bar.birth)) * 2;
        if (bar.essential) {
            ++essentials;
            out.tails.push_back({0, base});
        } else {
            out.finite.push_back({base, bar.death - bar.birth});
        }
    }
    if (essentials != 1)
        throw std::logic_error("decompose_h0: expected exactly one essential component");
    if (out.tails.front().base != *m.d)
        throw std::runtime_error("decompose_h0: tail start disagrees with the d-invariant");

    // Re-summing the intervals must reproduce the level ranks.
    for (const auto& row : m.levels) {
        long long alive = 0;
        for (const H0Interval& bar : m.h0_bars)
            if (bar.birth <= row.level && (bar.essential || row.level < bar.death)) ++alive;
        if (alive != row.rank[0])
            throw std::logic_error("decompose_h0: intervals disagree with level ranks");
    }
    return out;
}

/**
 * @brief Euler characteristic -d/2 + sum_q (-1)^q rank of the reduced part,
 *        in the raw grading.
 *
 * @throws std::domain_error unless negative definite, stabilized, with d.
 */
inline Rat euler_characteristic(const GradedZUModule& m) {
    if (!m.negative_definite)
        throw std::domain_error("euler_characteristic: needs a negative definite tower");
    if (!m.stabilized) throw std::domain_error("euler_characteristic: tower is not stabilized");
    if (!m.d) throw std::domain_error("euler_characteristic: missing d-invariant");
    Rat eu = -(*m.d) / 2;
    for (std::size_t q = 0; q <= m.s; ++q) {
        const long long r = m.reduced_rank(q);
        eu += (q % 2 == 0) ? Rat((long)r) : -Rat((long)r);
    }
    return eu;
}

/** @brief Euler characteristic in the canonical grading: raw - (K^2+s)/8. */
inline Rat euler_characteristic_canonical(const GradedZUModule& m) {
    return euler_characteristic(m) - m.canonical_shift / 2;
}

/** @brief The Euler characteristic labeled as a Seiberg-Witten invariant. */
inline Rat sw_invariant(const GradedZUModule& m) { return euler_characteristic(m); }

/** @brief Canonical-grading Seiberg-Witten labeling. */
inline Rat sw_invariant_canonical(const GradedZUModule& m) {
    return euler_characteristic_canonical(m);
}

}  // namespace latcoh

#endif  // LATCOH_ZU_HPP
