// SPDX-License-Identifier: MIT
/**
 * @file chains.hpp
 * @brief Finite Z[U]-linear combinations of lattice cubes and the chain-level
 *        operators relating the complexes of a graph, its blow-up and its
 *        vertex-deleted subgraph.
 *
 * A cube is a pair (k, I): a characteristic vector k in pairing coordinates
 * together with a set I of vertex indices (a bit mask).  The free Z[U]-module
 * on the q-cubes of a graph carries the boundary operator
 *
 *   d(k,I) = sum_l (-1)^l [ U^{w(k,I)-w(k,I-j_l)}        (k,       I-j_l)
 *                         - U^{w(k,I)-w(k+2E_{j_l},I-j_l)}(k+2E_{j_l},I-j_l) ]
 *
 * where j_1 < j_2 < ... are the elements of I and w is the maximum of the
 * Riemann-Roch weight over the corners of the cube.  All exponents appearing
 * in the operators of this header are differences of weights of characteristic
 * vectors in one class, so they are computed through the integer-valued
 * increment chi and never require inverting the intersection form.  This keeps
 * every operator well-defined even when an auxiliary graph is degenerate.
 *
 * Operators provided here:
 *  - BlowupPair: push-forward, pull-back and the homotopy contraction between
 *    a graph and its blow-up at a vertex;
 *  - DeletePair: the windowed extension operators (unsigned and signed) from a
 *    vertex-deleted subgraph back to the full graph, plus the dual-side
 *    transform on finite cochains;
 *  - SplitPair: the composite operator from a graph to the graph with the same
 *    shape and one decoration raised by one, factored through an auxiliary
 *    (-1)-vertex attachment;
 *  - b_rel / r0_coefficient: the class-relative extension used by relative
 *    invariants;
 *  - check_identities: a deterministic randomized verifier for the algebraic
 *    identities these operators satisfy.
 */
#ifndef LATCOH_CHAINS_HPP
#define LATCOH_CHAINS_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "latcoh/charlat.hpp"

namespace latcoh {

/** @brief A lattice cube: characteristic base point and direction set. */
struct Cube {
    CharVec k;               ///< base vertex in pairing coordinates
    std::uint32_t mask = 0;  ///< bit j set means direction E_j participates
};

inline bool operator==(const Cube& a, const Cube& b) { return a.mask == b.mask && a.k == b.k; }
inline bool operator!=(const Cube& a, const Cube& b) { return !(a == b); }

/** @brief Dimension (number of directions) of a cube. */
inline int cube_dim(const Cube& c) { return std::popcount(c.mask); }

/** @brief Key of one generator U^m (k, I) inside a finite chain. */
struct TermKey {
    Int m;                   ///< U-exponent, m >= 0
    std::uint32_t mask = 0;  ///< direction set
    CharVec k;               ///< base point

    bool operator<(const TermKey& o) const {
        if (m != o.m) return m < o.m;
        if (mask != o.mask) return mask < o.mask;
        return k < o.k;
    }
    bool operator==(const TermKey& o) const { return m == o.m && mask == o.mask && k == o.k; }
};

/**
 * @brief Finite Z-linear combination of generators U^m (k, I).
 *
 * Terms are kept canonicalized (sorted by key, zero coefficients removed).
 * Every chain carries the hash of the graph it lives over; arithmetic between
 * chains over different graphs is rejected.
 */
class FiniteChain {
public:
    FiniteChain() = default;
    explicit FiniteChain(std::string graph_tag) : tag_(std::move(graph_tag)) {}

    const std::string& tag() const { return tag_; }
    bool zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    const std::map<TermKey, Int>& terms() const { return terms_; }

    /** @brief Add coeff * U^m (k,I); throws std::invalid_argument if m < 0. */
    void add(const Int& coeff, const Int& m, const Cube& c) {
        if (m < 0) throw std::invalid_argument("FiniteChain::add: negative U-exponent");
        if (coeff == 0) return;
        TermKey key{m, c.mask, c.k};
        Int& slot = terms_[key];
        slot += coeff;
        if (slot == 0) terms_.erase(key);
    }

    FiniteChain& operator+=(const FiniteChain& o) { return merge(o, 1); }
    FiniteChain& operator-=(const FiniteChain& o) { return merge(o, -1); }

    /** @brief Multiply the whole chain by U^d (d >= 0). */
    FiniteChain shifted(const Int& d) const {
        if (d < 0) throw std::invalid_argument("FiniteChain::shifted: negative shift");
        FiniteChain out(tag_);
        for (const auto& [key, c] : terms_) out.terms_.emplace(TermKey{key.m + d, key.mask, key.k}, c);
        return out;
    }

    /** @brief Scale every coefficient. */
    FiniteChain scaled(const Int& factor) const {
        FiniteChain out(tag_);
        if (factor == 0) return out;
        for (const auto& [key, c] : terms_) out.terms_.emplace(key, c * factor);
        return out;
    }

private:
    FiniteChain& merge(const FiniteChain& o, int sign) {
        if (o.terms_.empty()) return *this;
        if (tag_.empty()) tag_ = o.tag_;
        if (tag_ != o.tag_)
            throw std::invalid_argument("FiniteChain: arithmetic between chains over different graphs");
        for (const auto& [key, c] : o.terms_) {
            Int& slot = terms_[key];
            if (sign > 0)
                slot += c;
            else
                slot -= c;
            if (slot == 0) terms_.erase(key);
        }
        return *this;
    }

    std::string tag_;
    std::map<TermKey, Int> terms_;
};

inline FiniteChain operator+(FiniteChain a, const FiniteChain& b) { return a += b; }
inline FiniteChain operator-(FiniteChain a, const FiniteChain& b) { return a -= b; }
inline bool operator==(const FiniteChain& a, const FiniteChain& b) {
    return a.tag() == b.tag() && a.terms() == b.terms();
}
inline bool operator!=(const FiniteChain& a, const FiniteChain& b) { return !(a == b); }

/** @brief Chain with the single generator U^0 (k,I). */
inline FiniteChain single_cube(const std::string& tag, const Cube& c) {
    FiniteChain ch(tag);
    ch.add(Int(1), Int(0), c);
    return ch;
}

/** @brief Keep only the terms with U-exponent at most cutoff. */
inline FiniteChain filter_u_max(const FiniteChain& ch, const Int& cutoff) {
    FiniteChain out(ch.tag());
    for (const auto& [key, c] : ch.terms())
        if (key.m <= cutoff) out.add(c, key.m, Cube{key.k, key.mask});
    return out;
}

/** @brief Keep only the terms whose base has coordinate j in [lo, hi]. */
inline FiniteChain filter_coord_range(const FiniteChain& ch, std::size_t j, const Int& lo,
                                      const Int& hi) {
    FiniteChain out(ch.tag());
    for (const auto& [key, c] : ch.terms()) {
        if (j >= key.k.size()) throw std::invalid_argument("filter_coord_range: index out of range");
        if (key.k[j] >= lo && key.k[j] <= hi) out.add(c, key.m, Cube{key.k, key.mask});
    }
    return out;
}

/**
 * @brief Apply a Z[U]-linear map given on single cubes to a whole chain.
 *
 * @param out_tag graph hash of the codomain (used when the input is empty).
 * @param op      callable Cube -> FiniteChain over the codomain graph.
 */
template <class F>
inline FiniteChain transform_chain(const std::string& out_tag, const FiniteChain& ch, F&& op) {
    FiniteChain out(out_tag);
    for (const auto& [key, c] : ch.terms()) {
        FiniteChain img = op(Cube{key.k, key.mask});
        out += img.shifted(key.m).scaled(c);
    }
    return out;
}

/** @brief Insert a cleared bit at position j0 (reindex a subgraph mask into the full graph). */
inline std::uint32_t lift_mask(std::uint32_t sub_mask, std::size_t j0) {
    const std::uint32_t low = sub_mask & ((1u << j0) - 1u);
    const std::uint32_t high = sub_mask >> j0;
    return low | (high << (j0 + 1));
}

/** @brief Remove position j0 from a mask; the bit at j0 must be clear. */
inline std::uint32_t drop_mask(std::uint32_t mask, std::size_t j0) {
    if (mask & (1u << j0)) throw std::invalid_argument("drop_mask: bit j0 is set");
    const std::uint32_t low = mask & ((1u << j0) - 1u);
    const std::uint32_t high = mask >> (j0 + 1);
    return low | (high << j0);
}

/** @brief Pairing coordinates of k + 2 * sum_{j in bits} E_j. */
inline CharVec corner_shift(const IntMat& m, const CharVec& a, std::uint32_t bits) {
    const std::size_t s = m.rows();
    if (a.size() != s) throw std::invalid_argument("corner_shift: dimension mismatch");
    CharVec out = a;
    for (std::size_t j = 0; j < s; ++j) {
        if (!(bits & (1u << j))) continue;
        for (std::size_t i = 0; i < s; ++i) out[i] -= 2 * m(i, j);
    }
    return out;
}

/**
 * @brief Weight of the cube (a, mask) relative to its base: w(a,I) - q(a).
 *
 * Equals max over subsets J of I of chi_a(E_J); an integer computed from the
 * intersection form alone.
 */
inline Int cube_weight_rel(const IntMat& m, const CharVec& a, std::uint32_t mask) {
    const std::size_t s = m.rows();
    if (a.size() != s) throw std::invalid_argument("cube_weight_rel: dimension mismatch");
    std::vector<Int> x(s, Int(0));
    Int best(0);  // J = empty set gives chi = 0
    std::uint32_t sub = mask;
    while (sub != 0) {
        for (std::size_t j = 0; j < s; ++j) x[j] = (sub & (1u << j)) ? 1 : 0;
        const Int val = chi(m, a, x);
        if (val > best) best = val;
        sub = (sub - 1) & mask;
    }
    return best;
}

/** @brief Absolute cube weight max_{corners} q; requires a non-degenerate form. */
inline Rat cube_weight(const PlumbingGraph& g, const Cube& c) {
    const IntMat m = g.intersection_form();
    return weight_q(m, c.k) + Rat(cube_weight_rel(m, c.k, c.mask));
}

namespace detail {

/** @brief chi_a of the single basis direction E_j. */
inline Int chi_dir(const IntMat& m, const CharVec& a, std::size_t j) {
    std::vector<Int> x(m.rows(), Int(0));
    x[j] = 1;
    return chi(m, a, x);
}

inline Int require_nonneg(Int value, const char* where) {
    if (value < 0) throw std::logic_error(std::string(where) + ": negative U-exponent");
    return value;
}

}  // namespace detail

/**
 * @brief Boundary of a single cube.
 *
 * The two faces in direction j_l enter with opposite signs and U-exponents
 * equal to the drop of the cube weight; both exponents are non-negative
 * integers by construction.
 */
inline FiniteChain boundary(const PlumbingGraph& g, const Cube& c) {
    const IntMat m = g.intersection_form();
    if (c.k.size() != g.size()) throw std::invalid_argument("boundary: dimension mismatch");
    FiniteChain out(graph_hash(g));
    if (c.mask == 0) return out;
    const Int wtop = cube_weight_rel(m, c.k, c.mask);
    int l = 0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (!(c.mask & (1u << j))) continue;
        ++l;
        const int sign = (l % 2 != 0) ? -1 : 1;
        const std::uint32_t face = c.mask & ~(1u << j);
        const Int e_near =
            detail::require_nonneg(wtop - cube_weight_rel(m, c.k, face), "boundary");
        out.add(Int(sign), e_near, Cube{c.k, face});
        const CharVec far = corner_shift(m, c.k, 1u << j);
        const Int e_far = detail::require_nonneg(
            wtop - detail::chi_dir(m, c.k, j) - cube_weight_rel(m, far, face), "boundary");
        out.add(Int(-sign), e_far, Cube{far, face});
    }
    return out;
}

/** @brief Z[U]-linear extension of the boundary to finite chains. */
inline FiniteChain boundary(const PlumbingGraph& g, const FiniteChain& ch) {
    const std::string tag = graph_hash(g);
    if (!ch.zero() && ch.tag() != tag)
        throw std::invalid_argument("boundary: chain lives over a different graph");
    return transform_chain(tag, ch, [&](const Cube& c) { return boundary(g, c); });
}

/**
 * @brief A graph together with its blow-up at one vertex.
 *
 * The blown-up graph appends the new (-1)-vertex with index size(); the
 * decoration at j0 drops by one.  Provides the three standard chain maps:
 * the push-forward and pull-back homotopy extensions and the contraction
 * homotopy whose commutator with the boundary measures the failure of the
 * round trip to be the identity.
 */
class BlowupPair {
public:
    BlowupPair(const PlumbingGraph& g, std::size_t j0)
        : base_(g),
          total_(g.blow_up(j0)),
          j0_(j0),
          jnew_(g.size()),
          mb_(base_.intersection_form()),
          mt_(total_.intersection_form()),
          tag_base_(graph_hash(base_)),
          tag_total_(graph_hash(total_)) {}

    const PlumbingGraph& base() const { return base_; }
    const PlumbingGraph& total() const { return total_; }
    std::size_t j0() const { return j0_; }
    std::size_t j_new() const { return jnew_; }
    const std::string& base_tag() const { return tag_base_; }
    const std::string& total_tag() const { return tag_total_; }

    /** @brief Push-forward of a characteristic vector: fold the new coordinate into j0. */
    CharVec push_down(const CharVec& kt) const {
        if (kt.size() != jnew_ + 1) throw std::invalid_argument("push_down: dimension mismatch");
        CharVec out(kt.begin(), kt.begin() + (long)jnew_);
        out[j0_] += kt[jnew_];
        return out;
    }

    /** @brief Pull-back of a characteristic vector: coordinate 1 on the new vertex. */
    CharVec pull_back(const CharVec& kb) const {
        if (kb.size() != jnew_) throw std::invalid_argument("pull_back: dimension mismatch");
        CharVec out = kb;
        out[j0_] -= 1;
        out.push_back(Int(1));
        return out;
    }

    /**
     * @brief Weight-graded push-forward of a cube of the blown-up graph.
     *
     * Cubes involving the new direction map to zero; otherwise the image is
     * U^{w'(k,I) - w(push(k),I)} (push(k), I), with the base-weight difference
     * (a^2-1)/8 determined by the new coordinate a of k.
     */
    FiniteChain pi_star_h(const Cube& c) const {
        if (c.k.size() != jnew_ + 1) throw std::invalid_argument("pi_star_h: dimension mismatch");
        FiniteChain out(tag_base_);
        if (c.mask & (1u << jnew_)) return out;
        const Int a = c.k[jnew_];
        if (a % 2 == 0) throw std::invalid_argument("pi_star_h: base is not characteristic");
        const CharVec down = push_down(c.k);
        const Int exponent = detail::require_nonneg(
            cube_weight_rel(mt_, c.k, c.mask) - cube_weight_rel(mb_, down, c.mask) +
                (a * a - 1) / 8,
            "pi_star_h");
        out.add(Int(1), exponent, Cube{down, c.mask});
        return out;
    }

    FiniteChain pi_star_h(const FiniteChain& ch) const {
        if (!ch.zero() && ch.tag() != tag_total_)
            throw std::invalid_argument("pi_star_h: chain lives over a different graph");
        return transform_chain(tag_base_, ch, [&](const Cube& c) { return pi_star_h(c); });
    }

    /**
     * @brief Weight-graded pull-back of a cube of the base graph.
     *
     * When j0 is not a direction of the cube the image is the single cube on
     * the pulled-back base; otherwise a correction cube through the new vertex
     * is added.  The new direction stands in for j0, so the correction carries
     * the sign of the permutation that moves it past the directions above j0;
     * with that orientation the map commutes with the boundary.
     */
    FiniteChain c_h(const Cube& c) const {
        if (c.k.size() != jnew_) throw std::invalid_argument("c_h: dimension mismatch");
        FiniteChain out(tag_total_);
        const CharVec up = pull_back(c.k);
        out.add(Int(1), Int(0), Cube{up, c.mask});
        if (c.mask & (1u << j0_)) {
            const std::uint32_t rest = c.mask & ~(1u << j0_);
            const int sigma = std::popcount(c.mask >> (j0_ + 1)) % 2 == 0 ? 1 : -1;
            const CharVec far = corner_shift(mb_, c.k, 1u << j0_);
            const Int exponent = detail::require_nonneg(
                cube_weight_rel(mb_, c.k, c.mask) - detail::chi_dir(mb_, c.k, j0_) -
                    cube_weight_rel(mb_, far, rest),
                "c_h");
            const CharVec up_far = corner_shift(mt_, up, 1u << j0_);
            out.add(Int(sigma), exponent, Cube{up_far, rest | (1u << jnew_)});
        }
        return out;
    }

    FiniteChain c_h(const FiniteChain& ch) const {
        if (!ch.zero() && ch.tag() != tag_base_)
            throw std::invalid_argument("c_h: chain lives over a different graph");
        return transform_chain(tag_total_, ch, [&](const Cube& c) { return c_h(c); });
    }

    /**
     * @brief Contraction homotopy on the blown-up complex.
     *
     * Writing the new coordinate of the base as 2a+1, the image is a signed
     * sum of (dim+1)-cubes through the new direction, one for each integer
     * step between a and 0.  Cubes already using the new direction, and cubes
     * with a = 0, map to zero.  The steps are signed by their direction and by
     * the parity of the cube dimension, so that the contraction identity
     * boundary(K(x)) + K(boundary(x)) = x - c_h(pi_star_h(x)) holds as an
     * exact chain identity.
     */
    FiniteChain homotopy_K(const Cube& c) const {
        if (c.k.size() != jnew_ + 1) throw std::invalid_argument("homotopy_K: dimension mismatch");
        FiniteChain out(tag_total_);
        if (c.mask & (1u << jnew_)) return out;
        const Int anew = c.k[jnew_];
        if (anew % 2 == 0) throw std::invalid_argument("homotopy_K: base is not characteristic");
        const Int a = (anew - 1) / 2;
        if (a == 0) return out;
        const int sign = (a > 0 ? 1 : -1) * (std::popcount(c.mask) % 2 == 0 ? 1 : -1);
        const Int wtop = cube_weight_rel(mt_, c.k, c.mask);
        const std::uint32_t up_mask = c.mask | (1u << jnew_);
        std::vector<Int> x(jnew_ + 1, Int(0));
        const Int lo = a > 0 ? Int(0) : a;
        const Int hi = a > 0 ? a - 1 : Int(-1);
        for (Int l = lo; l <= hi; ++l) {
            const Int t = l - a;
            CharVec kl = c.k;
            for (std::size_t i = 0; i <= jnew_; ++i) kl[i] -= 2 * t * mt_(i, jnew_);
            x[jnew_] = t;
            const Int exponent = detail::require_nonneg(
                wtop - chi(mt_, c.k, x) - cube_weight_rel(mt_, kl, up_mask), "homotopy_K");
            out.add(Int(sign), exponent, Cube{kl, up_mask});
        }
        return out;
    }

    FiniteChain homotopy_K(const FiniteChain& ch) const {
        if (!ch.zero() && ch.tag() != tag_total_)
            throw std::invalid_argument("homotopy_K: chain lives over a different graph");
        return transform_chain(tag_total_, ch, [&](const Cube& c) { return homotopy_K(c); });
    }

private:
    PlumbingGraph base_;
    PlumbingGraph total_;
    std::size_t j0_;
    std::size_t jnew_;
    IntMat mb_;
    IntMat mt_;
    std::string tag_base_;
    std::string tag_total_;
};

/**
 * @brief Table of class representatives used by the signed extension operator.
 *
 * By default the representative of a class is its minimal-weight vector when
 * the form is negative definite, and the deterministic residue representative
 * otherwise.  Individual classes can be overridden.
 */
class ClassRepTable {
public:
    explicit ClassRepTable(const PlumbingGraph& g)
        : graph_(g), classes_(g), negdef_(g.negative_definite()) {}

    const PlumbingGraph& graph() const { return graph_; }

    /** @brief Representative of the class of k (cached). */
    const CharVec& rep(const CharVec& k) {
        const Int id = classes_.class_of(k);
        auto it = reps_.find(id);
        if (it == reps_.end()) {
            CharVec r = negdef_ ? class_min(graph_, k) : classes_.representative(id);
            it = reps_.emplace(id, std::move(r)).first;
        }
        return it->second;
    }

    /** @brief Override the representative of the class of r with r itself. */
    void set_rep(const CharVec& r) {
        if (!is_characteristic(graph_, r))
            throw std::invalid_argument("ClassRepTable: override is not characteristic");
        reps_[classes_.class_of(r)] = r;
    }

private:
    PlumbingGraph graph_;
    CharClasses classes_;
    bool negdef_;
    std::map<Int, CharVec> reps_;
};

/** @brief Summation window for the operators with infinitely many terms. */
struct TruncationWindow {
    Int a_lo = 0;                 ///< smallest admissible free coordinate
    Int a_hi = 0;                 ///< largest admissible free coordinate
    std::optional<Int> u_cutoff;  ///< drop terms with U-exponent above this
};

/** @brief Windowed operator output together with its effective window. */
struct WindowedChain {
    FiniteChain chain;
    Int a_lo = 0;                  ///< effective window actually used
    Int a_hi = 0;
    bool boundary_nonzero = false; ///< a window-edge term survived truncation
};

/**
 * @brief Largest free coordinate that can carry a U-exponent at most n.
 *
 * Any term of the composite splitting operator whose new-vertex coordinate a
 * satisfies |a| > a_bound_for_cutoff(n) has U-exponent strictly greater than
 * n, for every direction set.  Used to auto-widen windows so that a requested
 * U-cutoff is certified exact.
 */
inline Int a_bound_for_cutoff(const Int& n) {
    if (n < 0) return Int(0);
    Int root;
    const Int radicand = 8 * n + 1;
    mpz_sqrt(root.get_mpz_t(), radicand.get_mpz_t());
    return root + 3;
}

/**
 * @brief A graph together with the subgraph obtained by deleting one vertex.
 *
 * Hosts the two extension operators from the subgraph complex to the full
 * complex: the unsigned one (a plain window of parallel copies, one for each
 * admissible coordinate at the deleted vertex) and the signed one, whose signs
 * are computed against a table of class representatives.  The signed operator
 * also acts exactly on finite cochains, where no window is needed.
 */
class DeletePair {
public:
    DeletePair(const PlumbingGraph& g, std::size_t j0)
        : full_(g),
          sub_(g.delete_vertex(j0)),
          j0_(j0),
          mf_(full_.intersection_form()),
          ms_(sub_.intersection_form()),
          tag_full_(graph_hash(full_)),
          tag_sub_(graph_hash(sub_)),
          parity_(full_.decoration(j0) % 2) {
        for (auto [x, y] : full_.edges()) {
            if ((std::size_t)x == j0_ && (std::size_t)y != j0_) adj_.push_back(sub_index((std::size_t)y));
            if ((std::size_t)y == j0_ && (std::size_t)x != j0_) adj_.push_back(sub_index((std::size_t)x));
        }
    }

    const PlumbingGraph& full() const { return full_; }
    const PlumbingGraph& sub() const { return sub_; }
    std::size_t j0() const { return j0_; }
    const std::string& full_tag() const { return tag_full_; }
    const std::string& sub_tag() const { return tag_sub_; }

    /** @brief Base of the extended cube with coordinate a at the deleted vertex. */
    CharVec extend_with(const CharVec& k_sub, const Int& a) const {
        CharVec out = extend_char(k_sub, j0_);
        out[j0_] = a;
        return out;
    }

    /**
     * @brief Unsigned extension operator on one cube, truncated to a window.
     *
     * The image is the sum over admissible coordinates a in [a_lo, a_hi] (a
     * congruent to the deleted decoration mod 2) of the extended cube; no
     * U-powers and no signs.  A U-cutoff in the window has no effect here but
     * participates in the edge-survival flag.
     */
    WindowedChain b_op(const Cube& c, const TruncationWindow& win) const {
        check_sub_dims(c);
        WindowedChain out;
        out.chain = FiniteChain(tag_full_);
        out.a_lo = win.a_lo;
        out.a_hi = win.a_hi;
        const std::uint32_t mask = lift_mask(c.mask, j0_);
        for (Int a = first_admissible(win.a_lo); a <= win.a_hi; a += 2) {
            out.chain.add(Int(1), Int(0), Cube{extend_with(c.k, a), mask});
            out.boundary_nonzero = true;
        }
        return out;
    }

    WindowedChain b_op(const FiniteChain& ch, const TruncationWindow& win) const {
        check_sub_tag(ch);
        WindowedChain out;
        out.a_lo = win.a_lo;
        out.a_hi = win.a_hi;
        out.chain = transform_chain(tag_full_, ch, [&](const Cube& c) { return b_op(c, win).chain; });
        out.boundary_nonzero = !out.chain.zero();
        return out;
    }

    /**
     * @brief Sign of the signed extension term with coordinate a at the base k.
     *
     * The sign exponent is half of n = 2 * sum of the adjacent entries of the
     * lattice vector joining k to its class representative, plus a plus the
     * deleted decoration; n must be even.
     * @throws std::domain_error if n is odd (coordinate of the wrong parity).
     */
    int bbar_sign(const CharVec& k_sub, const Int& a, ClassRepTable& reps) const {
        const CharVec& r = reps.rep(k_sub);
        const std::size_t n = sub_.size();
        std::vector<Rat> rhs(n);
        for (std::size_t i = 0; i < n; ++i) rhs[i] = Rat(r[i] - k_sub[i]) / 2;
        const std::vector<Rat> u = solve_q(ms_, rhs);
        Int nsum(0);
        for (std::size_t i : adj_) {
            if (u[i].get_den() != 1)
                throw std::logic_error("bbar_sign: representative lies in a different class");
            nsum += u[i].get_num();
        }
        const Int n_val = 2 * nsum + a + full_.decoration(j0_);
        if (n_val % 2 != 0)
            throw std::domain_error("bbar_sign: coordinate parity does not match the decoration");
        const Int half = n_val / 2;
        return half % 2 == 0 ? 1 : -1;
    }

    /**
     * @brief Signed extension operator on one cube, truncated to a window.
     *
     * Same terms as the unsigned operator, each multiplied by the class-
     * representative sign; consecutive admissible coordinates carry opposite
     * signs.  Does not preserve weights or orbit structure.
     */
    WindowedChain bbar_op(const Cube& c, ClassRepTable& reps, const TruncationWindow& win) const {
        check_sub_dims(c);
        if (graph_hash(reps.graph()) != tag_sub_)
            throw std::invalid_argument("bbar_op: representative table is for a different graph");
        WindowedChain out;
        out.chain = FiniteChain(tag_full_);
        out.a_lo = win.a_lo;
        out.a_hi = win.a_hi;
        const std::uint32_t mask = lift_mask(c.mask, j0_);
        bool any = false;
        for (Int a = first_admissible(win.a_lo); a <= win.a_hi; a += 2) {
            const int sign = bbar_sign(c.k, a, reps);
            out.chain.add(Int(sign), Int(0), Cube{extend_with(c.k, a), mask});
            any = true;
        }
        out.boundary_nonzero = any;
        return out;
    }

    WindowedChain bbar_op(const FiniteChain& ch, ClassRepTable& reps,
                          const TruncationWindow& win) const {
        check_sub_tag(ch);
        WindowedChain out;
        out.a_lo = win.a_lo;
        out.a_hi = win.a_hi;
        out.chain = transform_chain(
            tag_full_, ch, [&](const Cube& c) { return bbar_op(c, reps, win).chain; });
        out.boundary_nonzero = !out.chain.zero();
        return out;
    }

private:
    void check_sub_dims(const Cube& c) const {
        if (c.k.size() != sub_.size()) throw std::invalid_argument("extension: dimension mismatch");
        if (c.mask >> sub_.size()) throw std::invalid_argument("extension: mask out of range");
    }
    void check_sub_tag(const FiniteChain& ch) const {
        if (!ch.zero() && ch.tag() != tag_sub_)
            throw std::invalid_argument("extension: chain lives over a different graph");
    }
    std::size_t sub_index(std::size_t full_index) const {
        return full_index < j0_ ? full_index : full_index - 1;
    }
    Int first_admissible(const Int& lo) const {
        Int a = lo;
        if ((a - parity_) % 2 != 0) a += 1;
        return a;
    }

    PlumbingGraph full_;
    PlumbingGraph sub_;
    std::size_t j0_;
    IntMat mf_;
    IntMat ms_;
    std::string tag_full_;
    std::string tag_sub_;
    Int parity_;
    std::vector<std::size_t> adj_;
};

/** @brief Key of one generator U^{-ell} * (k,I)^dual inside a finite cochain. */
struct CochainKey {
    Int ell;                 ///< depth: the functional sends (k,I) to U^{-ell} truncated at U^0
    std::uint32_t mask = 0;
    CharVec k;

    bool operator<(const CochainKey& o) const {
        if (ell != o.ell) return ell < o.ell;
        if (mask != o.mask) return mask < o.mask;
        return k < o.k;
    }
    bool operator==(const CochainKey& o) const {
        return ell == o.ell && mask == o.mask && k == o.k;
    }
};

/**
 * @brief Finite Z-linear combination of the dual generators U^{-ell} * (k,I)^dual.
 *
 * Such combinations span the finitely supported module-valued functionals on
 * the cube complex: the generator sends U^m (k,I) to U^{m-ell} when m <= ell
 * and to zero otherwise, and every other cube to zero.
 */
class FiniteCochain {
public:
    FiniteCochain() = default;
    explicit FiniteCochain(std::string graph_tag) : tag_(std::move(graph_tag)) {}

    const std::string& tag() const { return tag_; }
    bool zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    const std::map<CochainKey, Int>& terms() const { return terms_; }

    void add(const Int& coeff, const Int& ell, const Cube& c) {
        if (ell < 0) throw std::invalid_argument("FiniteCochain::add: negative depth");
        if (coeff == 0) return;
        CochainKey key{ell, c.mask, c.k};
        Int& slot = terms_[key];
        slot += coeff;
        if (slot == 0) terms_.erase(key);
    }

    FiniteCochain& operator+=(const FiniteCochain& o) { return merge(o, 1); }
    FiniteCochain& operator-=(const FiniteCochain& o) { return merge(o, -1); }

private:
    FiniteCochain& merge(const FiniteCochain& o, int sign) {
        if (o.terms_.empty()) return *this;
        if (tag_.empty()) tag_ = o.tag_;
        if (tag_ != o.tag_)
            throw std::invalid_argument("FiniteCochain: arithmetic between different graphs");
        for (const auto& [key, c] : o.terms_) {
            Int& slot = terms_[key];
            if (sign > 0)
                slot += c;
            else
                slot -= c;
            if (slot == 0) terms_.erase(key);
        }
        return *this;
    }

    std::string tag_;
    std::map<CochainKey, Int> terms_;
};

inline bool operator==(const FiniteCochain& a, const FiniteCochain& b) {
    return a.tag() == b.tag() && a.terms() == b.terms();
}
inline bool operator!=(const FiniteCochain& a, const FiniteCochain& b) { return !(a == b); }

/** @brief Cochain with the single generator U^{-ell} * (k,I)^dual. */
inline FiniteCochain single_dual(const std::string& tag, const Int& ell, const Cube& c) {
    FiniteCochain phi(tag);
    phi.add(Int(1), ell, c);
    return phi;
}

/**
 * @brief Evaluate a finite cochain on a finite chain.
 *
 * The value lives in the nonnegative tail module: it is returned as a map
 * from i >= 0 to the coefficient of U^{-i}.  Terms with larger U-exponent
 * than the functional's depth are annihilated.
 */
inline std::map<Int, Int> pair_evaluate(const FiniteCochain& phi, const FiniteChain& ch) {
    if (!phi.zero() && !ch.zero() && phi.tag() != ch.tag())
        throw std::invalid_argument("pair_evaluate: cochain and chain live over different graphs");
    std::map<Int, Int> value;
    for (const auto& [pk, pc] : phi.terms()) {
        for (const auto& [ck, cc] : ch.terms()) {
            if (pk.mask != ck.mask || pk.k != ck.k) continue;
            if (ck.m > pk.ell) continue;
            const Int i = pk.ell - ck.m;
            Int& slot = value[i];
            slot += pc * cc;
            if (slot == 0) value.erase(i);
        }
    }
    return value;
}

/**
 * @brief Dual of the signed extension operator, acting on finite cochains.
 *
 * Each dual generator of the full graph whose direction set avoids the
 * deleted vertex restricts to the unique subgraph generator it came from,
 * multiplied by the extension sign; generators through the deleted vertex die.
 * The computation is exact: no window is involved.
 */
inline FiniteCochain bbar_dual(const DeletePair& pair, ClassRepTable& reps,
                               const FiniteCochain& phi) {
    if (!phi.zero() && phi.tag() != pair.full_tag())
        throw std::invalid_argument("bbar_dual: cochain lives over a different graph");
    if (graph_hash(reps.graph()) != pair.sub_tag())
        throw std::invalid_argument("bbar_dual: representative table is for a different graph");
    FiniteCochain out(pair.sub_tag());
    for (const auto& [key, c] : phi.terms()) {
        if (key.mask & (1u << pair.j0())) continue;
        const CharVec k_sub = restrict_char(key.k, pair.j0());
        const Int a = key.k[pair.j0()];
        const int sign = pair.bbar_sign(k_sub, a, reps);
        out.add(c * sign, key.ell, Cube{k_sub, drop_mask(key.mask, pair.j0())});
    }
    return out;
}

/**
 * @brief The composite splitting operator between a graph and the graph with
 *        one decoration raised by one.
 *
 * The operator factors through the auxiliary graph with an extra (-1)-vertex
 * attached at j0: first the unsigned extension over the new coordinate, then
 * the push-forward of the blow-up of the raised graph (they share the same
 * auxiliary graph).  Terms acquire the U-exponent (a^2-1)/8 corrected by the
 * cube geometry; a requested U-cutoff auto-widens the window so that the
 * truncation is certified exact.
 */
class SplitPair {
public:
    SplitPair(const PlumbingGraph& g, std::size_t j0)
        : orig_(g),
          plus_(g.bump_decoration(j0, Int(1))),
          j0_(j0),
          down_(plus_, j0),
          attach_(down_.total(), g.size()) {
        if (plus_.degenerate())
            throw std::domain_error("SplitPair: raising the decoration makes the form degenerate");
        if (attach_.sub_tag() != graph_hash(orig_))
            throw std::logic_error("SplitPair: auxiliary graph mismatch");
    }

    const PlumbingGraph& original() const { return orig_; }
    const PlumbingGraph& raised() const { return plus_; }
    const PlumbingGraph& auxiliary() const { return down_.total(); }
    std::size_t j0() const { return j0_; }
    const std::string& original_tag() const { return attach_.sub_tag(); }
    const std::string& raised_tag() const { return down_.base_tag(); }

    /**
     * @brief Apply the splitting operator to one cube, within a window.
     *
     * The window constrains the new-vertex coordinate (odd integers); when a
     * U-cutoff is requested the window is widened to the certified bound so
     * that no dropped coordinate could contribute a term below the cutoff.
     */
    WindowedChain a_op(const Cube& c, const TruncationWindow& win) const {
        TruncationWindow eff = win;
        if (win.u_cutoff) {
            const Int bound = a_bound_for_cutoff(*win.u_cutoff);
            const Int neg = -bound;
            if (neg < eff.a_lo) eff.a_lo = neg;
            if (bound > eff.a_hi) eff.a_hi = bound;
        }
        WindowedChain lifted = attach_.b_op(c, eff);
        WindowedChain out;
        out.a_lo = eff.a_lo;
        out.a_hi = eff.a_hi;
        out.chain = down_.pi_star_h(lifted.chain);
        if (win.u_cutoff) out.chain = filter_u_max(out.chain, *win.u_cutoff);
        out.boundary_nonzero = edge_survives(lifted.chain, eff, win.u_cutoff);
        return out;
    }

    WindowedChain a_op(const FiniteChain& ch, const TruncationWindow& win) const {
        if (!ch.zero() && ch.tag() != original_tag())
            throw std::invalid_argument("a_op: chain lives over a different graph");
        WindowedChain out;
        out.a_lo = win.a_lo;
        out.a_hi = win.a_hi;
        bool edge = false;
        out.chain = transform_chain(raised_tag(), ch, [&](const Cube& c) {
            WindowedChain w = a_op(c, win);
            out.a_lo = w.a_lo;
            out.a_hi = w.a_hi;
            edge = edge || w.boundary_nonzero;
            return w.chain;
        });
        out.boundary_nonzero = edge;
        return out;
    }

private:
    bool edge_survives(const FiniteChain& lifted, const TruncationWindow& eff,
                       const std::optional<Int>& cutoff) const {
        const std::size_t jn = orig_.size();
        FiniteChain edges(lifted.tag());
        Int lo = eff.a_lo, hi = eff.a_hi;
        if ((lo + 1) % 2 != 0) lo += 1;  // coordinates at the (-1)-vertex are odd
        if ((hi + 1) % 2 != 0) hi -= 1;
        for (const auto& [key, c] : lifted.terms())
            if (key.k[jn] == lo || key.k[jn] == hi) edges.add(c, key.m, Cube{key.k, key.mask});
        if (edges.zero()) return false;
        FiniteChain pushed = down_.pi_star_h(edges);
        if (cutoff) pushed = filter_u_max(pushed, *cutoff);
        return !pushed.zero();
    }

    PlumbingGraph orig_;
    PlumbingGraph plus_;
    std::size_t j0_;
    BlowupPair down_;
    DeletePair attach_;
};

/**
 * @brief Coefficient of the distinguished dual direction in the decomposition
 *        of a characteristic vector against the vertex-deleted sublattice.
 *
 * Equals the pairing of kbar with the dual basis vector at j0 divided by that
 * vector's self-pairing.  Used by relative constructions; integrality and
 * parity are the caller's concern.
 */
inline Rat r0_coefficient(const PlumbingGraph& g, std::size_t j0, const CharVec& kbar) {
    if (j0 >= g.size()) throw std::invalid_argument("r0_coefficient: index out of range");
    if (kbar.size() != g.size()) throw std::invalid_argument("r0_coefficient: dimension mismatch");
    const IntMat m = g.intersection_form();
    std::vector<Rat> a(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) a[i] = Rat(kbar[i]);
    const std::vector<Rat> ma = solve_q(m, a);
    std::vector<Rat> unit(g.size(), Rat(0));
    unit[j0] = Rat(1);
    const std::vector<Rat> mu = solve_q(m, unit);
    if (mu[j0] == 0) throw std::domain_error("r0_coefficient: dual vector has zero self-pairing");
    return ma[j0] / mu[j0];
}

/**
 * @brief Class-relative extension of a subgraph cube to the full graph.
 *
 * The base of the image is the anchor kbar translated by the (doubled) lattice
 * vector joining the cube's base to the restriction of kbar; the direction set
 * is reindexed into the full graph.  The cube's base must lie in the class of
 * the restriction of kbar.
 *
 * @throws std::domain_error if the classes are incompatible.
 */
inline Cube b_rel(const PlumbingGraph& g, std::size_t j0, const CharVec& kbar, const Cube& c) {
    if (j0 >= g.size()) throw std::invalid_argument("b_rel: index out of range");
    if (kbar.size() != g.size()) throw std::invalid_argument("b_rel: dimension mismatch");
    if (!is_characteristic(g, kbar)) throw std::invalid_argument("b_rel: anchor is not characteristic");
    const PlumbingGraph sub = g.delete_vertex(j0);
    if (c.k.size() != sub.size()) throw std::invalid_argument("b_rel: cube dimension mismatch");
    const CharVec rbar = restrict_char(kbar, j0);
    const IntMat ms = sub.intersection_form();
    std::vector<Rat> rhs(sub.size());
    for (std::size_t i = 0; i < sub.size(); ++i) rhs[i] = Rat(rbar[i] - c.k[i]) / 2;
    const std::vector<Rat> u = solve_q(ms, rhs);  // (c.k - rbar)/2 = A_sub u
    std::vector<Int> lift(g.size(), Int(0));
    for (std::size_t i = 0; i < sub.size(); ++i) {
        if (u[i].get_den() != 1)
            throw std::domain_error("b_rel: cube base lies outside the class of the anchor");
        lift[i < j0 ? i : i + 1] = u[i].get_num();
    }
    const IntMat m = g.intersection_form();
    CharVec out = kbar;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) out[i] -= 2 * m(i, j) * lift[j];
    return Cube{out, lift_mask(c.mask, j0)};
}

// ---------------------------------------------------------------------------
// Randomized identity verification
// ---------------------------------------------------------------------------

/** @brief Options of the randomized identity verifier. */
struct IdentityCheckOptions {
    std::uint64_t seed = 0;       ///< base seed; each case derives its own stream
    int cases = 100;              ///< cases per identity
    int max_vertices = 5;         ///< largest random graph size
    long inner_half_width = 4;    ///< half-width of the inner comparison window
    long u_cutoff = 2;            ///< truncation depth of composite checks
};

/** @brief Aggregate result of one identity. */
struct IdentityReportItem {
    std::string identity;
    int cases = 0;
    int failures = 0;
};

/** @brief One failing case with a human-readable detail line. */
struct IdentityCaseFailure {
    std::string identity;
    int case_index = 0;
    std::string detail;
};

/** @brief Deterministic report of the identity verifier. */
struct IdentityReport {
    std::vector<IdentityReportItem> items;
    std::vector<IdentityCaseFailure> failures;

    bool all_passed() const {
        for (const auto& it : items)
            if (it.failures != 0) return false;
        return true;
    }

    /** @brief One line per identity: name, case count, failure count. */
    std::string summary() const {
        std::ostringstream out;
        for (const auto& it : items)
            out << it.identity << ": " << it.cases << " cases, " << it.failures << " failures\n";
        return out.str();
    }
};

namespace detail {

/** @brief Random tree-shaped graph; decorations in [lo, hi], resampled until non-degenerate. */
inline PlumbingGraph random_graph(std::mt19937_64& eng, int max_vertices, long dec_lo,
                                  long dec_hi) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::uniform_int_distribution<int> size_dist(1, max_vertices);
        const int s = size_dist(eng);
        std::vector<Int> e;
        std::uniform_int_distribution<long> dec(dec_lo, dec_hi);
        for (int j = 0; j < s; ++j) e.push_back(Int(dec(eng)));
        std::vector<std::pair<int, int>> edges;
        for (int j = 1; j < s; ++j) {
            std::uniform_int_distribution<int> parent(0, j - 1);
            edges.emplace_back(parent(eng), j);
        }
        PlumbingGraph g(e, edges);
        if (!g.degenerate()) return g;
    }
    // fallback: a chain of (-2)-vertices is always non-degenerate
    std::vector<Int> e((std::size_t)std::max(1, max_vertices), Int(-2));
    std::vector<std::pair<int, int>> edges;
    for (int j = 1; j < (int)e.size(); ++j) edges.emplace_back(j - 1, j);
    return PlumbingGraph(e, edges);
}

/** @brief Random characteristic vector: canonical class shifted by a bounded lattice vector. */
inline CharVec random_char(std::mt19937_64& eng, const PlumbingGraph& g, long radius = 2) {
    const IntMat m = g.intersection_form();
    CharVec a = canonical_char(g);
    std::uniform_int_distribution<long> coord(-radius, radius);
    std::vector<Int> l(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) l[j] = Int(coord(eng));
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) a[i] -= 2 * m(i, j) * l[j];
    return a;
}

/** @brief Random direction set over s vertices with at most max_bits elements. */
inline std::uint32_t random_mask(std::mt19937_64& eng, std::size_t s, int max_bits = 4) {
    std::uniform_int_distribution<int> flip(0, 9);
    std::uint32_t mask = 0;
    int bits = 0;
    for (std::size_t j = 0; j < s && bits < max_bits; ++j) {
        if (flip(eng) < 4) {
            mask |= (1u << j);
            ++bits;
        }
    }
    return mask;
}

/** @brief Stable one-line description of a graph and cube for failure reports. */
inline std::string describe_case(const PlumbingGraph& g, const Cube& c) {
    std::ostringstream out;
    out << "graph[";
    for (std::size_t j = 0; j < g.size(); ++j) out << (j ? "," : "") << g.decoration(j).get_str();
    out << "] base[";
    for (std::size_t j = 0; j < c.k.size(); ++j) out << (j ? "," : "") << c.k[j].get_str();
    out << "] mask=" << c.mask;
    return out.str();
}

/** @brief Conservative window padding: twice the largest coordinate shift of one corner step. */
inline Int window_pad(const IntMat& m, std::size_t j0) {
    Int pad(2);
    for (std::size_t j = 0; j < m.cols(); ++j) pad += 2 * abs(m(j0, j));
    return pad;
}

}  // namespace detail

/**
 * @brief Randomized verification of the operator identities.
 *
 * Runs each identity on deterministic pseudo-random instances (graphs with at
 * most max_vertices vertices, mixed definite and indefinite decorations) and
 * reports per-identity case and failure counts.  Windowed identities are
 * compared inside a certified inner window; dual-side identities are exact.
 * The report is deterministic for a fixed seed and option set.
 */
inline IdentityReport check_identities(const IdentityCheckOptions& opt = {}) {
    IdentityReport report;

    static constexpr std::uint64_t kStreamSalt = 0x9e3779b97f4a7c15ULL;

    using CaseFn = std::string (*)(std::mt19937_64&, const IdentityCheckOptions&, int);

    const std::vector<std::pair<std::string, CaseFn>> identities = {
        {"boundary-squared",
         [](std::mt19937_64& eng, const IdentityCheckOptions& o, int idx) -> std::string {
             const PlumbingGraph g = idx % 3 == 2 ? detail::random_graph(eng, o.max_vertices, -3, 2)
                                                  : detail::random_graph(eng, o.max_vertices, -5, -1);
             const Cube c{detail::random_char(eng, g), detail::random_mask(eng, g.size())};
             const FiniteChain dd = boundary(g, boundary(g, c));
             if (!dd.zero()) return "d(d(cube)) != 0 for " + detail::describe_case(g, c);
             return {};
         }},
        {"pi-star-chain-map",
         [](std::mt19937_64& eng, const IdentityCheckOptions& o, int idx) -> std::string {
             const PlumbingGraph g = idx % 3 == 2 ? detail::random_graph(eng, o.max_vertices, -3, 2)
                                                  : detail::random_graph(eng, o.max_vertices, -5, -1);
             std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
             const BlowupPair bp(g, pick(eng));
             const Cube c{detail::random_char(eng, bp.total()),
                          detail::random_mask(eng, bp.total().size())};
             const FiniteChain lhs = boundary(bp.base(), bp.pi_star_h(c));
             const FiniteChain rhs = bp.pi_star_h(boundary(bp.total(), c));
             if (lhs != rhs)
                 return "push-forward does not commute with the boundary for " +
                        detail::describe_case(bp.total(), c);
             return {};
         }},
        {"c-chain-map",
         [](std::mt19937_64& eng, const IdentityCheckOptions& o, int idx) -> std::string {
             const PlumbingGraph g = idx % 3 == 2 ? detail::random_graph(eng, o.max_vertices, -3, 2)
                                                  : detail::random_graph(eng, o.max_vertices, -5, -1);
             std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
             const BlowupPair bp(g, pick(eng));
             const Cube c{detail::random_char(eng, g), detail::random_mask(eng, g.size())};
             const FiniteChain lhs = boundary(bp.total(), bp.c_h(c));
             const FiniteChain rhs = bp.c_h(boundary(bp.base(), c));
             if (lhs != rhs)
                 return "pull-back does not commute with the boundary for " +
                        detail::describe_case(g, c);
             return {};
         }},
        {"pi-after-c-identity",
         [](std::mt19937_64& eng, const IdentityCheckOptions& o, int idx) -> std::string {
             const PlumbingGraph g = idx % 3 == 2 ? detail::random_graph(eng, o.max_vertices, -3, 2)
                                                  : detail::random_graph(eng, o.max_vertices, -5, -1);
             std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
             const BlowupPair bp(g, pick(eng));
             const Cube c{detail::random_char(eng, g), detail::random_mask(eng, g.size())};
             const FiniteChain round_trip = bp.pi_star_h(bp.c_h(c));
             if (round_trip != single_cube(bp.base_tag(), c))
                 return "push-forward of pull-back is not the identity for " +
                        detail::describe_case(g, c);
             return {};
         }},
        {"homotopy-identity",
         [](std::mt19937_64& eng, const IdentityCheckOptions& o, int idx) -> std::string {
             const PlumbingGraph g = idx % 3 == 2 ? detail::random_graph(eng, o.max_vertices, -3, 2)
                                                  : detail::random_graph(eng, o.max_vertices, -5, -1);
             std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
             const BlowupPair bp(g, pick(eng));
             const Cube c{detail::random_char(eng, bp.total()),
                          detail::random_mask(eng, bp.total().size())};
             const FiniteChain lhs =
                 boundary(bp.total(), bp.homotopy_K(c)) + bp.homotopy_K(boundary(bp.total(), c));
             const FiniteChain rhs =
                 single_cube(bp.total_tag(), c) - bp.c_h(bp.pi_star_h(c));
             if (lhs != rhs)
                 return "contraction homotopy identity fails for " +
                        detail::describe_case(bp.total(), c);
             return {};
         }},
        {"b-chain-map",
         [](std::mt19937_64& eng, const IdentityCheckOptions& o, int idx) -> std::string {
             const PlumbingGraph g = idx % 3 == 2 ? detail::random_graph(eng, o.max_vertices, -3, 2)
                                                  : detail::random_graph(eng, o.max_vertices, -5, -1);
             if (g.size() < 2) return {};
             std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
             const std::size_t j0 = pick(eng);
             const DeletePair dp(g, j0);
             const Cube c{detail::random_char(eng, dp.sub()),
                          detail::random_mask(eng, dp.sub().size())};
             const Int w((long)o.inner_half_width);
             const Int pad = detail::window_pad(g.intersection_form(), j0);
             const TruncationWindow outer{-w - pad, w + pad, std::nullopt};
             const FiniteChain lhs = filter_coord_range(
                 boundary(g, dp.b_op(c, outer).chain), j0, -w, w);
             const FiniteChain rhs = filter_coord_range(
                 dp.b_op(boundary(dp.sub(), c), outer).chain, j0, -w, w);
             if (lhs != rhs)
                 return "unsigned extension does not commute with the boundary for " +
                        detail::describe_case(dp.sub(), c);
             return {};
         }},
        {"bbar-chain-map",
         [](std::mt19937_64& eng, const IdentityCheckOptions& o, int idx) -> std::string {
             const PlumbingGraph g = idx % 3 == 2 ? detail::random_graph(eng, o.max_vertices, -3, 2)
                                                  : detail::random_graph(eng, o.max_vertices, -5, -1);
             if (g.size() < 2) return {};
             std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
             const std::size_t j0 = pick(eng);
             const DeletePair dp(g, j0);
             if (dp.sub().degenerate()) return {};
             ClassRepTable reps(dp.sub());
             const Cube c{detail::random_char(eng, dp.sub()),
                          detail::random_mask(eng, dp.sub().size())};
             const Int w((long)o.inner_half_width);
             const Int pad = detail::window_pad(g.intersection_form(), j0);
             const TruncationWindow outer{-w - pad, w + pad, std::nullopt};
             const FiniteChain lhs = filter_coord_range(
                 boundary(g, dp.bbar_op(c, reps, outer).chain), j0, -w, w);
             const FiniteChain rhs = filter_coord_range(
                 dp.bbar_op(boundary(dp.sub(), c), reps, outer).chain, j0, -w, w);
             if (lhs != rhs)
                 return "signed extension does not commute with the boundary for " +
                        detail::describe_case(dp.sub(), c);
             return {};
         }},
        {"split-after-signed-extension",
         [](std::mt19937_64& eng, const IdentityCheckOptions& o, int idx) -> std::string {
             (void)idx;
             const PlumbingGraph g = detail::random_graph(eng, o.max_vertices, -5, -2);
             if (g.size() < 2) return {};
             std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
             const std::size_t j0 = pick(eng);
             const DeletePair dp(g, j0);
             if (dp.sub().degenerate()) return {};
             if (g.bump_decoration(j0, Int(1)).degenerate()) return {};
             ClassRepTable reps(dp.sub());
             const SplitPair sp(g, j0);
             const Cube c{detail::random_char(eng, dp.sub()),
                          detail::random_mask(eng, dp.sub().size(),
                                              std::max(0, (int)dp.sub().size() - 1))};
             const Int n((long)o.u_cutoff);
             const Int t((long)o.inner_half_width);
             const Int bound = a_bound_for_cutoff(n);
             const TruncationWindow inner_win{-t - bound, t + bound, std::nullopt};
             const FiniteChain signed_ext = dp.bbar_op(c, reps, inner_win).chain;
             const WindowedChain composite = sp.a_op(signed_ext, TruncationWindow{Int(0), Int(0), n});
             const FiniteChain visible = filter_coord_range(composite.chain, j0, -t, t);
             if (!visible.zero())
                 return "split of signed extension is nonzero inside the certified window for " +
                        detail::describe_case(dp.sub(), c);
             return {};
         }},
        {"signed-extension-dual-witness",
         [](std::mt19937_64& eng, const IdentityCheckOptions& o, int idx) -> std::string {
             const PlumbingGraph g = idx % 3 == 2 ? detail::random_graph(eng, o.max_vertices, -3, 2)
                                                  : detail::random_graph(eng, o.max_vertices, -5, -1);
             if (g.size() < 2) return {};
             std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
             const std::size_t j0 = pick(eng);
             const DeletePair dp(g, j0);
             if (dp.sub().degenerate()) return {};
             ClassRepTable reps(dp.sub());
             const Cube c{detail::random_char(eng, dp.sub()),
                          detail::random_mask(eng, dp.sub().size())};
             std::uniform_int_distribution<long> adist(-3, 3);
             Int a = 2 * Int(adist(eng)) + g.decoration(j0);
             std::uniform_int_distribution<long> ldist(0, 3);
             const Int ell(ldist(eng));
             const Cube lifted{dp.extend_with(c.k, a), lift_mask(c.mask, j0)};
             const FiniteCochain phi = single_dual(dp.full_tag(), ell, lifted);
             const FiniteCochain image = bbar_dual(dp, reps, phi);
             FiniteCochain expect(dp.sub_tag());
             expect.add(Int(dp.bbar_sign(c.k, a, reps)), ell, c);
             if (image != expect)
                 return "dual of the signed extension misses its witness for " +
                        detail::describe_case(dp.sub(), c);
             return {};
         }},
        {"split-mod-u-preimage",
         [](std::mt19937_64& eng, const IdentityCheckOptions& o, int idx) -> std::string {
             (void)idx;
             const PlumbingGraph g = detail::random_graph(eng, o.max_vertices, -5, -2);
             std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
             const std::size_t j0 = pick(eng);
             if (g.bump_decoration(j0, Int(1)).degenerate()) return {};
             const SplitPair sp(g, j0);
             const Cube c{detail::random_char(eng, g), detail::random_mask(eng, g.size())};
             const IntMat m = g.intersection_form();
             const TruncationWindow win{Int(-7), Int(7), Int(0)};

             const auto extremal_value = [&](const CharVec& k, bool with_j0) {
                 // max over direction subsets (containing / avoiding j0) of
                 // sum of base coordinates minus the subset's self-pairing
                 std::optional<Int> best;
                 std::uint32_t sub = c.mask;
                 while (true) {
                     const bool has = (sub & (1u << j0)) != 0;
                     if (has == with_j0) {
                         Int val(0);
                         std::vector<Int> x(g.size(), Int(0));
                         for (std::size_t j = 0; j < g.size(); ++j)
                             if (sub & (1u << j)) {
                                 val += k[j];
                                 x[j] = 1;
                             }
                         val -= quad_form(m, x);
                         if (!best || val > *best) best = val;
                     }
                     if (sub == 0) break;
                     sub = (sub - 1) & c.mask;
                 }
                 return best;
             };
             const auto shifted_base = [&](const Int& delta) {
                 CharVec k = c.k;
                 k[j0] += delta;
                 return k;
             };

             if (!(c.mask & (1u << j0))) {
                 // two symmetric lowest-order terms
                 const FiniteChain got = sp.a_op(c, win).chain;
                 FiniteChain expect(sp.raised_tag());
                 expect.add(Int(1), Int(0), Cube{shifted_base(Int(-1)), c.mask});
                 expect.add(Int(1), Int(0), Cube{shifted_base(Int(1)), c.mask});
                 if (got != expect)
                     return "lowest-order split terms differ (direction set avoids the vertex) for " +
                            detail::describe_case(g, c);
                 return {};
             }

             // direction set through j0: locate the transition index by direct search
             Int span(4);
             for (std::size_t j = 0; j < g.size(); ++j)
                 if (c.mask & (1u << j)) span += abs(c.k[j]) + abs(m(j, j)) + g.size();
             const auto with_flag = [&](const Int& offset) {
                 const CharVec k = shifted_base(2 * offset);
                 // the direction set contains j0, so both restricted maxima exist
                 const Int vin = *extremal_value(k, true);
                 const Int vout = *extremal_value(k, false);
                 const Int mval = vin > vout ? vin : vout;
                 return std::pair<bool, bool>{vin == mval, vout == mval};
             };
             std::optional<Int> last_fail;
             for (Int i = -span; i <= span; ++i)
                 if (!with_flag(i).first) last_fail = i;
             if (!last_fail || *last_fail == span) return {};  // transition outside the scan
             const Int i0 = *last_fail + 1;
             for (Int i = i0 - 1; i <= i0 + 1; ++i) {
                 const auto [e_with, e_without] = with_flag(i);
                 const Cube ci{shifted_base(2 * i), c.mask};
                 const FiniteChain got = sp.a_op(ci, win).chain;
                 FiniteChain expect(sp.raised_tag());
                 expect.add(Int(1), Int(0), Cube{shifted_base(2 * i + 1), c.mask});
                 if (e_without) expect.add(Int(1), Int(0), Cube{shifted_base(2 * i - 1), c.mask});
                 if (e_with) expect.add(Int(1), Int(0), Cube{shifted_base(2 * i + 3), c.mask});
                 if (got != expect) {
                     const Int off = i - i0;
                     std::ostringstream detail_line;
                     detail_line << "lowest-order split terms differ at offset " << off.get_str()
                                 << " from the transition for " << detail::describe_case(g, c);
                     return detail_line.str();
                 }
             }
             return {};
         }},
    };

    for (const auto& [name, fn] : identities) {
        IdentityReportItem item;
        item.identity = name;
        for (int idx = 0; idx < opt.cases; ++idx) {
            std::mt19937_64 eng(opt.seed * kStreamSalt + (std::uint64_t)idx * 0x100000001b3ULL +
                                std::hash<std::string>{}(name));
            ++item.cases;
            std::string detail_line = fn(eng, opt, idx);
            if (!detail_line.empty()) {
                ++item.failures;
                report.failures.push_back({name, idx, std::move(detail_line)});
            }
        }
        report.items.push_back(std::move(item));
    }
    return report;
}

}  // namespace latcoh

#endif  // LATCOH_CHAINS_HPP
