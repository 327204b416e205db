// SPDX-License-Identifier: MIT
#ifndef LATCOH_ENUMERATE_HPP
#define LATCOH_ENUMERATE_HPP

/**
 * @file enumerate.hpp
 * @brief Exact enumeration of lattice points in ellipsoids.
 *
 * Given a positive definite integer matrix A and an integer vector a0, the
 * quadratic function
 *
 *     W(u) = (a0^T u + u^T A u) / 2
 *
 * is coercive, so every sublevel set { u in Z^s : W(u) <= cap } is finite.
 * This header enumerates such sets exactly (no floating point): completing
 * the square turns the condition into an ellipsoid constraint, an LDL^T
 * factorization of A splits it coordinate by coordinate, and per-coordinate
 * integer ranges come from exact rational square-root bounds.
 */

#include <functional>
#include <stdexcept>
#include <vector>

#include "latcoh/matrix.hpp"
#include "latcoh/rational.hpp"

namespace latcoh {

/** @brief Factorization A = L D L^T with L unit lower triangular, D diagonal. */
struct LDL {
    MatQ l;              ///< unit lower triangular factor
    std::vector<Rat> d;  ///< positive diagonal entries
};

/**
 * @brief LDL^T factorization of a symmetric positive definite matrix.
 * @throws std::domain_error if the matrix is not positive definite.
 */
inline LDL ldlt(const IntMat& a) {
    const std::size_t n = a.rows();
    if (n != a.cols()) throw std::invalid_argument("ldlt: matrix not square");
    LDL out;
    out.l.assign(n, std::vector<Rat>(n, Rat(0)));
    out.d.assign(n, Rat(0));
    for (std::size_t k = 0; k < n; ++k) {
        Rat dk(a(k, k));
        for (std::size_t t = 0; t < k; ++t) dk -= out.l[k][t] * out.l[k][t] * out.d[t];
        if (dk <= 0) throw std::domain_error("ldlt: matrix is not positive definite");
        out.d[k] = dk;
        out.l[k][k] = 1;
        for (std::size_t i = k + 1; i < n; ++i) {
            Rat v(a(i, k));
            for (std::size_t t = 0; t < k; ++t) v -= out.l[i][t] * out.l[k][t] * out.d[t];
            out.l[i][k] = v / dk;
        }
    }
    return out;
}

/** @brief floor(p + sqrt(q)) for rationals p and q >= 0, exactly. */
inline Int floor_plus_sqrt(const Rat& p, const Rat& q) {
    if (q < 0) throw std::domain_error("floor_plus_sqrt: negative radicand");
    Int n0 = floor_rat(p) + rat_sqrt_floor(q);
    // The true value is n0 or n0 + 1; test "n <= p + sqrt(q)" exactly.
    auto le = [&](const Int& n) {
        Rat diff = Rat(n) - p;  // n <= p + sqrt(q)  <=>  diff <= sqrt(q)
        if (diff <= 0) return true;
        return diff * diff <= q;
    };
    return le(n0 + 1) ? n0 + 1 : n0;
}

/** @brief ceil(p - sqrt(q)) for rationals p and q >= 0, exactly. */
inline Int ceil_minus_sqrt(const Rat& p, const Rat& q) {
    if (q < 0) throw std::domain_error("ceil_minus_sqrt: negative radicand");
    Int c0 = ceil_rat(p) - rat_sqrt_floor(q);
    auto ge = [&](const Int& n) {
        Rat diff = p - Rat(n);  // n >= p - sqrt(q)  <=>  diff <= sqrt(q)
        if (diff <= 0) return true;
        return diff * diff <= q;
    };
    return ge(c0 - 1) ? c0 - 1 : c0;
}

/**
 * @brief Visit every u in Z^s with W(u) = (a0^T u + u^T A u)/2 <= cap.
 *
 * Requires A positive definite (throws std::domain_error otherwise).  The
 * callback receives the point u and the exact value W(u).  Points are
 * visited in a fixed deterministic order (last coordinate outermost,
 * ascending).  The s = 0 case visits the single empty point iff 0 <= cap.
 */
template <class F>
inline void enumerate_sublevel(const IntMat& a, const std::vector<Int>& a0, const Rat& cap,
                               F&& visit) {
    const std::size_t s = a.rows();
    if (a0.size() != s || a.cols() != s)
        throw std::invalid_argument("enumerate_sublevel: dimension mismatch");
    if (s == 0) {
        if (Rat(0) <= cap) visit(std::vector<Int>{}, Rat(0));
        return;
    }
    const LDL f = ldlt(a);

    // Complete the square: W(u) <= cap  <=>  (u+mu)^T A (u+mu) <= r2,
    // with mu = A^{-1} a0 / 2 and r2 = 2 cap + mu^T A mu = 2 cap + a0^T A^{-1} a0 / 4.
    MatQ ainv = inverse_q(a);
    std::vector<Rat> mu(s, Rat(0));
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) mu[i] += ainv[i][j] * Rat(a0[j]) / 2;
    Rat mu_norm(0);  // mu^T A mu
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) mu_norm += mu[i] * Rat(a(i, j)) * mu[j];
    const Rat r2 = 2 * cap + mu_norm;
    if (r2 < 0) return;

    // v = u + mu; v^T A v = sum_i d_i (v_i + c_i)^2 with c_i = sum_{j>i} L_ji v_j.
    std::vector<Int> u(s, 0);
    std::vector<Rat> v(s, Rat(0));
    auto descend = [&](auto&& self, std::size_t level, const Rat& used) -> void {
        // level counts processed coordinates from the back; i is next index.
        const std::size_t i = s - 1 - level;
        Rat ci(0);
        for (std::size_t j = i + 1; j < s; ++j) ci += f.l[j][i] * v[j];
        const Rat q = (r2 - used) / f.d[i];  // (v_i + c_i)^2 <= q
        const Rat b = mu[i] + ci;            // v_i + c_i = u_i + b
        const Int lo = ceil_minus_sqrt(-b, q);
        const Int hi = floor_plus_sqrt(-b, q);
        for (Int ui = lo; ui <= hi; ++ui) {
            u[i] = ui;
            v[i] = Rat(ui) + mu[i];
            const Rat term = Rat(ui) + b;
            const Rat used2 = used + f.d[i] * term * term;
            if (used2 > r2) continue;  // guard against boundary rounding
            if (i == 0) {
                const Rat w = (used2 - mu_norm) / 2;
                visit(u, w);
            } else {
                self(self, level + 1, used2);
            }
        }
    };
    descend(descend, 0, Rat(0));
}

}  // namespace latcoh

#endif  // LATCOH_ENUMERATE_HPP
