// SPDX-License-Identifier: MIT
#ifndef LATCOH_RATIONAL_HPP
#define LATCOH_RATIONAL_HPP

/**
 * @file rational.hpp
 * @brief Exact integer/rational helpers built on GMP (gmpxx).
 *
 * All lattice computations in this library are exact: integers are
 * arbitrary-precision (`mpz_class`) and fractions are exact rationals
 * (`mpq_class`).  This header collects the small numeric utilities the
 * rest of the library relies on: floor/ceil of rationals, exact floor of
 * square roots, and parsing/printing helpers.
 */

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace latcoh {

using Int = mpz_class;
using Rat = mpq_class;

/** @brief Floor of an exact rational as an arbitrary-precision integer. */
inline Int floor_rat(const Rat& q) {
    Int out;
    mpz_fdiv_q(out.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return out;
}

/** @brief Ceiling of an exact rational as an arbitrary-precision integer. */
inline Int ceil_rat(const Rat& q) {
    Int out;
    mpz_cdiv_q(out.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return out;
}

/** @brief Floored quotient of two integers (rounds toward minus infinity). */
inline Int floor_div(const Int& a, const Int& b) {
    Int out;
    mpz_fdiv_q(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return out;
}

/** @brief Exact floor of the square root of a non-negative integer. */
inline Int isqrt_floor(const Int& n) {
    if (n < 0) throw std::domain_error("isqrt_floor: negative argument");
    Int out;
    mpz_sqrt(out.get_mpz_t(), n.get_mpz_t());
    return out;
}

/**
 * @brief Exact floor of the square root of a non-negative rational.
 *
 * Uses floor(sqrt(n/d)) == floor(sqrt(n*d)) / d ... more precisely
 * floor(sqrt(n/d)) == floor(floor(sqrt(n*d)) / d), which is exact because
 * k <= sqrt(n/d) iff k*d <= sqrt(n*d) for integers k >= 0.
 */
inline Int rat_sqrt_floor(const Rat& q) {
    if (q < 0) throw std::domain_error("rat_sqrt_floor: negative argument");
    Int nd = q.get_num() * q.get_den();
    return floor_div(isqrt_floor(nd), q.get_den());
}

/**
 * @brief Ceiling of the square root of a non-negative rational.
 *
 * Convenient for certified enclosing boxes: every real solution of
 * x^2 <= q satisfies |x| <= rat_sqrt_ceil(q).
 */
inline Int rat_sqrt_ceil(const Rat& q) {
    Int f = rat_sqrt_floor(q);
    // f <= sqrt(q) < f+1; return f if f*f == q exactly, else f+1.
    if (Rat(f * f) == q) return f;
    return f + 1;
}

/** @brief True if the rational is an integer. */
inline bool is_integer(const Rat& q) { return q.get_den() == 1; }

/** @brief Convert an exact-integer rational to Int; throws otherwise. */
inline Int to_int(const Rat& q) {
    if (!is_integer(q)) throw std::domain_error("to_int: rational is not an integer");
    return Int(q.get_num());
}

/** @brief Render a rational like "3", "-5/8". */
inline std::string rat_to_string(const Rat& q) {
    std::string s = q.get_num().get_str();
    if (q.get_den() != 1) s += "/" + q.get_den().get_str();
    return s;
}

/** @brief Checked narrowing of an Int to int64; throws if out of range. */
inline long long to_ll(const Int& n) {
    if (!n.fits_slong_p())
        throw std::overflow_error("to_ll: value does not fit in a machine word");
    return n.get_si();
}

}  // namespace latcoh

#endif  // LATCOH_RATIONAL_HPP
