// SPDX-License-Identifier: MIT
#ifndef LATCOH_MATRIX_HPP
#define LATCOH_MATRIX_HPP

/**
 * @file matrix.hpp
 * @brief Dense exact linear algebra over Z and Q.
 *
 * Provides the handful of exact kernels the lattice machinery needs:
 *
 *  - fraction-free determinants (Bareiss),
 *  - rational Gauss-Jordan inverse / linear solve,
 *  - Smith normal form with unimodular transforms U*A*V = D,
 *  - integer kernel bases (saturated, via the SNF transforms),
 *  - definiteness tests for symmetric integer forms.
 *
 * Matrices here are small (the number of graph vertices), so dense
 * arbitrary-precision arithmetic is the right tradeoff; the large sparse
 * boundary matrices of cube complexes are handled elsewhere.
 */

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "latcoh/rational.hpp"

namespace latcoh {

/** @brief Dense matrix with arbitrary-precision integer entries. */
class IntMat {
public:
    IntMat() : rows_(0), cols_(0) {}
    IntMat(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    /** @brief n-by-n identity matrix. */
    static IntMat identity(std::size_t n) {
        IntMat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Int& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Int& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    bool operator==(const IntMat& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    IntMat transpose() const {
        IntMat t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    IntMat operator*(const IntMat& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("IntMat: dimension mismatch in product");
        IntMat p(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const Int& a = (*this)(i, k);
                if (a == 0) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) p(i, j) += a * o(k, j);
            }
        return p;
    }

    IntMat operator-() const {
        IntMat m(rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) m.data_[i] = -data_[i];
        return m;
    }

    /** @brief Matrix-vector product. */
    std::vector<Int> apply(const std::vector<Int>& x) const {
        if (x.size() != cols_) throw std::invalid_argument("IntMat: dimension mismatch in apply");
        std::vector<Int> y(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if ((*this)(i, j) != 0) y[i] += (*this)(i, j) * x[j];
        return y;
    }

private:
    std::size_t rows_, cols_;
    std::vector<Int> data_;
};

/** @brief Dense matrix with exact rational entries. */
using MatQ = std::vector<std::vector<Rat>>;

/** @brief Rational matrix-vector product. */
inline std::vector<Rat> apply_q(const MatQ& m, const std::vector<Rat>& x) {
    std::vector<Rat> y(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i].size() != x.size()) throw std::invalid_argument("apply_q: dimension mismatch");
        for (std::size_t j = 0; j < x.size(); ++j) y[i] += m[i][j] * x[j];
    }
    return y;
}

/**
 * @brief Determinant of a square integer matrix by Bareiss elimination.
 *
 * Fraction-free: every intermediate entry is an exact integer (a minor of
 * the input), so there is no rational arithmetic and no rounding anywhere.
 */
inline Int det_bareiss(IntMat a) {
    const std::size_t n = a.rows();
    if (n != a.cols()) throw std::invalid_argument("det_bareiss: matrix not square");
    if (n == 0) return 1;
    int sign = 1;
    Int prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        // Pivot: any nonzero entry in column k at or below row k.
        std::size_t piv = k;
        while (piv < n && a(piv, k) == 0) ++piv;
        if (piv == n) return 0;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(k, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                Int num = a(k, k) * a(i, j) - a(i, k) * a(k, j);
                // Exact by the Desnanot-Jacobi identity.
                mpz_divexact(a(i, j).get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
            }
            a(i, k) = 0;
        }
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

/** @brief Rank over Q via exact rational Gaussian elimination. */
inline std::size_t rank_q(const IntMat& m) {
    const std::size_t r = m.rows(), c = m.cols();
    MatQ a(r, std::vector<Rat>(c));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) a[i][j] = Rat(m(i, j));
    std::size_t rank = 0;
    for (std::size_t col = 0; col < c && rank < r; ++col) {
        std::size_t piv = rank;
        while (piv < r && a[piv][col] == 0) ++piv;
        if (piv == r) continue;
        std::swap(a[piv], a[rank]);
        const Rat p = a[rank][col];
        for (std::size_t i = rank + 1; i < r; ++i) {
            if (a[i][col] == 0) continue;
            const Rat f = a[i][col] / p;
            for (std::size_t j = col; j < c; ++j) a[i][j] -= f * a[rank][j];
        }
        ++rank;
    }
    return rank;
}

/**
 * @brief Exact inverse of a square integer matrix, as a rational matrix.
 * @throws std::domain_error if the matrix is singular.
 */
inline MatQ inverse_q(const IntMat& m) {
    const std::size_t n = m.rows();
    if (n != m.cols()) throw std::invalid_argument("inverse_q: matrix not square");
    MatQ a(n, std::vector<Rat>(2 * n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i][j] = Rat(m(i, j));
        a[i][n + i] = 1;
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a[piv][col] == 0) ++piv;
        if (piv == n) throw std::domain_error("inverse_q: singular matrix");
        std::swap(a[piv], a[col]);
        const Rat p = a[col][col];
        for (std::size_t j = 0; j < 2 * n; ++j) a[col][j] /= p;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col || a[i][col] == 0) continue;
            const Rat f = a[i][col];
            for (std::size_t j = 0; j < 2 * n; ++j) a[i][j] -= f * a[col][j];
        }
    }
    MatQ inv(n, std::vector<Rat>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv[i][j] = a[i][n + j];
    return inv;
}

/**
 * @brief Solve A x = b exactly over Q.
 * @returns the solution, or empty if the system is inconsistent.
 * @throws std::invalid_argument on dimension mismatch.
 *
 * For underdetermined consistent systems an arbitrary (deterministic)
 * solution is returned.
 */
inline std::vector<Rat> solve_q(const IntMat& m, const std::vector<Rat>& b, bool* ok = nullptr) {
    const std::size_t r = m.rows(), c = m.cols();
    if (b.size() != r) throw std::invalid_argument("solve_q: dimension mismatch");
    MatQ a(r, std::vector<Rat>(c + 1));
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) a[i][j] = Rat(m(i, j));
        a[i][c] = b[i];
    }
    std::vector<std::size_t> pivot_col;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < c && rank < r; ++col) {
        std::size_t piv = rank;
        while (piv < r && a[piv][col] == 0) ++piv;
        if (piv == r) continue;
        std::swap(a[piv], a[rank]);
        const Rat p = a[rank][col];
        for (std::size_t j = col; j <= c; ++j) a[rank][j] /= p;
        for (std::size_t i = 0; i < r; ++i) {
            if (i == rank || a[i][col] == 0) continue;
            const Rat f = a[i][col];
            for (std::size_t j = col; j <= c; ++j) a[i][j] -= f * a[rank][j];
        }
        pivot_col.push_back(col);
        ++rank;
    }
    for (std::size_t i = rank; i < r; ++i)
        if (a[i][c] != 0) {
            if (ok) { *ok = false; return {}; }
            throw std::domain_error("solve_q: inconsistent system");
        }
    std::vector<Rat> x(c);
    for (std::size_t i = 0; i < rank; ++i) x[pivot_col[i]] = a[i][c];
    if (ok) *ok = true;
    return x;
}

/** @brief Result of a Smith normal form computation: U*A*V = D. */
struct SmithForm {
    IntMat d;               ///< Diagonal form, d(i,i) >= 0, d(i,i) | d(i+1,i+1).
    IntMat u;               ///< Unimodular row transform.
    IntMat v;               ///< Unimodular column transform.
    std::size_t rank = 0;   ///< Number of nonzero diagonal entries.

    /** @brief Invariant factors strictly greater than 1 (the torsion part). */
    std::vector<Int> torsion() const {
        std::vector<Int> t;
        for (std::size_t i = 0; i < rank; ++i)
            if (d(i, i) > 1) t.push_back(d(i, i));
        return t;
    }
};

/**
 * @brief Smith normal form with transforms.
 *
 * Returns U, V unimodular and D diagonal with non-negative entries and
 * the divisibility chain d_0 | d_1 | ... such that U*A*V = D.
 */
inline SmithForm smith_normal_form(IntMat a) {
    const std::size_t r = a.rows(), c = a.cols();
    SmithForm out;
    out.u = IntMat::identity(r);
    out.v = IntMat::identity(c);

    auto swap_rows = [&](std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t k = 0; k < c; ++k) std::swap(a(i, k), a(j, k));
        for (std::size_t k = 0; k < r; ++k) std::swap(out.u(i, k), out.u(j, k));
    };
    auto swap_cols = [&](std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t k = 0; k < r; ++k) std::swap(a(k, i), a(k, j));
        for (std::size_t k = 0; k < c; ++k) std::swap(out.v(k, i), out.v(k, j));
    };
    auto add_row = [&](std::size_t dst, std::size_t src, const Int& f) {  // row dst += f * row src
        for (std::size_t k = 0; k < c; ++k) a(dst, k) += f * a(src, k);
        for (std::size_t k = 0; k < r; ++k) out.u(dst, k) += f * out.u(src, k);
    };
    auto add_col = [&](std::size_t dst, std::size_t src, const Int& f) {  // col dst += f * col src
        for (std::size_t k = 0; k < r; ++k) a(k, dst) += f * a(k, src);
        for (std::size_t k = 0; k < c; ++k) out.v(k, dst) += f * out.v(k, src);
    };
    auto negate_row = [&](std::size_t i) {
        for (std::size_t k = 0; k < c; ++k) a(i, k) = -a(i, k);
        for (std::size_t k = 0; k < r; ++k) out.u(i, k) = -out.u(i, k);
    };

    std::size_t t = 0;
    while (t < r && t < c) {
        // Find entry of minimal absolute value in the remaining block.
        std::size_t bi = t, bj = t;
        bool found = false;
        Int best = 0;
        for (std::size_t i = t; i < r; ++i)
            for (std::size_t j = t; j < c; ++j) {
                if (a(i, j) == 0) continue;
                Int v = abs(a(i, j));
                if (!found || v < best) { found = true; best = v; bi = i; bj = j; }
            }
        if (!found) break;
        swap_rows(t, bi);
        swap_cols(t, bj);
        if (a(t, t) < 0) negate_row(t);

        bool clean = true;
        for (std::size_t i = t + 1; i < r; ++i) {
            if (a(i, t) == 0) continue;
            Int q = floor_div(a(i, t), a(t, t));
            add_row(i, t, -q);
            if (a(i, t) != 0) clean = false;  // remainder stays; re-pivot on it
        }
        for (std::size_t j = t + 1; j < c; ++j) {
            if (a(t, j) == 0) continue;
            Int q = floor_div(a(t, j), a(t, t));
            add_col(j, t, -q);
            if (a(t, j) != 0) clean = false;
        }
        if (!clean) continue;  // smaller entries appeared; repeat at same t

        // Enforce divisibility of the remaining block by the pivot.
        bool divides_all = true;
        for (std::size_t i = t + 1; i < r && divides_all; ++i)
            for (std::size_t j = t + 1; j < c && divides_all; ++j)
                if (a(i, j) % a(t, t) != 0) {
                    add_row(t, i, 1);  // pulls the offending row up; re-run pivot step
                    divides_all = false;
                }
        if (!divides_all) continue;
        ++t;
    }
    out.rank = t;
    out.d = std::move(a);
    return out;
}

/**
 * @brief Basis of the integer kernel of A (as columns).
 *
 * The basis spans ker(A) as a direct summand of Z^cols (it is the image of
 * the trailing columns of the unimodular V from the SNF), so it is
 * saturated: any integer solution of A x = 0 is an integer combination.
 */
inline std::vector<std::vector<Int>> kernel_basis(const IntMat& m) {
    SmithForm snf = smith_normal_form(m);
    std::vector<std::vector<Int>> basis;
    for (std::size_t j = snf.rank; j < m.cols(); ++j) {
        std::vector<Int> v(m.cols());
        for (std::size_t i = 0; i < m.cols(); ++i) v[i] = snf.v(i, j);
        basis.push_back(std::move(v));
    }
    return basis;
}

/**
 * @brief True if the symmetric matrix is negative definite
 *        (Sylvester criterion on the negated form: all leading principal
 *        minors of -A positive).
 */
inline bool is_negative_definite(const IntMat& a) {
    const std::size_t n = a.rows();
    if (n != a.cols()) throw std::invalid_argument("is_negative_definite: matrix not square");
    for (std::size_t k = 1; k <= n; ++k) {
        IntMat minor(k, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) minor(i, j) = -a(i, j);
        if (det_bareiss(minor) <= 0) return false;
    }
    return true;
}

/** @brief Evaluate the quadratic form x^T A x exactly. */
inline Int quad_form(const IntMat& a, const std::vector<Int>& x) {
    if (a.rows() != x.size() || a.cols() != x.size())
        throw std::invalid_argument("quad_form: dimension mismatch");
    Int s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0) continue;
        for (std::size_t j = 0; j < x.size(); ++j)
            if (x[j] != 0) s += x[i] * a(i, j) * x[j];
    }
    return s;
}

}  // namespace latcoh

#endif  // LATCOH_MATRIX_HPP
