#ifndef GBS_MATRIX_HPP
#define GBS_MATRIX_HPP

#include "gbs/errors.hpp"
#include "gbs/numeric.hpp"

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

namespace gbs {

// Dense exact matrix, row-major. T is Int or Rat.
template <typename T>
class Matrix {
  public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols, T(0)) {}
    Matrix(std::initializer_list<std::initializer_list<T>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        entries_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw DimensionMismatch("ragged initializer");
            entries_.insert(entries_.end(), r.begin(), r.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && entries_ == o.entries_;
    }
    bool operator!=(const Matrix& o) const { return !(*this == o); }
    bool operator<(const Matrix& o) const {
        if (rows_ != o.rows_) return rows_ < o.rows_;
        if (cols_ != o.cols_) return cols_ < o.cols_;
        return entries_ < o.entries_;
    }

    Matrix operator*(const Matrix& o) const {
        if (cols_ != o.rows_) throw DimensionMismatch("matrix product shape");
        Matrix r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const T& a = (*this)(i, k);
                if (a == 0) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
            }
        return r;
    }

    Matrix operator+(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("matrix sum shape");
        Matrix r = *this;
        for (std::size_t i = 0; i < entries_.size(); ++i) r.entries_[i] += o.entries_[i];
        return r;
    }

    Matrix operator-() const {
        Matrix r = *this;
        for (auto& e : r.entries_) e = -e;
        return r;
    }

    std::vector<T> column(std::size_t j) const {
        std::vector<T> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    std::vector<T> apply(const std::vector<T>& v) const {
        if (v.size() != cols_) throw DimensionMismatch("matrix-vector shape");
        std::vector<T> r(rows_, T(0));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
        return r;
    }

    void swap_cols(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
    }
    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
    }
    // col[a] += c * col[b]
    void add_col(std::size_t a, std::size_t b, const T& c) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, a) += c * (*this)(i, b);
    }
    void add_row(std::size_t a, std::size_t b, const T& c) {
        for (std::size_t j = 0; j < cols_; ++j) (*this)(a, j) += c * (*this)(b, j);
    }
    void negate_col(std::size_t a) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, a) = -(*this)(i, a);
    }
    void negate_row(std::size_t a) {
        for (std::size_t j = 0; j < cols_; ++j) (*this)(a, j) = -(*this)(a, j);
    }

    bool is_zero() const {
        return std::all_of(entries_.begin(), entries_.end(), [](const T& e) { return e == 0; });
    }

  private:
    std::size_t rows_, cols_;
    std::vector<T> entries_;
};

using IntMatrix = Matrix<Int>;
using RatMatrix = Matrix<Rat>;

inline RatMatrix to_rational(const IntMatrix& m) {
    RatMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = Rat(m(i, j));
    return r;
}

// Exact determinant by Bareiss fraction-free elimination.
inline Int det(const IntMatrix& m) {
    if (m.rows() != m.cols()) throw NonSquare("determinant of non-square matrix");
    const std::size_t n = m.rows();
    if (n == 0) return 1;
    IntMatrix a = m;
    Int prev(1);
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && a(p, k) == 0) ++p;
            if (p == n) return 0;
            a.swap_rows(k, p);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j)
                a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
            a(i, k) = 0;
        }
        prev = a(k, k);
    }
    return sign > 0 ? a(n - 1, n - 1) : Int(-a(n - 1, n - 1));
}

inline Rat det(const RatMatrix& m) {
    if (m.rows() != m.cols()) throw NonSquare("determinant of non-square matrix");
    const std::size_t n = m.rows();
    RatMatrix a = m;
    Rat d(1);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && a(p, k) == 0) ++p;
        if (p == n) return Rat(0);
        if (p != k) {
            a.swap_rows(k, p);
            d = -d;
        }
        d *= a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            Rat f = a(i, k) / a(k, k);
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return d;
}

// Exact inverse by Gauss-Jordan. Throws SingularMatrix when det = 0.
inline RatMatrix rat_inverse(const RatMatrix& m) {
    if (m.rows() != m.cols()) throw NonSquare("inverse of non-square matrix");
    const std::size_t n = m.rows();
    RatMatrix a = m;
    RatMatrix inv = RatMatrix::identity(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && a(p, k) == 0) ++p;
        if (p == n) throw SingularMatrix("matrix is singular");
        a.swap_rows(k, p);
        inv.swap_rows(k, p);
        Rat piv = a(k, k);
        for (std::size_t j = 0; j < n; ++j) {
            a(k, j) /= piv;
            inv(k, j) /= piv;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k || a(i, k) == 0) continue;
            Rat f = a(i, k);
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) -= f * a(k, j);
                inv(i, j) -= f * inv(k, j);
            }
        }
    }
    return inv;
}

inline RatMatrix rat_inverse(const IntMatrix& m) { return rat_inverse(to_rational(m)); }

// Inverse of a unimodular integer matrix, kept integral.
inline IntMatrix unimodular_inverse(const IntMatrix& m) {
    RatMatrix inv = rat_inverse(m);
    IntMatrix r(inv.rows(), inv.cols());
    for (std::size_t i = 0; i < inv.rows(); ++i)
        for (std::size_t j = 0; j < inv.cols(); ++j) {
            if (rat_den(inv(i, j)) != 1)
                throw InvariantViolation("unimodular_inverse: matrix is not unimodular");
            r(i, j) = rat_num(inv(i, j));
        }
    return r;
}

inline bool is_unimodular_matrix(const IntMatrix& m) {
    if (m.rows() != m.cols()) return false;
    Int d = det(m);
    return d == 1 || d == -1;
}

struct HnfResult {
    IntMatrix h; // d x r, canonical column-style HNF, zero columns removed
    IntMatrix u; // c x c unimodular with m * u = [h | 0]
    // row index of the pivot of each column of h (strictly increasing)
    std::vector<std::size_t> pivot_rows;
};

// Column-style Hermite normal form: lower-triangular pivot structure with
// strictly descending pivots left to right (pivot_rows increasing), positive
// pivots, and in every pivot row the entries left of the pivot reduced into
// [0, pivot). This form is unique, so lattice equality is entry-wise equality.
inline HnfResult hnf(const IntMatrix& m) {
    const std::size_t d = m.rows(), c = m.cols();
    IntMatrix h = m;
    IntMatrix u = IntMatrix::identity(c);
    std::size_t col = 0;
    std::vector<std::size_t> pivots;
    for (std::size_t row = 0; row < d && col < c; ++row) {
        // gcd-reduce row entries at columns >= col into position col
        while (true) {
            std::size_t best = c;
            for (std::size_t j = col; j < c; ++j) {
                if (h(row, j) == 0) continue;
                if (best == c || abs_int(h(row, j)) < abs_int(h(row, best))) best = j;
            }
            if (best == c) break; // row is zero on the working columns
            h.swap_cols(col, best);
            u.swap_cols(col, best);
            if (h(row, col) < 0) {
                h.negate_col(col);
                u.negate_col(col);
            }
            bool cleared = true;
            for (std::size_t j = col + 1; j < c; ++j) {
                if (h(row, j) == 0) continue;
                Int q = h(row, j) / h(row, col); // truncated division
                h.add_col(j, col, -q);
                u.add_col(j, col, -q);
                if (h(row, j) != 0) cleared = false;
            }
            if (cleared) break;
        }
        if (col < c && h(row, col) != 0) {
            // reduce earlier columns in this pivot row into [0, pivot)
            const Int& p = h(row, col);
            for (std::size_t j = 0; j < col; ++j) {
                Int q = h(row, j) / p;
                if (h(row, j) - q * p < 0) q -= 1; // floor
                if (q != 0) {
                    h.add_col(j, col, -q);
                    u.add_col(j, col, -q);
                }
            }
            pivots.push_back(row);
            ++col;
        }
    }
    const std::size_t r = col;
    IntMatrix basis(d, r);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < r; ++j) basis(i, j) = h(i, j);
    return HnfResult{std::move(basis), std::move(u), std::move(pivots)};
}

struct SnfResult {
    IntMatrix s; // same shape as input, diagonal, nonnegative, d1 | d2 | ...
    IntMatrix u; // rows x rows unimodular
    IntMatrix v; // cols x cols unimodular, u * m * v = s
};

// Smith normal form with transforms.
inline SnfResult snf(const IntMatrix& m) {
    const std::size_t rws = m.rows(), cls = m.cols();
    IntMatrix s = m;
    IntMatrix u = IntMatrix::identity(rws);
    IntMatrix v = IntMatrix::identity(cls);
    const std::size_t n = std::min(rws, cls);

    for (std::size_t k = 0; k < n; ++k) {
        // find a nonzero entry of minimal absolute value in the working block
        while (true) {
            std::size_t bi = rws, bj = cls;
            for (std::size_t i = k; i < rws; ++i)
                for (std::size_t j = k; j < cls; ++j) {
                    if (s(i, j) == 0) continue;
                    if (bi == rws || abs_int(s(i, j)) < abs_int(s(bi, bj))) {
                        bi = i;
                        bj = j;
                    }
                }
            if (bi == rws) goto done; // block is zero
            s.swap_rows(k, bi);
            u.swap_rows(k, bi);
            s.swap_cols(k, bj);
            v.swap_cols(k, bj);
            if (s(k, k) < 0) {
                s.negate_row(k);
                u.negate_row(k);
            }
            bool again = false;
            for (std::size_t i = k + 1; i < rws; ++i) {
                if (s(i, k) == 0) continue;
                Int q = s(i, k) / s(k, k);
                s.add_row(i, k, -q);
                u.add_row(i, k, -q);
                if (s(i, k) != 0) again = true;
            }
            for (std::size_t j = k + 1; j < cls; ++j) {
                if (s(k, j) == 0) continue;
                Int q = s(k, j) / s(k, k);
                s.add_col(j, k, -q);
                v.add_col(j, k, -q);
                if (s(k, j) != 0) again = true;
            }
            if (again) continue;
            // pivot divides the rest of the block? if not, mix the offender in
            bool divides = true;
            for (std::size_t i = k + 1; i < rws && divides; ++i)
                for (std::size_t j = k + 1; j < cls && divides; ++j)
                    if (s(i, j) % s(k, k) != 0) {
                        s.add_row(k, i, Int(1));
                        u.add_row(k, i, Int(1));
                        divides = false;
                    }
            if (divides) break;
        }
    }
done:
    return SnfResult{std::move(s), std::move(u), std::move(v)};
}

} // namespace gbs

#endif // GBS_MATRIX_HPP
