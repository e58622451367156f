#ifndef GBS_LATTICE_HPP
#define GBS_LATTICE_HPP

#include "gbs/errors.hpp"
#include "gbs/matrix.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace gbs {

// Index of a subgroup of Z^d: a positive integer, or infinite.
class Index {
  public:
    static Index finite(Int v) { return Index(std::move(v)); }
    static Index infinite() { return Index(); }

    bool is_finite() const { return value_.has_value(); }
    const Int& value() const {
        if (!value_) throw InternalError("value() on infinite index");
        return *value_;
    }
    bool operator==(const Index& o) const { return value_ == o.value_; }

  private:
    Index() = default;
    explicit Index(Int v) : value_(std::move(v)) {}
    std::optional<Int> value_;
};

// Subgroup of Z^d of any rank 0..d, held in canonical HNF basis form
// (columns of `basis`). Equality of lattices is entry-wise equality.
class Lattice {
  public:
    explicit Lattice(std::size_t dim) : dim_(dim), basis_(dim, 0) {}

    // Canonicalizes the column span of `gens` (d x m, m arbitrary).
    static Lattice from_generators(std::size_t dim, const IntMatrix& gens) {
        if (gens.rows() != dim) throw DimensionMismatch("generator rows != ambient dim");
        Lattice l(dim);
        l.basis_ = hnf(gens).h;
        return l;
    }

    static Lattice from_generators(std::size_t dim, const std::vector<std::vector<Int>>& gens) {
        IntMatrix m(dim, gens.size());
        for (std::size_t j = 0; j < gens.size(); ++j) {
            if (gens[j].size() != dim) throw DimensionMismatch("generator length != ambient dim");
            for (std::size_t i = 0; i < dim; ++i) m(i, j) = gens[j][i];
        }
        return from_generators(dim, m);
    }

    static Lattice zero(std::size_t dim) { return Lattice(dim); }
    static Lattice full(std::size_t dim) {
        return from_generators(dim, IntMatrix::identity(dim));
    }

    std::size_t dim() const { return dim_; }
    std::size_t rank() const { return basis_.cols(); }
    const IntMatrix& basis() const { return basis_; }
    bool is_zero() const { return rank() == 0; }

    bool operator==(const Lattice& o) const { return dim_ == o.dim_ && basis_ == o.basis_; }
    bool operator!=(const Lattice& o) const { return !(*this == o); }
    bool operator<(const Lattice& o) const {
        if (dim_ != o.dim_) return dim_ < o.dim_;
        return basis_ < o.basis_;
    }

    // Exact membership by triangular solve against the HNF basis.
    bool contains(const std::vector<Int>& v) const {
        if (v.size() != dim_) throw DimensionMismatch("vector length != ambient dim");
        std::vector<Int> rem = v;
        for (std::size_t j = 0; j < basis_.cols(); ++j) {
            std::size_t pr = 0; // pivot = first nonzero row of the canonical column
            while (pr < dim_ && basis_(pr, j) == 0) ++pr;
            const Int& p = basis_(pr, j);
            if (rem[pr] % p != 0) return false;
            Int c = rem[pr] / p;
            if (c != 0)
                for (std::size_t i = 0; i < dim_; ++i) rem[i] -= c * basis_(i, j);
        }
        for (const Int& x : rem)
            if (x != 0) return false;
        return true;
    }

  private:
    std::size_t dim_;
    IntMatrix basis_; // d x rank, canonical
};

inline void check_same_dim(const Lattice& a, const Lattice& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("lattices in different dimensions");
}

// Smallest lattice containing both.
inline Lattice sum(const Lattice& a, const Lattice& b) {
    check_same_dim(a, b);
    IntMatrix m(a.dim(), a.rank() + b.rank());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.rank(); ++j) m(i, j) = a.basis()(i, j);
        for (std::size_t j = 0; j < b.rank(); ++j) m(i, a.rank() + j) = b.basis()(i, j);
    }
    return Lattice::from_generators(a.dim(), m);
}

// Set intersection, via the integer kernel of the stacked matrix [B1 | -B2].
inline Lattice intersect(const Lattice& a, const Lattice& b) {
    check_same_dim(a, b);
    const std::size_t d = a.dim(), ra = a.rank(), rb = b.rank();
    if (ra == 0 || rb == 0) return Lattice::zero(d);
    IntMatrix k(d, ra + rb);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < ra; ++j) k(i, j) = a.basis()(i, j);
        for (std::size_t j = 0; j < rb; ++j) k(i, ra + j) = -b.basis()(i, j);
    }
    HnfResult h = hnf(k);
    // columns of u past rank(k) form a basis of ker_Z(k); their a-parts
    // give coefficient vectors, and B1 * coeffs spans the intersection
    const std::size_t kr = h.h.cols();
    IntMatrix gens(d, ra + rb - kr);
    for (std::size_t j = kr; j < ra + rb; ++j) {
        for (std::size_t i = 0; i < d; ++i) {
            Int x(0);
            for (std::size_t t = 0; t < ra; ++t) x += a.basis()(i, t) * h.u(t, j);
            gens(i, j - kr) = x;
        }
    }
    return Lattice::from_generators(d, gens);
}

// Column span of M * basis.
inline Lattice image(const IntMatrix& m, const Lattice& l) {
    if (m.cols() != l.dim()) throw DimensionMismatch("image: matrix cols != lattice dim");
    if (l.rank() == 0) return Lattice::zero(m.rows());
    return Lattice::from_generators(m.rows(), m * l.basis());
}

// M^{-1}L cap Z^d = {x in Z^d : Mx in L}, for square nonsingular M.
inline Lattice preimage(const IntMatrix& m, const Lattice& l) {
    if (m.rows() != m.cols() || m.rows() != l.dim())
        throw DimensionMismatch("preimage: matrix must be d x d");
    if (det(m) == 0) throw SingularMatrix("preimage under singular matrix");
    const std::size_t d = l.dim(), r = l.rank();
    if (r == 0) return Lattice::zero(d);
    // x with Mx = B c: kernel of [M | -B] projected to the x block
    IntMatrix k(d, d + r);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) k(i, j) = m(i, j);
        for (std::size_t j = 0; j < r; ++j) k(i, d + j) = -l.basis()(i, j);
    }
    HnfResult h = hnf(k);
    const std::size_t kr = h.h.cols();
    IntMatrix gens(d, d + r - kr);
    for (std::size_t j = kr; j < d + r; ++j)
        for (std::size_t i = 0; i < d; ++i) gens(i, j - kr) = h.u(i, j);
    return Lattice::from_generators(d, gens);
}

// |Z^d / L| when L has full rank, infinite otherwise.
inline Index det_index(const Lattice& l) {
    if (l.rank() < l.dim()) return Index::infinite();
    Int p(1);
    for (std::size_t j = 0; j < l.rank(); ++j) p *= l.basis()(j, j);
    return Index::finite(abs_int(p));
}

// Index of <L, M Z^d> in Z^d; finite whenever det(M) != 0.
inline Index join_index(const Lattice& l, const IntMatrix& m) {
    if (m.rows() != l.dim() || m.cols() != l.dim())
        throw DimensionMismatch("join_index: matrix must be d x d");
    if (det(m) == 0) throw SingularMatrix("join_index with singular matrix");
    return det_index(sum(l, image(m, Lattice::full(l.dim()))));
}

// Same rational span, i.e. finite mutual index on the intersection.
inline bool commensurable(const Lattice& a, const Lattice& b) {
    check_same_dim(a, b);
    if (a.rank() != b.rank()) return false;
    IntMatrix m(a.dim(), a.rank() + b.rank());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.rank(); ++j) m(i, j) = a.basis()(i, j);
        for (std::size_t j = 0; j < b.rank(); ++j) m(i, a.rank() + j) = b.basis()(i, j);
    }
    return hnf(m).h.cols() == a.rank();
}

// span(L) cap Z^d: the primitive (saturated) lattice with the same span.
inline Lattice saturation(const Lattice& l) {
    const std::size_t d = l.dim(), r = l.rank();
    if (r == 0) return Lattice::zero(d);
    SnfResult s = snf(l.basis());
    IntMatrix uinv = unimodular_inverse(s.u);
    IntMatrix gens(d, r);
    for (std::size_t j = 0; j < r; ++j)
        for (std::size_t i = 0; i < d; ++i) gens(i, j) = uinv(i, j);
    return Lattice::from_generators(d, gens);
}

// Scale by an integer: n * L.
inline Lattice scale(const Int& n, const Lattice& l) {
    if (n == 0) return Lattice::zero(l.dim());
    IntMatrix b = l.basis();
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) *= n;
    return Lattice::from_generators(l.dim(), b);
}

// Image under a rational matrix, defined when g * basis is integral.
inline Lattice rational_image(const RatMatrix& g, const Lattice& l) {
    if (g.cols() != l.dim()) throw DimensionMismatch("rational_image shape");
    RatMatrix gb = g * to_rational(l.basis());
    IntMatrix b(gb.rows(), gb.cols());
    for (std::size_t i = 0; i < gb.rows(); ++i)
        for (std::size_t j = 0; j < gb.cols(); ++j) {
            if (rat_den(gb(i, j)) != 1)
                throw InvariantViolation("rational_image: non-integral image");
            b(i, j) = rat_num(gb(i, j));
        }
    return Lattice::from_generators(g.rows(), b);
}

// Rational span moved by g, returned as the primitive lattice span(gL) cap Z^d.
// This is the canonical representative of the commensurability class of gL.
inline Lattice span_class(const RatMatrix& g, const Lattice& l) {
    if (g.cols() != l.dim()) throw DimensionMismatch("span_class shape");
    RatMatrix gb = g * to_rational(l.basis());
    // clear denominators column by column; the span is unchanged
    IntMatrix b(gb.rows(), gb.cols());
    for (std::size_t j = 0; j < gb.cols(); ++j) {
        Int lcm(1);
        for (std::size_t i = 0; i < gb.rows(); ++i) {
            Int den = rat_den(gb(i, j));
            lcm = lcm / gcd_int(lcm, den) * den;
        }
        for (std::size_t i = 0; i < gb.rows(); ++i)
            b(i, j) = rat_num(gb(i, j)) * (lcm / rat_den(gb(i, j)));
    }
    return saturation(Lattice::from_generators(g.rows(), b));
}

} // namespace gbs

#endif // GBS_LATTICE_HPP
