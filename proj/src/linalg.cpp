#include "algmatch/linalg.hpp"

#include <algorithm>
#include <string>

namespace algmatch {

namespace {

void require_same_field(const Matrix& a, const Matrix& b) {
    if (!(a.field() == b.field())) throw FieldMismatch("matrices over different fields");
}

std::string dims(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

IndexList iota_list(Index n) {
    IndexList v(n);
    for (Index i = 0; i < n; ++i) v[i] = i;
    return v;
}

IndexList complement(std::span<const Index> s, Index n) {
    std::vector<bool> in(n, false);
    for (Index i : s) in.at(i) = true;
    IndexList out;
    for (Index i = 0; i < n; ++i)
        if (!in[i]) out.push_back(i);
    return out;
}

// row_dst -= f * row_src over the columns [from, cols).
void axpy_row(const PrimeField& f, std::span<Scalar> dst, std::span<const Scalar> src, Scalar factor,
              Index from = 0) {
    const u64 p = f.modulus();
    const u64 c = factor.v;
    for (Index j = from; j < dst.size(); ++j) {
        if (src[j].v == 0) continue;
        u64 t = f.mulmod(c, src[j].v);
        u64 d = dst[j].v;
        dst[j].v = d >= t ? d - t : d + p - t;
    }
    add_mul_count(dst.size() - from);
}

void scale_row(const PrimeField& f, std::span<Scalar> r, Scalar c) {
    for (auto& x : r) x.v = f.mulmod(x.v, c.v);
    add_mul_count(r.size());
}

Matrix strassen(const Matrix& a, const Matrix& b, const MulOptions& opts);

}  // namespace

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(PrimeField field, Index rows, Index cols)
    : field_(field), rows_(rows), cols_(cols), data_(rows * cols) {}

Matrix Matrix::identity(PrimeField field, Index n) {
    Matrix m(field, n, n);
    for (Index i = 0; i < n; ++i) m(i, i) = field.one();
    return m;
}

Matrix Matrix::from_rows(PrimeField field, const std::vector<std::vector<std::int64_t>>& rows) {
    const Index nr = rows.size();
    const Index nc = nr ? rows[0].size() : 0;
    Matrix m(field, nr, nc);
    for (Index i = 0; i < nr; ++i) {
        if (rows[i].size() != nc) throw DimensionMismatch("ragged row " + std::to_string(i));
        for (Index j = 0; j < nc; ++j) m(i, j) = field.from_i64(rows[i][j]);
    }
    return m;
}

Matrix Matrix::random(PrimeField field, Index rows, Index cols, Rng& rng) {
    Matrix m(field, rows, cols);
    for (auto& x : m.data_) x = field.sample(rng);
    return m;
}

std::vector<Scalar> Matrix::column(Index j) const {
    std::vector<Scalar> c(rows_);
    for (Index i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

Matrix Matrix::submatrix(std::span<const Index> rows, std::span<const Index> cols) const {
    Matrix m(field_, rows.size(), cols.size());
    for (Index i = 0; i < rows.size(); ++i) {
        const Scalar* src = data_.data() + rows[i] * cols_;
        for (Index j = 0; j < cols.size(); ++j) m(i, j) = src[cols[j]];
    }
    return m;
}

Matrix Matrix::block(Index r0, Index c0, Index nr, Index nc) const {
    Matrix m(field_, nr, nc);
    for (Index i = 0; i < nr; ++i)
        std::copy_n(data_.begin() + (r0 + i) * cols_ + c0, nc, m.data_.begin() + i * nc);
    return m;
}

void Matrix::scatter(std::span<const Index> rows, std::span<const Index> cols, const Matrix& src) {
    if (src.rows() != rows.size() || src.cols() != cols.size())
        throw DimensionMismatch("scatter of " + dims(src) + " into index lists");
    for (Index i = 0; i < rows.size(); ++i)
        for (Index j = 0; j < cols.size(); ++j) (*this)(rows[i], cols[j]) = src(i, j);
}

void Matrix::set_block(Index r0, Index c0, const Matrix& src) {
    for (Index i = 0; i < src.rows(); ++i)
        std::copy_n(src.data_.begin() + i * src.cols_, src.cols_, data_.begin() + (r0 + i) * cols_ + c0);
}

Matrix Matrix::minor(std::span<const Index> drop_rows, std::span<const Index> drop_cols) const {
    IndexList keep_r = complement(drop_rows, rows_);
    IndexList keep_c = complement(drop_cols, cols_);
    return submatrix(keep_r, keep_c);
}

Matrix Matrix::transpose() const {
    Matrix t(field_, cols_, rows_);
    for (Index i = 0; i < rows_; ++i)
        for (Index j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

bool Matrix::is_zero() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](Scalar s) { return s.is_zero(); });
}

bool operator==(const Matrix& a, const Matrix& b) noexcept {
    return a.field_ == b.field_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

// ---------------------------------------------------------------------------
// Arithmetic

Matrix add(const Matrix& a, const Matrix& b) {
    require_same_field(a, b);
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("add " + dims(a) + " + " + dims(b));
    Matrix c(a.field(), a.rows(), a.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j) c(i, j) = a.field().add(a(i, j), b(i, j));
    return c;
}

Matrix sub(const Matrix& a, const Matrix& b) {
    require_same_field(a, b);
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("sub " + dims(a) + " - " + dims(b));
    Matrix c(a.field(), a.rows(), a.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j) c(i, j) = a.field().sub(a(i, j), b(i, j));
    return c;
}

Matrix scale(const Matrix& a, Scalar c) {
    Matrix out = a;
    for (Index i = 0; i < a.rows(); ++i) scale_row(a.field(), out.row(i), c);
    return out;
}

Matrix mul_classical(const Matrix& a, const Matrix& b) {
    require_same_field(a, b);
    if (a.cols() != b.rows()) throw DimensionMismatch("mul " + dims(a) + " * " + dims(b));
    const PrimeField& f = a.field();
    const Index m = a.rows(), k = a.cols(), n = b.cols();
    Matrix c(f, m, n);
    std::vector<u128> acc(n);
    u64 performed = 0;
    // Row of C accumulated in 128 bits; with p < 2^32 every product fits in
    // 64 bits, otherwise each product is reduced before accumulation.
    constexpr Index kTile = 256;
    for (Index i = 0; i < m; ++i) {
        std::fill(acc.begin(), acc.end(), u128{0});
        auto arow = a.row(i);
        for (Index k0 = 0; k0 < k; k0 += kTile) {
            const Index k1 = std::min(k, k0 + kTile);
            for (Index kk = k0; kk < k1; ++kk) {
                const u64 x = arow[kk].v;
                if (x == 0) continue;
                auto brow = b.row(kk);
                performed += n;
                if (f.small()) {
                    for (Index j = 0; j < n; ++j) acc[j] += x * brow[j].v;
                } else {
                    for (Index j = 0; j < n; ++j) acc[j] += f.mulmod(x, brow[j].v);
                }
            }
        }
        auto crow = c.row(i);
        for (Index j = 0; j < n; ++j) crow[j].v = f.reduce(acc[j]);
    }
    add_mul_count(performed);
    return c;
}

Matrix mul(const Matrix& a, const Matrix& b, const MulOptions& opts) {
    require_same_field(a, b);
    if (a.cols() != b.rows()) throw DimensionMismatch("mul " + dims(a) + " * " + dims(b));
    if (opts.naive || opts.strassen_crossover == 0) return mul_classical(a, b);
    const Index smallest = std::min({a.rows(), a.cols(), b.cols()});
    if (smallest < opts.strassen_crossover || smallest < 2) return mul_classical(a, b);
    return strassen(a, b, opts);
}

namespace {

Matrix strassen(const Matrix& a, const Matrix& b, const MulOptions& opts) {
    const PrimeField& f = a.field();
    const Index m = a.rows(), k = a.cols(), n = b.cols();
    // Zero-pad every dimension to even.
    const Index m2 = (m + 1) / 2, k2 = (k + 1) / 2, n2 = (n + 1) / 2;
    auto quad = [&](const Matrix& src, Index r0, Index c0, Index nr, Index nc) {
        Matrix q(f, nr, nc);
        for (Index i = 0; i < nr && r0 + i < src.rows(); ++i)
            for (Index j = 0; j < nc && c0 + j < src.cols(); ++j) q(i, j) = src(r0 + i, c0 + j);
        return q;
    };
    Matrix a11 = quad(a, 0, 0, m2, k2), a12 = quad(a, 0, k2, m2, k2);
    Matrix a21 = quad(a, m2, 0, m2, k2), a22 = quad(a, m2, k2, m2, k2);
    Matrix b11 = quad(b, 0, 0, k2, n2), b12 = quad(b, 0, n2, k2, n2);
    Matrix b21 = quad(b, k2, 0, k2, n2), b22 = quad(b, k2, n2, k2, n2);

    Matrix p1 = mul(add(a11, a22), add(b11, b22), opts);
    Matrix p2 = mul(add(a21, a22), b11, opts);
    Matrix p3 = mul(a11, sub(b12, b22), opts);
    Matrix p4 = mul(a22, sub(b21, b11), opts);
    Matrix p5 = mul(add(a11, a12), b22, opts);
    Matrix p6 = mul(sub(a21, a11), add(b11, b12), opts);
    Matrix p7 = mul(sub(a12, a22), add(b21, b22), opts);

    Matrix c11 = add(sub(add(p1, p4), p5), p7);
    Matrix c12 = add(p3, p5);
    Matrix c21 = add(p2, p4);
    Matrix c22 = add(add(sub(p1, p2), p3), p6);

    Matrix c(f, m, n);
    auto put = [&](const Matrix& q, Index r0, Index c0) {
        for (Index i = 0; i < q.rows() && r0 + i < m; ++i)
            for (Index j = 0; j < q.cols() && c0 + j < n; ++j) c(r0 + i, c0 + j) = q(i, j);
    };
    put(c11, 0, 0);
    put(c12, 0, n2);
    put(c21, m2, 0);
    put(c22, m2, n2);
    return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// Elimination

std::optional<Matrix> invert(const Matrix& a) {
    if (!a.square()) throw DimensionMismatch("invert " + dims(a));
    const PrimeField& f = a.field();
    const Index n = a.rows();
    Matrix w = a;
    Matrix inv = Matrix::identity(f, n);
    for (Index col = 0; col < n; ++col) {
        Index piv = n;
        for (Index r = col; r < n; ++r) {
            if (!w(r, col).is_zero()) {
                piv = r;
                break;
            }
        }
        if (piv == n) return std::nullopt;
        if (piv != col) {
            std::swap_ranges(w.row(piv).begin(), w.row(piv).end(), w.row(col).begin());
            std::swap_ranges(inv.row(piv).begin(), inv.row(piv).end(), inv.row(col).begin());
        }
        const Scalar pinv = f.inv(w(col, col));
        scale_row(f, w.row(col), pinv);
        scale_row(f, inv.row(col), pinv);
        for (Index r = 0; r < n; ++r) {
            if (r == col) continue;
            const Scalar factor = w(r, col);
            if (factor.is_zero()) continue;
            axpy_row(f, w.row(r), w.row(col), factor, col);
            axpy_row(f, inv.row(r), inv.row(col), factor);
        }
    }
    return inv;
}

Scalar determinant(const Matrix& a) {
    if (!a.square()) throw DimensionMismatch("determinant " + dims(a));
    const PrimeField& f = a.field();
    const Index n = a.rows();
    Matrix w = a;
    Scalar det = f.one();
    for (Index col = 0; col < n; ++col) {
        Index piv = n;
        for (Index r = col; r < n; ++r) {
            if (!w(r, col).is_zero()) {
                piv = r;
                break;
            }
        }
        if (piv == n) return f.zero();
        if (piv != col) {
            std::swap_ranges(w.row(piv).begin(), w.row(piv).end(), w.row(col).begin());
            det = f.neg(det);
        }
        det = f.mul(det, w(col, col));
        const Scalar pinv = f.inv(w(col, col));
        for (Index r = col + 1; r < n; ++r) {
            const Scalar factor = f.mul(w(r, col), pinv);
            if (factor.is_zero()) continue;
            axpy_row(f, w.row(r), w.row(col), factor, col);
        }
    }
    return det;
}

RankProfile rank_profile(const Matrix& a) {
    IndexList ro = iota_list(a.rows());
    IndexList co = iota_list(a.cols());
    return rank_profile(a, ro, co);
}

RankProfile rank_profile(const Matrix& a, std::span<const Index> row_order,
                         std::span<const Index> col_order) {
    if (row_order.size() != a.rows() || col_order.size() != a.cols())
        throw DimensionMismatch("rank_profile orders do not cover " + dims(a));
    const PrimeField& f = a.field();
    Matrix w = a;
    std::vector<bool> used(a.rows(), false);
    RankProfile prof;
    for (Index c : col_order) {
        Index piv = a.rows();
        for (Index r : row_order) {
            if (!used[r] && !w(r, c).is_zero()) {
                piv = r;
                break;
            }
        }
        if (piv == a.rows()) continue;
        used[piv] = true;
        prof.row_basis.push_back(piv);
        prof.col_basis.push_back(c);
        const Scalar pinv = f.inv(w(piv, c));
        for (Index r = 0; r < a.rows(); ++r) {
            if (used[r]) continue;
            const Scalar factor = f.mul(w(r, c), pinv);
            if (factor.is_zero()) continue;
            axpy_row(f, w.row(r), w.row(piv), factor);
        }
    }
    prof.rank = prof.row_basis.size();
    std::sort(prof.row_basis.begin(), prof.row_basis.end());
    std::sort(prof.col_basis.begin(), prof.col_basis.end());
    return prof;
}

IndexList max_rank_principal_submatrix(const Matrix& z, std::span<const Index> forced) {
    if (!z.square()) throw DimensionMismatch("principal submatrix of " + dims(z));
    const Index n = z.rows();
    std::vector<bool> is_forced(n, false);
    IndexList order(forced.begin(), forced.end());
    for (Index i : forced) is_forced.at(i) = true;
    for (Index i = 0; i < n; ++i)
        if (!is_forced[i]) order.push_back(i);

    // Column basis B with forced columns scanned first.
    RankProfile cols = rank_profile(z, iota_list(n), order);
    auto contains = [](const IndexList& s, Index x) { return std::binary_search(s.begin(), s.end(), x); };
    for (Index i : forced)
        if (!contains(cols.col_basis, i)) throw ForcedSetDependent("forced index " + std::to_string(i) + " is dependent");

    // Row basis A of Z[*,B] with forced rows scanned first.
    Matrix zb = z.submatrix(iota_list(n), cols.col_basis);
    RankProfile rows = rank_profile(zb, order, iota_list(zb.cols()));
    for (Index i : forced)
        if (!contains(rows.row_basis, i)) throw ForcedSetDependent("forced row " + std::to_string(i) + " is dependent");

    IndexList a = rows.row_basis;
    if (!invert(z.submatrix(a, a)))
        throw InternalConsistency("principal block on a row basis is singular");
    return a;
}

Matrix schur_complement(const Matrix& m, std::span<const Index> pivot_rows,
                        std::span<const Index> pivot_cols) {
    if (pivot_rows.size() != pivot_cols.size())
        throw DimensionMismatch("pivot block must be square");
    IndexList rbar = complement(pivot_rows, m.rows());
    IndexList cbar = complement(pivot_cols, m.cols());
    auto pinv = invert(m.submatrix(pivot_rows, pivot_cols));
    if (!pinv) throw SingularPivotBlock("Schur complement pivot block is singular");
    Matrix corr = mul(mul(m.submatrix(rbar, pivot_cols), *pinv), m.submatrix(pivot_rows, cbar));
    return sub(m.submatrix(rbar, cbar), corr);
}

std::optional<Matrix> rank1_inverse_update(const Matrix& minv, std::span<const Scalar> u,
                                           std::span<const Scalar> v, Scalar c) {
    if (!minv.square() || u.size() != minv.rows() || v.size() != minv.rows())
        throw DimensionMismatch("rank-1 update vectors do not match " + dims(minv));
    if (c.is_zero()) return minv;
    const PrimeField& f = minv.field();
    const Index n = minv.rows();
    std::vector<Scalar> mu(n, f.zero()), vm(n, f.zero());
    for (Index i = 0; i < n; ++i) {
        Scalar s = f.zero();
        for (Index k = 0; k < n; ++k) s = f.add(s, f.mul(minv(i, k), u[k]));
        mu[i] = s;
    }
    for (Index k = 0; k < n; ++k) {
        if (v[k].is_zero()) continue;
        for (Index j = 0; j < n; ++j) vm[j] = f.add(vm[j], f.mul(v[k], minv(k, j)));
    }
    Scalar alpha = f.inv(c);
    for (Index k = 0; k < n; ++k) alpha = f.add(alpha, f.mul(v[k], mu[k]));
    if (alpha.is_zero()) return std::nullopt;
    const Scalar ainv = f.inv(alpha);
    Matrix out = minv;
    for (Index i = 0; i < n; ++i) {
        const Scalar factor = f.mul(ainv, mu[i]);
        if (factor.is_zero()) continue;
        axpy_row(f, out.row(i), vm, factor);
    }
    return out;
}

Matrix eliminate_pair_inverse(const Matrix& n, Index i, Index j) {
    if (!n.square()) throw DimensionMismatch("eliminate_pair_inverse on " + dims(n));
    const PrimeField& f = n.field();
    const Scalar pivot = n(j, i);
    if (pivot.is_zero()) throw NotAllowed("N(j,i) is zero");
    const Scalar pinv = f.inv(pivot);
    Matrix w = n;
    auto vrow = n.row(j);
    for (Index r = 0; r < n.rows(); ++r) {
        const Scalar factor = f.mul(n(r, i), pinv);
        if (factor.is_zero()) continue;
        axpy_row(f, w.row(r), vrow, factor);
    }
    const Index dr[] = {j};
    const Index dc[] = {i};
    return w.minor(dr, dc);
}

Matrix eliminate_quad_inverse(const Matrix& n, Index i, Index j) {
    if (!n.square()) throw DimensionMismatch("eliminate_quad_inverse on " + dims(n));
    if (i == j) throw NotAllowed("quad elimination needs two distinct indices");
    const IndexList ij = {i, j};
    auto cinv = invert(n.submatrix(ij, ij));
    if (!cinv) throw NotAllowed("N[{i,j},{i,j}] is singular");
    const IndexList all = iota_list(n.rows());
    Matrix u = n.submatrix(all, ij);
    Matrix v = n.submatrix(ij, all);
    Matrix w = sub(n, mul(mul(u, *cinv), v));
    return w.minor(ij, ij);
}

std::array<UnfurledTerm, 4> unfurl_rank2(const Matrix& c) {
    if (c.rows() != 2 || c.cols() != 2) throw DimensionMismatch("unfurl needs a 2x2 block");
    return {UnfurledTerm{0, c(0, 0), 0}, UnfurledTerm{1, c(1, 1), 1}, UnfurledTerm{1, c(1, 0), 0},
            UnfurledTerm{0, c(0, 1), 1}};
}

Matrix unit_upper_inverse(const Matrix& y) {
    if (!y.square()) throw DimensionMismatch("unit_upper_inverse of " + dims(y));
    const PrimeField& f = y.field();
    const Index n = y.rows();
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j <= i; ++j)
            if (!y(i, j).is_zero())
                throw NotStrictlyUpperTriangular("Y(" + std::to_string(i) + "," + std::to_string(j) + ") != 0");
    // W = (I - Y)^{-1} satisfies W = I + Y W; fill rows bottom-up.
    Matrix w = Matrix::identity(f, n);
    for (Index i = n; i-- > 0;) {
        for (Index k = i + 1; k < n; ++k) {
            const Scalar yik = y(i, k);
            if (yik.is_zero()) continue;
            axpy_row(f, w.row(i), w.row(k), f.neg(yik), k);
        }
    }
    return w;
}

Matrix sequential_update(const Matrix& x, const Matrix& y, const MulOptions& opts) {
    require_same_field(x, y);
    if (!y.square() || y.rows() != x.cols())
        throw DimensionMismatch("sequential_update " + dims(x) + " with " + dims(y));
    return mul(x, unit_upper_inverse(y), opts);
}

}  // namespace algmatch
