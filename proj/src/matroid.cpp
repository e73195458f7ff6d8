#include "algmatch/matroid.hpp"

#include <algorithm>
#include <bit>
#include <string>

namespace algmatch {

namespace {

IndexList iota(Index lo, Index hi) {
    IndexList v;
    for (Index i = lo; i < hi; ++i) v.push_back(i);
    return v;
}

Matrix y_from_inverse_z(const MatroidPair& pair, std::span<const Scalar> zinv, const MulOptions& opts) {
    const PrimeField& f = pair.field();
    Matrix scaled = pair.q2;
    for (Index i = 0; i < scaled.rows(); ++i) {
        const Scalar s = f.neg(zinv[i]);
        for (Scalar& x : scaled.row(i)) x = f.mul(x, s);
    }
    return mul(pair.q1, scaled, opts);
}

// Z(J)^{-1} entries from a left factor L = Q2[rows,:] 𝒴 and Q1[:,cols].
Matrix assemble(const PrimeField& f, const Matrix& left, const Matrix& q1_cols, std::span<const Index> rows,
                std::span<const Index> cols, const std::vector<Scalar>& zinv, const MulOptions& opts) {
    Matrix out = mul(left, q1_cols, opts);
    for (Index a = 0; a < rows.size(); ++a)
        for (Index b = 0; b < cols.size(); ++b) {
            Scalar x = f.mul(f.mul(zinv[rows[a]], out(a, b)), zinv[cols[b]]);
            if (rows[a] == cols[b]) x = f.add(x, zinv[rows[a]]);
            out(a, b) = x;
        }
    return out;
}

}  // namespace

void MatroidPair::validate() const {
    if (!(q1.field() == q2.field())) throw FieldMismatch("matroids over different fields");
    if (q1.cols() != q2.rows()) throw DimensionMismatch("matroids on different ground sets");
}

MatroidPair MatroidPair::from_columns(const Matrix& a1, const Matrix& a2) {
    if (!(a1.field() == a2.field())) throw FieldMismatch("matroids over different fields");
    if (a1.cols() != a2.cols()) throw DimensionMismatch("matroids on different ground sets");
    return MatroidPair{a1, a2.transpose()};
}

std::vector<Scalar> sample_z(const PrimeField& f, Index n, Rng& rng) {
    std::vector<Scalar> z(n);
    for (auto& x : z) x = f.sample_nonzero(rng);
    return z;
}

Matrix build_Y(const MatroidPair& pair, std::span<const Scalar> z, const MulOptions& opts) {
    pair.validate();
    if (z.size() != pair.ground()) throw DimensionMismatch("one z per element");
    std::vector<Scalar> zinv(z.begin(), z.end());
    pair.field().batch_inv(zinv);
    return y_from_inverse_z(pair, zinv, opts);
}

Index max_intersection_size(const MatroidPair& pair, std::uint64_t seed) {
    Rng rng = attempt_rng(seed, 0);
    return rank_profile(build_Y(pair, sample_z(pair.field(), pair.ground(), rng))).rank;
}

bool common_independent(const MatroidPair& pair, const IndexList& j) {
    const IndexList r1 = iota(0, pair.q1.rows()), r2 = iota(0, pair.q2.cols());
    return rank_profile(pair.q1.submatrix(r1, j)).rank == j.size() &&
           rank_profile(pair.q2.submatrix(j, r2)).rank == j.size();
}

// ------------------------------------------------------------------ state

MatroidState::MatroidState(const MatroidPair& pair, Rng& rng, const MulOptions& opts)
    : opts_(opts),
      q1_(pair.field(), 0, 0),
      q2_(pair.field(), 0, 0),
      ycal_(pair.field(), 0, 0),
      cache_(pair.field(), 0, 0) {
    pair.validate();
    const PrimeField& f = pair.field();
    const Index n = pair.ground();
    z_ = sample_z(f, n, rng);
    zinv_ = z_;
    f.batch_inv(zinv_);
    const Matrix y = y_from_inverse_z(pair, zinv_, opts);
    const RankProfile prof = rank_profile(y);
    q1_ = pair.q1.submatrix(prof.row_basis, iota(0, n));
    q2_ = pair.q2.submatrix(iota(0, n), prof.col_basis);
    auto inv = invert(y.submatrix(prof.row_basis, prof.col_basis));
    if (!inv) throw InternalConsistency("rank profile block of Y is singular");
    ycal_ = std::move(*inv);
    in_j_.assign(n, false);
}

Scalar MatroidState::pivot(Index i) const {
    const PrimeField& f = q1_.field();
    const Index k = rank();
    Scalar s = f.zero();
    for (Index a = 0; a < k; ++a) {
        const Scalar va = q2_(i, a);
        if (va.is_zero()) continue;
        Scalar t = f.zero();
        for (Index b = 0; b < k; ++b) t = f.add(t, f.mul(ycal_(a, b), q1_(b, i)));
        s = f.add(s, f.mul(va, t));
    }
    return s;
}

Matrix MatroidState::block(std::span<const Index> rows, std::span<const Index> cols) const {
    const IndexList all = iota(0, rank());
    const Matrix left = mul(q2_.submatrix(rows, all), ycal_, opts_);
    return assemble(q1_.field(), left, q1_.submatrix(all, cols), rows, cols, zinv_, opts_);
}

void MatroidState::load_block(Index lo, Index hi) {
    if (lo > hi || hi > ground()) throw DimensionMismatch("block outside the ground set");
    const IndexList b = iota(lo, hi);
    cache_ = block(b, b);
    lo_ = lo;
    hi_ = hi;
}

bool MatroidState::allowed_element(Index i) const {
    if (i < lo_ || i >= hi_) throw StaleBlock("element " + std::to_string(i) + " is not in the cached block");
    if (in_j_[i]) return false;
    return !(cache_(i - lo_, i - lo_) == zinv_[i]);
}

void MatroidState::y_rank1_update(Index i) {
    if (in_j_.at(i)) throw NotAllowed("element already in J");
    const PrimeField& f = q1_.field();
    const Scalar p = pivot(i);
    if (p.is_zero()) throw NotAllowed("element " + std::to_string(i) + " is not allowed");
    const Index k = rank();
    std::vector<Scalar> yu(k, f.zero()), vy(k, f.zero());
    for (Index a = 0; a < k; ++a)
        for (Index b = 0; b < k; ++b) {
            yu[a] = f.add(yu[a], f.mul(ycal_(a, b), q1_(b, i)));
            vy[b] = f.add(vy[b], f.mul(q2_(i, a), ycal_(a, b)));
        }
    const Scalar pinv = f.inv(p);
    for (Index a = 0; a < k; ++a) {
        const Scalar s = f.mul(pinv, yu[a]);
        for (Index b = 0; b < k; ++b) ycal_(a, b) = f.sub(ycal_(a, b), f.mul(s, vy[b]));
    }
    if (i >= lo_ && i < hi_) {
        const Index ii = i - lo_, m = hi_ - lo_;
        const Scalar alpha = f.sub(cache_(ii, ii), zinv_[i]);
        if (!(alpha == f.mul(f.mul(zinv_[i], zinv_[i]), p)))
            throw InternalConsistency("cached diagonal disagrees with 𝒴");
        const Scalar ainv = f.inv(alpha);
        const std::vector<Scalar> col = cache_.column(ii);
        const std::vector<Scalar> row(cache_.row(ii).begin(), cache_.row(ii).end());
        for (Index a = 0; a < m; ++a) {
            const Scalar s = f.mul(ainv, col[a]);
            for (Index b = 0; b < m; ++b) cache_(a, b) = f.sub(cache_(a, b), f.mul(s, row[b]));
        }
    }
    in_j_[i] = true;
    j_.push_back(i);
}

// ------------------------------------------------------------ algorithm II

IntersectResult intersect_alg2(const MatroidPair& pair, const IntersectConfig& cfg) {
    pair.validate();
    IntersectResult res;
    const Index n = pair.ground();
    for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
        ++res.attempts;
        Rng rng = attempt_rng(cfg.seed, attempt);
        MatroidState st(pair, rng, cfg.mul);
        const Index k = st.rank();
        const Index b = std::max<Index>(k, 1);
        for (Index lo = 0; lo < n && st.J().size() < k; lo += b) {
            const Index hi = std::min(n, lo + b);
            st.load_block(lo, hi);
            for (Index i = lo; i < hi && st.J().size() < k; ++i)
                if (st.allowed_element(i)) st.y_rank1_update(i);
        }
        IndexList j = st.J();
        std::sort(j.begin(), j.end());
        res.rank_y = k;
        if (j.size() == k && common_independent(pair, j)) {
            res.elements = std::move(j);
            return res;
        }
    }
    throw RandomnessExhausted("no verified intersection after " + std::to_string(cfg.retries + 1) + " attempts");
}

// ------------------------------------------------------------ algorithm I

namespace {

// Recursion over [0, npad) halving at each level. Only the rb x rb diagonal
// blocks of N are ever stored; rectangular pieces needed to carry updates
// into the second half of a subproblem are built from the initial 𝒴 and the
// recorded updates.
class AlgOne {
public:
    AlgOne(MatroidState& st, std::vector<LevelAudit>& levels)
        : st_(st),
          f_(st.q1().field()),
          opts_(st.mul_options()),
          n_(st.ground()),
          k_(st.rank()),
          npad_(std::bit_ceil(std::max<Index>(n_, 1))),
          rb_(std::min(npad_, std::bit_ceil(std::max<Index>(k_, 1)))),
          nmat_(f_, n_, n_),
          led_(f_, n_),
          left0_(mul(st.q2(), st.ycal(), opts_)),
          levels_(levels) {}

    IndexList run() {
        if (k_ == 0) return {};
        for (Index lo = 0; lo < n_; lo += rb_) {
            const IndexList b = iota(lo, std::min(n_, lo + rb_));
            nmat_.scatter(b, b, initial(b, b));
        }
        visit(0, npad_, 0);
        return j_;
    }

private:
    Matrix initial(std::span<const Index> rows, std::span<const Index> cols) const {
        const IndexList all = iota(0, k_);
        return assemble(f_, left0_.submatrix(rows, all), st_.q1().submatrix(all, cols), rows, cols, st_.z_inv(),
                        opts_);
    }

    LevelAudit& audit(Index level) {
        while (levels_.size() <= level) levels_.push_back(LevelAudit{levels_.size()});
        return levels_[level];
    }

    void visit(Index lo, Index size, Index level) {
        if (lo >= n_ || j_.size() == k_) return;
        if (size == 1) {
            leaf(lo);
            return;
        }
        const Index half = size / 2;
        const IndexList a = iota(lo, std::min(n_, lo + size));
        const std::size_t k_enter = led_.size();
        visit(lo, half, level + 1);
        if (size <= rb_) {
            led_.flush(nmat_, Region::square(a), opts_);
            visit(lo + half, half, level + 1);
            led_.flush(nmat_, Region::square(a), opts_);
            return;
        }
        if (lo + half >= n_) return;
        const std::size_t k_mid = led_.size();
        if (k_mid > k_enter) {
            const IndexList v2 = iota(lo + half, std::min(n_, lo + size));
            const IndexList kc = led_.update_cols(k_enter, k_mid);
            const IndexList kr = led_.update_rows(k_enter, k_mid);
            Matrix sw = initial(v2, kc);
            Matrix ne = initial(kr, v2);
            if (k_enter > 0) {
                sw = sub(sw, led_.correction(0, k_enter, v2, kc, opts_));
                ne = sub(ne, led_.correction(0, k_enter, kr, v2, opts_));
            }
            led_.materialize_u(k_enter, k_mid, v2, sw, opts_);
            led_.materialize_v(k_enter, k_mid, v2, ne, opts_);
            for (Index b0 = lo + half; b0 < std::min(n_, lo + size); b0 += rb_) {
                const IndexList b = iota(b0, std::min(n_, b0 + rb_));
                led_.apply(nmat_, b, b, k_enter, k_mid, opts_);
            }
            LevelAudit& la = audit(level);
            la.max_rows = std::max(la.max_rows, v2.size());
            la.max_cols = std::max(la.max_cols, kc.size());
            ++la.blocks;
        }
        visit(lo + half, half, level + 1);
    }

    void leaf(Index i) {
        if (j_.size() == k_) return;
        const IndexList scope = {i};
        if (!led_.is_clean(Region::square(scope))) throw InternalConsistency("leaf diagonal entry is stale");
        const Scalar alpha = f_.sub(nmat_(i, i), st_.z_inv()[i]);
        if (alpha.is_zero()) return;
        Matrix c(f_, 1, 1);
        c(0, 0) = f_.inv(alpha);
        led_.record(scope, c, scope, nmat_, scope);
        j_.push_back(i);
    }

    MatroidState& st_;
    const PrimeField& f_;
    MulOptions opts_;
    Index n_, k_, npad_, rb_;
    Matrix nmat_;
    UpdateLedger led_;
    Matrix left0_;  // Q2 𝒴(∅)
    std::vector<LevelAudit>& levels_;
    IndexList j_;
};

}  // namespace

IntersectResult intersect_alg1(const MatroidPair& pair, const IntersectConfig& cfg) {
    pair.validate();
    IntersectResult res;
    for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
        ++res.attempts;
        Rng rng = attempt_rng(cfg.seed, attempt);
        MatroidState st(pair, rng, cfg.mul);
        res.levels.clear();
        IndexList j = AlgOne(st, res.levels).run();
        std::sort(j.begin(), j.end());
        res.rank_y = st.rank();
        if (j.size() == st.rank() && common_independent(pair, j)) {
            res.elements = std::move(j);
            return res;
        }
    }
    throw RandomnessExhausted("no verified intersection after " + std::to_string(cfg.retries + 1) + " attempts");
}

}  // namespace algmatch
