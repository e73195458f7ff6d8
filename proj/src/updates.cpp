#include "algmatch/updates.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace algmatch {

namespace {

// Rank-1 pieces of one recorded block as (u position, scalar, v position).
std::vector<UnfurledTerm> pieces(const RecordedUpdate& up) {
    if (up.arity() == 1) return {UnfurledTerm{0, up.c(0, 0), 0}};
    std::vector<UnfurledTerm> out;
    for (const auto& t : unfurl_rank2(up.c))
        if (!t.c.is_zero()) out.push_back(t);
    return out;
}

IndexList minus(std::span<const Index> s, const std::vector<bool>& in_w) {
    IndexList out;
    for (Index i : s)
        if (!in_w[i]) out.push_back(i);
    return out;
}

}  // namespace

UpdateLedger::UpdateLedger(PrimeField field, Index n)
    : field_(field),
      n_(n),
      u_(field, n, n),
      c_(field, n, n),
      v_(field, n, n),
      col_used_(n, false),
      row_used_(n, false),
      applied_(n * n, 0) {}

std::vector<UpdateLedger::Tag> UpdateLedger::pi_c() const {
    std::vector<Tag> out;
    for (const auto& up : updates_)
        for (Index c : up.cols) out.push_back({c, up.arity()});
    return out;
}

std::vector<UpdateLedger::Tag> UpdateLedger::pi_r() const {
    std::vector<Tag> out;
    for (const auto& up : updates_)
        for (Index r : up.rows) out.push_back({r, up.arity()});
    return out;
}

IndexList UpdateLedger::update_cols(std::size_t first, std::size_t last) const {
    IndexList out;
    for (std::size_t k = first; k < last; ++k)
        out.insert(out.end(), updates_[k].cols.begin(), updates_[k].cols.end());
    return out;
}

IndexList UpdateLedger::update_rows(std::size_t first, std::size_t last) const {
    IndexList out;
    for (std::size_t k = first; k < last; ++k)
        out.insert(out.end(), updates_[k].rows.begin(), updates_[k].rows.end());
    return out;
}

void UpdateLedger::record(std::span<const Index> cols, const Matrix& c, std::span<const Index> rows,
                          const Matrix& n, std::span<const Index> scope) {
    const Index k = cols.size();
    if (k < 1 || k > 2 || rows.size() != k || c.rows() != k || c.cols() != k)
        throw DimensionMismatch("updates have arity 1 or 2 with a matching block");
    if (n.rows() != n_ || n.cols() != n_) throw DimensionMismatch("tracked matrix has wrong order");
    for (Index j : cols)
        if (col_used_.at(j)) throw IndexReuse("column " + std::to_string(j) + " already in an update");
    for (Index i : rows)
        if (row_used_.at(i)) throw IndexReuse("row " + std::to_string(i) + " already in an update");
    std::vector<bool> in_scope(n_, false);
    for (Index s : scope) in_scope.at(s) = true;
    for (Index j : cols)
        if (!in_scope[j]) throw DimensionMismatch("update column outside its scope");
    for (Index i : rows)
        if (!in_scope[i]) throw DimensionMismatch("update row outside its scope");
    require_clean(Region::square(IndexList(scope.begin(), scope.end())));

    RecordedUpdate up{IndexList(cols.begin(), cols.end()), IndexList(rows.begin(), rows.end()), c, in_scope,
                      in_scope};
    for (Index s : scope) {
        for (Index j : cols) u_(s, j) = n(s, j);
        for (Index i : rows) v_(i, s) = n(i, s);
    }
    for (Index a = 0; a < k; ++a)
        for (Index t = 0; t < k; ++t) c_(cols[a], rows[t]) = c(a, t);
    for (Index j : cols) col_used_[j] = true;
    for (Index i : rows) row_used_[i] = true;
    updates_.push_back(std::move(up));
}

bool UpdateLedger::is_clean(const Region& region) const noexcept {
    const auto total = static_cast<std::uint32_t>(updates_.size());
    for (Index r : region.rows)
        for (Index c : region.cols)
            if (applied(r, c) != total) return false;
    return true;
}

void UpdateLedger::require_clean(const Region& region) const {
    if (!is_clean(region)) throw DirtyParameters("region has pending updates");
}

void UpdateLedger::mark(std::span<const Index> rows, std::span<const Index> cols, std::uint32_t value) {
    for (Index r : rows)
        for (Index c : cols) applied_[r * n_ + c] = value;
}

void UpdateLedger::require_uniform(std::span<const Index> rows, std::span<const Index> cols,
                                   std::uint32_t value, const char* what) const {
    for (Index r : rows)
        for (Index c : cols)
            if (applied(r, c) != value)
                throw DirtyParameters(std::string(what) + ": entry (" + std::to_string(r) + "," +
                                      std::to_string(c) + ") has " + std::to_string(applied(r, c)) +
                                      " updates applied, expected " + std::to_string(value));
}

Matrix UpdateLedger::materialize_u(std::size_t first, std::size_t last, std::span<const Index> rows,
                                   const Matrix& x, const MulOptions& opts) {
    const IndexList cols = update_cols(first, last);
    const Index m = cols.size();
    if (x.rows() != rows.size() || x.cols() != m) throw DimensionMismatch("materialize_u input shape");
    // Y[(k,a), (l,b)] = -c V[rows_k[t], cols_l[b]] for each piece (a,c,t) of k and l > k.
    Matrix y(field_, m, m);
    Index pos_k = 0;
    for (std::size_t k = first; k < last; ++k) {
        const auto& uk = updates_[k];
        const auto terms = pieces(uk);
        Index pos_l = pos_k + uk.arity();
        for (std::size_t l = k + 1; l < last; ++l) {
            const auto& ul = updates_[l];
            for (Index b = 0; b < ul.arity(); ++b) {
                const Index col = ul.cols[b];
                if (!uk.v_known[col]) throw DirtyParameters("V row of an earlier update unknown at a later column");
                for (const auto& t : terms) {
                    Scalar term = field_.mul(t.c, v_(uk.rows[t.v], col));
                    y(pos_k + t.u, pos_l + b) = field_.sub(y(pos_k + t.u, pos_l + b), term);
                }
            }
            pos_l += ul.arity();
        }
        pos_k += uk.arity();
    }
    Matrix r = sequential_update(x, y, opts);
    for (std::size_t k = first, q = 0; k < last; ++k) {
        auto& up = updates_[k];
        for (Index a = 0; a < up.arity(); ++a, ++q)
            for (Index i = 0; i < rows.size(); ++i) u_(rows[i], up.cols[a]) = r(i, q);
        for (Index i : rows) up.u_known[i] = true;
    }
    return r;
}

Matrix UpdateLedger::materialize_v(std::size_t first, std::size_t last, std::span<const Index> cols,
                                   const Matrix& x, const MulOptions& opts) {
    const IndexList rows = update_rows(first, last);
    const Index m = rows.size();
    if (x.rows() != m || x.cols() != cols.size()) throw DimensionMismatch("materialize_v input shape");
    // Y[(k,t), (l,b)] = -c U[rows_l[b], cols_k[a]] for each piece (a,c,t) of k and l > k.
    Matrix y(field_, m, m);
    Index pos_k = 0;
    for (std::size_t k = first; k < last; ++k) {
        const auto& uk = updates_[k];
        const auto terms = pieces(uk);
        Index pos_l = pos_k + uk.arity();
        for (std::size_t l = k + 1; l < last; ++l) {
            const auto& ul = updates_[l];
            for (Index b = 0; b < ul.arity(); ++b) {
                const Index row = ul.rows[b];
                if (!uk.u_known[row]) throw DirtyParameters("U column of an earlier update unknown at a later row");
                for (const auto& t : terms) {
                    Scalar term = field_.mul(t.c, u_(row, uk.cols[t.u]));
                    y(pos_k + t.v, pos_l + b) = field_.sub(y(pos_k + t.v, pos_l + b), term);
                }
            }
            pos_l += ul.arity();
        }
        pos_k += uk.arity();
    }
    Matrix rt = sequential_update(x.transpose(), y, opts);
    for (std::size_t k = first, q = 0; k < last; ++k) {
        auto& up = updates_[k];
        for (Index t = 0; t < up.arity(); ++t, ++q)
            for (Index j = 0; j < cols.size(); ++j) v_(up.rows[t], cols[j]) = rt(j, q);
        for (Index j : cols) up.v_known[j] = true;
    }
    return rt.transpose();
}

Matrix UpdateLedger::correction(std::size_t first, std::size_t last, std::span<const Index> rows,
                                std::span<const Index> cols, const MulOptions& opts) const {
    const IndexList kc = update_cols(first, last);
    const IndexList kr = update_rows(first, last);
    for (std::size_t k = first; k < last; ++k) {
        for (Index r : rows)
            if (!updates_[k].u_known[r]) throw DirtyParameters("U row " + std::to_string(r) + " not materialized");
        for (Index c : cols)
            if (!updates_[k].v_known[c]) throw DirtyParameters("V column " + std::to_string(c) + " not materialized");
    }
    Matrix uk = u_.submatrix(rows, kc);
    Matrix ck = c_.submatrix(kc, kr);
    Matrix vk = v_.submatrix(kr, cols);
    return mul(mul(uk, ck, opts), vk, opts);
}

void UpdateLedger::apply(Matrix& n, std::span<const Index> rows, std::span<const Index> cols, std::size_t first,
                         std::size_t last, const MulOptions& opts) {
    require_uniform(rows, cols, static_cast<std::uint32_t>(first), "apply");
    if (first == last) return;
    Matrix corr = correction(first, last, rows, cols, opts);
    n.scatter(rows, cols, sub(n.submatrix(rows, cols), corr));
    mark(rows, cols, static_cast<std::uint32_t>(last));
}

std::map<std::uint32_t, IndexList> UpdateLedger::stale_rows(std::span<const Index> rows,
                                                           std::span<const Index> cols, const char* what) const {
    std::map<std::uint32_t, IndexList> out;
    if (cols.empty()) return out;
    const auto total = static_cast<std::uint32_t>(updates_.size());
    for (Index r : rows) {
        const std::uint32_t k = applied(r, cols[0]);
        require_uniform(std::span<const Index>(&r, 1), cols, k, what);
        if (k != total) out[k].push_back(r);
    }
    return out;
}

std::map<std::uint32_t, IndexList> UpdateLedger::stale_cols(std::span<const Index> rows,
                                                           std::span<const Index> cols, const char* what) const {
    std::map<std::uint32_t, IndexList> out;
    if (rows.empty()) return out;
    const auto total = static_cast<std::uint32_t>(updates_.size());
    for (Index c : cols) {
        const std::uint32_t k = applied(rows[0], c);
        require_uniform(rows, std::span<const Index>(&c, 1), k, what);
        if (k != total) out[k].push_back(c);
    }
    return out;
}

void UpdateLedger::flush(Matrix& n, const Region& target, const MulOptions& opts) {
    if (n.rows() != n_ || n.cols() != n_) throw DimensionMismatch("tracked matrix has wrong order");
    const auto total = static_cast<std::uint32_t>(updates_.size());
    std::uint32_t k0 = total;
    for (Index r : target.rows)
        for (Index c : target.cols) k0 = std::min(k0, applied(r, c));
    if (k0 == total) return;

    // W: indices where every pending update has both its U row and V column.
    std::vector<bool> in_w(n_, true);
    for (std::size_t k = k0; k < total; ++k)
        for (Index i = 0; i < n_; ++i) in_w[i] = in_w[i] && updates_[k].u_known[i] && updates_[k].v_known[i];
    IndexList w;
    for (Index i = 0; i < n_; ++i)
        if (in_w[i]) w.push_back(i);
    for (Index j : update_cols(k0, total))
        if (!in_w[j]) throw DirtyParameters("pending update column outside the common clean region");
    for (Index i : update_rows(k0, total))
        if (!in_w[i]) throw DirtyParameters("pending update row outside the common clean region");

    const IndexList r_out = minus(target.rows, in_w);
    const IndexList c_out = minus(target.cols, in_w);

    // N[W,W] directly from the stored parameters.
    for (auto& [k, rows] : stale_rows(w, w, "flush of the common region")) {
        Matrix corr = correction(k, total, rows, w, opts);
        n.scatter(rows, w, sub(n.submatrix(rows, w), corr));
        mark(rows, w, total);
    }
    // South-west: U rows outside W come from the closed-form sequential update.
    for (auto& [k, rows] : stale_rows(r_out, w, "flush of rows outside the common region")) {
        materialize_u(k, total, rows, n.submatrix(rows, update_cols(k, total)), opts);
        Matrix corr = correction(k, total, rows, w, opts);
        n.scatter(rows, w, sub(n.submatrix(rows, w), corr));
        mark(rows, w, total);
    }
    // North-east.
    for (auto& [k, cols] : stale_cols(w, c_out, "flush of columns outside the common region")) {
        materialize_v(k, total, cols, n.submatrix(update_rows(k, total), cols), opts);
        Matrix corr = correction(k, total, w, cols, opts);
        n.scatter(w, cols, sub(n.submatrix(w, cols), corr));
        mark(w, cols, total);
    }
    // South-east, once both parameter sides are known.
    for (auto& [k, rows] : stale_rows(r_out, c_out, "flush of the outer block")) {
        Matrix corr = correction(k, total, rows, c_out, opts);
        n.scatter(rows, c_out, sub(n.submatrix(rows, c_out), corr));
        mark(rows, c_out, total);
    }
}

}  // namespace algmatch
