#include "doctest.h"

#include <functional>

#include "algmatch/updates.hpp"
#include "support.hpp"

using namespace algmatch;
using namespace testsupport;

namespace {

struct Step {
    IndexList cols;
    Matrix c;
    IndexList rows;
};

// N -= N[*,cols] · c · N[rows,*], one update at a time, schoolbook products.
Matrix replay(Matrix n, const std::vector<Step>& steps) {
    IndexList all(n.rows());
    for (Index i = 0; i < n.rows(); ++i) all[i] = i;
    for (const auto& s : steps) {
        Matrix u = n.submatrix(all, s.cols);
        Matrix v = n.submatrix(s.rows, all);
        n = sub(n, naive_product(naive_product(u, s.c), v));
    }
    return n;
}

IndexList range(Index a, Index b) {
    IndexList v;
    for (Index i = a; i < b; ++i) v.push_back(i);
    return v;
}

}  // namespace

TEST_CASE("record stores parameters and leaves N alone") {
    PrimeField f;
    Rng rng(1);
    Matrix n = random_nonsingular(f, 6, rng);
    const Matrix before = n;
    UpdateLedger led(f, 6);
    const IndexList all = range(0, 6);
    const IndexList c0 = {2}, r0 = {4};
    led.record(c0, Matrix::from_rows(f, {{3}}), r0, n, all);
    CHECK(n == before);
    CHECK(led.size() == 1);
    CHECK(led.pi_c().size() == 1);
    CHECK(led.pi_c()[0] == UpdateLedger::Tag{2, 1});
    CHECK(led.pi_r()[0] == UpdateLedger::Tag{4, 1});
    CHECK(led.U()(5, 2) == n(5, 2));
    CHECK(led.V()(4, 1) == n(4, 1));
    CHECK(led.C()(2, 4).v == 3);
    CHECK_FALSE(led.is_clean(Region::square(all)));

    CHECK_THROWS_AS(led.record(c0, Matrix::from_rows(f, {{1}}), IndexList{5}, n, all), IndexReuse);
    CHECK_THROWS_AS(led.record(IndexList{1}, Matrix::from_rows(f, {{1}}), r0, n, all), IndexReuse);
}

TEST_CASE("recording over a stale scope is rejected") {
    PrimeField f;
    Rng rng(2);
    Matrix n = random_nonsingular(f, 4, rng);
    UpdateLedger led(f, 4);
    led.record(IndexList{0}, Matrix::from_rows(f, {{1}}), IndexList{1}, n, range(0, 2));
    CHECK_THROWS_AS(led.record(IndexList{2}, Matrix::from_rows(f, {{1}}), IndexList{3}, n, range(0, 4)),
                    DirtyParameters);
    // A pending update touches every entry, not just its own scope.
    CHECK_THROWS_AS(led.record(IndexList{2}, Matrix::from_rows(f, {{1}}), IndexList{3}, n, range(2, 4)),
                    DirtyParameters);
    led.flush(n, Region::square(range(0, 4)));
    CHECK_NOTHROW(led.record(IndexList{2}, Matrix::from_rows(f, {{1}}), IndexList{3}, n, range(0, 4)));
}

TEST_CASE("rank-1 and rank-2 flushes match eager application") {
    PrimeField f;
    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
        Matrix n = random_nonsingular(f, 6, rng);
        std::vector<Step> steps = {
            {{1}, Matrix::random(f, 1, 1, rng), {3}},
            {{0, 4}, Matrix::random(f, 2, 2, rng), {5, 2}},
        };
        UpdateLedger led(f, 6);
        const IndexList all = range(0, 6);
        Matrix lazy = n;
        for (const auto& s : steps) {
            led.record(s.cols, s.c, s.rows, lazy, all);
            led.flush(lazy, Region::square(all));
        }
        CHECK(lazy == replay(n, steps));
    }
}

TEST_CASE("skew rank-2 block equals its two rank-1 pieces") {
    PrimeField f;
    Rng rng(4);
    Matrix n = random_nonsingular(f, 5, rng);
    Scalar x = f.sample_nonzero(rng);
    Matrix c(f, 2, 2);
    c(0, 1) = f.neg(f.inv(x));
    c(1, 0) = f.inv(x);
    Matrix a = replay(n, {{{1, 3}, c, {1, 3}}});
    Matrix c01(f, 2, 2), c10(f, 2, 2);
    c01(0, 1) = c(0, 1);
    c10(1, 0) = c(1, 0);
    // Applying both halves against the same N is one rank-2 update.
    IndexList all = range(0, 5);
    Matrix u = n.submatrix(all, IndexList{1, 3}), v = n.submatrix(IndexList{1, 3}, all);
    Matrix b = sub(sub(n, naive_product(naive_product(u, c01), v)), naive_product(naive_product(u, c10), v));
    CHECK(a == b);
}

TEST_CASE("three interleaved updates, SW quadrant of an 8x8 inverse") {
    PrimeField f;
    Rng rng(8);
    for (int t = 0; t < 10; ++t) {
        Matrix n = random_nonsingular(f, 8, rng);
        const IndexList nw = range(0, 4), south = range(4, 8);
        std::vector<Step> steps = {
            {{0}, Matrix::random(f, 1, 1, rng), {2}},
            {{1, 3}, Matrix::random(f, 2, 2, rng), {0, 1}},
            {{2}, Matrix::random(f, 1, 1, rng), {3}},
        };
        UpdateLedger led(f, 8);
        Matrix lazy = n;
        for (const auto& s : steps) {
            led.record(s.cols, s.c, s.rows, lazy, nw);
            led.flush(lazy, Region::square(nw));
        }
        const Matrix eager = replay(n, steps);
        CHECK(lazy.submatrix(nw, nw) == eager.submatrix(nw, nw));

        const Region sw{south, nw};
        CHECK_FALSE(led.is_clean(sw));
        led.flush(lazy, sw);
        CHECK(led.is_clean(sw));
        CHECK(lazy.submatrix(south, nw) == eager.submatrix(south, nw));
        // The eastern half is still stale.
        CHECK(lazy.submatrix(range(0, 8), south) == n.submatrix(range(0, 8), south));

        const Matrix snapshot = lazy;
        led.flush(lazy, sw);
        CHECK(lazy == snapshot);

        led.flush(lazy, Region::square(range(0, 8)));
        CHECK(lazy == eager);
        led.flush(lazy, Region::square(range(0, 8)));
        CHECK(lazy == eager);
    }
}

TEST_CASE("flush with Strassen-sized crossovers") {
    PrimeField f;
    Rng rng(9);
    Matrix n = random_nonsingular(f, 12, rng);
    const IndexList scope = range(0, 6);
    std::vector<Step> steps;
    for (Index k = 0; k < 3; ++k) steps.push_back({{2 * k}, Matrix::random(f, 1, 1, rng), {2 * k + 1}});
    UpdateLedger led(f, 12);
    Matrix lazy = n;
    const MulOptions tiny{.strassen_crossover = 2};
    for (const auto& s : steps) {
        led.record(s.cols, s.c, s.rows, lazy, scope);
        led.flush(lazy, Region::square(scope), tiny);
    }
    led.flush(lazy, Region::square(range(0, 12)), tiny);
    CHECK(lazy == replay(n, steps));
}

TEST_CASE("region-by-region flushing in recursion order equals eager application") {
    PrimeField f;
    Rng rng(16);
    constexpr Index kN = 16;
    for (int trial = 0; trial < 25; ++trial) {
        Matrix n = random_nonsingular(f, kN, rng);
        Matrix lazy = n;
        UpdateLedger led(f, kN);
        std::vector<Step> steps;
        std::vector<bool> col_used(kN, false), row_used(kN, false);
        std::size_t budget = kN / 2;

        std::function<void(const IndexList&)> rec = [&](const IndexList& p) {
            if (p.size() <= 2) {
                if (steps.size() >= budget || rng() % 2) return;
                IndexList cols, rows;
                for (Index i : p)
                    if (!col_used[i]) cols.push_back(i);
                for (Index i : p)
                    if (!row_used[i]) rows.push_back(i);
                if (cols.empty() || rows.empty()) return;
                const Index arity = (cols.size() == 2 && rows.size() == 2 && rng() % 2) ? 2 : 1;
                cols.resize(arity);
                rows.resize(arity);
                Step s{cols, Matrix::random(f, arity, arity, rng), rows};
                led.record(s.cols, s.c, s.rows, lazy, p);
                for (Index c : cols) col_used[c] = true;
                for (Index r : rows) row_used[r] = true;
                steps.push_back(std::move(s));
                return;
            }
            std::vector<IndexList> parts(4);
            for (Index q = 0; q < 4; ++q)
                for (Index i = q * p.size() / 4; i < (q + 1) * p.size() / 4; ++i) parts[q].push_back(p[i]);
            for (Index a = 0; a < 4; ++a)
                for (Index b = a + 1; b < 4; ++b) {
                    IndexList w = parts[a];
                    w.insert(w.end(), parts[b].begin(), parts[b].end());
                    std::sort(w.begin(), w.end());
                    led.require_clean(Region::square(w));
                    rec(w);
                    led.flush(lazy, Region::square(p));
                }
        };
        const IndexList all = range(0, kN);
        rec(all);
        led.flush(lazy, Region::square(all));
        CHECK(led.size() == steps.size());
        CHECK(lazy == replay(n, steps));
    }
}

TEST_CASE("materialize_u agrees with the eager columns") {
    PrimeField f;
    Rng rng(21);
    Matrix n = random_nonsingular(f, 10, rng);
    const IndexList scope = range(0, 5), outside = range(5, 10);
    std::vector<Step> steps = {
        {{0}, Matrix::random(f, 1, 1, rng), {1}},
        {{2, 3}, Matrix::random(f, 2, 2, rng), {2, 0}},
        {{4}, Matrix::random(f, 1, 1, rng), {4}},
    };
    UpdateLedger led(f, 10);
    Matrix lazy = n;
    std::vector<Matrix> eager_cols;
    Matrix eager = n;
    for (const auto& s : steps) {
        eager_cols.push_back(eager.submatrix(outside, s.cols));
        eager = replay(eager, {s});
        led.record(s.cols, s.c, s.rows, lazy, scope);
        led.flush(lazy, Region::square(scope));
    }
    Matrix got = led.materialize_u(0, 3, outside, n.submatrix(outside, led.update_cols(0, 3)));
    Index q = 0;
    for (const auto& cols : eager_cols)
        for (Index a = 0; a < cols.cols(); ++a, ++q)
            for (Index i = 0; i < outside.size(); ++i) CHECK(got(i, q) == cols(i, a));

    CHECK_THROWS_AS(led.materialize_u(0, 3, outside, Matrix(f, 2, 2)), DimensionMismatch);
}
