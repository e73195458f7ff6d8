#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "algmatch/errors.hpp"

namespace algmatch {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

/// Residue in [0, p) for the field it was produced by. Scalars carry no
/// pointer to their field; all arithmetic goes through PrimeField.
struct Scalar {
    u64 v = 0;

    constexpr bool is_zero() const noexcept { return v == 0; }
    friend constexpr bool operator==(Scalar, Scalar) = default;
};

/// Seeded generator used for every random substitution.
using Rng = std::mt19937_64;

/// Number of field multiplications performed on this thread. Bulk kernels
/// add their own counts; PrimeField::mul adds one per call.
u64 mul_count() noexcept;
void reset_mul_count() noexcept;
void add_mul_count(u64 n) noexcept;

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(u64 n) noexcept;

/// GF(p) for a runtime prime p < 2^62.
class PrimeField {
public:
    static constexpr u64 kDefaultPrime = 2147483647ULL;  // 2^31 - 1

    explicit PrimeField(u64 p = kDefaultPrime);

    u64 modulus() const noexcept { return p_; }

    Scalar zero() const noexcept { return Scalar{0}; }
    Scalar one() const noexcept { return Scalar{1}; }

    Scalar from_u64(u64 x) const noexcept { return Scalar{x % p_}; }
    Scalar from_i64(std::int64_t x) const noexcept;

    Scalar add(Scalar a, Scalar b) const noexcept {
        u64 s = a.v + b.v;
        return Scalar{s >= p_ ? s - p_ : s};
    }
    Scalar sub(Scalar a, Scalar b) const noexcept {
        return Scalar{a.v >= b.v ? a.v - b.v : a.v + p_ - b.v};
    }
    Scalar neg(Scalar a) const noexcept { return Scalar{a.v == 0 ? 0 : p_ - a.v}; }
    Scalar mul(Scalar a, Scalar b) const noexcept {
        add_mul_count(1);
        return Scalar{mulmod(a.v, b.v)};
    }

    /// Square-and-multiply.
    Scalar pow(Scalar a, u64 e) const noexcept;

    /// a^(p-2); throws ZeroInverse for a = 0.
    Scalar inv(Scalar a) const;

    /// Inverts every entry in place with one exponentiation (Montgomery's
    /// trick). Throws ZeroInverse if any entry is zero.
    void batch_inv(std::span<Scalar> xs) const;

    /// Uniform over [0, p) by rejection from 64-bit words.
    Scalar sample(Rng& rng) const;
    /// Uniform over [1, p).
    Scalar sample_nonzero(Rng& rng) const;

    /// Raw reduction helpers for kernels that count multiplications in bulk.
    u64 mulmod(u64 a, u64 b) const noexcept {
        if (small_) return (a * b) % p_;
        return static_cast<u64>((static_cast<u128>(a) * b) % p_);
    }
    u64 reduce(u128 x) const noexcept { return static_cast<u64>(x % p_); }
    bool small() const noexcept { return small_; }

    friend bool operator==(const PrimeField& a, const PrimeField& b) noexcept {
        return a.p_ == b.p_;
    }

private:
    u64 p_;
    bool small_;  // p < 2^32, so a*b fits in 64 bits
};

}  // namespace algmatch
