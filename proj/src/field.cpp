#include "algmatch/field.hpp"

#include <string>

namespace algmatch {

namespace {
thread_local u64 g_mul_count = 0;

u64 powmod_u128(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = static_cast<u64>(static_cast<u128>(r) * a % m);
        a = static_cast<u64>(static_cast<u128>(a) * a % m);
        e >>= 1;
    }
    return r;
}
}  // namespace

u64 mul_count() noexcept { return g_mul_count; }
void reset_mul_count() noexcept { g_mul_count = 0; }
void add_mul_count(u64 n) noexcept { g_mul_count += n; }

bool is_prime(u64 n) noexcept {
    if (n < 2) return false;
    for (u64 q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % q == 0) return n == q;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // These witnesses are sufficient for every n < 2^64.
    for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        u64 x = powmod_u128(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = static_cast<u64>(static_cast<u128>(x) * x % n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

PrimeField::PrimeField(u64 p) : p_(p), small_(p < (1ULL << 32)) {
    if (p >= (1ULL << 62)) throw NotPrime("modulus must be below 2^62: " + std::to_string(p));
    if (!is_prime(p)) throw NotPrime("modulus is not prime: " + std::to_string(p));
}

Scalar PrimeField::from_i64(std::int64_t x) const noexcept {
    if (x >= 0) return from_u64(static_cast<u64>(x));
    u64 mag = static_cast<u64>(-(x + 1)) + 1;
    return neg(from_u64(mag));
}

Scalar PrimeField::pow(Scalar a, u64 e) const noexcept {
    Scalar r = one();
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

Scalar PrimeField::inv(Scalar a) const {
    if (a.is_zero()) throw ZeroInverse("inverse of zero");
    return pow(a, p_ - 2);
}

void PrimeField::batch_inv(std::span<Scalar> xs) const {
    if (xs.empty()) return;
    std::vector<Scalar> prefix(xs.size());
    Scalar acc = one();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i].is_zero()) throw ZeroInverse("batch inverse of zero at index " + std::to_string(i));
        prefix[i] = acc;
        acc = mul(acc, xs[i]);
    }
    Scalar inv_acc = inv(acc);
    for (std::size_t i = xs.size(); i-- > 0;) {
        Scalar xi = xs[i];
        xs[i] = mul(inv_acc, prefix[i]);
        inv_acc = mul(inv_acc, xi);
    }
}

Scalar PrimeField::sample(Rng& rng) const {
    // Accept words below the largest multiple of p that fits in 2^64.
    const u64 last = UINT64_MAX - (UINT64_MAX % p_ + 1) % p_;
    for (;;) {
        u64 w = rng();
        if (w <= last) return Scalar{w % p_};
    }
}

Scalar PrimeField::sample_nonzero(Rng& rng) const {
    for (;;) {
        Scalar s = sample(rng);
        if (!s.is_zero()) return s;
    }
}

}  // namespace algmatch
