#pragma once

#include "sparse_orbit/numeric.hpp"

#include <span>
#include <utility>
#include <vector>

namespace sparse_orbit::arith {

/// Largest value accepted by factorize().
inline constexpr u64 kMaxFactorizable = (u64{1} << 63) - 1;

struct PrimePower {
    u64 prime = 0;
    int exponent = 0;

    u64 value() const;
    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Prime-exponent map of a positive integer. Primes are strictly increasing
/// and their product (with multiplicity) is value().
class Factorization {
public:
    Factorization() = default;  // the factorization of 1

    /// Validates the factor list (primality, ordering, product).
    static Factorization from_factors(std::vector<PrimePower> factors);

    u64 value() const { return value_; }
    const std::vector<PrimePower>& factors() const { return factors_; }
    std::size_t omega() const { return factors_.size(); }
    /// Exponent of p (0 when p does not divide the value).
    int exponent_of(u64 p) const;

private:
    u64 value_ = 1;
    std::vector<PrimePower> factors_;
};

struct MultiplicativeStats {
    u64 phi = 1;
    u64 omega = 0;
    u64 tau = 1;
    friend bool operator==(const MultiplicativeStats&, const MultiplicativeStats&) = default;
};

struct Congruence {
    u64 residue = 0;
    u64 modulus = 1;
    friend bool operator==(const Congruence&, const Congruence&) = default;
};

u64 mul_mod(u64 a, u64 b, u64 m);
u64 pow_mod(u64 base, u64 exp, u64 m);
/// Inverse of a mod m; throws InvalidArgument when gcd(a, m) != 1.
u64 inverse_mod(u64 a, u64 m);
/// Non-negative residue of a signed value.
u64 reduce(i64 a, u64 m);
/// base^exp, throwing InvalidArgument on 64-bit overflow.
u64 checked_pow(u64 base, unsigned exp);

/// Deterministic Miller-Rabin, exact on the full 64-bit range.
bool is_prime(u64 n);

/// Trial division up to 10^6, then Pollard rho with Brent cycle detection.
Factorization factorize(u64 n);

MultiplicativeStats multiplicative_stats(const Factorization& f);

/// p-adic valuation; p must be prime and n positive.
int nu(u64 p, u64 n);

/// Solves a system of congruences with pairwise coprime moduli.
/// An empty system yields (0, 1).
Congruence crt(std::span<const Congruence> system);

/// All positive divisors in increasing order.
std::vector<u64> divisors(const Factorization& f);

u64 smallest_prime_factor(u64 n);
bool is_squarefree(const Factorization& f);

}  // namespace sparse_orbit::arith
