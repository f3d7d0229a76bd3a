#pragma once

#include "sparse_orbit/arith.hpp"
#include "sparse_orbit/characters.hpp"

#include "json.hpp"

#include <complex>
#include <vector>

namespace sparse_orbit::powres {

using characters::DirichletCharacter;
using characters::RootOfUnity;

/// Number of t in [1, N] with t^C = x (mod N), via factorization and
/// per-prime-power counting.
u64 pow_count(u64 N, unsigned C, i64 x);
/// Reference count by enumerating t.
u64 pow_count_brute(u64 N, unsigned C, i64 x);

/// Number of t in [1, N] with gcd(t, N) = d and t^C = x (mod N). Requires d | N.
u64 pow_count_gcd(u64 N, unsigned C, i64 x, u64 d);

/// Pow_N(x) for every residue x, built multiplicatively over prime powers.
struct PowProfile {
    u64 modulus = 1;
    unsigned exponent = 2;
    std::vector<u64> counts;

    static PowProfile build(u64 N, unsigned C);
    u64 operator()(i64 x) const { return counts[arith::reduce(x, modulus)]; }
};

/// |{i in [begin, end): i^2 = m (mod q)}|.
u64 sq_count(u64 q, i64 begin, i64 end, i64 m);

/// x -> chi(x/d) when d | x, else 0. A member of A(n, d) with n = chi.modulus().
struct ScaledCharacter {
    u64 scale = 1;
    DirichletCharacter chi;

    std::optional<RootOfUnity> root(i64 x) const;
    std::complex<double> operator()(i64 x) const;
    friend bool operator==(const ScaledCharacter&, const ScaledCharacter&) = default;
};

std::complex<double> scaled_eval(const ScaledCharacter& f, i64 x);

struct ScaledProduct {
    RootOfUnity coefficient;
    ScaledCharacter f;
};

/// Pointwise product of scaled characters with pairwise coprime n_i d_i,
/// returned as coefficient * f with f in A(prod n_i, prod d_i).
ScaledProduct scaled_product(std::span<const ScaledCharacter> fs);

/// Characters mod p^e whose sum is x -> Pow_{p^e}(x, 1), i.e. the characters
/// trivial on C-th powers. There are [G : G^C] of them.
std::vector<DirichletCharacter> decompose_coprime_prime_power(u64 p, int e, unsigned C);

/// One term coefficient * multiplier * f of a scaled-character combination.
struct ComboTerm {
    RootOfUnity coefficient;
    u64 multiplier = 1;
    ScaledCharacter f;
};

/// Terms summing to x -> Pow_{p^e}(x, p^f).
std::vector<ComboTerm> decompose_prime_power(u64 p, int e, int f, unsigned C);

struct ScaledCharCombo {
    u64 modulus = 1;
    unsigned exponent = 2;
    u64 scale_bound = 1;
    std::vector<ComboTerm> terms;

    std::complex<double> operator()(i64 x) const;
    /// Sum of multipliers: the number of unit-coefficient functions represented.
    u64 expanded_size() const;
};

void to_json(nlohmann::json& j, const ScaledCharCombo& combo);

struct PowApproximation {
    ScaledCharCombo combo;
    /// sum over p | N with nu_p(N) > nu_p(d) of p^{-nu_p(d)}.
    double l1_bound = 0.0;
    /// (2C)^{omega(N)} d^{C+1}, saturated at the largest u64.
    u64 size_bound = 0;
};

/// h(i) = sum_{d' | d} Pow_N(i, d') as a scaled-character combination.
PowApproximation approximate_pow(u64 N, unsigned C, u64 d);

struct Sparsified {
    std::vector<u64> residues;  // A: C-th powers coprime to n, sorted
    std::vector<u64> near;      // A': a in A with a + i in A (mod n) for some 1 <= i <= omega(n)
    std::size_t omega = 0;
    double size_bound = 0.0;    // |A| omega (7/8)^{omega/3 - 4 C^4}
};

/// Requires n squarefree with every prime factor = 1 (mod C).
Sparsified sparsify_residues(u64 n, unsigned C);

}  // namespace sparse_orbit::powres
