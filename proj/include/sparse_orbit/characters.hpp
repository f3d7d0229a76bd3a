#pragma once

#include "sparse_orbit/numeric.hpp"

#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace sparse_orbit::characters {

/// The root of unity e(num/den), kept reduced: 0 <= num < den, gcd(num, den) = 1.
struct RootOfUnity {
    u64 num = 0;
    u64 den = 1;

    static RootOfUnity make(i64 num, u64 den);
    RootOfUnity operator*(const RootOfUnity& o) const;
    RootOfUnity conj() const;
    RootOfUnity pow(u64 k) const;
    std::complex<double> value() const;
    bool is_one() const { return num == 0; }
    friend bool operator==(const RootOfUnity&, const RootOfUnity&) = default;
};

/// One cyclic factor of (Z/mZ)^*, living in the component mod prime_power.
/// Generators are canonical per prime power (least primitive root for odd p,
/// -1 and 5 for 2^e with e >= 3), so factors of different moduli that share a
/// prime power agree.
struct CyclicFactor {
    u64 prime = 0;
    int exponent = 0;
    u64 prime_power = 1;
    u64 order = 1;
    u64 generator = 1;
};

struct LogTable;

/// The unit group of Z/mZ as a product of cyclic factors.
class UnitGroup {
public:
    /// Shared, cached instance for modulus m.
    static std::shared_ptr<const UnitGroup> of(u64 m);

    explicit UnitGroup(u64 m);

    u64 modulus() const { return modulus_; }
    const std::vector<CyclicFactor>& factors() const { return factors_; }
    /// Least common multiple of the factor orders.
    u64 exponent() const { return exponent_; }
    u64 size() const;
    /// Discrete logs of a (coprime to the modulus) along each factor.
    /// Returns false when gcd(a, m) > 1.
    bool log(u64 a, std::vector<u64>& out) const;

private:
    u64 modulus_;
    u64 exponent_ = 1;
    std::vector<CyclicFactor> factors_;
    std::vector<std::shared_ptr<const LogTable>> tables_;
};

class DirichletCharacter {
public:
    /// Principal character mod 1 (identically 1).
    DirichletCharacter();
    DirichletCharacter(std::shared_ptr<const UnitGroup> group, std::vector<u64> exponents);

    static DirichletCharacter principal(u64 m);

    u64 modulus() const { return group_->modulus(); }
    const UnitGroup& group() const { return *group_; }
    /// chi(g_j) = e(k_j / o_j) for the j-th factor generator g_j.
    const std::vector<u64>& component_exponents() const { return exponents_; }

    /// Exact value, or nullopt when gcd(a, modulus) > 1.
    std::optional<RootOfUnity> root(i64 a) const;
    std::complex<double> operator()(i64 a) const;

    /// Values over one period as numerators over group().exponent(), -1 where chi vanishes.
    std::vector<i64> exponent_table() const;
    std::vector<std::complex<double>> value_table() const;

    bool is_principal() const;
    DirichletCharacter conj() const;
    DirichletCharacter pow(u64 k) const;
    /// Product of two characters of the same modulus.
    DirichletCharacter operator*(const DirichletCharacter& o) const;

    friend bool operator==(const DirichletCharacter& a, const DirichletCharacter& b) {
        return a.modulus() == b.modulus() && a.exponents_ == b.exponents_;
    }

private:
    std::shared_ptr<const UnitGroup> group_;
    std::vector<u64> exponents_;
};

/// The character mod m1*m2 equal to a(x) b(x) for coprime moduli m1, m2.
DirichletCharacter combine_coprime(const DirichletCharacter& a, const DirichletCharacter& b);

/// All phi(m) characters mod m; index 0 is the principal character.
std::vector<DirichletCharacter> enumerate_characters(u64 m);

u64 char_order(const DirichletCharacter& chi);

/// Rounded value of (1/phi(m)) sum_chi chi(x) conj(chi(t)); 1 iff x = t mod m.
int indicator_via_orthogonality(u64 m, u64 t, i64 x);
/// Same, reusing a precomputed enumerate_characters(m).
int indicator_via_orthogonality(std::span<const DirichletCharacter> chars, u64 t, i64 x);

/// sum_{i<L} chi(x + i*step), accumulated exactly per root before conversion.
std::complex<double> progression_sum(const DirichletCharacter& chi, i64 x, i64 step, u64 length);

/// sum_{x<n} |sum_{i<L} chi(x + i*step)| with n the modulus of chi.
double progression_abs_total(const DirichletCharacter& chi, u64 step, u64 length);

/// chi(x + step) == chi(x) for every x.
bool is_periodic(const DirichletCharacter& chi, u64 step);

/// chi factors through the units mod gcd(d, n): chi(x) = 1 for every unit x = 1 (mod gcd(d, n)).
/// Unlike is_periodic this ignores the zeros of chi, so the principal character is induced from 1.
bool induced_from(const DirichletCharacter& chi, u64 d);

/// sum_{x<m} |sum_{i<h} chi(x+i)|^2 for a nonprincipal chi mod m.
double burgess_stat(u64 m, const DirichletCharacter& chi, u64 h);

/// |{x in F_p : chi(x) = eps1, chi(x+i) = eps2}| for chi mod p of order k >= 2.
u64 pair_count(u64 p, const DirichletCharacter& chi, const RootOfUnity& eps1, const RootOfUnity& eps2,
               u64 i);

}  // namespace sparse_orbit::characters
