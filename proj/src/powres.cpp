#include "sparse_orbit/powres.hpp"

#include "sparse_orbit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace sparse_orbit::powres {

namespace {

u64 ipow(u64 b, unsigned e) { return arith::checked_pow(b, e); }

// Is the unit y mod p^k a C-th power, and how many C-th roots does 1 have?
struct UnitPowerInfo {
    bool is_power = false;
    u64 roots_of_one = 1;
};

UnitPowerInfo unit_power_info(u64 p, int k, unsigned C, u64 y) {
    const u64 pk = ipow(p, static_cast<unsigned>(k));
    if (p != 2) {
        const u64 order = pk / p * (p - 1);
        const u64 g = std::gcd<u64>(order, C);
        return {arith::pow_mod(y, order / g, pk) == 1, g};
    }
    if (C % 2 == 1) return {true, 1};
    // C-th powers of units mod 2^k are exactly the units = 1 mod 2^j with
    // j = min(nu_2(C) + 2, k); the kernel has 2^{j-1} elements.
    int s = 0;
    for (unsigned c = C; c % 2 == 0; c /= 2) ++s;
    const int j = std::min(s + 2, k);
    const u64 mask = (u64{1} << j) - 1;
    return {(y & mask) == 1, u64{1} << (j - 1)};
}

// Pow_{p^e}(x, p^f): t in [1, p^e] with nu_p(t) = f exactly (f = e meaning t = p^e).
u64 count_prime_power_gcd(u64 p, int e, int f, unsigned C, u64 x) {
    const u64 pe = ipow(p, static_cast<unsigned>(e));
    x %= pe;
    if (f == e) return x == 0 ? 1 : 0;
    if (static_cast<u64>(C) * static_cast<u64>(f) >= static_cast<u64>(e)) {
        return x == 0 ? ipow(p, static_cast<unsigned>(e - f)) / p * (p - 1) : 0;
    }
    const int cf = static_cast<int>(C) * f;
    if (x == 0) return 0;
    int v = 0;
    u64 y = x;
    while (y % p == 0) {
        y /= p;
        ++v;
    }
    if (v != cf) return 0;
    auto info = unit_power_info(p, e - cf, C, y);
    if (!info.is_power) return 0;
    return ipow(p, (C - 1) * static_cast<unsigned>(f)) * info.roots_of_one;
}

u64 count_prime_power(u64 p, int e, unsigned C, u64 x) {
    u64 total = 0;
    for (int f = 0; f <= e; ++f) total += count_prime_power_gcd(p, e, f, C, x);
    return total;
}

void check_exponent(unsigned C, const char* who) {
    if (C < 2) throw InvalidArgument(std::string(who) + ": exponent C must be >= 2");
}

u64 saturating_mul(u64 a, u64 b) {
    u128 r = static_cast<u128>(a) * b;
    return r > std::numeric_limits<u64>::max() ? std::numeric_limits<u64>::max() : static_cast<u64>(r);
}

}  // namespace

u64 pow_count(u64 N, unsigned C, i64 x) {
    check_exponent(C, "pow_count");
    if (N == 0) throw InvalidArgument("pow_count: N must be positive");
    u64 r = arith::reduce(x, N);
    u64 total = 1;
    const auto fact = arith::factorize(N);
    for (const auto& pp : fact.factors()) {
        total *= count_prime_power(pp.prime, pp.exponent, C, r % pp.value());
        if (total == 0) break;
    }
    return total;
}

u64 pow_count_brute(u64 N, unsigned C, i64 x) {
    check_exponent(C, "pow_count_brute");
    if (N == 0) throw InvalidArgument("pow_count_brute: N must be positive");
    u64 r = arith::reduce(x, N);
    u64 count = 0;
    for (u64 t = 1; t <= N; ++t) {
        if (arith::pow_mod(t, C, N) == r) ++count;
    }
    return count;
}

u64 pow_count_gcd(u64 N, unsigned C, i64 x, u64 d) {
    check_exponent(C, "pow_count_gcd");
    if (N == 0 || d == 0 || N % d != 0) {
        throw InvalidArgument("pow_count_gcd: d = " + std::to_string(d) + " does not divide N = " + std::to_string(N));
    }
    u64 r = arith::reduce(x, N);
    u64 total = 1;
    const auto fact = arith::factorize(N);
    for (const auto& pp : fact.factors()) {
        int f = 0;
        for (u64 dd = d; dd % pp.prime == 0; dd /= pp.prime) ++f;
        total *= count_prime_power_gcd(pp.prime, pp.exponent, f, C, r % pp.value());
        if (total == 0) break;
    }
    return total;
}

PowProfile PowProfile::build(u64 N, unsigned C) {
    check_exponent(C, "PowProfile");
    if (N == 0) throw InvalidArgument("PowProfile: N must be positive");
    PowProfile prof{N, C, std::vector<u64>(N, 1)};
    const auto fact = arith::factorize(N);
    for (const auto& pp : fact.factors()) {
        const u64 pe = pp.value();
        std::vector<u64> local(pe);
        for (u64 x = 0; x < pe; ++x) local[x] = count_prime_power(pp.prime, pp.exponent, C, x);
        for (u64 x = 0; x < N; ++x) prof.counts[x] *= local[x % pe];
    }
    return prof;
}

u64 sq_count(u64 q, i64 begin, i64 end, i64 m) {
    if (q == 0) throw InvalidArgument("sq_count: q must be positive");
    if (end <= begin) return 0;
    const u64 length = static_cast<u64>(end - begin);
    const u64 full = length / q;
    u64 count = full == 0 ? 0 : full * pow_count(q, 2, m);
    const u64 target = arith::reduce(m, q);
    for (i64 i = begin + static_cast<i64>(full * q); i < end; ++i) {
        u64 r = arith::reduce(i, q);
        if (arith::mul_mod(r, r, q) == target) ++count;
    }
    return count;
}

// --- scaled characters --------------------------------------------------------

std::optional<RootOfUnity> ScaledCharacter::root(i64 x) const {
    if (x % static_cast<i64>(scale) != 0) return std::nullopt;
    return chi.root(x / static_cast<i64>(scale));
}

std::complex<double> ScaledCharacter::operator()(i64 x) const {
    auto r = root(x);
    return r ? r->value() : std::complex<double>{};
}

std::complex<double> scaled_eval(const ScaledCharacter& f, i64 x) { return f(x); }

ScaledProduct scaled_product(std::span<const ScaledCharacter> fs) {
    std::vector<u64> nd(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i) {
        u128 v = static_cast<u128>(fs[i].chi.modulus()) * fs[i].scale;
        if (v > std::numeric_limits<u64>::max()) throw InvalidArgument("scaled_product: n*d exceeds 64 bits");
        nd[i] = static_cast<u64>(v);
        for (std::size_t j = 0; j < i; ++j) {
            if (std::gcd(nd[i], nd[j]) != 1) {
                throw InvalidArgument("scaled_product: n*d of factors " + std::to_string(j) + " and " +
                                      std::to_string(i) + " (" + std::to_string(nd[j]) + ", " +
                                      std::to_string(nd[i]) + ") are not coprime");
            }
        }
    }
    ScaledProduct acc{RootOfUnity{}, ScaledCharacter{}};
    for (const auto& f : fs) {
        // f1(x) f2(x) = chi1(d2) chi2(d1) (chi1 chi2)(x / (d1 d2)).
        const auto& a = acc.f;
        RootOfUnity c = *a.chi.root(static_cast<i64>(f.scale)) * *f.chi.root(static_cast<i64>(a.scale));
        acc.coefficient = acc.coefficient * c;
        acc.f = ScaledCharacter{a.scale * f.scale, characters::combine_coprime(a.chi, f.chi)};
    }
    return acc;
}

std::vector<DirichletCharacter> decompose_coprime_prime_power(u64 p, int e, unsigned C) {
    check_exponent(C, "decompose_coprime_prime_power");
    if (!arith::is_prime(p) || e < 1) throw InvalidArgument("decompose_coprime_prime_power: need p prime, e >= 1");
    auto group = characters::UnitGroup::of(ipow(p, static_cast<unsigned>(e)));
    const auto& fs = group->factors();
    // chi^C = 1 iff each component exponent is a multiple of o_j / gcd(o_j, C).
    std::vector<u64> step(fs.size()), count(fs.size());
    for (std::size_t j = 0; j < fs.size(); ++j) {
        count[j] = std::gcd<u64>(fs[j].order, C);
        step[j] = fs[j].order / count[j];
    }
    std::vector<DirichletCharacter> out;
    std::vector<u64> idx(fs.size(), 0);
    while (true) {
        std::vector<u64> exps(fs.size());
        for (std::size_t j = 0; j < fs.size(); ++j) exps[j] = idx[j] * step[j];
        out.emplace_back(group, std::move(exps));
        std::size_t j = 0;
        while (j < fs.size() && ++idx[j] == count[j]) idx[j++] = 0;
        if (j == fs.size()) break;
    }
    return out;
}

std::vector<ComboTerm> decompose_prime_power(u64 p, int e, int f, unsigned C) {
    check_exponent(C, "decompose_prime_power");
    if (!arith::is_prime(p) || e < 1) throw InvalidArgument("decompose_prime_power: need p prime, e >= 1");
    if (f < 0 || f > e) {
        throw InvalidArgument("decompose_prime_power: f = " + std::to_string(f) + " outside [0, " +
                              std::to_string(e) + "]");
    }
    const u64 pe = ipow(p, static_cast<unsigned>(e));
    if (static_cast<u64>(C) * static_cast<u64>(f) >= static_cast<u64>(e)) {
        // Constant on multiples of p^e: 1 when f = e, else phi(p^{e-f}).
        u64 mult = f == e ? 1 : ipow(p, static_cast<unsigned>(e - f)) / p * (p - 1);
        return {ComboTerm{RootOfUnity{}, mult, ScaledCharacter{pe, DirichletCharacter{}}}};
    }
    const int cf = static_cast<int>(C) * f;
    const u64 scale = ipow(p, static_cast<unsigned>(cf));
    const u64 mult = ipow(p, (C - 1) * static_cast<unsigned>(f));
    std::vector<ComboTerm> out;
    for (auto& chi : decompose_coprime_prime_power(p, e - cf, C)) {
        out.push_back(ComboTerm{RootOfUnity{}, mult, ScaledCharacter{scale, std::move(chi)}});
    }
    return out;
}

std::complex<double> ScaledCharCombo::operator()(i64 x) const {
    KahanSum<double> re, im;
    for (const auto& t : terms) {
        auto r = t.f.root(x);
        if (!r) continue;
        auto v = (t.coefficient * *r).value() * static_cast<double>(t.multiplier);
        re.add(v.real());
        im.add(v.imag());
    }
    return {re.value(), im.value()};
}

u64 ScaledCharCombo::expanded_size() const {
    u64 s = 0;
    for (const auto& t : terms) s += t.multiplier;
    return s;
}

void to_json(nlohmann::json& j, const ScaledCharCombo& combo) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : combo.terms) {
        auto c = t.coefficient.value();
        terms.push_back({{"coeff_re", c.real()},
                         {"coeff_im", c.imag()},
                         {"coeff_root", {t.coefficient.num, t.coefficient.den}},
                         {"multiplier", t.multiplier},
                         {"scale", t.f.scale},
                         {"char_modulus", t.f.chi.modulus()},
                         {"char_exponents", t.f.chi.component_exponents()}});
    }
    j = nlohmann::json{{"modulus", combo.modulus},
                       {"exponent", combo.exponent},
                       {"scale_bound", combo.scale_bound},
                       {"terms", std::move(terms)}};
}

PowApproximation approximate_pow(u64 N, unsigned C, u64 d) {
    check_exponent(C, "approximate_pow");
    if (N == 0 || d == 0) throw InvalidArgument("approximate_pow: N and d must be positive");
    auto fact = arith::factorize(N);
    PowApproximation out;
    out.combo.modulus = N;
    out.combo.exponent = C;
    out.combo.scale_bound = d;

    // Per prime: terms of sum_{f <= min(nu_p(d), e)} Pow_{p^e}(., p^f).
    std::vector<std::vector<ComboTerm>> per_prime;
    for (const auto& pp : fact.factors()) {
        int nd = 0;
        for (u64 dd = d; dd % pp.prime == 0; dd /= pp.prime) ++nd;
        if (pp.exponent > nd) out.l1_bound += std::pow(static_cast<double>(pp.prime), -nd);
        std::vector<ComboTerm> local;
        for (int f = 0; f <= std::min(nd, pp.exponent); ++f) {
            for (auto& t : decompose_prime_power(pp.prime, pp.exponent, f, C)) local.push_back(std::move(t));
        }
        per_prime.push_back(std::move(local));
    }

    // Expand the product over primes term by term.
    std::vector<std::size_t> idx(per_prime.size(), 0);
    std::vector<ScaledCharacter> parts(per_prime.size());
    while (true) {
        RootOfUnity coeff;
        u64 mult = 1;
        for (std::size_t j = 0; j < per_prime.size(); ++j) {
            const auto& t = per_prime[j][idx[j]];
            coeff = coeff * t.coefficient;
            mult *= t.multiplier;
            parts[j] = t.f;
        }
        auto prod = scaled_product(parts);
        out.combo.terms.push_back(ComboTerm{coeff * prod.coefficient, mult, std::move(prod.f)});
        std::size_t j = 0;
        while (j < per_prime.size() && ++idx[j] == per_prime[j].size()) idx[j++] = 0;
        if (j == per_prime.size()) break;
    }

    u64 bound = 1;
    for (std::size_t i = 0; i < fact.omega(); ++i) bound = saturating_mul(bound, 2 * C);
    for (unsigned i = 0; i <= C; ++i) bound = saturating_mul(bound, d);
    out.size_bound = bound;
    return out;
}

Sparsified sparsify_residues(u64 n, unsigned C) {
    check_exponent(C, "sparsify_residues");
    if (n == 0) throw InvalidArgument("sparsify_residues: n must be positive");
    auto fact = arith::factorize(n);
    for (const auto& pp : fact.factors()) {
        if (pp.exponent > 1) {
            throw InvalidArgument("sparsify_residues: n = " + std::to_string(n) + " is not squarefree (p = " +
                                  std::to_string(pp.prime) + ")");
        }
        if (pp.prime % C != 1) {
            throw InvalidArgument("sparsify_residues: prime factor " + std::to_string(pp.prime) + " is not 1 mod " +
                                  std::to_string(C));
        }
    }
    Sparsified out;
    out.omega = fact.omega();
    std::vector<char> member(n, 0);
    for (u64 x = 0; x < n; ++x) {
        if (std::gcd(x, n) == 1) member[arith::pow_mod(x, C, n)] = 1;
    }
    if (n == 1) member[0] = 1;
    for (u64 a = 0; a < n; ++a) {
        if (!member[a]) continue;
        out.residues.push_back(a);
        for (u64 i = 1; i <= out.omega; ++i) {
            if (member[(a + i) % n]) {
                out.near.push_back(a);
                break;
            }
        }
    }
    const double w = static_cast<double>(out.omega);
    const double c4 = std::pow(static_cast<double>(C), 4);
    out.size_bound = static_cast<double>(out.residues.size()) * w * std::pow(7.0 / 8.0, w / 3.0 - 4.0 * c4);
    return out;
}

}  // namespace sparse_orbit::powres
