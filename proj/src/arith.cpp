#include "sparse_orbit/arith.hpp"

#include "sparse_orbit/error.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace sparse_orbit::arith {

namespace {

constexpr u64 kTrialLimit = 1'000'000;

// f(x) = x^2 + c mod n, Brent's variant with batched gcds.
u64 pollard_rho(u64 n, u64 c) {
    if (n % 2 == 0) return 2;
    auto f = [&](u64 x) { return (mul_mod(x, x, n) + c) % n; };
    u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
    const u64 batch = 128;
    for (u64 r = 1; g == 1; r <<= 1) {
        x = y;
        for (u64 i = 0; i < r; ++i) y = f(y);
        for (u64 k = 0; k < r && g == 1; k += batch) {
            ys = y;
            for (u64 i = 0; i < std::min(batch, r - k); ++i) {
                y = f(y);
                q = mul_mod(q, x > y ? x - y : y - x, n);
            }
            g = std::gcd(q, n);
        }
    }
    if (g == n) {
        do {
            ys = f(ys);
            g = std::gcd(x > ys ? x - ys : ys - x, n);
        } while (g == 1);
    }
    return g;
}

void split(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    u64 d = n;
    for (u64 c = 1; d == n; ++c) d = pollard_rho(n, c);
    split(d, out);
    split(n / d, out);
}

}  // namespace

u64 PrimePower::value() const { return checked_pow(prime, static_cast<unsigned>(exponent)); }

Factorization Factorization::from_factors(std::vector<PrimePower> factors) {
    Factorization f;
    u128 product = 1;
    u64 previous = 0;
    for (const auto& pp : factors) {
        if (pp.exponent < 1) throw InvalidArgument("factorization: exponent must be >= 1");
        if (pp.prime <= previous) throw InvalidArgument("factorization: primes must be strictly increasing");
        if (!is_prime(pp.prime)) {
            throw InvalidArgument("factorization: " + std::to_string(pp.prime) + " is not prime");
        }
        for (int i = 0; i < pp.exponent; ++i) {
            product *= pp.prime;
            if (product > kMaxFactorizable) throw InvalidArgument("factorization: value exceeds 2^63-1");
        }
        previous = pp.prime;
    }
    f.value_ = static_cast<u64>(product);
    f.factors_ = std::move(factors);
    return f;
}

int Factorization::exponent_of(u64 p) const {
    for (const auto& pp : factors_) {
        if (pp.prime == p) return pp.exponent;
    }
    return 0;
}

u64 mul_mod(u64 a, u64 b, u64 m) {
    return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 pow_mod(u64 base, u64 exp, u64 m) {
    if (m == 1) return 0;
    u64 result = 1;
    base %= m;
    while (exp > 0) {
        if (exp & 1) result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return result;
}

u64 inverse_mod(u64 a, u64 m) {
    if (m == 1) return 0;
    i128 old_r = a % m, r = m, old_s = 1, s = 0;
    while (r != 0) {
        i128 q = old_r / r;
        i128 tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        tmp = old_s - q * s;
        old_s = s;
        s = tmp;
    }
    if (old_r != 1) {
        throw InvalidArgument("inverse_mod: " + std::to_string(a) + " is not invertible mod " +
                              std::to_string(m));
    }
    i128 inv = old_s % static_cast<i128>(m);
    if (inv < 0) inv += m;
    return static_cast<u64>(inv);
}

u64 reduce(i64 a, u64 m) {
    i128 r = static_cast<i128>(a) % static_cast<i128>(m);
    if (r < 0) r += m;
    return static_cast<u64>(r);
}

u64 checked_pow(u64 base, unsigned exp) {
    u128 result = 1;
    for (unsigned i = 0; i < exp; ++i) {
        result *= base;
        if (result > ~u64{0}) throw InvalidArgument("checked_pow: 64-bit overflow");
    }
    return static_cast<u64>(result);
}

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // This witness set is exact for every n < 3.3 * 10^24.
    for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        u64 x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mul_mod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

Factorization factorize(u64 n) {
    if (n == 0) throw InvalidArgument("factorize: n must be positive");
    if (n > kMaxFactorizable) throw InvalidArgument("factorize: n exceeds 2^63-1");
    std::vector<u64> primes;
    u64 rest = n;
    for (u64 p = 2; p <= kTrialLimit && p * p <= rest; p += (p == 2 ? 1 : 2)) {
        while (rest % p == 0) {
            primes.push_back(p);
            rest /= p;
        }
    }
    if (rest > 1) {
        if (rest <= kTrialLimit * kTrialLimit) {
            // No factor below 10^6 and rest < 10^12: rest is prime.
            primes.push_back(rest);
        } else {
            split(rest, primes);
        }
    }
    std::sort(primes.begin(), primes.end());
    std::vector<PrimePower> factors;
    for (u64 p : primes) {
        if (!factors.empty() && factors.back().prime == p) {
            ++factors.back().exponent;
        } else {
            factors.push_back({p, 1});
        }
    }
    return Factorization::from_factors(std::move(factors));
}

MultiplicativeStats multiplicative_stats(const Factorization& f) {
    MultiplicativeStats s;
    s.omega = f.omega();
    for (const auto& pp : f.factors()) {
        s.phi *= pp.value() / pp.prime * (pp.prime - 1);
        s.tau *= static_cast<u64>(pp.exponent + 1);
    }
    return s;
}

int nu(u64 p, u64 n) {
    if (!is_prime(p)) throw InvalidArgument("nu: " + std::to_string(p) + " is not prime");
    if (n == 0) throw InvalidArgument("nu: n must be positive");
    int e = 0;
    while (n % p == 0) {
        n /= p;
        ++e;
    }
    return e;
}

Congruence crt(std::span<const Congruence> system) {
    for (std::size_t i = 0; i < system.size(); ++i) {
        if (system[i].modulus == 0) throw InvalidArgument("crt: modulus must be positive");
        if (system[i].residue >= system[i].modulus) {
            throw InvalidArgument("crt: residue " + std::to_string(system[i].residue) +
                                  " is not reduced mod " + std::to_string(system[i].modulus));
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (std::gcd(system[i].modulus, system[j].modulus) != 1) {
                throw InvalidArgument("crt: moduli " + std::to_string(system[j].modulus) + " and " +
                                      std::to_string(system[i].modulus) + " (entries " +
                                      std::to_string(j) + ", " + std::to_string(i) +
                                      ") are not coprime");
            }
        }
    }
    Congruence acc{0, 1};
    for (const auto& c : system) {
        u128 m = static_cast<u128>(acc.modulus) * c.modulus;
        if (m > ~u64{0}) throw InvalidArgument("crt: product of moduli exceeds 64 bits");
        // x = acc.residue + acc.modulus * k, with k = (c.residue - acc.residue) / acc.modulus mod c.modulus
        u64 diff = (c.residue + c.modulus - acc.residue % c.modulus) % c.modulus;
        u64 k = mul_mod(diff, inverse_mod(acc.modulus % c.modulus, c.modulus), c.modulus);
        u128 x = acc.residue + static_cast<u128>(acc.modulus) * k;
        acc = {static_cast<u64>(x % m), static_cast<u64>(m)};
    }
    return acc;
}

std::vector<u64> divisors(const Factorization& f) {
    std::vector<u64> out{1};
    for (const auto& pp : f.factors()) {
        std::size_t base = out.size();
        u64 power = 1;
        for (int e = 1; e <= pp.exponent; ++e) {
            power *= pp.prime;
            for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * power);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

u64 smallest_prime_factor(u64 n) {
    if (n < 2) throw InvalidArgument("smallest_prime_factor: n must be >= 2");
    return factorize(n).factors().front().prime;
}

bool is_squarefree(const Factorization& f) {
    return std::all_of(f.factors().begin(), f.factors().end(),
                       [](const PrimePower& pp) { return pp.exponent == 1; });
}

}  // namespace sparse_orbit::arith
