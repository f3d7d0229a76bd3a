#include "doctest.h"

#include "sparse_orbit/arith.hpp"
#include "sparse_orbit/error.hpp"
#include "sparse_orbit/parallel.hpp"

#include <numeric>
#include <vector>

using namespace sparse_orbit;
using namespace sparse_orbit::arith;

namespace {

bool prime_by_trial(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

MultiplicativeStats stats_by_count(u64 n) {
    MultiplicativeStats s{0, 0, 0};
    for (u64 k = 1; k <= n; ++k) {
        if (std::gcd(k, n) == 1) ++s.phi;
        if (n % k == 0) {
            ++s.tau;
            if (prime_by_trial(k)) ++s.omega;
        }
    }
    return s;
}

}  // namespace

TEST_CASE("primality agrees with trial division") {
    for (u64 n = 0; n < 20000; ++n) CHECK(is_prime(n) == prime_by_trial(n));
    CHECK(is_prime(18446744073709551557ULL));  // largest 64-bit prime
    CHECK_FALSE(is_prime(3215031751ULL));      // strong pseudoprime to bases 2, 3, 5, 7
    CHECK_FALSE(is_prime(4294967297ULL));      // 641 * 6700417
}

TEST_CASE("factorization reproduces the value") {
    CounterRng rng(11, 1);
    for (u64 i = 0; i < 300; ++i) {
        u64 n = rng.draw(i) >> (i % 40);
        n &= kMaxFactorizable;
        if (n == 0) n = 1;
        const auto f = factorize(n);
        u64 prod = 1;
        u64 last = 1;
        for (const auto& pp : f.factors()) {
            CHECK(is_prime(pp.prime));
            CHECK(pp.prime > last);
            last = pp.prime;
            prod *= pp.value();
        }
        CHECK(prod == n);
        CHECK(f.value() == n);
    }
    const auto semi = factorize(2147483647ULL * 2147483629ULL);
    REQUIRE(semi.omega() == 2);
    CHECK(semi.factors()[0].prime == 2147483629ULL);
}

TEST_CASE("from_factors rejects malformed lists") {
    CHECK_THROWS_AS(Factorization::from_factors({{4, 1}}), InvalidArgument);
    CHECK_THROWS_AS(Factorization::from_factors({{5, 1}, {3, 1}}), InvalidArgument);
    CHECK(Factorization::from_factors({{2, 3}, {7, 1}}).value() == 56);
}

TEST_CASE("phi, omega, tau against counting") {
    for (u64 n = 1; n <= 3000; ++n) CHECK(multiplicative_stats(factorize(n)) == stats_by_count(n));
}

TEST_CASE("divisors are complete and sorted") {
    for (u64 n = 1; n <= 2000; ++n) {
        std::vector<u64> expect;
        for (u64 d = 1; d <= n; ++d) {
            if (n % d == 0) expect.push_back(d);
        }
        CHECK(divisors(factorize(n)) == expect);
    }
}

TEST_CASE("crt solves random coprime systems") {
    CounterRng rng(5, 2);
    const std::vector<u64> moduli_pool{3, 4, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
    for (u64 trial = 0; trial < 500; ++trial) {
        std::vector<Congruence> sys;
        u64 total = 1;
        for (std::size_t j = 0; j < moduli_pool.size() && sys.size() < 4; ++j) {
            if (rng.below(trial * 64 + j, 3) != 0) continue;
            const u64 m = moduli_pool[j];
            sys.push_back({rng.below(trial * 64 + 32 + j, m), m});
            total *= m;
        }
        const Congruence c = crt(sys);
        CHECK(c.modulus == total);
        CHECK(c.residue < total);
        for (const auto& e : sys) CHECK(c.residue % e.modulus == e.residue);
    }
    CHECK(crt(std::vector<Congruence>{}) == Congruence{0, 1});
    const std::vector<Congruence> bad{{1, 4}, {1, 6}};
    CHECK_THROWS_AS(crt(bad), InvalidArgument);
}

TEST_CASE("modular helpers") {
    for (u64 m = 2; m < 200; ++m) {
        for (u64 a = 1; a < m; ++a) {
            if (std::gcd(a, m) == 1) {
                CHECK(a * inverse_mod(a, m) % m == 1);
            } else {
                CHECK_THROWS_AS(inverse_mod(a, m), InvalidArgument);
            }
        }
    }
    CHECK(reduce(-7, 5) == 3);
    CHECK(pow_mod(3, 1000000, 1000000007ULL) == 64935414ULL);
    CHECK(mul_mod(~u64{0}, ~u64{0}, 1000000007ULL) == static_cast<u64>((u128(~u64{0}) * ~u64{0}) % 1000000007ULL));
    CHECK(checked_pow(10, 19) == 10000000000000000000ULL);
    CHECK_THROWS_AS(checked_pow(10, 20), InvalidArgument);
}

TEST_CASE("valuations, smallest prime factor, squarefree") {
    for (u64 n = 1; n <= 5000; ++n) {
        u64 spf = n;
        for (u64 d = 2; d * d <= n; ++d) {
            if (n % d == 0) {
                spf = d;
                break;
            }
        }
        if (n > 1) CHECK(smallest_prime_factor(n) == spf);
        int v = 0;
        for (u64 m = n; m % 3 == 0; m /= 3) ++v;
        CHECK(nu(3, n) == v);
        bool sf = true;
        for (u64 d = 2; d * d <= n; ++d) {
            if (n % (d * d) == 0) sf = false;
        }
        CHECK(is_squarefree(factorize(n)) == sf);
    }
}
