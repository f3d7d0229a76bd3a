#include "doctest.h"

#include "sparse_orbit/arith.hpp"
#include "sparse_orbit/error.hpp"
#include "sparse_orbit/powres.hpp"

#include <cmath>
#include <complex>
#include <algorithm>
#include <numeric>

using namespace sparse_orbit;
using namespace sparse_orbit::powres;

namespace {

u64 pow_count_gcd_brute(u64 N, unsigned C, i64 x, u64 d) {
    const u64 target = arith::reduce(x, N);
    u64 count = 0;
    for (u64 t = 1; t <= N; ++t) {
        if (std::gcd(t, N) == d && arith::pow_mod(t % N, C, N) == target % N) ++count;
    }
    return count;
}

}  // namespace

TEST_CASE("pow_count matches enumeration") {
    for (u64 N = 1; N <= 400; ++N) {
        for (unsigned C : {2u, 3u, 4u}) {
            for (i64 x = -2; x < static_cast<i64>(N); ++x) CHECK(pow_count(N, C, x) == pow_count_brute(N, C, x));
        }
    }
}

TEST_CASE("pow_count_gcd matches enumeration and sums to pow_count") {
    for (u64 N : {12, 16, 27, 45, 72, 100, 125, 210}) {
        const auto divs = arith::divisors(arith::factorize(N));
        for (unsigned C : {2u, 3u}) {
            for (i64 x = 0; x < static_cast<i64>(N); ++x) {
                u64 total = 0;
                for (u64 d : divs) {
                    const u64 c = pow_count_gcd(N, C, x, d);
                    CHECK(c == pow_count_gcd_brute(N, C, x, d));
                    total += c;
                }
                CHECK(total == pow_count(N, C, x));
            }
        }
    }
    CHECK_THROWS_AS(pow_count_gcd(12, 2, 1, 5), InvalidArgument);
}

TEST_CASE("profile counts sum to N") {
    for (u64 N = 1; N <= 300; ++N) {
        const auto prof = PowProfile::build(N, 2);
        u64 total = 0;
        for (u64 x = 0; x < N; ++x) {
            CHECK(prof(static_cast<i64>(x)) == pow_count_brute(N, 2, static_cast<i64>(x)));
            total += prof.counts[x];
        }
        CHECK(total == N);
    }
}

TEST_CASE("sq_count against enumeration") {
    for (u64 q : {7, 12, 25, 101}) {
        for (i64 m = 0; m < static_cast<i64>(q); ++m) {
            u64 count = 0;
            for (i64 i = -17; i < 60; ++i) {
                if (arith::reduce(i * i - m, q) == 0) ++count;
            }
            CHECK(sq_count(q, -17, 60, m) == count);
        }
    }
}

TEST_CASE("prime power decomposition sums to the indicator of C-th powers") {
    for (u64 p : {2, 3, 5, 7, 13}) {
        for (int e = 1; arith::checked_pow(p, static_cast<unsigned>(e)) <= 200; ++e) {
            const u64 pe = arith::checked_pow(p, static_cast<unsigned>(e));
            for (unsigned C : {2u, 3u, 4u}) {
                const auto chars = decompose_coprime_prime_power(p, e, C);
                for (u64 x = 0; x < pe; ++x) {
                    std::complex<double> s = 0;
                    for (const auto& chi : chars) s += chi(static_cast<i64>(x));
                    CHECK(std::abs(s - static_cast<double>(pow_count_gcd_brute(pe, C, static_cast<i64>(x), 1))) < 1e-9);
                }
                for (int f = 0; f <= e; ++f) {
                    const u64 pf = arith::checked_pow(p, static_cast<unsigned>(f));
                    const auto terms = decompose_prime_power(p, e, f, C);
                    for (u64 x = 0; x < pe; ++x) {
                        std::complex<double> s = 0;
                        for (const auto& t : terms) {
                            s += t.coefficient.value() * static_cast<double>(t.multiplier) * t.f(static_cast<i64>(x));
                        }
                        const double expect = static_cast<double>(pow_count_gcd_brute(pe, C, static_cast<i64>(x), pf));
                        CHECK(std::abs(s - expect) < 1e-9);
                    }
                }
            }
        }
    }
}

TEST_CASE("scaled product is pointwise") {
    const auto c4 = characters::enumerate_characters(4);
    const auto c9 = characters::enumerate_characters(9);
    for (const auto& a : c4) {
        for (const auto& b : c9) {
            const std::vector<ScaledCharacter> fs{{5, a}, {1, b}};
            const auto prod = scaled_product(fs);
            for (i64 x = -5; x < 400; ++x) {
                const auto expect = fs[0](x) * fs[1](x);
                CHECK(std::abs(prod.coefficient.value() * prod.f(x) - expect) < 1e-9);
            }
        }
    }
}

TEST_CASE("approximate_pow reproduces the gcd-restricted sum") {
    for (u64 N : {15, 36, 60, 105, 128, 243, 360}) {
        const u64 spf = arith::smallest_prime_factor(N);
        for (unsigned C : {2u, 3u}) {
            for (u64 d : {u64{1}, spf}) {
                const auto approx = approximate_pow(N, C, d);
                const auto divs = arith::divisors(arith::factorize(d));
                CHECK(approx.combo.terms.size() <= approx.size_bound);
                double l1 = 0;
                for (u64 x = 0; x < N; ++x) {
                    double expect = 0;
                    for (u64 dd : divs) expect += static_cast<double>(pow_count_gcd_brute(N, C, static_cast<i64>(x), dd));
                    CHECK(std::abs(approx.combo(static_cast<i64>(x)) - expect) < 1e-9);
                    l1 += std::abs(expect - static_cast<double>(pow_count_brute(N, C, static_cast<i64>(x))));
                }
                CHECK(l1 / static_cast<double>(N) <= approx.l1_bound + 1e-12);
            }
        }
    }
}

TEST_CASE("sparsified residues") {
    for (u64 n : {7 * 13, 7 * 13 * 19, 13 * 37}) {
        const auto sp = sparsify_residues(n, 3);
        for (u64 a : sp.residues) {
            CHECK(std::gcd(a, n) == 1);
            CHECK(pow_count(n, 3, static_cast<i64>(a)) > 0);
        }
        u64 expect = 0;
        for (u64 a = 0; a < n; ++a) {
            if (std::gcd(a, n) == 1 && pow_count(n, 3, static_cast<i64>(a)) > 0) ++expect;
        }
        CHECK(sp.residues.size() == expect);
        for (u64 a : sp.near) CHECK(std::binary_search(sp.residues.begin(), sp.residues.end(), a));
        CHECK(sp.omega == arith::factorize(n).omega());
    }
    CHECK_THROWS_AS(sparsify_residues(5 * 7, 3), InvalidArgument);
    CHECK_THROWS_AS(sparsify_residues(49, 3), InvalidArgument);
}
