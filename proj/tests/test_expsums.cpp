#include "doctest.h"

#include "sparse_orbit/error.hpp"
#include "sparse_orbit/expsums.hpp"
#include "sparse_orbit/parallel.hpp"

#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

using namespace sparse_orbit;
using namespace sparse_orbit::expsums;

namespace {

using cd = std::complex<double>;

i64 eval_plain(const IntPolynomial& P, i64 x, i64 q) {
    i64 acc = 0;
    const auto& c = P.coefficients();
    for (std::size_t k = c.size(); k-- > 0;) acc = ((acc * x + c[k]) % q + q) % q;
    return acc;
}

cd weyl_plain(const IntPolynomial& P, u64 q) {
    cd s = 0;
    for (u64 x = 0; x < q; ++x) {
        s += unit_phase(static_cast<double>(eval_plain(P, static_cast<i64>(x), static_cast<i64>(q))) / static_cast<double>(q));
    }
    return s;
}

IntPolynomial random_poly(const CounterRng& rng, u64 k, int deg) {
    std::vector<i64> c(static_cast<std::size_t>(deg) + 1);
    for (int j = 0; j <= deg; ++j) c[static_cast<std::size_t>(j)] = static_cast<i64>(rng.below(k * 8 + static_cast<u64>(j), 11)) - 5;
    if (c.back() == 0) c.back() = 1;
    return IntPolynomial(c);
}

}  // namespace

TEST_CASE("polynomial parsing and printing") {
    const auto P = IntPolynomial::parse("3x^3 - x + 7");
    CHECK(P.coefficients() == std::vector<i64>{7, -1, 0, 3});
    CHECK(P.degree() == 3);
    CHECK(IntPolynomial::parse("n^2").coefficients() == std::vector<i64>{0, 0, 1});
    CHECK(IntPolynomial::parse("5").degree() == 0);
    CHECK(IntPolynomial::parse(P.to_string()).coefficients() == P.coefficients());
    CHECK(IntPolynomial({1, 2, 0, 0}).degree() == 1);
    CHECK_THROWS_AS(IntPolynomial::parse("x^"), InvalidArgument);
    CHECK(P.eval_mod(-2, 11) == static_cast<u64>(eval_plain(P, -2, 11)));
}

TEST_CASE("weyl sums match direct evaluation") {
    CounterRng rng(3, 7);
    for (u64 k = 0; k < 200; ++k) {
        const auto P = random_poly(rng, k, 1 + static_cast<int>(k % 4));
        const u64 q = 1 + rng.below(k * 8 + 7, 80);
        CHECK(std::abs(weyl_sum(P, q) - weyl_plain(P, q)) < 1e-8);
    }
}

TEST_CASE("quadratic gauss sum magnitudes") {
    const IntPolynomial sq({0, 0, 1});
    for (u64 q = 1; q <= 300; ++q) {
        const double mag = std::abs(weyl_sum(sq, q));
        double expect = std::sqrt(static_cast<double>(q));
        if (q % 4 == 2) expect = 0;
        if (q % 4 == 0) expect = std::sqrt(2.0 * static_cast<double>(q));
        CHECK(mag == doctest::Approx(expect).epsilon(1e-9).scale(1));
    }
}

TEST_CASE("difference averages against nested loops") {
    const IntPolynomial P({1, -2, 3, 1});
    for (u64 q : {5, 8, 13}) {
        for (int n : {1, 2}) {
            double total = 0;
            const u64 count = n == 1 ? q : q * q;
            for (u64 h = 0; h < count; ++h) {
                const i64 h1 = static_cast<i64>(h % q);
                const i64 h2 = static_cast<i64>(h / q);
                cd s = 0;
                for (i64 x = 0; x < static_cast<i64>(q); ++x) {
                    auto D1 = [&](i64 y) { return eval_plain(P, y + h1, static_cast<i64>(q)) - eval_plain(P, y, static_cast<i64>(q)); };
                    i64 v = n == 1 ? D1(x) : D1(x + h2) - D1(x);
                    s += unit_phase(static_cast<double>(((v % static_cast<i64>(q)) + static_cast<i64>(q)) % static_cast<i64>(q)) /
                                    static_cast<double>(q));
                }
                total += std::abs(s) / static_cast<double>(q);
            }
            CHECK(weyl_difference_avg(P, q, n) == doctest::Approx(total / static_cast<double>(count)).epsilon(1e-9));
        }
    }
    CHECK_THROWS_AS(weyl_difference_avg(P, 5, 3), InvalidArgument);
    CHECK_THROWS_AS(weyl_difference_avg(P, 1000, 2, 1e6), BudgetExceeded);
}

TEST_CASE("van der corput inequality on seeded sequences") {
    CounterRng rng(9, 3);
    for (u64 k = 0; k < 200; ++k) {
        const std::size_t N = 16 + rng.below(k, 200);
        std::vector<cd> seq(N);
        const bool drift = k % 2 == 0;
        for (std::size_t n = 0; n < N; ++n) {
            const double t = drift ? 0.37 * static_cast<double>(n * n) / static_cast<double>(N)
                                   : rng.uniform(k * 4096 + n);
            seq[n] = unit_phase(t);
        }
        const std::size_t H = 1 + rng.below(k + 100000, N);
        const auto r = vdc_check(seq, H);
        CHECK(r.lhs <= r.rhs + 1e-12);
        CHECK(r.lhs <= 1.0 + 1e-12);
    }
    std::vector<cd> bad{cd(2, 0)};
    CHECK_THROWS_AS(vdc_check(bad, 1), InvalidArgument);
}

TEST_CASE("gauss_G matches direct evaluation") {
    CounterRng rng(1, 1);
    for (u64 k = 0; k < 100; ++k) {
        const auto P = random_poly(rng, k, 2);
        const u64 q = 2 + rng.below(k * 8 + 6, 40);
        const i64 ell = static_cast<i64>(rng.below(k * 8 + 5, 100)) - 50;
        const i64 v = static_cast<i64>(rng.below(k * 8 + 4, 100)) - 50;
        const i64 t = static_cast<i64>(rng.below(k * 8 + 3, 100)) - 50;
        cd s = 0;
        const i64 Q = static_cast<i64>(q);
        for (i64 x = 0; x < Q; ++x) {
            const i64 r = ((ell % Q) * eval_plain(P, x + t, Q) + (v % Q) * x) % Q;
            s += unit_phase(static_cast<double>((r + Q) % Q) / static_cast<double>(q));
        }
        CHECK(std::abs(gauss_G(P, ell, v, t, q) - s) < 1e-8);
    }
}

TEST_CASE("residue counts against double loops") {
    const IntPolynomial P({0, 0, 1});
    CounterRng rng(4, 4);
    for (u64 k = 0; k < 100; ++k) {
        ResidueCountQuery qr;
        qr.q = 3 + rng.below(k * 8, 50);
        qr.r = 1 + rng.below(k * 8 + 1, 6);
        if (std::gcd(qr.q, qr.r) != 1) qr.r = 1;
        qr.a = static_cast<i64>(rng.below(k * 8 + 2, 10));
        qr.x = static_cast<i64>(rng.below(k * 8 + 3, 100)) - 50;
        qr.t = static_cast<i64>(rng.below(k * 8 + 4, 100)) - 50;
        qr.M = 1 + rng.below(k * 8 + 5, 60);
        qr.N = 1 + rng.below(k * 8 + 6, 60);
        u64 count = 0;
        const i64 q = static_cast<i64>(qr.q);
        const i64 r = static_cast<i64>(qr.r);
        for (i64 m = qr.x; m < qr.x + static_cast<i64>(qr.M); ++m) {
            if (((m - qr.a) % r + r) % r != 0) continue;
            for (i64 n = qr.t; n < qr.t + static_cast<i64>(qr.N); ++n) {
                if (((n * n - m) % q + q) % q == 0) ++count;
            }
        }
        CHECK(residue_count_lhs(P, qr) == count);
        const auto ratio = residue_count_ratio(P, qr);
        CHECK(ratio.main_term == doctest::Approx(static_cast<double>(qr.M * qr.N) / static_cast<double>(qr.q * qr.r)));
    }
    ResidueCountQuery bad;
    bad.q = 6;
    bad.r = 4;
    CHECK_THROWS_AS(residue_count_lhs(P, bad), InvalidArgument);
}
