#include "doctest.h"

#include "sparse_orbit/arith.hpp"
#include "sparse_orbit/characters.hpp"
#include "sparse_orbit/error.hpp"

#include <cmath>
#include <complex>
#include <numeric>
#include <set>

using namespace sparse_orbit;
using namespace sparse_orbit::characters;

namespace {

using cd = std::complex<double>;

bool close(cd a, cd b, double tol = 1e-9) {
    return std::abs(a - b) < tol;
}

}  // namespace

TEST_CASE("roots of unity stay reduced") {
    const auto r = RootOfUnity::make(-3, 12);
    CHECK(r == RootOfUnity{3, 4});
    CHECK((r * r) == RootOfUnity{1, 2});
    CHECK(r.pow(4).is_one());
    CHECK((r * r.conj()).is_one());
    CHECK(close(r.value(), cd(0, -1)));
}

TEST_CASE("unit group size and logs") {
    for (u64 m = 1; m <= 400; ++m) {
        const auto g = UnitGroup::of(m);
        const auto stats = arith::multiplicative_stats(arith::factorize(m));
        CHECK(g->size() == stats.phi);
        // Distinct units have distinct log vectors.
        std::set<std::vector<u64>> seen;
        std::vector<u64> logs;
        for (u64 a = 0; a < m; ++a) {
            const bool unit = std::gcd(a, m) == 1;
            CHECK(g->log(a, logs) == unit);
            if (unit) seen.insert(logs);
        }
        CHECK(seen.size() == stats.phi);
    }
}

TEST_CASE("characters are completely multiplicative and periodic") {
    for (u64 m : {1, 2, 8, 9, 15, 16, 24, 45, 63, 64, 97, 100, 105}) {
        const auto chars = enumerate_characters(m);
        CHECK(chars.size() == UnitGroup::of(m)->size());
        CHECK(chars[0].is_principal());
        for (const auto& chi : chars) {
            for (i64 a = -3; a < static_cast<i64>(m) + 3; ++a) {
                CHECK(close(chi(a), chi(a + static_cast<i64>(m))));
                for (i64 b = 0; b < static_cast<i64>(m); b += 3) CHECK(close(chi(a * b), chi(a) * chi(b)));
            }
            CHECK(close(chi(1), 1.0));
        }
    }
}

TEST_CASE("character table is a group with exact orthogonality") {
    for (u64 m = 1; m <= 60; ++m) {
        const auto chars = enumerate_characters(m);
        const double phi = static_cast<double>(chars.size());
        for (std::size_t i = 0; i < chars.size(); ++i) {
            for (std::size_t j = 0; j < chars.size(); ++j) {
                cd s = 0;
                for (u64 x = 0; x < m; ++x) s += chars[i](static_cast<i64>(x)) * std::conj(chars[j](static_cast<i64>(x)));
                CHECK(close(s, i == j ? phi : 0.0, 1e-8));
            }
            CHECK((chars[i] * chars[i].conj()).is_principal());
        }
        for (u64 t = 0; t < m; ++t) {
            if (std::gcd(t, m) != 1) continue;
            for (i64 x = 0; x < static_cast<i64>(m); ++x) {
                CHECK(indicator_via_orthogonality(chars, t, x) == (static_cast<u64>(x) % m == t ? 1 : 0));
            }
        }
    }
}

TEST_CASE("character order matches the least trivial power") {
    for (u64 m : {7, 16, 21, 40, 81}) {
        for (const auto& chi : enumerate_characters(m)) {
            const u64 k = char_order(chi);
            CHECK(chi.pow(k).is_principal());
            for (u64 j = 1; j < k; ++j) CHECK_FALSE(chi.pow(j).is_principal());
        }
    }
}

TEST_CASE("combining coprime characters multiplies values") {
    const auto a = enumerate_characters(8);
    const auto b = enumerate_characters(15);
    for (const auto& x : a) {
        for (const auto& y : b) {
            const auto z = combine_coprime(x, y);
            CHECK(z.modulus() == 120);
            for (i64 t = 0; t < 120; ++t) CHECK(close(z(t), x(t) * y(t)));
        }
    }
    CHECK_THROWS_AS(combine_coprime(enumerate_characters(6)[1], enumerate_characters(4)[1]), InvalidArgument);
}

TEST_CASE("progression sums and burgess statistic against direct sums") {
    for (u64 m : {11, 25, 36, 77}) {
        for (const auto& chi : enumerate_characters(m)) {
            for (i64 step : {1, 2, 5}) {
                for (u64 L : {1, 4, 9}) {
                    for (i64 x = 0; x < static_cast<i64>(m); x += 4) {
                        cd s = 0;
                        for (u64 i = 0; i < L; ++i) s += chi(x + static_cast<i64>(i) * step);
                        CHECK(close(progression_sum(chi, x, step, L), s));
                    }
                    double total = 0;
                    for (u64 x = 0; x < m; ++x) {
                        cd s = 0;
                        for (u64 i = 0; i < L; ++i) s += chi(static_cast<i64>(x + i * step));
                        total += std::abs(s);
                    }
                    CHECK(progression_abs_total(chi, static_cast<u64>(step), L) == doctest::Approx(total).epsilon(1e-9));
                }
            }
            if (chi.is_principal()) continue;
            for (u64 h : {1, 3, 7}) {
                double direct = 0;
                for (u64 x = 0; x < m; ++x) {
                    cd s = 0;
                    for (u64 i = 0; i < h; ++i) s += chi(static_cast<i64>(x + i));
                    direct += std::norm(s);
                }
                CHECK(burgess_stat(m, chi, h) == doctest::Approx(direct).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("periodicity detects induced characters") {
    // A character mod 12 induced from mod 4 has period 4.
    for (const auto& chi : enumerate_characters(12)) {
        bool direct = true;
        for (i64 x = 0; x < 12; ++x) {
            if (!close(chi(x + 4), chi(x))) direct = false;
        }
        CHECK(is_periodic(chi, 4) == direct);
        CHECK(is_periodic(chi, 12));
    }
}

TEST_CASE("induced characters agree on units in one class") {
    for (u64 n : {12, 15, 16, 45, 60}) {
        for (const auto& chi : enumerate_characters(n)) {
            for (u64 d : arith::divisors(arith::factorize(n))) {
                bool direct = true;
                for (u64 x = 1; x < n; ++x) {
                    for (u64 y = x % d; y < n; y += d) {
                        if (std::gcd(x, n) == 1 && std::gcd(y, n) == 1 && !close(chi(x), chi(y))) direct = false;
                    }
                }
                CHECK(induced_from(chi, d) == direct);
            }
            CHECK(induced_from(chi, n));
            CHECK(induced_from(chi, 1) == chi.is_principal());
        }
    }
}

TEST_CASE("pair counts against enumeration") {
    for (u64 p : {13, 31, 37}) {
        for (const auto& chi : enumerate_characters(p)) {
            const u64 k = char_order(chi);
            if (k < 2) continue;
            for (u64 i = 1; i <= 3; ++i) {
                for (u64 a = 0; a < k; ++a) {
                    const auto e1 = RootOfUnity::make(static_cast<i64>(a), k);
                    const auto e2 = RootOfUnity::make(static_cast<i64>((a * 3 + 1) % k), k);
                    u64 count = 0;
                    for (u64 x = 0; x < p; ++x) {
                        const auto r1 = chi.root(static_cast<i64>(x));
                        const auto r2 = chi.root(static_cast<i64>(x + i));
                        if (r1 && r2 && *r1 == e1 && *r2 == e2) ++count;
                    }
                    CHECK(pair_count(p, chi, e1, e2, i) == count);
                }
            }
        }
    }
}
