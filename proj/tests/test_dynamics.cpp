#include "doctest.h"

#include "sparse_orbit/dynamics.hpp"
#include "sparse_orbit/error.hpp"
#include "sparse_orbit/parallel.hpp"

#include <cmath>
#include <cstdlib>
#include <memory>

using namespace sparse_orbit;
using namespace sparse_orbit::dynamics;

namespace {

std::vector<BigInt> ints(std::initializer_list<long> v) {
    std::vector<BigInt> out;
    for (long x : v) out.emplace_back(x);
    return out;
}

std::shared_ptr<const ContinuedFraction> small_cf() {
    return std::make_shared<const ContinuedFraction>(diophantine::power_rule(3, 8, ints({0, 5})));
}

std::shared_ptr<const ContinuedFraction> rigid_cf() {
    return std::make_shared<const ContinuedFraction>(diophantine::power_rule(6, 8, ints({0, 46})));
}

CocycleSchedule rigid_schedule() {
    CocycleSchedule s;
    s.first = 1;
    s.last = 5;
    s.lower_bound_set = {2, 3, 4, 5};
    return s;
}

// g at x = a/b via double cosines of the reduced phase, independent of the library's evaluation.
double cocycle_plain(const FourierCocycle& g, const BigRational& x) {
    double s = 0;
    for (const auto& t : g.terms()) {
        const BigRational ph = frac(BigRational(t.frequency * numerator(x), denominator(x)));
        s += static_cast<double>(t.amplitude) * std::cos(kTwoPi * to_double(ph));
    }
    return s;
}

double as_double(const Real& v) {
    return static_cast<double>(v);
}

}  // namespace

TEST_CASE("rotation agrees with exact convergent arithmetic") {
    const auto cf = small_cf();
    const std::size_t L = cf->size() - 1;
    CounterRng rng(2, 2);
    for (u64 k = 0; k < 200; ++k) {
        const BigInt n(rng.below(k, 1000000000));
        const Real x = Real(rng.uniform(k + 1000));
        const Real got = rotate(*cf, x, n);
        const BigRational step = frac(BigRational(n * cf->p(L), cf->q(L)));
        Real expect = x + to_real(step);
        if (expect >= 1) expect -= 1;
        CHECK(as_double(circle_distance(got, expect)) < 1e-30);
        const Real norm = rotation_norm(*cf, n);
        CHECK(as_double(abs(norm - to_real(diophantine::nearest_int_dist(step)))) < 1e-30);
    }
}

TEST_CASE("cocycle amplitudes follow the schedule") {
    const auto cf = rigid_cf();
    const auto g = build_cocycle(*cf, rigid_schedule());
    REQUIRE(g.terms().size() == 5);
    for (const auto& t : g.terms()) {
        const auto n = static_cast<std::size_t>(t.index);
        CHECK(t.frequency == cf->q(n));
        const Real qn = to_real(cf->q(n));
        const Real qn1 = to_real(cf->q(n + 1));
        const Real e = Real(4) / 5;
        const Real expect = n >= 2 ? 1 / (pow(qn, e) * qn1) : 1 / (Real(n) * qn * pow(qn1, e));
        CHECK(as_double(abs(t.amplitude / expect - 1)) < 1e-30);
    }
    CocycleSchedule too_long;
    too_long.first = 1;
    too_long.last = cf->size() - 1;
    CHECK_THROWS_AS(build_cocycle(*cf, too_long), InvalidArgument);
    // Denominators growing like q^3 cannot carry the lower-bound amplitudes.
    CHECK_THROWS_AS(build_cocycle(*small_cf(), rigid_schedule()), InvalidArgument);
}

TEST_CASE("cocycle evaluation and truncation") {
    const auto cf = small_cf();
    const auto g = FourierCocycle::attach(*cf, {{BigInt(1), Real(0.5)}, {BigInt(3), Real(0.25)}, {cf->q(3), Real(1e-12)}});
    CHECK(as_double(g.abs_sum()) == doctest::Approx(0.75 + 1e-12));
    for (int j = 0; j < 50; ++j) {
        const BigRational x(BigInt(j * 7 + 1), BigInt(353));
        CHECK(as_double(eval_cocycle(g, x).value) == doctest::Approx(cocycle_plain(g, x)).epsilon(1e-12));
        const auto cut = eval_cocycle(g, x, Real(1e-9));
        CHECK(as_double(cut.truncation) == doctest::Approx(1e-12));
        CHECK(as_double(abs(cut.value - eval_cocycle(g, x).value)) <= 1e-12 + 1e-20);
    }
    CHECK_THROWS_AS(FourierCocycle::attach(*cf, {{BigInt(0), Real(1)}}), InvalidArgument);
}

TEST_CASE("closed-form birkhoff sums match direct summation") {
    const auto cf = small_cf();
    const auto g = FourierCocycle::attach(*cf, {{BigInt(1), Real(0.5)}, {cf->q(2), Real(0.01)}, {BigInt(7), Real(-0.2)}});
    CounterRng rng(8, 8);
    for (u64 k = 0; k < 60; ++k) {
        const BigInt n(1 + rng.below(k, 3000));
        const BigRational x(BigInt(rng.below(k + 500, 1000)), BigInt(1000));
        const Real direct = birkhoff_sum(*cf, g, x, n, BirkhoffMode::direct);
        const Real closed = birkhoff_sum(*cf, g, x, n, BirkhoffMode::closed_form);
        CHECK(as_double(abs(direct - closed)) <= 1e-8 * std::max(1.0, as_double(abs(direct))));
    }
    CHECK_THROWS_AS(birkhoff_sum(*cf, g, BigRational(0), BigInt(1000000), BirkhoffMode::direct, Real(0), 1e3),
                    BudgetExceeded);
}

TEST_CASE("birkhoff sums are additive along the orbit") {
    const auto cf = rigid_cf();
    const auto g = build_cocycle(*cf, rigid_schedule());
    const std::size_t L = cf->size() - 1;
    for (long m : {1L, 17L, 4000L}) {
        for (long n : {1L, 46L, 999L}) {
            const BigRational x(BigInt(3), BigInt(7));
            const BigRational shifted = frac(x + BigRational(BigInt(m) * cf->p(L), cf->q(L)));
            const Real lhs = birkhoff_sum(*cf, g, x, BigInt(m + n));
            const Real rhs = birkhoff_sum(*cf, g, x, BigInt(m)) + birkhoff_sum(*cf, g, shifted, BigInt(n));
            CHECK(as_double(abs(lhs - rhs)) < 1e-25);
        }
    }
}

TEST_CASE("skew iterates compose") {
    const auto cf = rigid_cf();
    const SkewProductSystem sys{cf, build_cocycle(*cf, rigid_schedule()), Real(0)};
    CounterRng rng(6, 6);
    for (u64 k = 0; k < 20; ++k) {
        const Point p{Real(rng.uniform(k)), Real(rng.uniform(k + 100))};
        const BigInt a(rng.below(k + 200, 100000));
        const BigInt b(rng.below(k + 300, 100000));
        const Point direct = skew_iterate(sys, p, a + b);
        const Point composed = skew_iterate(sys, skew_iterate(sys, p, a), b);
        CHECK(as_double(torus_distance(direct, composed)) < 1e-25);
    }
    CHECK_THROWS_AS(skew_iterate(sys, Point{Real(0), Real(0)}, BigInt(-1)), InvalidArgument);
}

TEST_CASE("special flow is a semigroup and stays under the roof") {
    const auto cf = small_cf();
    const auto g = FourierCocycle::attach(*cf, {{BigInt(1), Real(0.3)}, {BigInt(2), Real(0.1)}});
    const auto sys = SpecialFlowSystem::make(cf, g);
    CHECK(as_double(to_real(sys.offset)) == doctest::Approx(1.4));
    CounterRng rng(5, 5);
    for (u64 k = 0; k < 30; ++k) {
        const Real x(rng.uniform(k));
        const Point p{x, Real(rng.uniform(k + 50)) * sys.roof(exact_rational(x))};
        const BigRational s(BigInt(rng.below(k + 100, 5000)), BigInt(7));
        const BigRational t(BigInt(rng.below(k + 200, 5000)), BigInt(3));
        const Point a = special_flow_map(sys, p, s + t);
        const Point b = special_flow_map(sys, special_flow_map(sys, p, s), t);
        CHECK(as_double(flow_distance(sys, a, b)) < 1e-20);
        CHECK(a.y >= 0);
        CHECK(a.y < sys.roof(exact_rational(a.x)));
    }
    // Flowing for exactly the roof height moves one step along the base.
    const BigRational x0(BigInt(1), BigInt(8));
    const Point base{to_real(x0), Real(0)};
    const Real h = sys.roof(x0);
    const Point next = special_flow_map(sys, base, exact_rational(h + Real("1e-45")));
    CHECK(as_double(circle_distance(next.x, rotate(*cf, base.x, BigInt(1)))) < 1e-30);
    CHECK(as_double(next.y) < 1e-30);
    CHECK_THROWS_AS(SpecialFlowSystem::make(cf, g, BigRational(1, 5)), InvalidArgument);
}

TEST_CASE("rigidity horizon is an exact integer root") {
    CHECK(rigidity_horizon(BigInt(32)) == 16);
    CHECK(rigidity_horizon(BigInt(31)) == 15);
    CounterRng rng(1, 9);
    for (u64 k = 0; k < 100; ++k) {
        BigInt q = BigInt(rng.draw(k)) * BigInt(rng.draw(k + 1000)) + 1;
        const BigInt h = rigidity_horizon(q);
        CHECK(pow(h, 5) <= pow(q, 4));
        CHECK(pow(BigInt(h + 1), 5) > pow(q, 4));
    }
}

TEST_CASE("rigidity times are exhaustive or sampled") {
    RigidityOptions opt;
    const auto small = rigidity_times(BigInt(100), opt);
    REQUIRE(small.size() == 100);
    CHECK(small.front() == 1);
    CHECK(small.back() == 100);
    const auto big = rigidity_times(BigInt("100000000000000000000"), opt);
    CHECK(big.size() <= 64 + opt.ladder_points + opt.uniform_points + 1);
    CHECK(big.back() == BigInt("100000000000000000000"));
    for (std::size_t i = 1; i < big.size(); ++i) CHECK(big[i] > big[i - 1]);
}

TEST_CASE("rigidity profile of a rotation is the rotation norm") {
    const auto cf = small_cf();
    const System sys = RotationSystem{cf};
    for (std::size_t n = 1; n < 4; ++n) {
        const BigInt q = cf->q(n);
        const auto r = rigidity_profile(sys, q, BigInt(5), 3);
        Real worst = 0;
        for (long t = 1; t <= 5; ++t) worst = std::max(worst, rotation_norm(*cf, q * t));
        CHECK(as_double(abs(r.value - worst)) < 1e-40);
        CHECK(r.exhaustive);
        CHECK(r.t_count == 5);
    }
}

TEST_CASE("grid sup of birkhoff sums at a convergent denominator") {
    const auto cf = rigid_cf();
    const auto g = build_cocycle(*cf, rigid_schedule());
    for (std::size_t n = 1; n <= 3; ++n) {
        const BigInt q = cf->q(n);
        const Real sup = birkhoff_grid_sup(*cf, g, q, 8);
        Real manual = 0;
        for (int j = 0; j < 8; ++j) {
            manual = std::max<Real>(manual, abs(birkhoff_kernel(*cf, g, q)(BigRational(BigInt(j), BigInt(8)))));
        }
        CHECK(as_double(abs(sup - manual)) <= as_double(manual) * 1e-30);
        CHECK(as_double(sup) < as_double(g.birkhoff_bound()) + 1e-30);
    }
}

TEST_CASE("results do not depend on the worker count") {
    const auto cf = rigid_cf();
    const System sys = SkewProductSystem{cf, build_cocycle(*cf, rigid_schedule()), Real(0)};
    setenv("SPARSE_ORBIT_THREADS", "1", 1);
    const auto one = rigidity_profile(sys, cf->q(1), BigInt(3000), 8);
    setenv("SPARSE_ORBIT_THREADS", "4", 1);
    const auto four = rigidity_profile(sys, cf->q(1), BigInt(3000), 8);
    unsetenv("SPARSE_ORBIT_THREADS");
    CHECK(one.value == four.value);
    CHECK(one.worst_t == four.worst_t);
}
