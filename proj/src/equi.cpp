#include "sparse_orbit/equi.hpp"

#include "sparse_orbit/error.hpp"
#include "sparse_orbit/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace sparse_orbit::equi {

namespace {

constexpr double kBoundSlack = 1e-12;

PlanePoint to_plane(const Point& p) { return {p.x.convert_to<double>(), p.y.convert_to<double>()}; }

// integral_0^r of the hat with the given center and half width.
double hat_integral(double r, double c, double w) {
    auto F = [&](double y) {
        const double a = c - w, b = c + w;
        if (y <= a) return 0.0;
        if (y <= c) return (y - a) * (y - a) / (2 * w);
        if (y <= b) return w - (b - y) * (b - y) / (2 * w);
        return w;
    };
    return F(r) - F(0.0);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void check_budget(double work, double budget, const char* who) {
    if (work > budget) {
        throw BudgetExceeded(std::string(who) + ": " + format_double(work) + " orbit evaluations exceed the budget " +
                             format_double(budget));
    }
}

}  // namespace

std::complex<double> TestFunction::operator()(const PlanePoint& p) const {
    switch (kind) {
        case Kind::constant:
            return 1.0;
        case Kind::fourier:
            return unit_phase(k1 * p.x + k2 * p.y);
        case Kind::flow_bump: {
            double h = 1.0 - std::abs(p.y - center) / half_width;
            return h > 0 ? unit_phase(k1 * p.x) * h : std::complex<double>(0.0);
        }
    }
    return 0.0;
}

std::string TestFunction::name() const {
    switch (kind) {
        case Kind::constant:
            return "1";
        case Kind::fourier:
            return "e(" + std::to_string(k1) + "," + std::to_string(k2) + ")";
        case Kind::flow_bump:
            return "bump(" + std::to_string(k1) + "," + format_double(center) + "," + format_double(half_width) + ")";
    }
    return "";
}

TestFunction parse_test_function(const std::string& text) {
    int a = 0, b = 0, consumed = 0;
    double c = 0, w = 0;
    if (text == "1") return TestFunction::one();
    if (std::sscanf(text.c_str(), "e(%d,%d)%n", &a, &b, &consumed) == 2 && consumed == static_cast<int>(text.size())) {
        return TestFunction::fourier(a, b);
    }
    if (std::sscanf(text.c_str(), "e(%d)%n", &a, &consumed) == 1 && consumed == static_cast<int>(text.size())) {
        return TestFunction::fourier(a, 0);
    }
    if (std::sscanf(text.c_str(), "bump(%d,%lf,%lf)%n", &a, &c, &w, &consumed) == 3 &&
        consumed == static_cast<int>(text.size())) {
        if (!(w > 0)) throw InvalidArgument("test function: bump half width must be positive");
        return TestFunction::bump(a, c, w);
    }
    throw InvalidArgument("test function: cannot parse '" + text + "' (expected 1, e(k1,k2), e(k) or bump(k,c,w))");
}

std::vector<PlanePoint> sparse_orbit(const System& sys, const Point& p, unsigned C, u64 N, double budget) {
    if (C < 1) throw InvalidArgument("sparse_orbit: C must be >= 1");
    if (N < 1) throw InvalidArgument("sparse_orbit: N must be >= 1");
    check_budget(static_cast<double>(N), budget, "sparse_orbit");
    std::vector<PlanePoint> out;
    out.reserve(N);
    for (u64 i = 0; i < N; ++i) out.push_back(to_plane(dynamics::orbit_point(sys, p, pow(BigInt(i), C))));
    return out;
}

std::complex<double> sparse_average(const System& sys, const Point& p, const TestFunction& f, unsigned C, u64 N,
                                    double budget) {
    if (f.kind == TestFunction::Kind::constant) {
        if (N < 1) throw InvalidArgument("sparse_average: N must be >= 1");
        return 1.0;
    }
    auto pts = sparse_orbit(sys, p, C, N, budget);
    KahanSum<double> re, im;
    for (const auto& q : pts) {
        auto v = f(q);
        re.add(v.real());
        im.add(v.imag());
    }
    return std::complex<double>(re.value(), im.value()) / static_cast<double>(N);
}

std::complex<double> weighted_pow_average(const System& sys, const Point& p, const TestFunction& f, unsigned C,
                                          u64 n, double budget) {
    if (C < 1) throw InvalidArgument("weighted_pow_average: C must be >= 1");
    if (n < 1) throw InvalidArgument("weighted_pow_average: n must be >= 1");
    // Sum_i Pow_n(i) = n exactly.
    if (f.kind == TestFunction::Kind::constant) return 1.0;
    check_budget(static_cast<double>(n), budget, "weighted_pow_average");
    const auto profile = powres::PowProfile::build(n, C);
    KahanSum<double> re, im;
    auto add = [&](u64 i, const PlanePoint& q) {
        const u64 w = profile.counts[i];
        if (w == 0) return;
        auto v = f(q) * static_cast<double>(w);
        re.add(v.real());
        im.add(v.imag());
    };
    if (const auto* rot = std::get_if<dynamics::RotationSystem>(&sys)) {
        // x_i = frac(x0 + i p_M / q_M) stepped exactly.
        const auto& cf = *rot->cf;
        const std::size_t M = cf.surrogate_index(BigInt(n) * pow(BigInt(10), 45));
        const BigInt& den = cf.q(M);
        const BigInt step = mod_floor(cf.p(M), den);
        BigInt acc = 0;
        const Real x0 = p.x;
        const double y0 = p.y.convert_to<double>();
        for (u64 i = 0; i < n; ++i) {
            if (profile.counts[i] != 0) {
                Real x = x0 + ratio_real(acc, den);
                add(i, {(x - floor(x)).convert_to<double>(), y0});
            }
            acc += step;
            if (acc >= den) acc -= den;
        }
    } else {
        for (u64 i = 0; i < n; ++i) {
            if (profile.counts[i] != 0) add(i, to_plane(dynamics::orbit_point(sys, p, BigInt(i))));
        }
    }
    return std::complex<double>(re.value(), im.value()) / static_cast<double>(n);
}

std::complex<double> weighted_pow_rotation_via_characters(const dynamics::ContinuedFraction& cf, double x0, int k,
                                                          unsigned C, u64 n) {
    if (n < 1) throw InvalidArgument("weighted_pow_rotation_via_characters: n must be >= 1");
    const auto approx = powres::approximate_pow(n, C, n);
    const Real alpha = dynamics::alpha_real(cf);
    const double theta = (alpha - floor(alpha)).convert_to<double>();
    KahanSum<double> re, im;
    for (const auto& term : approx.combo.terms) {
        const u64 d = term.f.scale;
        const u64 len = n / d;
        // sum_{y < n/d} chi(y) e(k d y theta), with d y theta reduced mod 1 in long double.
        KahanSum<double> sre, sim;
        for (u64 y = 0; y < len; ++y) {
            auto c = term.f.chi(static_cast<i64>(y));
            if (c == 0.0) continue;
            long double ph = static_cast<long double>(k) * static_cast<long double>(d * y) * theta;
            ph -= std::floor(ph);
            auto v = c * unit_phase(static_cast<double>(ph));
            sre.add(v.real());
            sim.add(v.imag());
        }
        auto s = term.coefficient.value() * static_cast<double>(term.multiplier) *
                 std::complex<double>(sre.value(), sim.value());
        re.add(s.real());
        im.add(s.imag());
    }
    return unit_phase(k * x0) * std::complex<double>(re.value(), im.value()) / static_cast<double>(n);
}

ScaledCharAverage scaled_char_average(std::span<const double> g, const powres::ScaledCharacter& f, u64 n, u64 m,
                                      u64 L) {
    const u64 d = f.scale;
    if (n == 0 || m == 0 || L == 0 || d == 0) throw InvalidArgument("scaled_char_average: n, m, L, d must be positive");
    if (m % d != 0) throw InvalidArgument("scaled_char_average: d = " + std::to_string(d) + " does not divide m");
    if (n % d != 0 || f.chi.modulus() != n / d) {
        throw InvalidArgument("scaled_char_average: f must lie in A(n/d, d) (character modulus " +
                              std::to_string(f.chi.modulus()) + ", d = " + std::to_string(d) + ", n = " +
                              std::to_string(n) + ")");
    }
    if (m > n) throw InvalidArgument("scaled_char_average: m must be <= n");
    if (g.size() < n) throw InvalidArgument("scaled_char_average: need at least n samples of g");
    for (double v : g) {
        if (!(std::abs(v) <= 1.0)) throw InvalidArgument("scaled_char_average: g must take values in [-1, 1]");
    }
    ScaledCharAverage out;
    KahanSum<double> re, im;
    for (u64 x = 0; x < n; ++x) {
        auto v = f(static_cast<i64>(x)) * g[x];
        re.add(v.real());
        im.add(v.imag());
    }
    out.value = std::abs(std::complex<double>(re.value(), im.value())) / static_cast<double>(n);

    for (u64 t = 1; t < L; ++t) {
        for (u64 x = 0; x + t * m < g.size(); ++x) out.eps_shift = std::max(out.eps_shift, std::abs(g[x + t * m] - g[x]));
    }
    const u64 r = n / m;
    for (u64 t = 0; t < m; ++t) {
        KahanSum<double> s;
        for (u64 x = 0; x < r; ++x) s.add(g[x * m + t]);
        out.eps_progression = std::max(out.eps_progression, std::abs(s.value()) / static_cast<double>(r));
    }
    out.eps = std::max(out.eps_shift, out.eps_progression);
    out.periodic = characters::induced_from(f.chi, m / d);
    const double md = static_cast<double>(m), Ld = static_cast<double>(L), nd = static_cast<double>(n);
    out.bound = (std::sqrt(md / Ld) + 2 * md * Ld / nd + out.eps) / static_cast<double>(d) + kBoundSlack;
    return out;
}

Space space_of(const System& sys) {
    if (std::holds_alternative<dynamics::RotationSystem>(sys)) return Space::circle;
    if (std::holds_alternative<dynamics::SpecialFlowSystem>(sys)) return Space::flow;
    return Space::torus;
}

std::vector<TestFunction> dictionary(const System& sys, int K, int bumps) {
    if (K < 1) throw InvalidArgument("dictionary: K must be >= 1");
    std::vector<TestFunction> out;
    switch (space_of(sys)) {
        case Space::circle:
            for (int k = -K; k <= K; ++k) {
                if (k != 0) out.push_back(TestFunction::fourier(k, 0));
            }
            break;
        case Space::torus:
            for (int k1 = -K; k1 <= K; ++k1) {
                for (int k2 = -K; k2 <= K; ++k2) {
                    if (k1 != 0 || k2 != 0) out.push_back(TestFunction::fourier(k1, k2));
                }
            }
            break;
        case Space::flow: {
            if (bumps < 1) throw InvalidArgument("dictionary: bumps must be >= 1");
            const auto& flow = std::get<dynamics::SpecialFlowSystem>(sys);
            const double top = (to_real(flow.offset) + flow.g.abs_sum()).convert_to<double>();
            const double w = top / (bumps + 1);
            for (int k = -K; k <= K; ++k) {
                for (int j = 0; j < bumps; ++j) out.push_back(TestFunction::bump(k, (j + 1) * w, w));
            }
            break;
        }
    }
    return out;
}

std::complex<double> invariant_integral(const System& sys, const TestFunction& f, double tol) {
    if (f.kind == TestFunction::Kind::constant) return 1.0;
    if (f.kind == TestFunction::Kind::fourier) {
        if (space_of(sys) == Space::flow) throw InvalidArgument("invariant_integral: use bump functions on flows");
        return (f.k1 == 0 && f.k2 == 0) ? 1.0 : 0.0;
    }
    const auto* flow = std::get_if<dynamics::SpecialFlowSystem>(&sys);
    if (!flow) throw InvalidArgument("invariant_integral: bump functions need a special flow");
    auto midpoint = [&](std::size_t G) {
        KahanSum<double> re, im, area;
        for (std::size_t i = 0; i < G; ++i) {
            const BigRational x(BigInt(2 * i + 1), BigInt(2 * G));
            const double r = flow->roof(x).convert_to<double>();
            auto v = unit_phase(f.k1 * to_double(x)) * hat_integral(r, f.center, f.half_width);
            re.add(v.real());
            im.add(v.imag());
            area.add(r);
        }
        return std::complex<double>(re.value(), im.value()) / area.value();
    };
    std::size_t G = 200;
    std::complex<double> coarse = midpoint(G);
    std::complex<double> prev_extrap = coarse;
    for (int level = 0; level < 8; ++level) {
        G *= 2;
        std::complex<double> fine = midpoint(G);
        std::complex<double> extrap = (4.0 * fine - coarse) / 3.0;
        if (std::abs(extrap - prev_extrap) < tol && level > 0) return extrap;
        if (std::abs(fine - coarse) < tol * 1e-3) return extrap;
        prev_extrap = extrap;
        coarse = fine;
    }
    throw PrecisionError("invariant_integral: quadrature did not stabilize within tolerance");
}

double torus_discrepancy(std::span<const PlanePoint> points, int K, bool circle_only) {
    if (K < 1) throw InvalidArgument("discrepancy: K must be >= 1");
    if (points.empty()) throw InvalidArgument("discrepancy: no points");
    double best = 0.0;
    for (int k1 = -K; k1 <= K; ++k1) {
        for (int k2 = circle_only ? 0 : -K; k2 <= (circle_only ? 0 : K); ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            KahanSum<double> re, im;
            for (const auto& p : points) {
                auto v = unit_phase(k1 * p.x + k2 * p.y);
                re.add(v.real());
                im.add(v.imag());
            }
            best = std::max(best, std::abs(std::complex<double>(re.value(), im.value())) /
                                      static_cast<double>(points.size()));
        }
    }
    return best;
}

double discrepancy_report(const System& sys, std::span<const PlanePoint> points, int K) {
    const Space space = space_of(sys);
    if (space != Space::flow) return torus_discrepancy(points, K, space == Space::circle);
    if (points.empty()) throw InvalidArgument("discrepancy: no points");
    double best = 0.0;
    for (const auto& f : dictionary(sys, K)) {
        KahanSum<double> re, im;
        for (const auto& p : points) {
            auto v = f(p);
            re.add(v.real());
            im.add(v.imag());
        }
        auto avg = std::complex<double>(re.value(), im.value()) / static_cast<double>(points.size());
        best = std::max(best, std::abs(avg - invariant_integral(sys, f)));
    }
    return best;
}

std::string system_name(const System& sys) {
    switch (sys.index()) {
        case 0:
            return "identity";
        case 1:
            return "rotation";
        case 2:
            return "skew";
        default:
            return "flow";
    }
}

AverageReport equidistribution_trend(const System& sys, const Point& p, unsigned C, std::span<const u64> checkpoints,
                                     int K, double budget) {
    if (checkpoints.empty()) throw InvalidArgument("equidistribution_trend: no checkpoints");
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] < 1 || (i > 0 && checkpoints[i] <= checkpoints[i - 1])) {
            throw InvalidArgument("equidistribution_trend: checkpoints must be positive and strictly increasing");
        }
    }
    AverageReport rep;
    rep.system = system_name(sys);
    rep.start = to_plane(p);
    rep.sequence = "n^" + std::to_string(C);
    rep.functions = dictionary(sys, K);
    const auto pts = sparse_orbit(sys, p, C, checkpoints.back(), budget);

    std::vector<std::complex<double>> targets(rep.functions.size());
    for (std::size_t j = 0; j < targets.size(); ++j) targets[j] = invariant_integral(sys, rep.functions[j]);

    // Running sums per test function, sampled at each checkpoint.
    auto per_fn = parallel_map<std::vector<std::complex<double>>>(rep.functions.size(), [&](std::size_t j) {
        std::vector<std::complex<double>> avgs;
        KahanSum<double> re, im;
        std::size_t next = 0;
        for (u64 i = 0; i < pts.size(); ++i) {
            auto v = rep.functions[j](pts[i]);
            re.add(v.real());
            im.add(v.imag());
            if (i + 1 == checkpoints[next]) {
                avgs.push_back(std::complex<double>(re.value(), im.value()) / static_cast<double>(i + 1));
                ++next;
            }
        }
        return avgs;
    });
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        Checkpoint cp;
        cp.N = checkpoints[c];
        for (std::size_t j = 0; j < rep.functions.size(); ++j) {
            cp.averages.push_back(per_fn[j][c]);
            cp.discrepancy = std::max(cp.discrepancy, std::abs(per_fn[j][c] - targets[j]));
        }
        rep.checkpoints.push_back(std::move(cp));
    }
    rep.decreasing = rep.checkpoints.back().discrepancy < rep.checkpoints.front().discrepancy;
    return rep;
}

void AverageReport::write_csv(std::ostream& os, bool header) const {
    if (header) os << "# schema=1\nsystem,x0,y0,sequence,N,function,re,im,abs,discrepancy\n";
    for (const auto& cp : checkpoints) {
        for (std::size_t j = 0; j < functions.size(); ++j) {
            const auto& v = cp.averages[j];
            os << system << ',' << format_double(start.x) << ',' << format_double(start.y) << ',' << sequence << ','
               << cp.N << ",\"" << functions[j].name() << "\"," << format_double(v.real()) << ','
               << format_double(v.imag()) << ',' << format_double(std::abs(v)) << ','
               << format_double(cp.discrepancy) << '\n';
        }
    }
}

void to_json(nlohmann::json& j, const AverageReport& r) {
    j = nlohmann::json::object();
    j["system"] = r.system;
    j["start"] = {r.start.x, r.start.y};
    j["sequence"] = r.sequence;
    nlohmann::json fns = nlohmann::json::array();
    for (const auto& f : r.functions) fns.push_back(f.name());
    j["functions"] = fns;
    nlohmann::json cps = nlohmann::json::array();
    for (const auto& cp : r.checkpoints) {
        nlohmann::json avgs = nlohmann::json::array();
        for (const auto& v : cp.averages) avgs.push_back({v.real(), v.imag()});
        cps.push_back({{"N", cp.N}, {"discrepancy", cp.discrepancy}, {"averages", avgs}});
    }
    j["checkpoints"] = cps;
    j["decreasing"] = r.decreasing;
}

}  // namespace sparse_orbit::equi
