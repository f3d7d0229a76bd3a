#include "sparse_orbit/dynamics.hpp"

#include "sparse_orbit/error.hpp"
#include "sparse_orbit/parallel.hpp"

#include <algorithm>
#include <string>

namespace sparse_orbit::dynamics {

namespace {

// Surrogate convergents are chosen so that phase errors stay ~45 digits
// below the quantity they feed into (Real carries 50).
const BigInt& guard() {
    static const BigInt g = pow(BigInt(10), 45);
    return g;
}

const BigInt& relative_guard() {
    static const BigInt g = pow(BigInt(10), 20);
    return g;
}

Real real_of(double v) { return Real(v); }

Real abs_real(const Real& v) { return v < 0 ? Real(-v) : v; }

Real frac_real(const Real& v) { return v - floor(v); }

// frac(q * x) for an exact rational x, as a Real.
Real frac_times(const BigInt& q, const BigRational& x) {
    return frac_ratio(q * numerator(x), denominator(x));
}

void check_non_negative(const BigInt& n, const char* who) {
    if (n < 0) throw InvalidArgument(std::string(who) + ": n must be >= 0");
}

}  // namespace

// --- cocycles -------------------------------------------------------------------

FourierCocycle FourierCocycle::attach(const ContinuedFraction& cf,
                                      const std::vector<std::pair<BigInt, Real>>& terms) {
    if (cf.size() < 2) throw InvalidArgument("cocycle: the continued fraction needs at least 2 convergents");
    FourierCocycle g;
    const std::size_t L = cf.size() - 1;
    for (const auto& [freq, amp] : terms) {
        if (freq <= 0) throw InvalidArgument("cocycle: frequencies must be positive");
        CocycleTerm t{freq, amp, BigInt(0), -1};
        for (std::size_t k = 0; k + 1 < cf.size(); ++k) {
            if (cf.q(k) == freq && (k + 1 == cf.size() - 1 || cf.q(k + 1) != freq)) {
                t.index = static_cast<long>(k);
                t.inv_norm_bound = 2 * cf.q(k + 1);
                break;
            }
        }
        if (t.index < 0) {
            // ||f alpha|| >= d - f / q_L^2 where d = ||f p_L / q_L||.
            BigRational d = diophantine::nearest_int_dist(BigRational(freq * cf.p(L), cf.q(L)));
            BigRational err(freq, cf.q(L) * cf.q(L));
            if (d <= 2 * err) {
                throw PrecisionError("cocycle: ||" + freq.str() + " alpha|| cannot be bounded away from 0 with " +
                                     std::to_string(cf.size()) + " convergents");
            }
            t.inv_norm_bound = floor(BigRational(2) / d) + 1;
        }
        g.birkhoff_bound_ += abs_real(amp) * to_real(t.inv_norm_bound) / 2;
        g.terms_.push_back(std::move(t));
    }
    return g;
}

Real FourierCocycle::abs_sum() const {
    Real s = 0;
    for (const auto& t : terms_) s += abs_real(t.amplitude);
    return s;
}

CocycleSchedule CocycleSchedule::from_json(const nlohmann::json& spec, const ContinuedFraction& cf) {
    CocycleSchedule s;
    s.last = cf.size() >= 3 ? cf.size() - 3 : 0;
    if (!spec.is_object()) throw InvalidArgument("schedule: expected an object");
    auto get_index = [&](const char* key, std::size_t& out) {
        if (!spec.contains(key)) return;
        if (!spec[key].is_number_unsigned()) {
            throw InvalidArgument(std::string("schedule: ") + key + " must be a non-negative integer");
        }
        out = spec[key].get<std::size_t>();
    };
    get_index("first", s.first);
    get_index("last", s.last);
    if (spec.contains("lower_bound_indices")) {
        const auto& v = spec["lower_bound_indices"];
        if (!v.is_array()) throw InvalidArgument("schedule: lower_bound_indices must be an array");
        for (const auto& e : v) {
            if (!e.is_number_unsigned()) throw InvalidArgument("schedule: lower_bound_indices entries must be integers");
            s.lower_bound_set.insert(e.get<std::size_t>());
        }
    }
    if (spec.contains("lower_bound_from")) {
        std::size_t from = 0;
        get_index("lower_bound_from", from);
        for (std::size_t n = std::max(from, s.first); n <= s.last; ++n) s.lower_bound_set.insert(n);
    }
    return s;
}

FourierCocycle build_cocycle(const ContinuedFraction& cf, const CocycleSchedule& schedule) {
    FourierCocycle g;
    if (schedule.last < schedule.first) {
        if (!schedule.lower_bound_set.empty()) throw InvalidArgument("schedule: lower-bound indices outside the term range");
        return g;
    }
    if (schedule.first < 1) throw InvalidArgument("schedule: term indices start at 1");
    if (schedule.last + 1 >= cf.size()) {
        throw InvalidArgument("schedule: term " + std::to_string(schedule.last) + " needs q_" +
                              std::to_string(schedule.last + 1) + " but only " + std::to_string(cf.size()) +
                              " convergents are available");
    }
    for (std::size_t n : schedule.lower_bound_set) {
        if (n < schedule.first || n > schedule.last) {
            throw InvalidArgument("schedule: lower-bound index " + std::to_string(n) + " outside [" +
                                  std::to_string(schedule.first) + ", " + std::to_string(schedule.last) + "]");
        }
        // Lower and upper amplitude bounds are compatible only when
        // (q_n / q_{n+1})^{1/5} <= 1 / q_n, i.e. q_{n+1} >= q_n^6.
        if (pow(cf.q(n), 6) > cf.q(n + 1)) {
            throw InvalidArgument("schedule: q_" + std::to_string(n) + "/q_" + std::to_string(n + 1) +
                                  " is too large for the lower amplitude bound (need q_{n+1} >= q_n^6; "
                                  "alpha must satisfy liminf q_n/q_{n+1} = 0 along the chosen indices)");
        }
    }
    const Real four_fifths = Real(4) / 5;
    for (std::size_t n = schedule.first; n <= schedule.last; ++n) {
        const Real qn = to_real(cf.q(n));
        const Real qn1 = to_real(cf.q(n + 1));
        const Real upper = 1 / (qn * pow(qn1, four_fifths));
        const Real lower = 1 / (pow(qn, four_fifths) * qn1);
        Real a = schedule.lower_bound_set.count(n) ? lower : upper / static_cast<double>(n);
        if (a > upper * (1 + real_of(1e-40))) {
            throw InvalidArgument("schedule: amplitude at n = " + std::to_string(n) + " exceeds the upper bound");
        }
        CocycleTerm t{cf.q(n), a, 2 * cf.q(n + 1), static_cast<long>(n)};
        g.birkhoff_bound_ += a * to_real(t.inv_norm_bound) / 2;
        g.terms_.push_back(std::move(t));
    }
    return g;
}

CocycleValue eval_cocycle(const FourierCocycle& g, const BigRational& x, const Real& eps) {
    const auto& terms = g.terms();
    std::size_t keep = terms.size();
    Real tail = 0;
    while (keep > 0 && tail + abs_real(terms[keep - 1].amplitude) < eps) {
        tail += abs_real(terms[keep - 1].amplitude);
        --keep;
    }
    Real value = 0;
    for (std::size_t k = 0; k < keep; ++k) {
        value += terms[k].amplitude * cos(2 * pi_real() * frac_times(terms[k].frequency, x));
    }
    return {value, tail};
}

// --- Birkhoff sums ----------------------------------------------------------------

Real BirkhoffKernel::operator()(const BigRational& x) const {
    Real s = 0;
    for (std::size_t k = 0; k < amplitude.size(); ++k) {
        Real phase_k = frac_times(frequency[k], x) + phase[k];
        s += amplitude[k] * cos(2 * pi_real() * phase_k);
    }
    return s;
}

BirkhoffKernel birkhoff_kernel(const ContinuedFraction& cf, const FourierCocycle& g, const BigInt& n,
                               const Real& tail_tol) {
    check_non_negative(n, "birkhoff_kernel");
    BirkhoffKernel ker;
    if (n == 0) return ker;
    const Real n_real = to_real(n);
    for (const auto& t : g.terms()) {
        if (tail_tol > 0 && n_real * abs_real(t.amplitude) < tail_tol) continue;
        // theta = f alpha, replaced by f p_M / q_M with n f |alpha - p_M/q_M|
        // below 10^-45 ||f alpha||.
        std::size_t M = cf.surrogate_index(n * t.frequency * t.inv_norm_bound * guard());
        // sin(pi n theta) can be far smaller than ||f alpha||; move to later
        // convergents until the phase error is 10^-20 below ||n theta||.
        const BigInt nf = n * t.frequency;
        while (M + 2 < cf.size()) {
            const BigInt r = mod_floor(nf * cf.p(M), cf.q(M));
            const BigInt dist = std::min(r, BigInt(cf.q(M) - r));
            // n f / (q_M q_{M+1}) <= 10^-20 dist / q_M
            if (nf * relative_guard() <= dist * cf.q(M + 1)) break;
            ++M;
        }
        const BigInt theta_num = t.frequency * cf.p(M);
        const BigInt& den = cf.q(M);
        Real s_theta = sin_pi_ratio(theta_num, den);
        Real amp;
        if (s_theta == 0) {
            amp = n_real * t.amplitude;
        } else {
            amp = t.amplitude * sin_pi_ratio(n * theta_num, den) / s_theta;
        }
        // cos(2 pi f x + pi theta (n - 1)) = cos(2 pi (f x + theta (n - 1) / 2))
        ker.frequency.push_back(t.frequency);
        ker.amplitude.push_back(amp);
        ker.phase.push_back(frac_ratio(theta_num * (n - 1), 2 * den));
    }
    return ker;
}

Real birkhoff_sum(const ContinuedFraction& cf, const FourierCocycle& g, const BigRational& x, const BigInt& n,
                  BirkhoffMode mode, const Real& tail_tol, double budget) {
    check_non_negative(n, "birkhoff_sum");
    if (mode == BirkhoffMode::closed_form) return birkhoff_kernel(cf, g, n, tail_tol)(x);

    if (n.convert_to<double>() * static_cast<double>(g.terms().size()) > budget) {
        throw BudgetExceeded("birkhoff_sum: direct mode needs n * terms <= " + std::to_string(budget));
    }
    const u64 count = n.convert_to<u64>();
    const Real n_real = to_real(n);
    Real total = 0;
    for (const auto& t : g.terms()) {
        if (tail_tol > 0 && n_real * abs_real(t.amplitude) < tail_tol) continue;
        const std::size_t M = cf.surrogate_index(std::max(n, BigInt(1)) * t.frequency * t.inv_norm_bound * guard());
        // phase_i = frac(f x + i f p_M / q_M) over the common denominator v q_M.
        const BigInt D = denominator(x) * cf.q(M);
        BigInt acc = mod_floor(t.frequency * numerator(x) * cf.q(M), D);
        const BigInt step = mod_floor(t.frequency * cf.p(M) * denominator(x), D);
        const Real D_real = to_real(D);
        Real s = 0;
        for (u64 i = 0; i < count; ++i) {
            s += cos(2 * pi_real() * (to_real(acc) / D_real));
            acc += step;
            if (acc >= D) acc -= D;
        }
        total += t.amplitude * s;
    }
    return total;
}

// --- systems ----------------------------------------------------------------------

SpecialFlowSystem SpecialFlowSystem::make(std::shared_ptr<const ContinuedFraction> cf, FourierCocycle g,
                                          std::optional<BigRational> offset, std::optional<BigRational> time_step) {
    SpecialFlowSystem sys;
    sys.cf = std::move(cf);
    sys.g = std::move(g);
    if (offset) {
        sys.offset = *offset;
    } else {
        // 1 + sum |a_k|, rounded up on a 10^-6 grid so the offset is exact.
        Real c = (1 + sys.g.abs_sum()) * 1000000;
        sys.offset = BigRational(floor_big(c) + 1, BigInt(1000000));
    }
    if (to_real(sys.offset) <= sys.g.abs_sum()) {
        throw InvalidArgument("special flow: offset must exceed sum |a_k| so the roof stays positive");
    }
    sys.time_step = time_step ? *time_step : sys.offset;
    if (sys.time_step <= 0) throw InvalidArgument("special flow: time step must be positive");
    return sys;
}

Real SpecialFlowSystem::roof(const BigRational& x) const {
    return to_real(offset) + eval_cocycle(g, x, tail_tol).value;
}

Real alpha_real(const ContinuedFraction& cf) {
    const std::size_t M = cf.surrogate_index(guard());
    return ratio_real(cf.p(M), cf.q(M));
}

Real rotate(const ContinuedFraction& cf, const Real& x, const BigInt& n) {
    if (n == 0) return frac_real(x);
    const std::size_t M = cf.surrogate_index(abs(n) * guard());
    return frac_real(x + frac_ratio(n * cf.p(M), cf.q(M)));
}

Real rotation_norm(const ContinuedFraction& cf, const BigInt& n) {
    if (n == 0) return Real(0);
    const BigInt an = abs(n);
    std::size_t M = cf.surrogate_index(an * guard());
    BigInt dist;
    while (true) {
        const BigInt r = mod_floor(an * cf.p(M), cf.q(M));
        dist = std::min(r, BigInt(cf.q(M) - r));
        if (M + 2 >= cf.size() || an * relative_guard() <= dist * cf.q(M + 1)) break;
        ++M;
    }
    return ratio_real(dist, cf.q(M));
}

Point skew_iterate(const SkewProductSystem& sys, const Point& p, const BigInt& n) {
    check_non_negative(n, "skew_iterate");
    if (n == 0) return p;
    const BigRational x = exact_rational(p.x);
    Real s = birkhoff_kernel(*sys.cf, sys.g, n, sys.tail_tol)(x);
    return {rotate(*sys.cf, p.x, n), frac_real(p.y + s)};
}

Point special_flow_map(const SpecialFlowSystem& sys, const Point& p, const BigRational& t) {
    if (t < 0) throw InvalidArgument("special_flow_map: t must be >= 0");
    const ContinuedFraction& cf = *sys.cf;
    const BigRational x = exact_rational(p.x);
    const Real c0 = to_real(sys.offset);
    const Real min_roof = c0 - sys.g.abs_sum();
    const Real target = to_real(t) + p.y;
    const Real noise = (abs_real(target) + 1) * real_of(1e-40);
    if (noise > real_of(1e-20)) {
        throw PrecisionError("special_flow_map: t is too large to resolve the fibre coordinate");
    }
    // S_a(roof)(x) = a C_0 + S_a(g)(x), strictly increasing in a.
    auto S = [&](const BigInt& a) {
        return to_real(a) * c0 + birkhoff_kernel(cf, sys.g, a, sys.tail_tol)(x);
    };
    const Real B = sys.g.birkhoff_bound();
    BigInt lo = floor_big((target - B) / c0) - 1;
    if (lo < 0) lo = 0;
    BigInt hi = std::min(floor_big(target / min_roof), floor_big((target + B) / c0) + 1) + 1;
    if (hi <= lo) hi = lo + 1;
    // Largest a in [lo, hi) with S_a <= target; S_lo <= target and S_hi > target.
    while (hi - lo > 1) {
        BigInt mid = (lo + hi) / 2;
        if (S(mid) <= target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    BigInt a = lo;
    Real y = target - S(a);
    Real xr = rotate(cf, p.x, a);
    if (y < 0) {
        if (y < -noise) throw PrecisionError("special_flow_map: inconsistent crossing count");
        y = 0;
    }
    Real r = sys.roof(exact_rational(xr));
    if (y >= r - noise) {
        // On (or numerically at) the top boundary: the identified point is
        // (x + alpha, y - roof).
        if (y > r + noise) throw PrecisionError("special_flow_map: point above the roof after crossing search");
        y = y - r;
        if (y < 0) y = 0;
        xr = rotate(cf, xr, BigInt(1));
    }
    return {xr, y};
}

Point orbit_point(const System& sys, const Point& p, const BigInt& m) {
    return std::visit(
        [&](const auto& s) -> Point {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, IdentitySystem>) {
                return p;
            } else if constexpr (std::is_same_v<S, RotationSystem>) {
                return {rotate(*s.cf, p.x, m), p.y};
            } else if constexpr (std::is_same_v<S, SkewProductSystem>) {
                return skew_iterate(s, p, m);
            } else {
                return special_flow_map(s, p, BigRational(m) * s.time_step);
            }
        },
        sys);
}

Real circle_distance(const Real& a, const Real& b) { return diophantine::nearest_int_dist(Real(a - b)); }

Real torus_distance(const Point& a, const Point& b) {
    return std::max(circle_distance(a.x, b.x), circle_distance(a.y, b.y));
}

Real flow_distance(const SpecialFlowSystem& sys, const Point& a, const Point& b) {
    const Real alpha = alpha_real(*sys.cf);
    auto dist = [&](const Real& x2, const Real& y2) {
        return std::max(circle_distance(a.x, x2), abs_real(a.y - y2));
    };
    Real best = dist(b.x, b.y);
    // b seen from the fibre below: (x2 - alpha, y2 + roof(x2 - alpha)).
    Real below = frac_real(b.x - alpha);
    best = std::min(best, dist(below, b.y + sys.roof(exact_rational(below))));
    // b seen from the fibre above: (x2 + alpha, y2 - roof(x2)).
    Real above = frac_real(b.x + alpha);
    best = std::min(best, dist(above, b.y - sys.roof(exact_rational(b.x))));
    return best;
}

Real metric(const System& sys, const Point& a, const Point& b) {
    if (const auto* flow = std::get_if<SpecialFlowSystem>(&sys)) return flow_distance(*flow, a, b);
    return torus_distance(a, b);
}

// --- rigidity ---------------------------------------------------------------------

std::vector<BigInt> rigidity_times(const BigInt& t_max, const RigidityOptions& options) {
    std::vector<BigInt> ts;
    if (t_max < 1) return ts;
    if (t_max <= options.enumerate_limit) {
        for (u64 t = 1; t <= t_max.convert_to<u64>(); ++t) ts.emplace_back(t);
        return ts;
    }
    std::set<BigInt> picked;
    const u64 head = 64;
    for (u64 t = 1; t <= head; ++t) picked.insert(BigInt(t));
    // Geometric ladder from 64 to t_max.
    const Real log_lo = log(Real(head));
    const Real log_hi = log(to_real(t_max));
    for (std::size_t j = 1; j <= options.ladder_points; ++j) {
        Real e = log_lo + (log_hi - log_lo) * j / options.ladder_points;
        BigInt t = floor_big(exp(e));
        if (t >= 1 && t <= t_max) picked.insert(t);
    }
    for (std::size_t j = 1; j <= options.uniform_points; ++j) {
        picked.insert(t_max * j / options.uniform_points);
    }
    picked.insert(t_max);
    ts.assign(picked.begin(), picked.end());
    return ts;
}

BigInt rigidity_horizon(const BigInt& q) {
    if (q < 1) throw InvalidArgument("rigidity_horizon: q must be >= 1");
    const BigInt q4 = pow(q, 4);
    BigInt r;
    mpz_root(r.backend().data(), q4.backend().data(), 5);
    return r;
}

Real birkhoff_grid_sup(const ContinuedFraction& cf, const FourierCocycle& g, const BigInt& n, std::size_t G,
                       const Real& tail_tol) {
    if (G == 0) throw InvalidArgument("birkhoff_grid_sup: grid size must be >= 1");
    const auto ker = birkhoff_kernel(cf, g, n, tail_tol);
    auto vals = parallel_map<Real>(G, [&](std::size_t j) { return abs_real(ker(BigRational{BigInt(j), BigInt(G)})); });
    Real best = 0;
    for (const auto& v : vals) best = std::max(best, v);
    return best;
}

RigidityResult rigidity_profile(const System& sys, const BigInt& q, const BigInt& t_max, std::size_t G,
                                const RigidityOptions& options) {
    if (G == 0) throw InvalidArgument("rigidity_profile: grid size must be >= 1");
    if (q < 0) throw InvalidArgument("rigidity_profile: q must be >= 0");
    RigidityResult out;
    out.grid = G;
    out.value = 0;
    out.worst_t = 0;
    const auto ts = rigidity_times(t_max, options);
    out.t_count = ts.size();
    out.exhaustive = t_max <= options.enumerate_limit;

    auto per_t = parallel_map<Real>(ts.size(), [&](std::size_t idx) -> Real {
        const BigInt n = ts[idx] * q;
        return std::visit(
            [&](const auto& s) -> Real {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, IdentitySystem>) {
                    return Real(0);
                } else if constexpr (std::is_same_v<S, RotationSystem>) {
                    return rotation_norm(*s.cf, n);
                } else if constexpr (std::is_same_v<S, SkewProductSystem>) {
                    Real d = rotation_norm(*s.cf, n);
                    auto ker = birkhoff_kernel(*s.cf, s.g, n, s.tail_tol);
                    for (std::size_t j = 0; j < G; ++j) {
                        Real v = ker(BigRational(BigInt(j), BigInt(G)));
                        d = std::max(d, diophantine::nearest_int_dist(v));
                    }
                    return d;
                } else {
                    Real d = 0;
                    const BigRational time = BigRational(n) * s.time_step;
                    for (std::size_t i = 0; i < G; ++i) {
                        const BigRational x{BigInt(i), BigInt(G)};
                        const Real r = s.roof(x);
                        for (std::size_t j = 0; j < G; ++j) {
                            Point p{to_real(x), r * j / G};
                            d = std::max(d, flow_distance(s, p, special_flow_map(s, p, time)));
                        }
                    }
                    return d;
                }
            },
            sys);
    });
    for (std::size_t idx = 0; idx < ts.size(); ++idx) {
        if (per_t[idx] > out.value) {
            out.value = per_t[idx];
            out.worst_t = ts[idx];
        }
    }
    return out;
}

}  // namespace sparse_orbit::dynamics
