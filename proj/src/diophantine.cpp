#include "sparse_orbit/diophantine.hpp"

#include "sparse_orbit/arith.hpp"
#include "sparse_orbit/error.hpp"

#include <string>

namespace sparse_orbit::diophantine {

namespace {

BigInt parse_big(const nlohmann::json& v, const std::string& field) {
    if (v.is_number_integer()) return BigInt(v.get<i64>());
    if (v.is_string()) {
        const auto& s = v.get_ref<const std::string&>();
        bool ok = !s.empty();
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!(std::isdigit(static_cast<unsigned char>(s[i])) || (i == 0 && s[i] == '-'))) ok = false;
        }
        if (ok) return BigInt(s);
    }
    throw InvalidArgument("cf spec: " + field + " must be an integer or a decimal string");
}

std::vector<BigInt> parse_big_list(const nlohmann::json& v, const std::string& field) {
    if (!v.is_array()) throw InvalidArgument("cf spec: " + field + " must be an array");
    std::vector<BigInt> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(parse_big(v[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

}  // namespace

ContinuedFraction::ContinuedFraction(std::vector<BigInt> quotients) : a_(std::move(quotients)) {
    BigInt p_prev = 1, q_prev = 0;  // p_{-1}, q_{-1}
    BigInt p_prev2 = 0, q_prev2 = 1;  // p_{-2}, q_{-2}
    for (std::size_t n = 0; n < a_.size(); ++n) {
        if (n >= 1 && a_[n] < 1) {
            throw InvalidArgument("continued fraction: a_" + std::to_string(n) + " must be >= 1");
        }
        BigInt p = a_[n] * p_prev + p_prev2;
        BigInt q = a_[n] * q_prev + q_prev2;
        p_.push_back(p);
        q_.push_back(q);
        p_prev2 = p_prev;
        q_prev2 = q_prev;
        p_prev = p;
        q_prev = q;
    }
}

std::size_t ContinuedFraction::surrogate_index(const BigInt& bound) const {
    for (std::size_t M = 0; M + 1 < q_.size(); ++M) {
        if (bound < q_[M] * q_[M + 1]) return M;
    }
    throw PrecisionError("continued fraction: " + std::to_string(q_.size()) +
                         " convergents are not enough for the requested precision (need q_M q_{M+1} > a " +
                         std::to_string(decimal_digits(bound)) + "-digit bound)");
}

ContinuedFraction convergents_from_quotients(std::span<const BigInt> a, std::size_t count) {
    if (count == 0 || count > a.size()) count = a.size();
    return ContinuedFraction(std::vector<BigInt>(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(count)));
}

ContinuedFraction power_rule(unsigned exponent, std::size_t terms, std::vector<BigInt> prefix) {
    if (exponent < 2) throw InvalidArgument("power rule: exponent must be >= 2");
    if (prefix.empty()) prefix.push_back(0);
    std::vector<BigInt> a = prefix;
    a.resize(std::min(a.size(), terms));
    while (a.size() < terms) {
        ContinuedFraction partial(a);
        a.push_back(pow(partial.q(partial.size() - 1), exponent - 1));
    }
    return ContinuedFraction(std::move(a));
}

ContinuedFraction cf_from_json(const nlohmann::json& spec) {
    if (!spec.is_object()) throw InvalidArgument("cf spec: expected an object");
    if (spec.contains("quotients")) return ContinuedFraction(parse_big_list(spec["quotients"], "quotients"));
    if (!spec.contains("rule")) throw InvalidArgument("cf spec: needs \"quotients\" or \"rule\"");
    if (spec["rule"] != "power") throw InvalidArgument("cf spec: rule must be \"power\"");
    if (!spec.contains("exponent") || !spec["exponent"].is_number_unsigned()) {
        throw InvalidArgument("cf spec: exponent must be a positive integer");
    }
    if (!spec.contains("terms") || !spec["terms"].is_number_unsigned()) {
        throw InvalidArgument("cf spec: terms must be a positive integer");
    }
    std::vector<BigInt> prefix{BigInt(0)};
    if (spec.contains("prefix")) prefix = parse_big_list(spec["prefix"], "prefix");
    return power_rule(spec["exponent"].get<unsigned>(), spec["terms"].get<std::size_t>(), std::move(prefix));
}

bool is_probable_prime(const BigInt& n) {
    if (n < 2) return false;
    if (n <= BigInt(std::numeric_limits<u64>::max())) return arith::is_prime(n.convert_to<u64>());
    return mpz_probab_prime_p(n.backend().data(), 40) > 0;
}

DenominatorSequence construct_denominators(const DenominatorConstraints& c, std::size_t length, const BigInt& q1,
                                           u64 budget) {
    if (q1 < 1) throw InvalidArgument("construct_denominators: q_1 must be >= 1");
    DenominatorSequence out;
    out.denominators = {BigInt(1), q1};
    out.quotients = {BigInt(0), q1};
    auto admissible = [&](std::size_t index, const BigInt& cand) {
        if (c.one_mod > 1 && BigInt(cand % c.one_mod) != 1) return false;
        if (c.coprime_to_earlier) {
            for (const auto& q : out.denominators) {
                if (gcd(q, cand) != 1) return false;
            }
        }
        if (c.prime && !is_probable_prime(cand)) return false;
        if (c.extra && !c.extra(index, cand)) return false;
        return true;
    };
    while (out.denominators.size() < length) {
        const std::size_t n = out.denominators.size();
        const BigInt& q_prev2 = out.denominators[n - 2];
        const BigInt& q_prev = out.denominators[n - 1];
        bool found = false;
        for (u64 k = 1; k <= budget; ++k) {
            BigInt cand = q_prev2 + BigInt(k) * q_prev;
            if (admissible(n, cand)) {
                out.denominators.push_back(cand);
                out.quotients.push_back(BigInt(k));
                found = true;
                break;
            }
        }
        if (!found) {
            throw BudgetExceeded("construct_denominators: no admissible q_" + std::to_string(n) + " within " +
                                 std::to_string(budget) + " steps");
        }
    }
    out.denominators.resize(std::min(out.denominators.size(), length));
    out.quotients.resize(out.denominators.size());
    return out;
}

BigRational nearest_int_dist(const BigRational& x) {
    BigRational f = frac(x);
    BigRational g = BigRational(1) - f;
    return f < g ? f : g;
}

Real nearest_int_dist(const Real& x) {
    Real f = x - floor(x);
    Real g = 1 - f;
    return f < g ? f : g;
}

RotationPoint rotation_point(const ContinuedFraction& cf, const BigInt& i, const BigRational& eps) {
    if (eps <= 0) throw InvalidArgument("rotation_point: eps must be positive");
    if (i == 0) return {BigRational(0), 0};
    // |i| / (q_M q_{M+1}) < eps / 2  <=>  2 |i| den(eps) < num(eps) q_M q_{M+1};
    // rewritten as a bound on q_M q_{M+1} rounded up to an integer.
    BigInt absi = abs(i);
    BigInt bound = floor_div(2 * absi * denominator(eps), numerator(eps));
    std::size_t M = cf.surrogate_index(bound);
    return {frac(BigRational(i * cf.p(M), cf.q(M))), M};
}

BigRational surrogate_phase(const ContinuedFraction& cf, const BigInt& m, const BigInt& inv_tol) {
    if (m == 0) return BigRational(0);
    std::size_t M = cf.surrogate_index(abs(m) * inv_tol);
    return frac(BigRational(m * cf.p(M), cf.q(M)));
}

Real badly_approximable_proxy(const ContinuedFraction& cf) {
    if (cf.size() < 2) throw InvalidArgument("badly_approximable_proxy: need at least 2 convergents");
    BigRational best(cf.q(0), cf.q(1));
    for (std::size_t n = 1; n + 1 < cf.size(); ++n) {
        BigRational r(cf.q(n), cf.q(n + 1));
        if (r < best) best = r;
    }
    return to_real(best);
}

}  // namespace sparse_orbit::diophantine
