#pragma once

#include "sparse_orbit/numeric.hpp"

#include "json.hpp"

#include <functional>
#include <span>
#include <vector>

namespace sparse_orbit::diophantine {

/// Partial quotients [a_0; a_1, a_2, ...] of an irrational together with the
/// convergents p_n/q_n. Only the finite prefix is known; every consumer that
/// needs alpha itself goes through a convergent surrogate with a stated error.
class ContinuedFraction {
public:
    ContinuedFraction() = default;
    explicit ContinuedFraction(std::vector<BigInt> quotients);

    const std::vector<BigInt>& quotients() const { return a_; }
    std::size_t size() const { return q_.size(); }
    const BigInt& p(std::size_t n) const { return p_.at(n); }
    const BigInt& q(std::size_t n) const { return q_.at(n); }
    const std::vector<BigInt>& denominators() const { return q_; }

    /// Least M with bound < q_M q_{M+1}; PrecisionError when the available
    /// convergents are insufficient.
    std::size_t surrogate_index(const BigInt& bound) const;

private:
    std::vector<BigInt> a_;
    std::vector<BigInt> p_;
    std::vector<BigInt> q_;
};

/// Convergents of the first `count` quotients (all of them when count is 0).
ContinuedFraction convergents_from_quotients(std::span<const BigInt> a, std::size_t count = 0);

/// Quotients a_{n+1} = q_n^{exponent-1} after the prefix, so q_{n+1} ~ q_n^exponent.
ContinuedFraction power_rule(unsigned exponent, std::size_t terms, std::vector<BigInt> prefix = {BigInt(0)});

/// {"quotients": [...]} or {"rule": "power", "exponent": e, "terms": n, "prefix": [...]}.
/// Quotients may be JSON integers or decimal strings.
ContinuedFraction cf_from_json(const nlohmann::json& spec);

struct DenominatorConstraints {
    bool prime = false;
    /// When > 1, every constructed denominator must be 1 mod this value.
    u64 one_mod = 0;
    bool coprime_to_earlier = false;
    /// Optional extra predicate on (index, candidate).
    std::function<bool(std::size_t, const BigInt&)> extra;
};

struct DenominatorSequence {
    std::vector<BigInt> denominators;  // q_0 = 1, q_1, ...
    std::vector<BigInt> quotients;     // a_0 = 0, a_1 = q_1, a_{n+2} = chosen k
};

/// q_{n+2} = q_n + k q_{n+1} with the least k >= 1 meeting the constraints.
/// Starts from q_0 = 1 and the given q_1; budget is the number of k tried per
/// index before BudgetExceeded is raised naming that index.
DenominatorSequence construct_denominators(const DenominatorConstraints& constraints, std::size_t length,
                                           const BigInt& q1 = BigInt(2), u64 budget = 1'000'000);

bool is_probable_prime(const BigInt& n);

/// Distance to the nearest integer.
BigRational nearest_int_dist(const BigRational& x);
Real nearest_int_dist(const Real& x);

struct RotationPoint {
    BigRational value;        // {i p_M / q_M}
    std::size_t convergent = 0;
};

/// {i alpha} within eps, using the least M with |i| / (q_M q_{M+1}) < eps / 2.
RotationPoint rotation_point(const ContinuedFraction& cf, const BigInt& i, const BigRational& eps);

/// frac(m * p_M / q_M) with the least M such that |m| * inv_tol < q_M q_{M+1}:
/// the error against frac(m alpha) is below 1 / inv_tol.
BigRational surrogate_phase(const ContinuedFraction& cf, const BigInt& m, const BigInt& inv_tol);

/// min_n q_n / q_{n+1} over the available convergents.
Real badly_approximable_proxy(const ContinuedFraction& cf);

}  // namespace sparse_orbit::diophantine
