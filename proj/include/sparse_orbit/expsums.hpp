#pragma once

#include "sparse_orbit/numeric.hpp"

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace sparse_orbit::expsums {

/// Integer polynomial, constant term first; trailing zeros are trimmed so the
/// last coefficient is the leading one (the zero polynomial keeps one zero).
class IntPolynomial {
public:
    explicit IntPolynomial(std::vector<i64> coefficients);
    /// Parses forms like "n^2", "3x^3 - x + 7", "5".
    static IntPolynomial parse(const std::string& text);

    const std::vector<i64>& coefficients() const { return coeffs_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    i64 leading() const { return coeffs_.back(); }
    /// P(x) mod q, in [0, q).
    u64 eval_mod(i64 x, u64 q) const;
    std::string to_string() const;

private:
    std::vector<i64> coeffs_;
};

/// sum_{x<q} e(P(x)/q).
std::complex<double> weyl_sum(const IntPolynomial& P, u64 q);

/// A_n = q^{-n} sum_{h_1..h_n < q} |(1/q) sum_{x<q} e(D_{h_1..h_n} P(x) / q)|,
/// D_h f(x) = f(x+h) - f(x). Requires 1 <= n <= deg P - 1 and q^{n+1} <= budget.
double weyl_difference_avg(const IntPolynomial& P, u64 q, int n, double budget = 1e8);

struct VdcResult {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// lhs = |(1/N) sum a_n|, rhs = (2/H sum_{h<H} |(1/N) sum_n a_n conj(a_{n+h})|)^{1/2}
/// for a sequence of period N = seq.size().
VdcResult vdc_check(std::span<const std::complex<double>> seq, std::size_t H);

/// sum_{x<q} e((ell P(x+t) + v x)/q).
std::complex<double> gauss_G(const IntPolynomial& P, i64 ell, i64 v, i64 t, u64 q);

struct ResidueCountQuery {
    u64 q = 1;
    u64 r = 1;
    i64 a = 0;
    i64 x = 0;
    u64 M = 0;
    u64 N = 0;
    i64 t = 0;
};

/// sum over m = a (mod r), m in [x, x+M) of |{n in [t, t+N): P(n) = m (mod q)}|.
/// Requires gcd(q, r) = 1 and M*N <= budget.
u64 residue_count_lhs(const IntPolynomial& P, const ResidueCountQuery& query, double budget = 1e9);

struct ResidueCountRatio {
    u64 lhs = 0;
    double main_term = 0.0;  // M N / (q r)
    double ratio = 0.0;
};

ResidueCountRatio residue_count_ratio(const IntPolynomial& P, const ResidueCountQuery& query, double budget = 1e9);

}  // namespace sparse_orbit::expsums
