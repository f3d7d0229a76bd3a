#include "sparse_orbit/numeric.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace sparse_orbit {

BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q;
    mpz_fdiv_q(q.backend().data(), a.backend().data(), b.backend().data());
    return q;
}

BigInt mod_floor(const BigInt& a, const BigInt& m) {
    BigInt r;
    mpz_fdiv_r(r.backend().data(), a.backend().data(), m.backend().data());
    return r;
}

BigInt floor(const BigRational& r) {
    return floor_div(numerator(r), denominator(r));
}

BigRational frac(const BigRational& r) {
    const BigInt& den = denominator(r);
    return BigRational(mod_floor(numerator(r), den), den);
}

BigRational centered_frac(const BigRational& r) {
    BigRational f = frac(r);
    if (f * 2 >= 1) f -= 1;
    return f;
}

BigRational exact_rational(double v) {
    int exp = 0;
    double mant = std::frexp(v, &exp);
    // 53-bit mantissa scaled to an integer.
    auto m = static_cast<i64>(std::ldexp(mant, 53));
    exp -= 53;
    BigRational r{BigInt(m)};
    if (exp >= 0) {
        r *= BigRational(BigInt(1) << exp);
    } else {
        r /= BigRational(BigInt(1) << (-exp));
    }
    return r;
}

BigRational exact_rational(const Real& v) {
    BigRational r;
    mpfr_get_q(r.backend().data(), v.backend().data());
    return r;
}

Real to_real(const BigRational& r) {
    Real out;
    mpfr_set_q(out.backend().data(), r.backend().data(), MPFR_RNDN);
    return out;
}

Real to_real(const BigInt& v) {
    Real out;
    mpfr_set_z(out.backend().data(), v.backend().data(), MPFR_RNDN);
    return out;
}

double to_double(const BigRational& r) {
    return mpq_get_d(r.backend().data());
}

Real pi_real() {
    static const Real pi = [] {
        Real v;
        mpfr_const_pi(v.backend().data(), MPFR_RNDN);
        return v;
    }();
    return pi;
}

Real sin_pi(const BigRational& y) {
    // y mod 2 in [0, 2)
    BigRational half = y / 2;
    BigRational r = frac(half) * 2;
    bool negate = false;
    if (r >= 1) {
        r -= 1;
        negate = true;
    }
    BigRational other = BigRational(1) - r;
    if (other < r) r = other;
    Real s = sin(pi_real() * to_real(r));
    return negate ? Real(-s) : s;
}

Real cos_2pi(const BigRational& y) {
    BigRational r = frac(y);
    return cos(2 * pi_real() * to_real(r));
}

Real ratio_real(const BigInt& num, const BigInt& den) {
    return to_real(num) / to_real(den);
}

Real frac_ratio(const BigInt& num, const BigInt& den) {
    return ratio_real(mod_floor(num, den), den);
}

Real sin_pi_ratio(const BigInt& num, const BigInt& den) {
    // num/den mod 2, then fold to [0, 1/2] for relative precision near zero.
    BigInt r = mod_floor(num, 2 * den);
    bool negate = false;
    if (r >= den) {
        r -= den;
        negate = true;
    }
    BigInt other = den - r;
    if (other < r) r = other;
    Real s = sin(pi_real() * ratio_real(r, den));
    return negate ? Real(-s) : s;
}

BigInt floor_big(const Real& v) {
    BigInt out;
    mpfr_get_z(out.backend().data(), v.backend().data(), MPFR_RNDD);
    return out;
}

std::size_t decimal_digits(const BigInt& v) {
    if (v == 0) return 1;
    return mpz_sizeinbase(v.backend().data(), 10);
}

std::string format_real(const Real& v, int digits) {
    std::ostringstream os;
    os.precision(digits);
    os << std::scientific << v;
    return os.str();
}

}  // namespace sparse_orbit
