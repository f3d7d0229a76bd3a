#pragma once

// Numeric vocabulary shared by every module: exact big integers and
// rationals (GMP), extended-range reals (MPFR), and compensated summation.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <complex>
#include <cstdint>
#include <string>

namespace sparse_orbit {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

using BigInt = boost::multiprecision::mpz_int;
using BigRational = boost::multiprecision::mpq_rational;
/// 50 significant decimal digits with MPFR's exponent range, which is wide
/// enough for quantities like 1/q_n^{4/5} with q_n ~ 10^{13000}.
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<50>,
                                           boost::multiprecision::et_off>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// e(t) = exp(2 pi i t).
inline std::complex<double> unit_phase(double t) {
    return std::polar(1.0, kTwoPi * t);
}

/// Kahan-compensated accumulator; summation order is the call order.
template <typename T>
class KahanSum {
public:
    void add(const T& v) {
        T y = v - carry_;
        T t = sum_ + y;
        carry_ = (t - sum_) - y;
        sum_ = t;
    }
    const T& value() const { return sum_; }

private:
    T sum_{};
    T carry_{};
};

// --- exact rational helpers -------------------------------------------------

BigInt floor_div(const BigInt& a, const BigInt& b);
BigInt mod_floor(const BigInt& a, const BigInt& m);
BigInt floor(const BigRational& r);
/// r - floor(r), in [0, 1).
BigRational frac(const BigRational& r);
/// Representative of r mod 1 in [-1/2, 1/2).
BigRational centered_frac(const BigRational& r);
/// Exact value of a finite double as a dyadic rational.
BigRational exact_rational(double v);
/// Exact value of a finite Real (a dyadic rational).
BigRational exact_rational(const Real& v);

Real to_real(const BigRational& r);
Real to_real(const BigInt& v);
double to_double(const BigRational& r);

/// sin(pi * y), computed after reducing y mod 2 exactly so that small
/// results keep full relative precision.
Real sin_pi(const BigRational& y);
/// cos(2 pi * y) after exact reduction mod 1.
Real cos_2pi(const BigRational& y);

/// Same operations on an unnormalized fraction num/den (den > 0), avoiding
/// the gcd cost of building a BigRational from very large integers.
Real ratio_real(const BigInt& num, const BigInt& den);
Real frac_ratio(const BigInt& num, const BigInt& den);
Real sin_pi_ratio(const BigInt& num, const BigInt& den);

/// floor of a finite Real as a big integer.
BigInt floor_big(const Real& v);

Real pi_real();

/// Number of decimal digits of |v| (1 for zero).
std::size_t decimal_digits(const BigInt& v);

/// Deterministic short rendering of a Real for CSV output.
std::string format_real(const Real& v, int digits = 17);

}  // namespace sparse_orbit
