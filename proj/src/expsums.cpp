#include "sparse_orbit/expsums.hpp"

#include "sparse_orbit/arith.hpp"
#include "sparse_orbit/error.hpp"

#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sparse_orbit::expsums {

namespace {

i128 floor_div128(i128 a, i128 b) {
    i128 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

// Sum of count[r] e(r/q) with compensated accumulation in index order.
std::complex<double> phase_histogram_sum(const std::vector<u64>& count, u64 q) {
    KahanSum<double> re, im;
    for (u64 r = 0; r < q; ++r) {
        if (count[r] == 0) continue;
        auto v = unit_phase(static_cast<double>(r) / static_cast<double>(q)) * static_cast<double>(count[r]);
        re.add(v.real());
        im.add(v.imag());
    }
    return {re.value(), im.value()};
}

using ModPoly = std::vector<u64>;

u64 eval_mod_poly(const ModPoly& c, u64 x, u64 q) {
    if (q <= (u64{1} << 31)) {
        u64 r = 0;
        for (std::size_t i = c.size(); i-- > 0;) r = (r * x + c[i]) % q;
        return r;
    }
    u128 r = 0;
    for (std::size_t i = c.size(); i-- > 0;) r = (r * x + c[i]) % q;
    return static_cast<u64>(r);
}

// D_h P(x) = P(x+h) - P(x), coefficients mod q.
ModPoly difference(const ModPoly& c, u64 h, u64 q) {
    const std::size_t n = c.size();
    ModPoly out(n, 0);
    for (std::size_t i = 1; i < n; ++i) {
        // Expand c_i (x+h)^i and drop the x^i term; b runs through C(i, j).
        u64 b = 1;
        u64 hp = 1;
        for (std::size_t j = i; j-- > 0;) {
            b = b * (j + 1) / (i - j);
            hp = arith::mul_mod(hp, h, q);
            out[j] = (out[j] + arith::mul_mod(arith::mul_mod(c[i], b % q, q), hp, q)) % q;
        }
    }
    return out;
}

bool is_affine(const ModPoly& c) {
    for (std::size_t i = 2; i < c.size(); ++i) {
        if (c[i] != 0) return false;
    }
    return true;
}

struct PhaseTable {
    u64 q;
    std::vector<std::complex<double>> e;  // e(r/q)

    explicit PhaseTable(u64 q) : q(q), e(q) {
        for (u64 r = 0; r < q; ++r) e[r] = unit_phase(static_cast<double>(r) / static_cast<double>(q));
    }
};

double normalized_inner(const ModPoly& c, const PhaseTable& ph) {
    if (is_affine(c)) return c.size() < 2 || c[1] == 0 ? 1.0 : 0.0;
    KahanSum<double> re, im;
    for (u64 x = 0; x < ph.q; ++x) {
        const auto& v = ph.e[eval_mod_poly(c, x, ph.q)];
        re.add(v.real());
        im.add(v.imag());
    }
    return std::abs(std::complex<double>(re.value(), im.value())) / static_cast<double>(ph.q);
}

void accumulate_differences(const ModPoly& c, const PhaseTable& ph, int remaining, KahanSum<double>& acc) {
    if (remaining == 0) {
        acc.add(normalized_inner(c, ph));
        return;
    }
    for (u64 h = 0; h < ph.q; ++h) accumulate_differences(difference(c, h, ph.q), ph, remaining - 1, acc);
}

}  // namespace

IntPolynomial::IntPolynomial(std::vector<i64> coefficients) : coeffs_(std::move(coefficients)) {
    while (coeffs_.size() > 1 && coeffs_.back() == 0) coeffs_.pop_back();
    if (coeffs_.empty()) coeffs_.push_back(0);
}

IntPolynomial IntPolynomial::parse(const std::string& text) {
    std::string s;
    for (char ch : text) {
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    }
    if (s.empty()) throw InvalidArgument("polynomial: empty expression");
    std::vector<i64> coeffs(1, 0);
    std::size_t pos = 0;
    auto fail = [&](const std::string& why) {
        throw InvalidArgument("polynomial '" + text + "': " + why);
    };
    while (pos < s.size()) {
        i64 sign = 1;
        if (s[pos] == '+' || s[pos] == '-') {
            sign = s[pos] == '-' ? -1 : 1;
            ++pos;
        } else if (pos != 0) {
            fail("expected + or - at position " + std::to_string(pos));
        }
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        bool has_coef = pos > start;
        i64 coef = has_coef ? std::stoll(s.substr(start, pos - start)) : 1;
        if (pos < s.size() && s[pos] == '*') ++pos;
        std::size_t power = 0;
        if (pos < s.size() && (s[pos] == 'n' || s[pos] == 'x')) {
            ++pos;
            power = 1;
            if (pos < s.size() && s[pos] == '^') {
                ++pos;
                std::size_t ps = pos;
                while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
                if (pos == ps) fail("missing exponent");
                power = std::stoul(s.substr(ps, pos - ps));
            }
        } else if (!has_coef) {
            fail("expected a term at position " + std::to_string(pos));
        }
        if (power > 64) fail("degree too large");
        if (coeffs.size() <= power) coeffs.resize(power + 1, 0);
        coeffs[power] += sign * coef;
    }
    return IntPolynomial(std::move(coeffs));
}

u64 IntPolynomial::eval_mod(i64 x, u64 q) const {
    if (q == 0) throw InvalidArgument("eval_mod: q must be positive");
    const u64 xr = arith::reduce(x, q);
    u128 r = 0;
    for (std::size_t i = coeffs_.size(); i-- > 0;) r = (r * xr + arith::reduce(coeffs_[i], q)) % q;
    return static_cast<u64>(r);
}

std::string IntPolynomial::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = coeffs_.size(); i-- > 0;) {
        i64 c = coeffs_[i];
        if (c == 0 && !(i == 0 && first)) continue;
        if (!first) os << (c < 0 ? " - " : " + ");
        else if (c < 0) os << "-";
        i64 a = c < 0 ? -c : c;
        if (i == 0 || a != 1) os << a;
        if (i >= 1) os << "n";
        if (i >= 2) os << "^" << i;
        first = false;
    }
    return os.str();
}

std::complex<double> weyl_sum(const IntPolynomial& P, u64 q) {
    if (q == 0) throw InvalidArgument("weyl_sum: q must be positive");
    std::vector<u64> count(q, 0);
    for (u64 x = 0; x < q; ++x) ++count[P.eval_mod(static_cast<i64>(x), q)];
    return phase_histogram_sum(count, q);
}

double weyl_difference_avg(const IntPolynomial& P, u64 q, int n, double budget) {
    if (q == 0) throw InvalidArgument("weyl_difference_avg: q must be positive");
    if (n < 1 || n > P.degree() - 1) {
        throw InvalidArgument("weyl_difference_avg: n = " + std::to_string(n) + " outside [1, deg - 1] with deg = " +
                              std::to_string(P.degree()));
    }
    if (std::pow(static_cast<double>(q), n + 1) > budget) {
        throw BudgetExceeded("weyl_difference_avg: q^(n+1) exceeds the enumeration budget");
    }
    ModPoly c(P.coefficients().size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = arith::reduce(P.coefficients()[i], q);
    KahanSum<double> acc;
    accumulate_differences(c, PhaseTable(q), n, acc);
    return acc.value() / std::pow(static_cast<double>(q), n);
}

VdcResult vdc_check(std::span<const std::complex<double>> seq, std::size_t H) {
    const std::size_t N = seq.size();
    if (N == 0) throw InvalidArgument("vdc_check: empty sequence");
    if (H == 0) throw InvalidArgument("vdc_check: H must be >= 1");
    for (std::size_t i = 0; i < N; ++i) {
        if (std::abs(seq[i]) > 1.0 + 1e-12) {
            throw InvalidArgument("vdc_check: |a_" + std::to_string(i) + "| exceeds 1");
        }
    }
    KahanSum<double> sre, sim;
    for (const auto& a : seq) {
        sre.add(a.real());
        sim.add(a.imag());
    }
    VdcResult out;
    out.lhs = std::abs(std::complex<double>(sre.value(), sim.value())) / static_cast<double>(N);
    KahanSum<double> corr_total;
    for (std::size_t h = 0; h < H; ++h) {
        KahanSum<double> re, im;
        for (std::size_t n = 0; n < N; ++n) {
            auto v = seq[n] * std::conj(seq[(n + h) % N]);
            re.add(v.real());
            im.add(v.imag());
        }
        corr_total.add(std::abs(std::complex<double>(re.value(), im.value())) / static_cast<double>(N));
    }
    out.rhs = std::sqrt(2.0 / static_cast<double>(H) * corr_total.value());
    return out;
}

std::complex<double> gauss_G(const IntPolynomial& P, i64 ell, i64 v, i64 t, u64 q) {
    if (q == 0) throw InvalidArgument("gauss_G: q must be positive");
    const u64 l = arith::reduce(ell, q);
    const u64 vv = arith::reduce(v, q);
    std::vector<u64> count(q, 0);
    for (u64 x = 0; x < q; ++x) {
        u64 px = P.eval_mod(static_cast<i64>((static_cast<i128>(x) + t) % static_cast<i128>(q)), q);
        u64 r = (arith::mul_mod(l, px, q) + arith::mul_mod(vv, x, q)) % q;
        ++count[r];
    }
    return phase_histogram_sum(count, q);
}

u64 residue_count_lhs(const IntPolynomial& P, const ResidueCountQuery& qr, double budget) {
    if (qr.q == 0 || qr.r == 0) throw InvalidArgument("residue_count_lhs: q and r must be positive");
    if (std::gcd(qr.q, qr.r) != 1) {
        throw InvalidArgument("residue_count_lhs: gcd(q, r) = " + std::to_string(std::gcd(qr.q, qr.r)) + " != 1");
    }
    if (static_cast<double>(qr.M) * static_cast<double>(qr.N) > budget) {
        throw BudgetExceeded("residue_count_lhs: M*N exceeds the enumeration budget");
    }
    const u128 Q128 = static_cast<u128>(qr.q) * qr.r;
    if (Q128 > static_cast<u128>(INT64_MAX)) throw InvalidArgument("residue_count_lhs: q*r too large");
    const i128 Q = static_cast<i128>(Q128);
    const u64 ar = arith::reduce(qr.a, qr.r);
    const i128 lo = static_cast<i128>(qr.x);
    const i128 hi = lo + static_cast<i128>(qr.M);  // half-open
    u64 total = 0;
    for (u64 k = 0; k < qr.N; ++k) {
        const i64 n = qr.t + static_cast<i64>(k);
        const u64 pm = P.eval_mod(n, qr.q);
        arith::Congruence sys[2] = {{pm, qr.q}, {ar, qr.r}};
        const i128 c = static_cast<i128>(arith::crt(sys).residue);
        // m = c (mod Q) with lo <= m < hi
        total += static_cast<u64>(floor_div128(hi - 1 - c, Q) - floor_div128(lo - 1 - c, Q));
    }
    return total;
}

ResidueCountRatio residue_count_ratio(const IntPolynomial& P, const ResidueCountQuery& query, double budget) {
    ResidueCountRatio out;
    out.lhs = residue_count_lhs(P, query, budget);
    out.main_term = static_cast<double>(query.M) * static_cast<double>(query.N) /
                    (static_cast<double>(query.q) * static_cast<double>(query.r));
    out.ratio = out.main_term > 0 ? static_cast<double>(out.lhs) / out.main_term : 0.0;
    return out;
}

}  // namespace sparse_orbit::expsums
