#include "sparse_orbit/characters.hpp"

#include "sparse_orbit/arith.hpp"
#include "sparse_orbit/error.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <string>

namespace sparse_orbit::characters {

// Discrete-log table of one prime-power component. For odd p the table maps a
// unit to its log base the primitive root. For 2^e (e >= 3) it maps units
// congruent to 1 mod 4 to their log base 5.
struct LogTable {
    u64 prime_power = 1;
    std::vector<std::uint32_t> log;
};

namespace {

constexpr u64 kMaxLogTable = u64{1} << 26;

std::mutex g_cache_mutex;
std::map<u64, std::shared_ptr<const LogTable>> g_log_tables;
std::map<u64, std::shared_ptr<const UnitGroup>> g_groups;

u64 least_primitive_root(u64 p, u64 pe) {
    if (p == 2) return pe == 2 ? 3 : 1;
    auto phi_p = arith::factorize(p - 1);
    for (u64 g = 2;; ++g) {
        bool ok = true;
        for (const auto& q : phi_p.factors()) {
            if (arith::pow_mod(g, (p - 1) / q.prime, p) == 1) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        // A primitive root mod p lifts to p^e unless g^(p-1) = 1 mod p^2.
        if (pe > p && arith::pow_mod(g, p - 1, p * p) == 1) continue;
        return g;
    }
}

std::shared_ptr<const LogTable> log_table(u64 generator, u64 pe, u64 order) {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto it = g_log_tables.find(pe);
    if (it != g_log_tables.end()) return it->second;
    if (pe > kMaxLogTable) {
        throw BudgetExceeded("characters: prime power " + std::to_string(pe) +
                             " exceeds the discrete-log table budget");
    }
    auto table = std::make_shared<LogTable>();
    table->prime_power = pe;
    table->log.assign(pe, 0);
    u64 v = 1;
    for (u64 j = 0; j < order; ++j) {
        table->log[v] = static_cast<std::uint32_t>(j);
        v = arith::mul_mod(v, generator, pe);
    }
    g_log_tables.emplace(pe, table);
    return table;
}

u64 lcm(u64 a, u64 b) { return a / std::gcd(a, b) * b; }

}  // namespace

// --- RootOfUnity --------------------------------------------------------------

RootOfUnity RootOfUnity::make(i64 num, u64 den) {
    if (den == 0) throw InvalidArgument("RootOfUnity: zero denominator");
    u64 r = arith::reduce(num, den);
    u64 g = std::gcd(r, den);
    if (r == 0) return {0, 1};
    return {r / g, den / g};
}

RootOfUnity RootOfUnity::operator*(const RootOfUnity& o) const {
    u64 d = lcm(den, o.den);
    u64 n = (arith::mul_mod(num, d / den, d) + arith::mul_mod(o.num, d / o.den, d)) % d;
    return make(static_cast<i64>(n), d);
}

RootOfUnity RootOfUnity::conj() const { return num == 0 ? *this : RootOfUnity{den - num, den}; }

RootOfUnity RootOfUnity::pow(u64 k) const {
    return make(static_cast<i64>(arith::mul_mod(num, k % den, den)), den);
}

std::complex<double> RootOfUnity::value() const {
    if (num == 0) return {1.0, 0.0};
    if (2 * num == den) return {-1.0, 0.0};
    if (4 * num == den) return {0.0, 1.0};
    if (4 * num == 3 * den) return {0.0, -1.0};
    return unit_phase(static_cast<double>(num) / static_cast<double>(den));
}

// --- UnitGroup ----------------------------------------------------------------

std::shared_ptr<const UnitGroup> UnitGroup::of(u64 m) {
    {
        std::lock_guard<std::mutex> lock(g_cache_mutex);
        auto it = g_groups.find(m);
        if (it != g_groups.end()) return it->second;
    }
    auto group = std::make_shared<const UnitGroup>(m);
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    if (g_groups.size() > 4096) g_groups.clear();
    return g_groups.emplace(m, group).first->second;
}

UnitGroup::UnitGroup(u64 m) : modulus_(m) {
    if (m == 0) throw InvalidArgument("characters: modulus must be positive");
    const auto fact = arith::factorize(m);
    for (const auto& pp : fact.factors()) {
        u64 pe = pp.value();
        u64 p = pp.prime;
        if (p == 2) {
            if (pp.exponent == 1) continue;
            factors_.push_back({2, pp.exponent, pe, 2, pe - 1});
            if (pp.exponent >= 3) factors_.push_back({2, pp.exponent, pe, pe / 4, 5});
        } else {
            factors_.push_back({p, pp.exponent, pe, pe / p * (p - 1), least_primitive_root(p, pe)});
        }
    }
    for (const auto& f : factors_) {
        exponent_ = lcm(exponent_, f.order);
        tables_.push_back(f.prime == 2 && f.generator != 5 ? nullptr : log_table(f.generator, f.prime_power, f.order));
    }
}

u64 UnitGroup::size() const {
    u64 s = 1;
    for (const auto& f : factors_) s *= f.order;
    return s;
}

bool UnitGroup::log(u64 a, std::vector<u64>& out) const {
    a %= modulus_;
    if (std::gcd(a, modulus_) != 1) return false;
    out.resize(factors_.size());
    for (std::size_t j = 0; j < factors_.size(); ++j) {
        const auto& f = factors_[j];
        u64 r = a % f.prime_power;
        if (f.prime != 2) {
            out[j] = tables_[j]->log[r];
            continue;
        }
        // 2-component: the first factor records the sign, the optional
        // second one the log base 5 of the sign-corrected unit.
        bool negative = r % 4 == 3;
        out[j] = negative ? 1 : 0;
        if (f.exponent >= 3) {
            u64 unit = negative ? f.prime_power - r : r;
            ++j;
            out[j] = tables_[j]->log[unit];
        }
    }
    return true;
}

// --- DirichletCharacter -------------------------------------------------------

DirichletCharacter::DirichletCharacter() : group_(UnitGroup::of(1)) {}

DirichletCharacter::DirichletCharacter(std::shared_ptr<const UnitGroup> group, std::vector<u64> exponents)
    : group_(std::move(group)), exponents_(std::move(exponents)) {
    const auto& fs = group_->factors();
    if (exponents_.size() != fs.size()) {
        throw InvalidArgument("characters: expected " + std::to_string(fs.size()) +
                              " component exponents for modulus " + std::to_string(group_->modulus()));
    }
    for (std::size_t j = 0; j < fs.size(); ++j) exponents_[j] %= fs[j].order;
}

DirichletCharacter DirichletCharacter::principal(u64 m) {
    auto g = UnitGroup::of(m);
    std::vector<u64> zeros(g->factors().size(), 0);
    return DirichletCharacter(std::move(g), std::move(zeros));
}

std::optional<RootOfUnity> DirichletCharacter::root(i64 a) const {
    const u64 m = modulus();
    thread_local std::vector<u64> logs;
    if (!group_->log(arith::reduce(a, m), logs)) return std::nullopt;
    const u64 L = group_->exponent();
    const auto& fs = group_->factors();
    u64 r = 0;
    for (std::size_t j = 0; j < fs.size(); ++j) {
        u64 term = arith::mul_mod(exponents_[j] * (L / fs[j].order) % L, logs[j], L);
        r = (r + term) % L;
    }
    return RootOfUnity::make(static_cast<i64>(r), L);
}

std::complex<double> DirichletCharacter::operator()(i64 a) const {
    auto r = root(a);
    return r ? r->value() : std::complex<double>{};
}

std::vector<i64> DirichletCharacter::exponent_table() const {
    const u64 m = modulus();
    const u64 L = group_->exponent();
    const auto& fs = group_->factors();
    std::vector<i64> table(m, -1);
    std::vector<u64> logs;
    for (u64 a = 0; a < m; ++a) {
        if (!group_->log(a, logs)) continue;
        u64 r = 0;
        for (std::size_t j = 0; j < fs.size(); ++j) {
            r = (r + arith::mul_mod(exponents_[j] * (L / fs[j].order) % L, logs[j], L)) % L;
        }
        table[a] = static_cast<i64>(r);
    }
    return table;
}

std::vector<std::complex<double>> DirichletCharacter::value_table() const {
    const u64 L = group_->exponent();
    auto exps = exponent_table();
    std::vector<std::complex<double>> roots(L);
    for (u64 r = 0; r < L; ++r) roots[r] = RootOfUnity::make(static_cast<i64>(r), L).value();
    std::vector<std::complex<double>> out(exps.size());
    for (std::size_t a = 0; a < exps.size(); ++a) {
        if (exps[a] >= 0) out[a] = roots[static_cast<std::size_t>(exps[a])];
    }
    return out;
}

bool DirichletCharacter::is_principal() const {
    for (u64 k : exponents_) {
        if (k != 0) return false;
    }
    return true;
}

DirichletCharacter DirichletCharacter::conj() const {
    std::vector<u64> e(exponents_.size());
    const auto& fs = group_->factors();
    for (std::size_t j = 0; j < e.size(); ++j) e[j] = (fs[j].order - exponents_[j]) % fs[j].order;
    return DirichletCharacter(group_, std::move(e));
}

DirichletCharacter DirichletCharacter::pow(u64 k) const {
    std::vector<u64> e(exponents_.size());
    const auto& fs = group_->factors();
    for (std::size_t j = 0; j < e.size(); ++j) e[j] = arith::mul_mod(exponents_[j], k, fs[j].order);
    return DirichletCharacter(group_, std::move(e));
}

DirichletCharacter DirichletCharacter::operator*(const DirichletCharacter& o) const {
    if (o.modulus() != modulus()) throw InvalidArgument("characters: product of characters with different moduli");
    std::vector<u64> e(exponents_.size());
    const auto& fs = group_->factors();
    for (std::size_t j = 0; j < e.size(); ++j) e[j] = (exponents_[j] + o.exponents_[j]) % fs[j].order;
    return DirichletCharacter(group_, std::move(e));
}

DirichletCharacter combine_coprime(const DirichletCharacter& a, const DirichletCharacter& b) {
    if (std::gcd(a.modulus(), b.modulus()) != 1) {
        throw InvalidArgument("characters: moduli " + std::to_string(a.modulus()) + " and " +
                              std::to_string(b.modulus()) + " are not coprime");
    }
    auto group = UnitGroup::of(a.modulus() * b.modulus());
    std::vector<u64> e;
    e.reserve(group->factors().size());
    for (const auto& f : group->factors()) {
        const DirichletCharacter& src = a.modulus() % f.prime_power == 0 ? a : b;
        const auto& sf = src.group().factors();
        for (std::size_t j = 0; j < sf.size(); ++j) {
            if (sf[j].prime_power == f.prime_power && sf[j].generator == f.generator) {
                e.push_back(src.component_exponents()[j]);
                break;
            }
        }
    }
    return DirichletCharacter(std::move(group), std::move(e));
}

std::vector<DirichletCharacter> enumerate_characters(u64 m) {
    auto group = UnitGroup::of(m);
    const auto& fs = group->factors();
    std::vector<DirichletCharacter> out;
    out.reserve(group->size());
    std::vector<u64> e(fs.size(), 0);
    while (true) {
        out.emplace_back(group, e);
        std::size_t j = 0;
        while (j < fs.size() && ++e[j] == fs[j].order) e[j++] = 0;
        if (j == fs.size()) break;
    }
    return out;
}

u64 char_order(const DirichletCharacter& chi) {
    u64 order = 1;
    const auto& fs = chi.group().factors();
    for (std::size_t j = 0; j < fs.size(); ++j) {
        u64 k = chi.component_exponents()[j];
        order = lcm(order, fs[j].order / std::gcd(k, fs[j].order));
    }
    return order;
}

int indicator_via_orthogonality(std::span<const DirichletCharacter> chars, u64 t, i64 x) {
    if (chars.empty()) throw InvalidArgument("indicator_via_orthogonality: empty character list");
    const u64 m = chars.front().modulus();
    if (std::gcd(t % m, m) != 1) {
        throw InvalidArgument("indicator_via_orthogonality: t = " + std::to_string(t) +
                              " is not coprime to " + std::to_string(m));
    }
    KahanSum<double> re, im;
    for (const auto& chi : chars) {
        auto rx = chi.root(x);
        if (!rx) continue;
        auto v = (*rx * chi.root(static_cast<i64>(t))->conj()).value();
        re.add(v.real());
        im.add(v.imag());
    }
    double avg = re.value() / static_cast<double>(chars.size());
    return static_cast<int>(std::lround(avg));
}

int indicator_via_orthogonality(u64 m, u64 t, i64 x) {
    auto chars = enumerate_characters(m);
    return indicator_via_orthogonality(chars, t, x);
}

std::complex<double> progression_sum(const DirichletCharacter& chi, i64 x, i64 step, u64 length) {
    if (length == 0) throw InvalidArgument("progression_sum: length must be >= 1");
    const u64 m = chi.modulus();
    const u64 L = chi.group().exponent();
    // Histogram of exponents, then one conversion per root.
    std::vector<u64> hist(L, 0);
    u64 a = arith::reduce(x, m);
    const u64 s = arith::reduce(step, m);
    for (u64 i = 0; i < length; ++i) {
        if (auto r = chi.root(static_cast<i64>(a))) ++hist[r->num * (L / r->den)];
        a = (a + s) % m;
    }
    KahanSum<double> re, im;
    for (u64 r = 0; r < L; ++r) {
        if (hist[r] == 0) continue;
        auto v = RootOfUnity::make(static_cast<i64>(r), L).value() * static_cast<double>(hist[r]);
        re.add(v.real());
        im.add(v.imag());
    }
    return {re.value(), im.value()};
}

double progression_abs_total(const DirichletCharacter& chi, u64 step, u64 length) {
    if (length == 0) throw InvalidArgument("progression_abs_total: length must be >= 1");
    const u64 n = chi.modulus();
    auto values = chi.value_table();
    const u64 s = step % n;
    KahanSum<double> total;
    for (u64 x = 0; x < n; ++x) {
        std::complex<double> acc{};
        u64 a = x;
        for (u64 i = 0; i < length; ++i) {
            acc += values[a];
            a += s;
            if (a >= n) a -= n;
        }
        total.add(std::abs(acc));
    }
    return total.value();
}

bool is_periodic(const DirichletCharacter& chi, u64 step) {
    const u64 n = chi.modulus();
    auto exps = chi.exponent_table();
    const u64 s = step % n;
    for (u64 x = 0; x < n; ++x) {
        if (exps[x] != exps[(x + s) % n]) return false;
    }
    return true;
}

bool induced_from(const DirichletCharacter& chi, u64 d) {
    const u64 n = chi.modulus();
    const u64 g = std::gcd(d, n);
    const auto exps = chi.exponent_table();
    for (u64 x = 1 % g; x < n; x += g) {
        if (exps[x] > 0) return false;
    }
    return true;
}

double burgess_stat(u64 m, const DirichletCharacter& chi, u64 h) {
    if (chi.modulus() != m) throw InvalidArgument("burgess_stat: character modulus differs from m");
    if (chi.is_principal()) throw InvalidArgument("burgess_stat: character must be nonprincipal");
    if (h == 0) throw InvalidArgument("burgess_stat: h must be >= 1");
    auto values = chi.value_table();
    // Window sums via prefix sums over the periodic extension.
    std::vector<std::complex<double>> prefix(m + h + 1);
    for (u64 i = 0; i < m + h; ++i) prefix[i + 1] = prefix[i] + values[i % m];
    KahanSum<double> total;
    for (u64 x = 0; x < m; ++x) {
        // The window may wrap more than once when h > m.
        std::complex<double> w{};
        u64 remaining = h;
        u64 start = x;
        while (remaining > 0) {
            u64 take = std::min<u64>(remaining, m);
            w += prefix[start + take] - prefix[start];
            remaining -= take;
            start = (start + take) % m;
        }
        total.add(std::norm(w));
    }
    return total.value();
}

u64 pair_count(u64 p, const DirichletCharacter& chi, const RootOfUnity& eps1, const RootOfUnity& eps2, u64 i) {
    if (!arith::is_prime(p)) throw InvalidArgument("pair_count: " + std::to_string(p) + " is not prime");
    if (chi.modulus() != p) throw InvalidArgument("pair_count: character modulus differs from p");
    const u64 k = char_order(chi);
    if (k < 2) throw InvalidArgument("pair_count: character must be nontrivial");
    if (!eps1.pow(k).is_one() || !eps2.pow(k).is_one()) {
        throw InvalidArgument("pair_count: eps1, eps2 must be k-th roots of unity");
    }
    if (i % p == 0) throw InvalidArgument("pair_count: i must be nonzero mod p");
    auto exps = chi.exponent_table();
    const u64 L = chi.group().exponent();
    auto matches = [&](u64 a, const RootOfUnity& e) {
        return exps[a] >= 0 && static_cast<u64>(exps[a]) == e.num * (L / e.den);
    };
    u64 count = 0;
    for (u64 x = 0; x < p; ++x) {
        if (matches(x, eps1) && matches((x + i) % p, eps2)) ++count;
    }
    return count;
}

}  // namespace sparse_orbit::characters
