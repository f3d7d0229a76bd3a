#include "sparse_orbit/cli.hpp"

#include "sparse_orbit/arith.hpp"
#include "sparse_orbit/characters.hpp"
#include "sparse_orbit/equi.hpp"
#include "sparse_orbit/error.hpp"
#include "sparse_orbit/expsums.hpp"
#include "sparse_orbit/parallel.hpp"
#include "sparse_orbit/powres.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

namespace sparse_orbit::cli {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

u64 parse_u64(const std::string& s, const std::string& field) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        throw InvalidArgument(field + ": '" + s + "' is not a non-negative integer");
    }
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw InvalidArgument(field + ": '" + s + "' is out of range");
    }
}

// "2,3,5" or "2..300" (inclusive) or a mix.
std::vector<u64> parse_u64_list(const std::string& text, const std::string& field) {
    std::vector<u64> out;
    for (const auto& item : split_list(text)) {
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(parse_u64(item, field));
            continue;
        }
        u64 lo = parse_u64(item.substr(0, dots), field);
        u64 hi = parse_u64(item.substr(dots + 2), field);
        if (hi < lo) throw InvalidArgument(field + ": empty range '" + item + "'");
        if (hi - lo > 100'000'000) throw InvalidArgument(field + ": range '" + item + "' too long");
        for (u64 v = lo; v <= hi; ++v) out.push_back(v);
    }
    if (out.empty()) throw InvalidArgument(field + ": empty list");
    return out;
}

// Inline JSON when the text starts with '{', otherwise a file path.
json load_json_arg(const std::string& text, const std::string& field) {
    std::string body = text;
    if (trim(text).rfind('{', 0) != 0) {
        std::ifstream in(text);
        if (!in) throw InvalidArgument(field + ": cannot open '" + text + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        body = ss.str();
    }
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(field + ": invalid JSON (" + std::string(e.what()) + ")");
    }
}

void check_budget(double work, double budget, const std::string& what) {
    if (work > budget) {
        throw BudgetExceeded(what + ": estimated work " + fmt(work) + " exceeds --budget " + fmt(budget));
    }
}

std::string big_str(const BigInt& v, bool digits_only) {
    if (!digits_only) return v.str();
    return std::to_string(decimal_digits(v));
}

struct Common {
    u64 seed = 0;
    std::string out = "-";
    double budget = 1e9;
    std::string format = "csv";
};

constexpr const char* kSchema = "# schema=1\n";

// --- subcommands -----------------------------------------------------------------

struct DecomposeOpts {
    u64 N = 0;
    unsigned C = 2;
    u64 d = 1;
};

void run_decompose(const DecomposeOpts& o, const Common& common, std::ostream& os) {
    if (o.N < 1) throw InvalidArgument("--N must be >= 1");
    check_budget(static_cast<double>(o.N), common.budget, "decompose");
    auto ap = powres::approximate_pow(o.N, o.C, o.d);
    check_budget(static_cast<double>(o.N) * static_cast<double>(ap.combo.terms.size()), common.budget, "decompose");
    // Direct sum_{d' | d} Pow_N(x, d') by enumerating t.
    std::vector<u64> target(o.N, 0);
    std::vector<u64> full(o.N, 0);
    for (u64 t = 1; t <= o.N; ++t) {
        const u64 r = arith::pow_mod(t % o.N, o.C, o.N);
        ++full[r];
        if (o.d % std::gcd(t, o.N) == 0) ++target[r];
    }
    double max_err = 0.0, l1 = 0.0;
    for (u64 x = 0; x < o.N; ++x) {
        const auto h = ap.combo(static_cast<i64>(x));
        max_err = std::max(max_err, std::abs(h - static_cast<double>(target[x])));
        l1 += std::abs(h - static_cast<double>(full[x]));
    }
    json j;
    j["schema"] = 1;
    j["N"] = o.N;
    j["C"] = o.C;
    j["d"] = o.d;
    j["term_count"] = ap.combo.terms.size();
    j["expanded_size"] = ap.combo.expanded_size();
    j["size_bound"] = ap.size_bound;
    j["l1_bound"] = ap.l1_bound;
    j["l1_measured"] = l1 / static_cast<double>(o.N);
    j["max_pointwise_error"] = max_err;
    j["combo"] = ap.combo;
    os << j.dump(2) << '\n';
}

struct ResiduesOpts {
    std::string kind = "pow";
    u64 N = 0;
    unsigned C = 2;
    i64 begin = 0;
    i64 end = -1;
};

void run_residues(const ResiduesOpts& o, const Common& common, std::ostream& os) {
    if (o.N < 1) throw InvalidArgument("--N must be >= 1");
    if (o.kind == "pow") {
        check_budget(static_cast<double>(o.N), common.budget, "residues");
        const auto prof = powres::PowProfile::build(o.N, o.C);
        os << kSchema << "N,C,x,pow\n";
        for (u64 x = 0; x < o.N; ++x) os << o.N << ',' << o.C << ',' << x << ',' << prof.counts[x] << '\n';
        return;
    }
    if (o.kind != "sq") throw InvalidArgument("--kind must be pow or sq");
    const i64 end = o.end < 0 ? static_cast<i64>(o.N) : o.end;
    if (end < o.begin) throw InvalidArgument("--end must be >= --begin");
    check_budget(static_cast<double>(o.N) * static_cast<double>(end - o.begin), common.budget, "residues");
    auto counts = parallel_map<u64>(o.N, [&](std::size_t m) {
        return powres::sq_count(o.N, o.begin, end, static_cast<i64>(m));
    });
    os << kSchema << "q,begin,end,m,count\n";
    for (u64 m = 0; m < o.N; ++m) os << o.N << ',' << o.begin << ',' << end << ',' << m << ',' << counts[m] << '\n';
}

struct LemmaOpts {
    std::string P = "n^2";
    std::string q;
    u64 r = 1;
    u64 M = 0;
    u64 N = 0;
    i64 a = 0;
    i64 x = 0;
    i64 t = 0;
    u64 trials = 0;
};

void run_lemma_count(const LemmaOpts& o, const Common& common, std::ostream& os) {
    const auto P = expsums::IntPolynomial::parse(o.P);
    const auto qs = parse_u64_list(o.q, "--q");
    if (o.r < 1) throw InvalidArgument("--r must be >= 1");
    struct Cell {
        u64 trial;
        expsums::ResidueCountQuery query;
    };
    std::vector<Cell> cells;
    double work = 0;
    for (u64 q : qs) {
        if (q < 1) throw InvalidArgument("--q entries must be >= 1");
        const u64 side = static_cast<u64>(std::ceil(std::pow(static_cast<double>(q), 0.9)));
        const u64 M = o.M ? o.M : side;
        const u64 N = o.N ? o.N : side;
        const CounterRng rng(common.seed, q);
        for (u64 trial = 0; trial < std::max<u64>(o.trials, 1); ++trial) {
            expsums::ResidueCountQuery query{q, o.r, o.a, o.x, M, N, o.t};
            if (o.trials > 0) {
                query.a = static_cast<i64>(rng.below(3 * trial, o.r));
                query.x = static_cast<i64>(rng.below(3 * trial + 1, q * o.r));
                query.t = static_cast<i64>(rng.below(3 * trial + 2, q));
            }
            cells.push_back({trial, query});
            work += static_cast<double>(N);
        }
    }
    check_budget(work, common.budget, "lemma-count");
    auto results = parallel_map<expsums::ResidueCountRatio>(cells.size(), [&](std::size_t i) {
        return expsums::residue_count_ratio(P, cells[i].query, std::numeric_limits<double>::infinity());
    });
    os << kSchema << "P,q,r,trial,a,x,t,M,N,lhs,main_term,ratio\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i].query;
        os << P.to_string() << ',' << c.q << ',' << c.r << ',' << cells[i].trial << ',' << c.a << ',' << c.x << ','
           << c.t << ',' << c.M << ',' << c.N << ',' << results[i].lhs << ',' << fmt(results[i].main_term) << ','
           << fmt(results[i].ratio) << '\n';
    }
}

struct CharSumsOpts {
    std::string kind = "burgess";
    std::string m;
    u64 h_max = 20;
    std::string k = "2,3,5";
    u64 i_max = 3;
    std::string step = "1";
    std::string L = "1";
};

void run_char_sums(const CharSumsOpts& o, const Common& common, std::ostream& os) {
    const auto ms = parse_u64_list(o.m, "--m");
    if (o.kind == "burgess") {
        if (o.h_max < 1) throw InvalidArgument("--h-max must be >= 1");
        double work = 0;
        for (u64 m : ms) work += static_cast<double>(m) * static_cast<double>(m) * static_cast<double>(o.h_max);
        check_budget(work, common.budget, "char-sums");
        struct Row {
            u64 m, chi, h;
            double stat;
        };
        auto per_m = parallel_map<std::vector<Row>>(ms.size(), [&](std::size_t idx) {
            std::vector<Row> rows;
            const u64 m = ms[idx];
            const auto chars = characters::enumerate_characters(m);
            for (std::size_t c = 1; c < chars.size(); ++c) {
                for (u64 h = 1; h <= o.h_max; ++h) rows.push_back({m, c, h, characters::burgess_stat(m, chars[c], h)});
            }
            return rows;
        });
        os << kSchema << "m,chi,h,stat,bound,holds\n";
        for (const auto& rows : per_m) {
            for (const auto& r : rows) {
                const double bound = static_cast<double>(r.m * r.h);
                os << r.m << ',' << r.chi << ',' << r.h << ',' << fmt(r.stat) << ',' << fmt(bound) << ','
                   << (r.stat < bound ? 1 : 0) << '\n';
            }
        }
        return;
    }
    if (o.kind == "pairs") {
        const auto ks = parse_u64_list(o.k, "--k");
        double work = 0;
        for (u64 p : ms) work += static_cast<double>(p) * static_cast<double>(ks.size()) * 25.0 * o.i_max;
        check_budget(work, common.budget, "char-sums");
        os << kSchema << "p,k,i,eps1,eps2,count,expected,deviation,bound,holds\n";
        for (u64 p : ms) {
            if (!arith::is_prime(p)) throw InvalidArgument("--m: pair counts need primes, got " + std::to_string(p));
            const auto chars = characters::enumerate_characters(p);
            for (u64 k : ks) {
                if (k < 2 || (p - 1) % k != 0) continue;
                const characters::DirichletCharacter* chi = nullptr;
                for (const auto& c : chars) {
                    if (characters::char_order(c) == k) {
                        chi = &c;
                        break;
                    }
                }
                for (u64 i = 1; i <= o.i_max; ++i) {
                    for (u64 e1 = 0; e1 < k; ++e1) {
                        for (u64 e2 = 0; e2 < k; ++e2) {
                            const auto r1 = characters::RootOfUnity::make(static_cast<i64>(e1), k);
                            const auto r2 = characters::RootOfUnity::make(static_cast<i64>(e2), k);
                            const u64 count = characters::pair_count(p, *chi, r1, r2, i);
                            const double expected = static_cast<double>(p) / static_cast<double>(k * k);
                            const double dev = std::abs(static_cast<double>(count) - expected);
                            const double bound = std::sqrt(static_cast<double>(p)) + 1;
                            os << p << ',' << k << ',' << i << ',' << e1 << '/' << k << ',' << e2 << '/' << k << ','
                               << count << ',' << fmt(expected) << ',' << fmt(dev) << ',' << fmt(bound) << ','
                               << (dev < bound ? 1 : 0) << '\n';
                        }
                    }
                }
            }
        }
        return;
    }
    if (o.kind != "progression") throw InvalidArgument("--kind must be burgess, pairs or progression");
    const auto steps = parse_u64_list(o.step, "--step");
    const auto Ls = parse_u64_list(o.L, "--L");
    double work = 0;
    for (u64 n : ms) {
        work += static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(steps.size()) *
                std::accumulate(Ls.begin(), Ls.end(), 0.0);
    }
    check_budget(work, common.budget, "char-sums");
    os << kSchema << "n,chi,step,L,total,bound,induced,holds\n";
    for (u64 n : ms) {
        const auto chars = characters::enumerate_characters(n);
        for (std::size_t c = 0; c < chars.size(); ++c) {
            for (u64 step : steps) {
                const bool induced = characters::induced_from(chars[c], step);
                for (u64 L : Ls) {
                    const double total = characters::progression_abs_total(chars[c], step, L);
                    const double bound = static_cast<double>(n) * std::sqrt(static_cast<double>(step * L));
                    os << n << ',' << c << ',' << step << ',' << L << ',' << fmt(total) << ',' << fmt(bound) << ','
                       << (induced ? 1 : 0) << ',' << (total < bound ? 1 : 0) << '\n';
                }
            }
        }
    }
}

struct CfOpts {
    std::string quotients;
    std::string rule;
    unsigned exponent = 2;
    std::size_t terms = 0;
    std::string prefix = "0";
    bool construct = false;
    std::size_t length = 0;
    std::string q1 = "2";
    bool prime = false;
    u64 one_mod = 0;
    bool coprime = false;
    bool digits = false;
};

void run_cf(const CfOpts& o, const Common& common, std::ostream& os) {
    std::vector<BigInt> a;
    if (o.construct) {
        if (o.length < 2) throw InvalidArgument("--length must be >= 2");
        check_budget(static_cast<double>(o.length) * 1e3, common.budget, "cf");
        diophantine::DenominatorConstraints c;
        c.prime = o.prime;
        c.one_mod = o.one_mod;
        c.coprime_to_earlier = o.coprime;
        const BigInt q1(parse_u64(o.q1, "--q1"));
        const u64 per_index = static_cast<u64>(std::min(common.budget / static_cast<double>(o.length), 1e12));
        a = diophantine::construct_denominators(c, o.length, q1, per_index).quotients;
    } else if (!o.quotients.empty()) {
        for (const auto& s : split_list(o.quotients)) a.push_back(parse_decimal(s).convert_to<BigInt>());
        check_budget(static_cast<double>(a.size()), common.budget, "cf");
    } else if (o.rule == "power") {
        if (o.terms < 1) throw InvalidArgument("--terms must be >= 1");
        // Digits grow like exponent^terms.
        check_budget(std::pow(static_cast<double>(o.exponent), static_cast<double>(o.terms)), common.budget, "cf");
        std::vector<BigInt> prefix;
        for (const auto& s : split_list(o.prefix)) prefix.push_back(BigInt(s));
        a = diophantine::power_rule(o.exponent, o.terms, prefix).quotients();
    } else {
        throw InvalidArgument("cf: give --quotients, --rule power or --construct");
    }
    const diophantine::ContinuedFraction cf(a);
    os << kSchema << (o.digits ? "n,a_digits,p_digits,q_digits\n" : "n,a,p,q\n");
    for (std::size_t n = 0; n < cf.size(); ++n) {
        os << n << ',' << big_str(a[n], o.digits) << ',' << big_str(cf.p(n), o.digits) << ','
           << big_str(cf.q(n), o.digits) << '\n';
    }
}

struct RigidityOpts {
    std::string system;
    std::string index;
    std::string t_max;
    std::string grid = "8";
};

const dynamics::ContinuedFraction& cf_of(const dynamics::System& sys) {
    return std::visit(
        [](const auto& s) -> const dynamics::ContinuedFraction& {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, dynamics::IdentitySystem>) {
                throw InvalidArgument("the identity system has no rotation number");
            } else {
                return *s.cf;
            }
        },
        sys);
}

const dynamics::FourierCocycle* cocycle_of(const dynamics::System& sys) {
    if (const auto* s = std::get_if<dynamics::SkewProductSystem>(&sys)) return &s->g;
    if (const auto* s = std::get_if<dynamics::SpecialFlowSystem>(&sys)) return &s->g;
    return nullptr;
}

Real tail_tol_of(const dynamics::System& sys) {
    if (const auto* s = std::get_if<dynamics::SkewProductSystem>(&sys)) return s->tail_tol;
    if (const auto* s = std::get_if<dynamics::SpecialFlowSystem>(&sys)) return s->tail_tol;
    return Real(0);
}

void run_rigidity(const RigidityOpts& o, const Common& common, std::ostream& os) {
    const auto sys = system_from_json(load_json_arg(o.system, "--system"));
    const auto grids = parse_u64_list(o.grid, "--grid");
    if (std::holds_alternative<dynamics::IdentitySystem>(sys)) {
        if (o.index.empty() || o.t_max.empty()) throw InvalidArgument("identity system: give --index as q and --t-max");
    }
    const auto* g = cocycle_of(sys);
    std::vector<u64> indices;
    if (!o.index.empty()) {
        indices = parse_u64_list(o.index, "--index");
    } else if (g) {
        for (const auto& t : g->terms()) {
            if (t.index >= 0) indices.push_back(static_cast<u64>(t.index));
        }
    } else {
        for (std::size_t n = 1; n + 1 < cf_of(sys).size(); ++n) indices.push_back(n);
    }
    const bool flow = std::holds_alternative<dynamics::SpecialFlowSystem>(sys);
    dynamics::RigidityOptions ropts;
    double work = 0;
    struct Cell {
        u64 n;
        BigInt q, t_max;
        std::size_t G;
    };
    std::vector<Cell> cells;
    for (u64 n : indices) {
        BigInt q, t_max;
        if (std::holds_alternative<dynamics::IdentitySystem>(sys)) {
            q = BigInt(n);
            t_max = BigInt(o.t_max);
        } else {
            const auto& cf = cf_of(sys);
            if (n + 1 >= cf.size()) throw InvalidArgument("--index " + std::to_string(n) + " needs q_{n+1}");
            q = cf.q(n);
            t_max = o.t_max.empty() ? dynamics::rigidity_horizon(cf.q(n + 1)) : BigInt(o.t_max);
        }
        for (u64 G : grids) {
            if (G < 1) throw InvalidArgument("--grid entries must be >= 1");
            const double ts = static_cast<double>(dynamics::rigidity_times(t_max, ropts).size());
            work += ts * static_cast<double>(flow ? G * G * 64 : G);
            cells.push_back({n, q, t_max, static_cast<std::size_t>(G)});
        }
    }
    check_budget(work, common.budget, "rigidity");
    os << kSchema << "system,n,q_digits,t_max,G,value,worst_t,t_count,exhaustive,birkhoff_sup,birkhoff_scaled\n";
    for (const auto& c : cells) {
        const auto res = dynamics::rigidity_profile(sys, c.q, c.t_max, c.G, ropts);
        std::string sup = "", scaled = "";
        if (g) {
            const auto& cf = cf_of(sys);
            const Real s = dynamics::birkhoff_grid_sup(cf, *g, c.q, c.G, tail_tol_of(sys));
            sup = format_real(s);
            scaled = format_real(s * pow(to_real(cf.q(c.n + 1)), Real(4) / 5));
        }
        os << equi::system_name(sys) << ',' << c.n << ',' << decimal_digits(c.q) << ',' << format_real(to_real(c.t_max))
           << ',' << c.G << ',' << format_real(res.value) << ',' << format_real(to_real(res.worst_t)) << ','
           << res.t_count << ',' << (res.exhaustive ? 1 : 0) << ',' << sup << ',' << scaled << '\n';
    }
}

struct OrbitOpts {
    std::string system;
    unsigned C = 2;
    std::string checkpoints = "1000,10000,100000";
    int K = 5;
    u64 starts = 3;
    std::string x0;
    std::string y0;
    std::string dump;
};

void run_orbit(const OrbitOpts& o, const Common& common, std::ostream& os) {
    const auto sys = system_from_json(load_json_arg(o.system, "--system"));
    const auto cps = parse_u64_list(o.checkpoints, "--checkpoints");
    if (o.K < 1) throw InvalidArgument("--K must be >= 1");
    std::vector<dynamics::Point> pts;
    if (!o.x0.empty()) {
        pts.push_back({to_real(parse_decimal(o.x0)), o.y0.empty() ? Real(0) : to_real(parse_decimal(o.y0))});
    } else {
        if (o.starts < 1) throw InvalidArgument("--starts must be >= 1");
        const CounterRng rng(common.seed, 0x0b17);
        for (u64 s = 0; s < o.starts; ++s) {
            const double x = rng.uniform(2 * s);
            Real y = Real(rng.uniform(2 * s + 1));
            if (const auto* f = std::get_if<dynamics::SpecialFlowSystem>(&sys)) y *= f->roof(exact_rational(x));
            pts.push_back({Real(x), y});
        }
    }
    const double per_point = std::holds_alternative<dynamics::SpecialFlowSystem>(sys) ? 64.0 : 1.0;
    check_budget(static_cast<double>(pts.size()) * static_cast<double>(cps.back()) * per_point * (o.dump.empty() ? 1 : 2),
                 common.budget, "orbit");
    auto reports = parallel_map<equi::AverageReport>(pts.size(), [&](std::size_t i) {
        return equi::equidistribution_trend(sys, pts[i], o.C, cps, o.K, std::numeric_limits<double>::infinity());
    });
    if (!o.dump.empty()) {
        std::ofstream dump(o.dump);
        if (!dump) throw InvalidArgument("--dump: cannot write '" + o.dump + "'");
        dump << kSchema << "start,i,x,y\n";
        for (std::size_t s = 0; s < pts.size(); ++s) {
            const auto orbit = equi::sparse_orbit(sys, pts[s], o.C, cps.back(), std::numeric_limits<double>::infinity());
            for (std::size_t i = 0; i < orbit.size(); ++i) {
                dump << s << ',' << i << ',' << fmt(orbit[i].x) << ',' << fmt(orbit[i].y) << '\n';
            }
        }
    }
    if (common.format == "json") {
        json j = json::array();
        for (const auto& r : reports) j.push_back(r);
        os << json{{"schema", 1}, {"reports", j}}.dump(2) << '\n';
        return;
    }
    for (std::size_t i = 0; i < reports.size(); ++i) reports[i].write_csv(os, i == 0);
}

struct VdcOpts {
    u64 count = 1000;
    u64 length = 200;
    u64 H = 10;
    std::string kind = "mixed";
};

void run_vdc(const VdcOpts& o, const Common& common, std::ostream& os) {
    if (o.length < 1 || o.H < 1 || o.count < 1) throw InvalidArgument("--count, --length and --H must be >= 1");
    if (o.kind != "random" && o.kind != "quadratic" && o.kind != "mixed") {
        throw InvalidArgument("--kind must be random, quadratic or mixed");
    }
    check_budget(static_cast<double>(o.count) * static_cast<double>(o.length) * static_cast<double>(o.H + 1),
                 common.budget, "vdc");
    auto kind_of = [&](u64 s) -> std::string {
        if (o.kind != "mixed") return o.kind;
        return s % 2 == 0 ? "random" : "quadratic";
    };
    auto results = parallel_map<expsums::VdcResult>(o.count, [&](std::size_t s) {
        const CounterRng rng(common.seed, s);
        std::vector<std::complex<double>> seq(o.length);
        if (kind_of(s) == "random") {
            for (u64 n = 0; n < o.length; ++n) seq[n] = unit_phase(rng.uniform(n));
        } else {
            const double alpha = rng.uniform(0);
            for (u64 n = 0; n < o.length; ++n) {
                double ph = alpha * static_cast<double>((n * n) % 1'000'000'007ULL);
                seq[n] = unit_phase(ph - std::floor(ph));
            }
        }
        return expsums::vdc_check(seq, o.H);
    });
    os << kSchema << "seq,kind,N,H,lhs,rhs,holds\n";
    for (u64 s = 0; s < o.count; ++s) {
        os << s << ',' << kind_of(s) << ',' << o.length << ',' << o.H << ',' << fmt(results[s].lhs) << ','
           << fmt(results[s].rhs) << ',' << (results[s].lhs <= results[s].rhs + 1e-12 ? 1 : 0) << '\n';
    }
}

struct WeylOpts {
    std::string P = "n^2";
    std::string q;
    std::string n;
};

void run_weyl(const WeylOpts& o, const Common& common, std::ostream& os) {
    std::vector<expsums::IntPolynomial> polys;
    for (const auto& s : split_list(o.P)) polys.push_back(expsums::IntPolynomial::parse(s));
    const auto qs = parse_u64_list(o.q, "--q");
    struct Cell {
        std::size_t poly;
        u64 q;
        int n;
    };
    std::vector<Cell> cells;
    double work = 0;
    for (std::size_t pi = 0; pi < polys.size(); ++pi) {
        std::vector<u64> depths;
        if (!o.n.empty()) {
            depths = parse_u64_list(o.n, "--n");
        } else {
            for (int d = 1; d < polys[pi].degree(); ++d) depths.push_back(static_cast<u64>(d));
        }
        for (u64 q : qs) {
            if (q < 1) throw InvalidArgument("--q entries must be >= 1");
            if (depths.empty()) {
                cells.push_back({pi, q, 0});
                work += static_cast<double>(q);
            }
            for (u64 d : depths) {
                cells.push_back({pi, q, static_cast<int>(d)});
                work += std::pow(static_cast<double>(q), static_cast<double>(d + 1));
            }
        }
    }
    check_budget(work, common.budget, "weyl");
    struct Row {
        double weyl = 0, A = 0;
    };
    auto rows = parallel_map<Row>(cells.size(), [&](std::size_t i) {
        const auto& c = cells[i];
        Row r;
        r.weyl = std::abs(expsums::weyl_sum(polys[c.poly], c.q)) / static_cast<double>(c.q);
        if (c.n > 0) r.A = expsums::weyl_difference_avg(polys[c.poly], c.q, c.n, std::numeric_limits<double>::infinity());
        return r;
    });
    os << kSchema << "P,q,n,weyl_abs,A_n,bound,holds\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        os << polys[c.poly].to_string() << ',' << c.q << ',' << c.n << ',' << fmt(rows[i].weyl) << ',';
        if (c.n == 0) {
            os << ",,\n";
            continue;
        }
        const double bound = 2 * std::pow(rows[i].A, 1.0 / std::pow(2.0, c.n));
        os << fmt(rows[i].A) << ',' << fmt(bound) << ',' << (rows[i].weyl <= bound + 1e-12 ? 1 : 0) << '\n';
    }
}

// Config entries become flags placed right after the subcommand, so flags on
// the command line (parsed later, last one wins) override them.
std::vector<std::string> config_args(const json& cfg) {
    std::vector<std::string> out;
    for (const auto& [key, value] : cfg.items()) {
        if (key == "subcommand") continue;
        const std::string flag = "--" + key;
        if (value.is_boolean()) {
            if (value.get<bool>()) out.push_back(flag);
        } else if (value.is_string()) {
            out.push_back(flag);
            out.push_back(value.get<std::string>());
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& e : value) {
                if (!joined.empty()) joined += ',';
                joined += e.is_string() ? e.get<std::string>() : e.dump();
            }
            out.push_back(flag);
            out.push_back(joined);
        } else if (value.is_object()) {
            out.push_back(flag);
            out.push_back(value.dump());
        } else if (value.is_number()) {
            out.push_back(flag);
            out.push_back(value.dump());
        } else {
            throw InvalidArgument("config: unsupported value for '" + key + "'");
        }
    }
    return out;
}

}  // namespace

BigRational parse_decimal(const std::string& raw) {
    const std::string text = trim(raw);
    auto fail = [&]() -> BigRational { throw InvalidArgument("'" + raw + "' is not a decimal or fraction"); };
    if (text.empty()) return fail();
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const BigRational num = parse_decimal(text.substr(0, slash));
        const BigRational den = parse_decimal(text.substr(slash + 1));
        if (den == 0) throw InvalidArgument("'" + raw + "': zero denominator");
        return num / den;
    }
    std::size_t pos = 0;
    bool negative = false;
    if (text[pos] == '+' || text[pos] == '-') negative = text[pos++] == '-';
    std::string digits;
    long scale = 0;
    bool seen_dot = false;
    for (; pos < text.size() && text[pos] != 'e' && text[pos] != 'E'; ++pos) {
        const char ch = text[pos];
        if (ch == '.' && !seen_dot) {
            seen_dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(ch))) {
            digits += ch;
            if (seen_dot) ++scale;
        } else {
            return fail();
        }
    }
    if (digits.empty()) return fail();
    long exp10 = 0;
    if (pos < text.size()) {
        const std::string e = text.substr(pos + 1);
        if (e.empty() || e.find_first_not_of("+-0123456789") != std::string::npos) return fail();
        exp10 = std::stol(e);
        if (std::abs(exp10) > 100000) return fail();
    }
    BigRational v{BigInt(digits)};
    const long shift = exp10 - scale;
    if (shift > 0) v *= BigRational(pow(BigInt(10), static_cast<unsigned>(shift)));
    if (shift < 0) v /= BigRational(pow(BigInt(10), static_cast<unsigned>(-shift)));
    return negative ? BigRational(-v) : v;
}

dynamics::System system_from_json(const json& spec) {
    if (!spec.is_object()) throw InvalidArgument("system: expected an object");
    const std::string kind = spec.value("kind", std::string("skew"));
    if (kind == "identity") return dynamics::IdentitySystem{};
    if (!spec.contains("cf")) throw InvalidArgument("system: missing \"cf\"");
    auto cf = std::make_shared<const dynamics::ContinuedFraction>(diophantine::cf_from_json(spec["cf"]));
    if (kind == "rotation") return dynamics::RotationSystem{cf};
    if (kind != "skew" && kind != "flow") throw InvalidArgument("system: kind must be identity, rotation, skew or flow");

    auto number = [&](const char* key) -> BigRational {
        const auto& v = spec[key];
        if (v.is_string()) return parse_decimal(v.get<std::string>());
        if (v.is_number()) return parse_decimal(v.dump());
        throw InvalidArgument(std::string("system: ") + key + " must be a number or a decimal string");
    };
    dynamics::FourierCocycle g;
    if (spec.contains("terms")) {
        std::vector<std::pair<BigInt, Real>> terms;
        for (const auto& t : spec["terms"]) {
            if (!t.is_array() || t.size() != 2) throw InvalidArgument("system: terms entries are [frequency, amplitude]");
            const BigInt f = parse_decimal(t[0].is_string() ? t[0].get<std::string>() : t[0].dump()).convert_to<BigInt>();
            const Real a = to_real(parse_decimal(t[1].is_string() ? t[1].get<std::string>() : t[1].dump()));
            terms.emplace_back(f, a);
        }
        g = dynamics::FourierCocycle::attach(*cf, terms);
    } else {
        const json sched = spec.contains("schedule") ? spec["schedule"] : json::object();
        g = dynamics::build_cocycle(*cf, dynamics::CocycleSchedule::from_json(sched, *cf));
    }
    const Real tail_tol = spec.contains("tail_tol") ? to_real(number("tail_tol")) : Real(1e-30);
    if (kind == "skew") return dynamics::SkewProductSystem{cf, std::move(g), tail_tol};
    std::optional<BigRational> offset, step;
    if (spec.contains("offset")) offset = number("offset");
    if (spec.contains("time_step")) step = number("time_step");
    auto flow = dynamics::SpecialFlowSystem::make(cf, std::move(g), offset, step);
    flow.tail_tol = tail_tol;
    return flow;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sparse orbit experiments: power residues, character sums, exponential sums, rigid systems."};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.fallthrough();
    app.require_subcommand(1);

    Common common;
    std::string config_path;
    app.add_option("--seed", common.seed, "Seed for every random draw");
    app.add_option("--out", common.out, "Output file ('-' for stdout)");
    app.add_option("--budget", common.budget, "Cap on the estimated work");
    app.add_option("--format", common.format, "csv or json (orbit)")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--config", config_path, "JSON config; command-line flags override it");

    std::map<CLI::App*, std::function<void(std::ostream&)>> handlers;

    DecomposeOpts dec;
    auto* s_dec = app.add_subcommand("decompose", "Pow_N as a scaled-character combination");
    s_dec->add_option("--N", dec.N)->required();
    s_dec->add_option("--C", dec.C);
    s_dec->add_option("--d", dec.d);
    handlers[s_dec] = [&](std::ostream& os) { run_decompose(dec, common, os); };

    ResiduesOpts res;
    auto* s_res = app.add_subcommand("residues", "Pow_N or square-count tables");
    s_res->add_option("--kind", res.kind);
    s_res->add_option("--N", res.N)->required();
    s_res->add_option("--C", res.C);
    s_res->add_option("--begin", res.begin);
    s_res->add_option("--end", res.end);
    handlers[s_res] = [&](std::ostream& os) { run_residues(res, common, os); };

    LemmaOpts lem;
    auto* s_lem = app.add_subcommand("lemma-count", "Residue counts against MN/qr");
    s_lem->add_option("--P", lem.P);
    s_lem->add_option("--q", lem.q)->required();
    s_lem->add_option("--r", lem.r);
    s_lem->add_option("--M", lem.M);
    s_lem->add_option("--N", lem.N);
    s_lem->add_option("--a", lem.a);
    s_lem->add_option("--x", lem.x);
    s_lem->add_option("--t", lem.t);
    s_lem->add_option("--trials", lem.trials);
    handlers[s_lem] = [&](std::ostream& os) { run_lemma_count(lem, common, os); };

    CharSumsOpts chs;
    auto* s_chs = app.add_subcommand("char-sums", "Character sum statistics");
    s_chs->add_option("--kind", chs.kind);
    s_chs->add_option("--m", chs.m)->required();
    s_chs->add_option("--h-max", chs.h_max);
    s_chs->add_option("--k", chs.k);
    s_chs->add_option("--i-max", chs.i_max);
    s_chs->add_option("--step", chs.step);
    s_chs->add_option("--L", chs.L);
    handlers[s_chs] = [&](std::ostream& os) { run_char_sums(chs, common, os); };

    CfOpts cfo;
    auto* s_cf = app.add_subcommand("cf", "Continued-fraction convergents");
    s_cf->add_option("--quotients", cfo.quotients);
    s_cf->add_option("--rule", cfo.rule);
    s_cf->add_option("--exponent", cfo.exponent);
    s_cf->add_option("--terms", cfo.terms);
    s_cf->add_option("--prefix", cfo.prefix);
    s_cf->add_flag("--construct", cfo.construct);
    s_cf->add_option("--length", cfo.length);
    s_cf->add_option("--q1", cfo.q1);
    s_cf->add_flag("--prime", cfo.prime);
    s_cf->add_option("--one-mod", cfo.one_mod);
    s_cf->add_flag("--coprime", cfo.coprime);
    s_cf->add_flag("--digits", cfo.digits);
    handlers[s_cf] = [&](std::ostream& os) { run_cf(cfo, common, os); };

    RigidityOpts rig;
    auto* s_rig = app.add_subcommand("rigidity", "Grid rigidity profiles");
    s_rig->add_option("--system", rig.system)->required();
    s_rig->add_option("--index", rig.index);
    s_rig->add_option("--t-max", rig.t_max);
    s_rig->add_option("--grid", rig.grid);
    handlers[s_rig] = [&](std::ostream& os) { run_rigidity(rig, common, os); };

    OrbitOpts orb;
    auto* s_orb = app.add_subcommand("orbit", "Equidistribution trend of sparse orbits");
    s_orb->add_option("--system", orb.system)->required();
    s_orb->add_option("--C", orb.C);
    s_orb->add_option("--checkpoints", orb.checkpoints);
    s_orb->add_option("--K", orb.K);
    s_orb->add_option("--starts", orb.starts);
    s_orb->add_option("--x0", orb.x0);
    s_orb->add_option("--y0", orb.y0);
    s_orb->add_option("--dump", orb.dump);
    handlers[s_orb] = [&](std::ostream& os) { run_orbit(orb, common, os); };

    VdcOpts vdc;
    auto* s_vdc = app.add_subcommand("vdc", "van der Corput inequality batches");
    s_vdc->add_option("--count", vdc.count);
    s_vdc->add_option("--length", vdc.length);
    s_vdc->add_option("--H", vdc.H);
    s_vdc->add_option("--kind", vdc.kind);
    handlers[s_vdc] = [&](std::ostream& os) { run_vdc(vdc, common, os); };

    WeylOpts wey;
    auto* s_wey = app.add_subcommand("weyl", "Weyl sums and differencing averages");
    s_wey->add_option("--P", wey.P);
    s_wey->add_option("--q", wey.q)->required();
    s_wey->add_option("--n", wey.n);
    handlers[s_wey] = [&](std::ostream& os) { run_weyl(wey, common, os); };

    try {
        // Splice config entries in after the subcommand name.
        std::vector<std::string> args;
        std::optional<json> cfg;
        for (std::size_t i = 0; i < raw_args.size(); ++i) {
            const auto& a = raw_args[i];
            if (a == "--config" && i + 1 < raw_args.size()) {
                cfg = load_json_arg(raw_args[++i], "--config");
            } else if (a.rfind("--config=", 0) == 0) {
                cfg = load_json_arg(a.substr(9), "--config");
            } else {
                args.push_back(a);
            }
        }
        if (cfg) {
            if (!cfg->is_object()) throw InvalidArgument("--config: expected a JSON object");
            auto extra = config_args(*cfg);
            auto is_sub = [&](const std::string& s) {
                for (auto* sub : app.get_subcommands({})) {
                    if (sub->get_name() == s) return true;
                }
                return false;
            };
            auto it = std::find_if(args.begin(), args.end(), is_sub);
            if (it == args.end()) {
                if (!cfg->contains("subcommand")) throw InvalidArgument("--config: no subcommand given");
                args.insert(args.begin(), (*cfg)["subcommand"].get<std::string>());
                it = args.begin();
            }
            args.insert(it + 1, extra.begin(), extra.end());
        }
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try {
            app.parse(reversed);
        } catch (const CLI::CallForHelp&) {
            out << app.help();
            return exit_ok;
        } catch (const CLI::CallForAllHelp&) {
            out << app.help("", CLI::AppFormatMode::All);
            return exit_ok;
        } catch (const CLI::ParseError& e) {
            err << "error: " << e.what() << '\n';
            return exit_invalid;
        }

        std::ostringstream body;
        for (auto& [sub, handler] : handlers) {
            if (sub->parsed()) handler(body);
        }
        if (common.out == "-") {
            out << body.str();
        } else {
            std::ofstream file(common.out, std::ios::binary);
            if (!file) {
                err << "error: cannot write '" << common.out << "'\n";
                return exit_failure;
            }
            file << body.str();
        }
        return exit_ok;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return exit_invalid;
    } catch (const BudgetExceeded& e) {
        err << "budget exceeded: " << e.what() << '\n';
        return exit_budget;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
}

}  // namespace sparse_orbit::cli
