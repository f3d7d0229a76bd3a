#pragma once

#include "sparse_orbit/dynamics.hpp"
#include "sparse_orbit/powres.hpp"

#include "json.hpp"

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace sparse_orbit::equi {

using dynamics::Point;
using dynamics::System;

/// Orbit points in double precision, enough for test-function evaluation.
struct PlanePoint {
    double x = 0.0;
    double y = 0.0;
};

/// Members of the test dictionary: the constant 1, characters e(k1 x + k2 y)
/// on the torus, and e(k x) times a hat bump in y for special flows.
struct TestFunction {
    enum class Kind { constant, fourier, flow_bump };
    Kind kind = Kind::constant;
    int k1 = 0;
    int k2 = 0;
    double center = 0.0;
    double half_width = 1.0;

    static TestFunction one() { return {}; }
    static TestFunction fourier(int k1, int k2) { return {Kind::fourier, k1, k2, 0.0, 1.0}; }
    static TestFunction bump(int k, double center, double half_width) {
        return {Kind::flow_bump, k, 0, center, half_width};
    }

    std::complex<double> operator()(const PlanePoint& p) const;
    std::string name() const;
};

/// "1", "e(k1,k2)", "e(k)" or "bump(k,center,half_width)".
TestFunction parse_test_function(const std::string& text);

/// T^{i^C} p for i < N, generated sequentially from closed-form iterates.
std::vector<PlanePoint> sparse_orbit(const System& sys, const Point& p, unsigned C, u64 N, double budget = 1e7);

/// (1/N) sum_{i<N} f(T^{i^C} p).
std::complex<double> sparse_average(const System& sys, const Point& p, const TestFunction& f, unsigned C, u64 N,
                                    double budget = 1e7);

/// (1/n) sum_{i<n} Pow_n(i) f(T^i p), Pow_n counting C-th roots.
std::complex<double> weighted_pow_average(const System& sys, const Point& p, const TestFunction& f, unsigned C,
                                          u64 n, double budget = 1e7);

/// The same average for a rotation and f = e(k x), computed through the
/// scaled-character expansion of Pow_n: each term contributes
/// coefficient * multiplier * sum_{y < n/d} chi(y) e(k d y alpha).
std::complex<double> weighted_pow_rotation_via_characters(const dynamics::ContinuedFraction& cf, double x0, int k,
                                                          unsigned C, u64 n);

struct ScaledCharAverage {
    double value = 0.0;
    double bound = 0.0;
    /// max_{t<L} sup_x |g(x + t m) - g(x)| over the available samples.
    double eps_shift = 0.0;
    /// max_t (1/r) |sum_{x<r} g(x m + t)|, r = floor(n / m).
    double eps_progression = 0.0;
    double eps = 0.0;
    /// chi is induced from modulus gcd(m / d, n) (the case without cancellation).
    bool periodic = false;
};

/// value = (1/n) |sum_{x<n} g(x) f(x)| for f in A(n/d, d), bound =
/// (1/d)(sqrt(m/L) + 2mL/n + eps) with eps measured from g. Requires d | m,
/// d | n, chi of modulus n/d, g values in [-1, 1] and |g| >= n.
ScaledCharAverage scaled_char_average(std::span<const double> g, const powres::ScaledCharacter& f, u64 n, u64 m,
                                      u64 L);

enum class Space { circle, torus, flow };

Space space_of(const System& sys);

/// Test dictionary for a space: nonconstant characters with max |k_i| <= K
/// (k2 = 0 on the circle); for flows e(k x) hat_j(y) with |k| <= K, J bumps.
std::vector<TestFunction> dictionary(const System& sys, int K, int bumps = 4);

/// integral of f against the invariant probability measure: 0 or 1 for
/// characters; for flows a midpoint rule in x with Richardson refinement until
/// successive estimates agree within tol (the y integral is exact).
std::complex<double> invariant_integral(const System& sys, const TestFunction& f, double tol = 1e-6);

/// max over the dictionary of |empirical average - invariant integral|.
double discrepancy_report(const System& sys, std::span<const PlanePoint> points, int K);
/// Torus version: max over 0 < max(|k1|, |k2|) <= K of |(1/N) sum e(k1 x + k2 y)|.
double torus_discrepancy(std::span<const PlanePoint> points, int K, bool circle_only = false);

struct Checkpoint {
    u64 N = 0;
    std::vector<std::complex<double>> averages;  // aligned with AverageReport::functions
    double discrepancy = 0.0;
};

struct AverageReport {
    std::string system;
    PlanePoint start;
    std::string sequence;
    std::vector<TestFunction> functions;
    std::vector<Checkpoint> checkpoints;
    bool decreasing = false;  // last discrepancy < first

    /// One row per (checkpoint, test function).
    void write_csv(std::ostream& os, bool header = true) const;
};

void to_json(nlohmann::json& j, const AverageReport& r);

std::string system_name(const System& sys);

/// Sparse orbit along n^C with the dictionary evaluated at every checkpoint.
AverageReport equidistribution_trend(const System& sys, const Point& p, unsigned C, std::span<const u64> checkpoints,
                                     int K = 5, double budget = 1e7);

}  // namespace sparse_orbit::equi
