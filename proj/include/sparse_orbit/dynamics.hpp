#pragma once

#include "sparse_orbit/diophantine.hpp"

#include <memory>
#include <optional>
#include <set>
#include <variant>
#include <vector>

namespace sparse_orbit::dynamics {

using diophantine::ContinuedFraction;

struct CocycleTerm {
    BigInt frequency;
    Real amplitude;
    /// Upper bound on 1 / ||frequency * alpha||, fixes how finely alpha must
    /// be approximated in closed-form Birkhoff sums.
    BigInt inv_norm_bound;
    /// Convergent index when frequency = q_index, otherwise -1.
    long index = -1;
};

struct CocycleSchedule;

/// g(x) = sum_k a_k cos(2 pi q_k x) attached to a rotation number.
class FourierCocycle {
public:
    FourierCocycle() = default;
    /// Attaches arbitrary (frequency, amplitude) pairs to cf; frequencies must
    /// be positive and ||frequency * alpha|| resolvable with cf's convergents.
    static FourierCocycle attach(const ContinuedFraction& cf, const std::vector<std::pair<BigInt, Real>>& terms);

    const std::vector<CocycleTerm>& terms() const { return terms_; }
    /// sum_k |a_k|.
    Real abs_sum() const;
    /// Bound on sup_n sup_x |S_n(g)(x)|: sum_k |a_k| / |sin(pi q_k alpha)|.
    Real birkhoff_bound() const { return birkhoff_bound_; }

private:
    friend FourierCocycle build_cocycle(const ContinuedFraction&, const CocycleSchedule&);
    std::vector<CocycleTerm> terms_;
    Real birkhoff_bound_ = 0;
};

/// Term indices first..last (inclusive). Indices in lower_bound_set get
/// a_n = 1 / (q_n^{4/5} q_{n+1}); the others a_n = 1 / (n q_n q_{n+1}^{4/5}).
struct CocycleSchedule {
    std::size_t first = 1;
    std::size_t last = 0;
    std::set<std::size_t> lower_bound_set;

    /// {"first": 1, "last": 5, "lower_bound_from": 2} or "lower_bound_indices": [...];
    /// "last" defaults to cf.size() - 3.
    static CocycleSchedule from_json(const nlohmann::json& spec, const ContinuedFraction& cf);
};

FourierCocycle build_cocycle(const ContinuedFraction& cf, const CocycleSchedule& schedule);

struct CocycleValue {
    Real value;
    Real truncation;  // sum of |a_k| over dropped tail terms
};

/// Drops trailing terms while their accumulated |a_k| stays below eps.
CocycleValue eval_cocycle(const FourierCocycle& g, const BigRational& x, const Real& eps = Real(0));

enum class BirkhoffMode { direct, closed_form };

/// S_n(g)(x) = sum_{k} A_k cos(2 pi (q_k x + psi_k)): the x-independent part of
/// the closed form at a fixed n.
struct BirkhoffKernel {
    std::vector<BigInt> frequency;
    std::vector<Real> amplitude;
    std::vector<Real> phase;

    Real operator()(const BigRational& x) const;
};

/// Terms with n |a_k| < tail_tol are skipped.
BirkhoffKernel birkhoff_kernel(const ContinuedFraction& cf, const FourierCocycle& g, const BigInt& n,
                               const Real& tail_tol = Real(0));

/// S_n(g)(x) = sum_{i<n} g(x + i alpha). Direct mode requires n * |terms| <= budget.
Real birkhoff_sum(const ContinuedFraction& cf, const FourierCocycle& g, const BigRational& x, const BigInt& n,
                  BirkhoffMode mode = BirkhoffMode::closed_form, const Real& tail_tol = Real(0),
                  double budget = 1e9);

/// Coordinates in [0, 1) (flow points: 0 <= y < roof(x)).
struct Point {
    Real x;
    Real y;
};
using TorusPoint = Point;
using FlowPoint = Point;

struct IdentitySystem {};

struct RotationSystem {
    std::shared_ptr<const ContinuedFraction> cf;
};

struct SkewProductSystem {
    std::shared_ptr<const ContinuedFraction> cf;
    FourierCocycle g;
    Real tail_tol = Real(0);
};

struct SpecialFlowSystem {
    std::shared_ptr<const ContinuedFraction> cf;
    FourierCocycle g;
    BigRational offset;     // C_0, roof = C_0 + g
    BigRational time_step;  // C_step
    Real tail_tol = Real(0);

    /// Default C_0: 1 + sum |a_k| rounded up to a multiple of 10^-6.
    static SpecialFlowSystem make(std::shared_ptr<const ContinuedFraction> cf, FourierCocycle g,
                                  std::optional<BigRational> offset = std::nullopt,
                                  std::optional<BigRational> time_step = std::nullopt);
    Real roof(const BigRational& x) const;
};

using System = std::variant<IdentitySystem, RotationSystem, SkewProductSystem, SpecialFlowSystem>;

/// alpha to about 45 digits.
Real alpha_real(const ContinuedFraction& cf);

/// frac(x + n alpha), accurate to about 1e-45.
Real rotate(const ContinuedFraction& cf, const Real& x, const BigInt& n);

/// ||n alpha||, with relative precision when the convergents allow it.
Real rotation_norm(const ContinuedFraction& cf, const BigInt& n);

Point skew_iterate(const SkewProductSystem& sys, const Point& p, const BigInt& n);

/// T_t on the region under the roof, t >= 0.
Point special_flow_map(const SpecialFlowSystem& sys, const Point& p, const BigRational& t);

/// T^m p: rotation / skew iterates, or the flow at time m * time_step.
Point orbit_point(const System& sys, const Point& p, const BigInt& m);

Real circle_distance(const Real& a, const Real& b);
Real torus_distance(const Point& a, const Point& b);
Real flow_distance(const SpecialFlowSystem& sys, const Point& a, const Point& b);
/// Metric of the phase space of sys (torus metric for identity/rotation/skew).
Real metric(const System& sys, const Point& a, const Point& b);

struct RigidityOptions {
    /// t_max up to this value is enumerated exhaustively, beyond it sampled.
    u64 enumerate_limit = 2048;
    std::size_t ladder_points = 160;
    std::size_t uniform_points = 64;
};

struct RigidityResult {
    Real value;
    BigInt worst_t;
    std::size_t t_count = 0;
    bool exhaustive = true;
    std::size_t grid = 0;
};

/// max over 1 <= t <= t_max and over the uniform grid of d(p, T^{t q} p);
/// the grid is G points in x for torus systems (y cancels) and G x G for flows.
RigidityResult rigidity_profile(const System& sys, const BigInt& q, const BigInt& t_max, std::size_t G,
                                const RigidityOptions& options = {});

/// The t values rigidity_profile visits for a given t_max.
std::vector<BigInt> rigidity_times(const BigInt& t_max, const RigidityOptions& options);

/// floor(q^{4/5}), exact.
BigInt rigidity_horizon(const BigInt& q);

/// max over x = j/G (j < G) of |S_n(g)(x)|.
Real birkhoff_grid_sup(const ContinuedFraction& cf, const FourierCocycle& g, const BigInt& n, std::size_t G,
                       const Real& tail_tol = Real(0));

}  // namespace sparse_orbit::dynamics
