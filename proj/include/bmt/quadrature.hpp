// Deterministic adaptive quadrature on double-exponential variable
// transforms: tanh-sinh on finite intervals, exp-sinh on (0,inf), nested
// (cumulative-inner) integration, and tensorized simplex integration up to
// dimension 4.
//
// Design notes:
//  - Level-doubling trapezoidal sums over the transformed variable; the
//    level-to-level difference is the error estimate and a level is accepted
//    once that estimate falls below the requested absolute tolerance.
//  - Node positions near interval endpoints are handed to integrands as exact
//    distances-to-endpoint, so endpoint-singular integrands (log or power
//    < 1) can be evaluated without catastrophic rounding.
//  - Node/weight tables are pure functions of (precision, level) and are
//    cached per thread; sums are always taken in ascending node order, so a
//    result is a deterministic function of (integrand, ctx, tol).

#pragma once

#include "bmt/precision.hpp"

#include <functional>
#include <span>
#include <vector>

namespace bmt::quad {

struct QuadResult {
    mp_float value;
    mp_float error_estimate; // level-to-level difference at acceptance
    int levels_used = 0;
    long nodes = 0;

    bool operator==(const QuadResult& o) const {
        return value == o.value && error_estimate == o.error_estimate &&
               levels_used == o.levels_used && nodes == o.nodes;
    }
};

// Integrand on (0, inf). The argument is exact down to the smallest node, so
// the distance to the endpoint 0 is the argument itself.
using Integrand = std::function<mp_float(const mp_float& u)>;

// Integrand on a finite interval. `to_lo` / `to_hi` are accurately computed
// distances to the endpoints (x itself may have rounded to an endpoint at
// working precision).
using IntegrandF =
    std::function<mp_float(const mp_float& x, const mp_float& to_lo, const mp_float& to_hi)>;

// Integrand on the open simplex {x_i > 0, sum x_i < 1}. `remaining` is the
// accurately computed 1 - sum(x); it is strictly positive at every node.
using SimplexIntegrand =
    std::function<mp_float(std::span<const mp_float> x, const mp_float& remaining)>;

// Integral of f over (0, inf) by exp-sinh. f must be integrable at 0 (at
// worst log-singular) and decay at infinity fast enough to be integrable;
// integrands that become negligible beyond some cutoff should return zero
// there to avoid wasted work.
QuadResult integrate_semi_infinite(const Integrand& f, const PrecisionContext& ctx,
                                   const mp_float& tol);

// Integral of f over (lo, hi) by tanh-sinh. Endpoint log singularities and
// integrable power singularities need no hints.
QuadResult integrate_finite(const IntegrandF& f, const mp_float& lo, const mp_float& hi,
                            const PrecisionContext& ctx, const mp_float& tol);

// Convenience overload for integrands that do not need endpoint distances.
QuadResult integrate_finite(const Integrand& f, const mp_float& lo, const mp_float& hi,
                            const PrecisionContext& ctx, const mp_float& tol);

// Cumulative integral of g from 0 to u.
mp_float cumulative_inner(const Integrand& g, const mp_float& u, const PrecisionContext& ctx,
                          const mp_float& tol);

// Nested integral  int_0^inf f(u) ( int_0^u g(x) dx ) du.
//
// The inner cumulative is built incrementally: outer nodes are visited in
// ascending order and the inner integral is extended panel by panel between
// consecutive nodes (adaptive Gauss pairs on interior panels, tanh-sinh for
// the first panel touching 0). Inner tolerance is tol/10 and the returned
// error estimate is inflated by the accumulated inner bound.
QuadResult integrate_nested(const Integrand& f, const Integrand& g,
                            const PrecisionContext& ctx, const mp_float& tol);

// Integral of h over the standard m-simplex, m in 1..4, by the substitution
// x1 = t1, x2 = (1-t1) t2, ... onto the unit cube and nested 1-d tanh-sinh
// rules per axis (fixed evaluation order).
QuadResult integrate_simplex(const SimplexIntegrand& h, int m, const PrecisionContext& ctx,
                             const mp_float& tol);

namespace detail {

// Gauss-Legendre nodes/weights on (-1,1), computed at the given precision by
// Newton iteration on the Legendre recurrence and cached per thread.
struct GaussRule {
    std::vector<mp_float> x; // ascending
    std::vector<mp_float> w;
};
const GaussRule& gauss_rule(int n, unsigned digits);

// Adaptive Gauss pair (n / 2n) with bisection; for smooth interior panels.
mp_float adaptive_panel(const Integrand& g, const mp_float& a, const mp_float& b,
                        const mp_float& tol, unsigned digits, long& evals);

} // namespace detail

} // namespace bmt::quad
