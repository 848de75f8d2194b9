// Arbitrary-precision modified Bessel functions K0, K1, I0, I1 and the
// integrand families built from them.
//
// Evaluation strategy (DLMF 10.25, 10.31, 10.40):
//  - ascending log series for u <= max(20, working_digits/2), computed with
//    enough extra guard digits to absorb the e^{2u} cancellation between the
//    log term and the power sum;
//  - asymptotic expansion with a first-omitted-term error bound for larger u;
//  - if the asymptotic series cannot reach the error budget (the mid-range
//    band), the integral representation K_nu(u) e^u = int_0^inf
//    exp(-u (cosh s - 1)) cosh(nu s) ds evaluated by tanh-sinh quadrature.
//
// The I functions are evaluated by their ascending series at every argument
// (all terms positive, no cancellation) and returned in the e^{-u}-scaled
// form so products with K factors never overflow.

#pragma once

#include "bmt/precision.hpp"

#include <optional>
#include <string>

namespace bmt::kernels {

// Exponent tuple of a moment integrand u^p K0^a (u K1)^b I0^c (u I1)^d.
struct MomentSpec {
    long p = 1;
    long a = 0;
    long b = 0;
    long c = 0;
    long d = 0;

    long weight() const { return a + b; }
    long decay_rate() const { return a + b - c - d; }

    // Throws std::domain_error unless p is odd and non-negative, exponents are
    // non-negative, and the K-decay dominates the I-growth (a+b > c+d).
    void validate() const;

    std::string key() const;
    bool operator==(const MomentSpec&) const = default;
};

// f_n(x) = x^n K0^2 K1^2   or   g_n(x) = x^n K1 I1 K0^2,  n odd positive.
struct IntegrandFamily {
    enum class Kind { F, G };
    Kind kind = Kind::F;
    long n = 1;

    void validate() const;
    std::string key() const;
};

inline IntegrandFamily family_f(long n) { return {IntegrandFamily::Kind::F, n}; }
inline IntegrandFamily family_g(long n) { return {IntegrandFamily::Kind::G, n}; }

mp_float bessel_k0(const mp_float& u, const PrecisionContext& ctx);
mp_float bessel_k1(const mp_float& u, const PrecisionContext& ctx);

// e^{-u} I0(u) and e^{-u} I1(u).
mp_float bessel_i0_scaled(const mp_float& u, const PrecisionContext& ctx);
mp_float bessel_i1_scaled(const mp_float& u, const PrecisionContext& ctx);

// Scaled kernel bundle: k0e = e^{+u} K0(u), i0e = e^{-u} I0(u), etc.
struct ScaledBessel {
    mp_float k0e, k1e, i0e, i1e;
};

enum : unsigned {
    need_k0 = 1u,
    need_k1 = 2u,
    need_i0 = 4u,
    need_i1 = 8u,
    need_all = 15u,
};

// Evaluates the requested scaled kernels at u > 0. Fields not requested are
// left as zeros of the working precision.
ScaledBessel eval_scaled(const mp_float& u, const PrecisionContext& ctx, unsigned need);

// u beyond which exp(-rate * u) is below significance at working precision;
// integrands should return exact zero past this point.
mp_float integrand_cutoff(long decay_rate, const PrecisionContext& ctx);

// u^p K0^a (uK1)^b I0^c (uI1)^d at u > 0, assembled from scaled kernels with
// a single exp(-(a+b-c-d) u) compensation so no intermediate overflows.
// Returns exact zero beyond the decay cutoff.
mp_float eval_moment_integrand(const MomentSpec& spec, const mp_float& u,
                               const PrecisionContext& ctx);

mp_float eval_family(const IntegrandFamily& fam, const mp_float& x, const PrecisionContext& ctx);

namespace detail {

// Series/asymptotic crossover point.
double series_cut(const PrecisionContext& ctx);

// All four kernels by the ascending series (valid at any u > 0; intended for
// u below the crossover). Unscaled K, scaled-on-request handled by callers.
struct SeriesIK {
    mp_float i0, i1, k0, k1;
};
SeriesIK series_ik(const mp_float& u, unsigned out_digits);

// I0, I1 by ascending series at any u, unscaled.
void i_series(const mp_float& u, unsigned digits, mp_float& i0, mp_float& i1);

// e^{+u} K_nu(u) by the asymptotic expansion; nullopt when the first-omitted-
// term bound cannot reach ~10^-(digits+3) relative accuracy at this u.
std::optional<mp_float> k_asymptotic(int nu, const mp_float& u, unsigned digits);

// e^{+u} K_nu(u) by tanh-sinh quadrature of the integral representation.
mp_float k_integral(int nu, const mp_float& u, const PrecisionContext& ctx);

} // namespace detail

} // namespace bmt::kernels
