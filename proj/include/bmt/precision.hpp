// Arbitrary-precision floating-point substrate and precision policy.
//
// All numeric code in this project runs on MPFR through Boost.Multiprecision
// with *explicit* per-value precision: the global default precision is never
// relied upon inside the library (it is not thread-local in every Boost
// release, and silent precision leaks are a class of bug we refuse to have).
// Every accumulator is created with make_zero()/make_float() at a precision
// derived from a PrecisionContext, and values entering a computation scope
// are rounded with round_to().

#pragma once

#include <boost/multiprecision/mpfr.hpp>
#include <boost/multiprecision/gmp.hpp>
#include <mpfr.h>

#include <cmath>
#include <stdexcept>
#include <string>

namespace bmt {

namespace mp = boost::multiprecision;

// Dynamic-precision real. Expression templates are off: plain value semantics
// keep precision propagation predictable.
using mp_float = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;
using mp_int = mp::mpz_int;
using mp_rational = mp::mpq_rational;

// Raised when an evaluation cannot reach its accuracy contract within the
// configured limits. Carries the best value obtained so far.
class accuracy_error : public std::runtime_error {
public:
    accuracy_error(const std::string& what, mp_float best, mp_float estimate)
        : std::runtime_error(what), best_value(std::move(best)),
          best_estimate(std::move(estimate)) {}
    mp_float best_value;
    mp_float best_estimate;
};

// Raised when the requested digits cannot support the requested operation
// (e.g. an integer-relation search whose detection threshold is unreachable).
class precision_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Requested accuracy plus the derived internal settings.
//
// working_digits carries guard digits over target_digits; all public
// post-conditions are stated at target_digits. max_refinement caps the
// level-doubling of the quadrature rules.
struct PrecisionContext {
    unsigned target_digits = 30;
    unsigned working_digits = 66;
    int max_refinement = 12;

    static unsigned working_for(unsigned target) {
        return static_cast<unsigned>(std::ceil(1.2 * target)) + 30;
    }

    static PrecisionContext make(unsigned target, int max_refinement = 12) {
        if (target < 10)
            throw std::invalid_argument("PrecisionContext: target_digits must be >= 10");
        if (max_refinement < 1)
            throw std::invalid_argument("PrecisionContext: max_refinement must be positive");
        PrecisionContext ctx;
        ctx.target_digits = target;
        ctx.working_digits = working_for(target);
        ctx.max_refinement = max_refinement;
        return ctx;
    }

    // Same working precision, tighter/looser target bookkeeping not needed:
    // used where an internal step wants extra guard digits.
    PrecisionContext boosted(unsigned extra_digits) const {
        PrecisionContext ctx = *this;
        ctx.working_digits += extra_digits;
        return ctx;
    }
};

// Fresh zero at the given decimal precision.
inline mp_float make_zero(unsigned digits) { return mp_float(0, digits); }

inline mp_float make_float(long v, unsigned digits) { return mp_float(v, digits); }

inline mp_float make_float(const std::string& decimal, unsigned digits) {
    return mp_float(decimal, digits);
}

// Round (or extend) a value to exactly `digits` decimal digits of precision.
inline mp_float round_to(const mp_float& x, unsigned digits) {
    mp_float r(0, digits);
    mpfr_set(r.backend().data(), x.backend().data(), MPFR_RNDN);
    return r;
}

// Exact rational v = num/den at the given precision.
inline mp_float make_ratio(long num, long den, unsigned digits) {
    mp_float r(num, digits);
    r /= den;
    return r;
}

// 10^e at the given precision (e may be negative). Handy for tolerances.
mp_float pow10(long e, unsigned digits);

namespace constants {
mp_float pi(unsigned digits);
mp_float euler_gamma(unsigned digits);
mp_float ln2(unsigned digits);
mp_float ln10(unsigned digits);
} // namespace constants

// log(1+x) without cancellation for small x.
inline mp_float log1p(const mp_float& x) {
    mp_float r(0, x.precision());
    mpfr_log1p(r.backend().data(), x.backend().data(), MPFR_RNDN);
    return r;
}

// Nearest integer as a bignum (ties away from zero, per mpfr_round).
inline mp_int round_to_int(const mp_float& x) {
    mpfr_t t;
    mpfr_init2(t, mpfr_get_prec(x.backend().data()));
    mpfr_round(t, x.backend().data());
    mp_int z;
    mpfr_get_z(z.backend().data(), t, MPFR_RNDN);
    mpfr_clear(t);
    return z;
}

// Decimal rendering with the given number of significant digits.
inline std::string to_decimal(const mp_float& x, unsigned digits) {
    return x.str(digits, std::ios_base::scientific);
}

} // namespace bmt
