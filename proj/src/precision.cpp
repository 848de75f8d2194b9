#include "bmt/precision.hpp"

namespace bmt {

mp_float pow10(long e, unsigned digits) {
    mp_float r(0, digits);
    mp_float ten(10, digits);
    mpfr_pow_si(r.backend().data(), ten.backend().data(), e, MPFR_RNDN);
    return r;
}

namespace constants {

mp_float pi(unsigned digits) {
    mp_float r(0, digits);
    mpfr_const_pi(r.backend().data(), MPFR_RNDN);
    return r;
}

mp_float euler_gamma(unsigned digits) {
    mp_float r(0, digits);
    mpfr_const_euler(r.backend().data(), MPFR_RNDN);
    return r;
}

mp_float ln2(unsigned digits) {
    mp_float r(0, digits);
    mpfr_const_log2(r.backend().data(), MPFR_RNDN);
    return r;
}

mp_float ln10(unsigned digits) {
    mp_float r(10, digits);
    return log(r);
}

} // namespace constants
} // namespace bmt
