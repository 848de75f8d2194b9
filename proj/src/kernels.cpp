#include "bmt/kernels.hpp"

#include "bmt/quadrature.hpp"

#include <cmath>
#include <sstream>

namespace bmt::kernels {

void MomentSpec::validate() const {
    if (p < 0 || p % 2 == 0)
        throw std::domain_error("MomentSpec: p must be odd and non-negative");
    if (a < 0 || b < 0 || c < 0 || d < 0)
        throw std::domain_error("MomentSpec: exponents must be non-negative");
    if (a + b <= c + d)
        throw std::domain_error("MomentSpec: integral diverges unless a+b > c+d");
}

std::string MomentSpec::key() const {
    std::ostringstream os;
    os << "p" << p << "a" << a << "b" << b << "c" << c << "d" << d;
    return os.str();
}

void IntegrandFamily::validate() const {
    if (n < 1 || n % 2 == 0)
        throw std::domain_error("IntegrandFamily: n must be odd and positive");
}

std::string IntegrandFamily::key() const {
    std::ostringstream os;
    os << (kind == Kind::F ? "f" : "g") << n;
    return os.str();
}

namespace detail {

double series_cut(const PrecisionContext& ctx) {
    return std::max(20.0, ctx.working_digits / 2.0);
}

SeriesIK series_ik(const mp_float& u, unsigned out_digits) {
    // The K sums cancel against the log term by a factor ~ e^{2u}; boost the
    // internal precision accordingly.
    const double ud = u.convert_to<double>();
    const unsigned P = out_digits + static_cast<unsigned>(0.8686 * ud) + 12;

    const mp_float x = round_to(u, P);
    const mp_float half_x = x / 2;
    const mp_float t = half_x * half_x;
    const mp_float eps = pow10(-static_cast<long>(P) - 5, P);

    mp_float i0(1, P), i1(1, P), s0(0, P), s1(1, P);
    mp_float ti(1, P); // t^k / (k!)^2
    mp_float tu(1, P); // t^k / (k! (k+1)!)
    mp_float hk(0, P); // H_k
    mp_float hk1(1, P); // H_{k+1}
    for (unsigned long k = 1;; ++k) {
        ti *= t;
        ti /= k * k;
        tu *= t;
        tu /= k * (k + 1);
        hk += mp_float(1, P) / k;
        hk1 += mp_float(1, P) / (k + 1);
        i0 += ti;
        i1 += tu;
        s0 += ti * hk;
        s1 += tu * (hk + hk1);
        if (ti * (hk + 2) < eps * i0)
            break;
        if (k > 100000)
            throw accuracy_error("bessel series did not converge", i0, ti);
    }
    i1 *= half_x;

    const mp_float lg = log(half_x) + constants::euler_gamma(P);
    SeriesIK out;
    out.i0 = round_to(i0, out_digits);
    out.i1 = round_to(i1, out_digits);
    out.k0 = round_to(-lg * i0 + s0, out_digits);
    out.k1 = round_to(1 / x + lg * i1 - (x / 4) * s1, out_digits);
    return out;
}

void i_series(const mp_float& u, unsigned digits, mp_float& i0, mp_float& i1) {
    const unsigned P = digits + 10;
    const mp_float x = round_to(u, P);
    const mp_float half_x = x / 2;
    const mp_float t = half_x * half_x;
    const mp_float eps = pow10(-static_cast<long>(P) - 5, P);

    mp_float s0(1, P), s1(1, P), ti(1, P), tu(1, P);
    for (unsigned long k = 1;; ++k) {
        ti *= t;
        ti /= k * k;
        tu *= t;
        tu /= k * (k + 1);
        s0 += ti;
        s1 += tu;
        if (ti < eps * s0)
            break;
        if (k > 1000000)
            throw accuracy_error("I series did not converge", s0, ti);
    }
    i0 = round_to(s0, digits);
    i1 = round_to(s1 * half_x, digits);
}

std::optional<mp_float> k_asymptotic(int nu, const mp_float& u, unsigned digits) {
    // e^u K_nu(u) ~ sqrt(pi/(2u)) * sum_j a_j(nu)/u^j ; for nu = 0, 1 the
    // remainder is bounded by the first omitted term.
    const unsigned P = digits + 10;
    const mp_float x = round_to(u, P);
    const mp_float eps = pow10(-static_cast<long>(digits) - 3, P);
    const long mu = 4L * nu * nu;

    mp_float sum(1, P), term(1, P);
    mp_float prev_abs(0, P);
    bool ok = false;
    for (long j = 1; j <= 4000; ++j) {
        const long num = mu - (2 * j - 1) * (2 * j - 1);
        term *= num;
        term /= 8 * j;
        term /= x;
        mp_float ta = abs(term);
        if (j > 1 && ta >= prev_abs)
            break; // diverging: budget unreachable
        sum += term;
        prev_abs = ta;
        if (ta < eps) {
            ok = true;
            break;
        }
    }
    if (!ok)
        return std::nullopt;
    mp_float pref = sqrt(constants::pi(P) / (2 * x));
    return round_to(pref * sum, digits);
}

mp_float k_integral(int nu, const mp_float& u, const PrecisionContext& ctx) {
    // e^u K_nu(u) = int_0^smax exp(-u (cosh s - 1)) cosh(nu s) ds  with the
    // tail beyond smax below significance.
    const unsigned W = ctx.working_digits;
    const unsigned P = W + 10;
    const mp_float x = round_to(u, P);
    const double ud = u.convert_to<double>();
    const double smax_d = std::acosh(1.0 + (P + 5) * 2.302585092994046 / ud);

    PrecisionContext qctx = ctx;
    qctx.working_digits = P;
    const mp_float tol = pow10(-static_cast<long>(W) - 5, P);

    quad::Integrand f = [&](const mp_float& s) -> mp_float {
        mp_float e = exp(mp_float(-x * (cosh(s) - 1)));
        if (nu == 0)
            return e;
        return e * cosh(mp_float(nu * s));
    };
    auto r = quad::integrate_finite(f, make_zero(P), mp_float(smax_d, P), qctx, tol);
    return round_to(r.value, W);
}

namespace {

// Dispatch: series below the cut, asymptotic beyond it, integral
// representation when the asymptotic budget is unreachable. Returns the
// scaled pair (e^u K0, e^u K1) for the requested components.
void k_scaled_dispatch(const mp_float& u, const PrecisionContext& ctx, bool want_k0, bool want_k1,
                       mp_float& k0e, mp_float& k1e) {
    const unsigned W = ctx.working_digits;
    const double ud = u.convert_to<double>();
    if (ud <= detail::series_cut(ctx)) {
        detail::SeriesIK s = detail::series_ik(u, W + 8);
        mp_float eu = exp(round_to(u, W + 8));
        if (want_k0)
            k0e = round_to(s.k0 * eu, W);
        if (want_k1)
            k1e = round_to(s.k1 * eu, W);
        return;
    }
    if (want_k0) {
        auto a = detail::k_asymptotic(0, u, W);
        k0e = a ? *a : detail::k_integral(0, u, ctx);
    }
    if (want_k1) {
        auto a = detail::k_asymptotic(1, u, W);
        k1e = a ? *a : detail::k_integral(1, u, ctx);
    }
}

} // namespace

} // namespace detail

ScaledBessel eval_scaled(const mp_float& u, const PrecisionContext& ctx, unsigned need) {
    if (!(u > 0))
        throw std::domain_error("bessel kernels: argument must be positive");
    const unsigned W = ctx.working_digits;
    ScaledBessel out{make_zero(W), make_zero(W), make_zero(W), make_zero(W)};
    const mp_float x = round_to(u, W);
    const double ud = x.convert_to<double>();

    const bool low = ud <= detail::series_cut(ctx);
    bool want_i0 = (need & need_i0) != 0;
    bool want_i1 = (need & need_i1) != 0;
    bool want_k0 = (need & need_k0) != 0;
    bool want_k1 = (need & need_k1) != 0;

    if (low) {
        detail::SeriesIK s = detail::series_ik(x, W + 8);
        mp_float eu = exp(round_to(x, W + 8));
        if (want_k0)
            out.k0e = round_to(s.k0 * eu, W);
        if (want_k1)
            out.k1e = round_to(s.k1 * eu, W);
        if (want_i0)
            out.i0e = round_to(s.i0 / eu, W);
        if (want_i1)
            out.i1e = round_to(s.i1 / eu, W);
        return out;
    }

    // High range: I by series (no cancellation), K0 by asymptotic or integral
    // representation, K1 via the Wronskian u (K1 I0 + I1 K0) = 1 so the band
    // costs a single quadrature pass.
    mp_float i0(0, W + 8), i1(0, W + 8);
    if (want_i0 || want_i1 || want_k1) {
        detail::i_series(x, W + 8, i0, i1);
        mp_float eu = exp(round_to(x, W + 8));
        mp_float i0s = i0 / eu, i1s = i1 / eu;
        if (want_i0)
            out.i0e = round_to(i0s, W);
        if (want_i1)
            out.i1e = round_to(i1s, W);
        if (want_k1) {
            mp_float k0e(0, W);
            auto a0 = detail::k_asymptotic(0, x, W);
            k0e = a0 ? *a0 : detail::k_integral(0, x, ctx);
            if (want_k0)
                out.k0e = k0e;
            auto a1 = detail::k_asymptotic(1, x, W);
            if (a1) {
                out.k1e = *a1;
            } else {
                mp_float k1e = (1 - x * round_to(i1s, W + 8) * round_to(k0e, W + 8)) /
                               (x * round_to(i0s, W + 8));
                out.k1e = round_to(k1e, W);
            }
            return out;
        }
    }
    if (want_k0) {
        auto a0 = detail::k_asymptotic(0, x, W);
        out.k0e = a0 ? *a0 : detail::k_integral(0, x, ctx);
    }
    return out;
}

mp_float bessel_k0(const mp_float& u, const PrecisionContext& ctx) {
    if (!(u > 0))
        throw std::domain_error("bessel_k0: argument must be positive");
    const unsigned W = ctx.working_digits;
    const mp_float x = round_to(u, W);
    const double ud = x.convert_to<double>();
    if (ud <= detail::series_cut(ctx))
        return round_to(detail::series_ik(x, W + 8).k0, W);
    mp_float k0e(0, W);
    auto a = detail::k_asymptotic(0, x, W);
    k0e = a ? *a : detail::k_integral(0, x, ctx);
    return round_to(k0e * exp(mp_float(-x)), W);
}

mp_float bessel_k1(const mp_float& u, const PrecisionContext& ctx) {
    if (!(u > 0))
        throw std::domain_error("bessel_k1: argument must be positive");
    const unsigned W = ctx.working_digits;
    const mp_float x = round_to(u, W);
    const double ud = x.convert_to<double>();
    if (ud <= detail::series_cut(ctx))
        return round_to(detail::series_ik(x, W + 8).k1, W);
    mp_float k1e(0, W);
    auto a = detail::k_asymptotic(1, x, W);
    k1e = a ? *a : detail::k_integral(1, x, ctx);
    return round_to(k1e * exp(mp_float(-x)), W);
}

mp_float bessel_i0_scaled(const mp_float& u, const PrecisionContext& ctx) {
    if (u < 0)
        throw std::domain_error("bessel_i0_scaled: argument must be non-negative");
    const unsigned W = ctx.working_digits;
    if (u == 0)
        return make_float(1, W);
    return eval_scaled(u, ctx, need_i0).i0e;
}

mp_float bessel_i1_scaled(const mp_float& u, const PrecisionContext& ctx) {
    if (u < 0)
        throw std::domain_error("bessel_i1_scaled: argument must be non-negative");
    const unsigned W = ctx.working_digits;
    if (u == 0)
        return make_zero(W);
    return eval_scaled(u, ctx, need_i1).i1e;
}

mp_float integrand_cutoff(long decay_rate, const PrecisionContext& ctx) {
    if (decay_rate < 1)
        throw std::domain_error("integrand_cutoff: decay rate must be positive");
    const unsigned W = ctx.working_digits;
    return constants::ln10(W) * static_cast<long>(W + 20) / decay_rate;
}

mp_float eval_moment_integrand(const MomentSpec& spec, const mp_float& u,
                               const PrecisionContext& ctx) {
    spec.validate();
    if (!(u > 0))
        throw std::domain_error("eval_moment_integrand: u must be positive");
    const unsigned W = ctx.working_digits;
    const mp_float x = round_to(u, W);
    if (x > integrand_cutoff(spec.decay_rate(), ctx))
        return make_zero(W);

    unsigned need = 0;
    if (spec.a)
        need |= need_k0;
    if (spec.b)
        need |= need_k1;
    if (spec.c)
        need |= need_i0;
    if (spec.d)
        need |= need_i1;
    ScaledBessel s = eval_scaled(x, ctx, need);

    mp_float v = pow(x, static_cast<unsigned>(spec.p));
    if (spec.a)
        v *= pow(s.k0e, static_cast<unsigned>(spec.a));
    if (spec.b)
        v *= pow(mp_float(x * s.k1e), static_cast<unsigned>(spec.b));
    if (spec.c)
        v *= pow(s.i0e, static_cast<unsigned>(spec.c));
    if (spec.d)
        v *= pow(mp_float(x * s.i1e), static_cast<unsigned>(spec.d));
    v *= exp(mp_float(-spec.decay_rate() * x));
    return v;
}

mp_float eval_family(const IntegrandFamily& fam, const mp_float& x, const PrecisionContext& ctx) {
    fam.validate();
    if (!(x > 0))
        throw std::domain_error("eval_family: x must be positive");
    const unsigned W = ctx.working_digits;
    const mp_float u = round_to(x, W);
    const long rate = fam.kind == IntegrandFamily::Kind::F ? 4 : 2;
    if (u > integrand_cutoff(rate, ctx))
        return make_zero(W);

    if (fam.kind == IntegrandFamily::Kind::F) {
        ScaledBessel s = eval_scaled(u, ctx, need_k0 | need_k1);
        return pow(u, static_cast<unsigned>(fam.n)) * s.k0e * s.k0e * s.k1e * s.k1e *
               exp(mp_float(-4 * u));
    }
    ScaledBessel s = eval_scaled(u, ctx, need_k0 | need_k1 | need_i1);
    return pow(u, static_cast<unsigned>(fam.n)) * s.k1e * s.i1e * s.k0e * s.k0e *
           exp(mp_float(-2 * u));
}

} // namespace bmt::kernels
