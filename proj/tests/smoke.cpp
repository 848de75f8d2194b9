#include "bmt/kernels.hpp"
#include "bmt/quadrature.hpp"
#include <cstdio>
#include <chrono>

using namespace bmt;
using clk = std::chrono::steady_clock;

int main() {
    auto ctx = PrecisionContext::make(50);
    auto t0 = clk::now();
    mp_float k0 = kernels::bessel_k0(mp_float(1, ctx.working_digits), ctx);
    mp_float k1 = kernels::bessel_k1(mp_float(1, ctx.working_digits), ctx);
    auto t1 = clk::now();
    std::printf("K0(1) = %s\n", k0.str(50).c_str());
    std::printf("K1(1) = %s\n", k1.str(50).c_str());
    std::printf("kernel time %.3f ms\n", std::chrono::duration<double, std::milli>(t1-t0).count());

    // expected: 0.42102443824070833333562737921260903613621974822666
    //           0.60190723019723457473754000153561733926158688996811

    quad::Integrand f = [&](const mp_float& u) { return exp(mp_float(-u)); };
    t0 = clk::now();
    auto r = quad::integrate_semi_infinite(f, ctx, pow10(-55, ctx.working_digits));
    t1 = clk::now();
    std::printf("int e^-u = %s  est %s  levels %d nodes %ld  (%.1f ms)\n",
                r.value.str(30).c_str(), r.error_estimate.str(3).c_str(),
                r.levels_used, r.nodes,
                std::chrono::duration<double, std::milli>(t1-t0).count());

    // K0 branch consistency at u = 30 (series) vs asymptotic/integral
    auto s = kernels::detail::series_ik(mp_float(30, ctx.working_digits), ctx.working_digits);
    auto a = kernels::detail::k_asymptotic(0, mp_float(30, ctx.working_digits), ctx.working_digits);
    mp_float ki = kernels::detail::k_integral(0, mp_float(30, ctx.working_digits), ctx);
    mp_float eu = exp(mp_float(30, ctx.working_digits + 8));
    std::printf("series k0e(30) = %s\n", mp_float(s.k0 * eu).str(40).c_str());
    if (a) std::printf("asym   k0e(30) = %s\n", a->str(40).c_str());
    else   std::printf("asym   k0e(30) = unreachable\n");
    std::printf("integ  k0e(30) = %s\n", ki.str(40).c_str());

    t0 = clk::now();
    mp_float m41 = quad::integrate_semi_infinite(
        [&](const mp_float& u) {
            return kernels::eval_moment_integrand({1, 4, 0, 0, 0}, u, ctx);
        },
        ctx, pow10(-55, ctx.working_digits)).value;
    t1 = clk::now();
    std::printf("M(4,1) = %s (%.1f ms)\n", m41.str(50).c_str(),
                std::chrono::duration<double, std::milli>(t1-t0).count());
    // 7 zeta(3)/8 = 1.0517997902646449856637317577365...
    return 0;
}
