#include "bmt/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <utility>
#include <vector>

namespace bmt::quad {
namespace {

// Global node index: k * 2^(KSHIFT - level) identifies a node position
// independently of the level it first appeared at. 26 levels is far beyond
// any realistic max_refinement.
constexpr int KSHIFT = 26;

inline long long node_key(long k, int level) {
    return static_cast<long long>(k) << (KSHIFT - level);
}

// tanh-sinh node on the positive-t side: complement c = 1 - tanh(z) and
// weight w = (pi/2) cosh(t) / cosh(z)^2 with z = (pi/2) sinh(t).
struct TSNode {
    long k;
    mp_float c;
    mp_float w;
};

// exp-sinh node (signed t): abscissa x = exp((pi/2) sinh t), weight
// w = x (pi/2) cosh(t).
struct ESNode {
    long k;
    mp_float x;
    mp_float w;
};

// Transform ranges. Chosen so the skipped endpoint tails are below
// 10^-(digits+15) even for power-(-1/2) endpoint singularities (tanh-sinh)
// and log singularities at 0 (exp-sinh).
double ts_tmax(unsigned digits) {
    double zmax = (digits + 15) * 2.302585092994046 + 0.35;
    return std::asinh(2.0 * zmax / 3.141592653589793);
}

double es_tmax(unsigned digits) {
    double zmax = (digits + 15) * 2.302585092994046;
    return std::asinh(2.0 * zmax / 3.141592653589793);
}

// New nodes introduced at `level` (k = 0,1,2,.. at level 0; odd k beyond).
// Tables are pure functions of (digits, level) and cached per thread.
std::shared_ptr<const std::vector<TSNode>> ts_table(unsigned digits, int level) {
    thread_local std::map<std::pair<unsigned, int>, std::shared_ptr<const std::vector<TSNode>>> cache;
    auto& slot = cache[{digits, level}];
    if (slot)
        return slot;

    const double h = std::ldexp(1.0, -level);
    const long kmax = static_cast<long>(std::floor(ts_tmax(digits) / h));
    auto nodes = std::make_shared<std::vector<TSNode>>();
    const mp_float pihalf = constants::pi(digits) / 2;
    for (long k = (level == 0 ? 0 : 1); k <= kmax; k += (level == 0 ? 1 : 2)) {
        mp_float t = make_float(k, digits);
        t = mp_float(t / (1L << level)); // exact: power-of-two division
        mp_float sh(0, digits), ch(0, digits);
        mpfr_sinh_cosh(sh.backend().data(), ch.backend().data(), t.backend().data(), MPFR_RNDN);
        mp_float z = pihalf * sh;
        mp_float e = exp(mp_float(-2 * z));
        mp_float c = 2 * e / (1 + e);
        mp_float w = pihalf * ch / (cosh(z) * cosh(z));
        nodes->push_back(TSNode{k, std::move(c), std::move(w)});
    }
    slot = nodes;
    return slot;
}

std::shared_ptr<const std::vector<ESNode>> es_table(unsigned digits, int level) {
    thread_local std::map<std::pair<unsigned, int>, std::shared_ptr<const std::vector<ESNode>>> cache;
    auto& slot = cache[{digits, level}];
    if (slot)
        return slot;

    const double h = std::ldexp(1.0, -level);
    const long kmax = static_cast<long>(std::floor(es_tmax(digits) / h));
    auto nodes = std::make_shared<std::vector<ESNode>>();
    const mp_float pihalf = constants::pi(digits) / 2;
    for (long k = -kmax; k <= kmax; ++k) {
        if (level > 0 && (k % 2) == 0)
            continue;
        mp_float t = make_float(k, digits);
        t = mp_float(t / (1L << level));
        mp_float sh(0, digits), ch(0, digits);
        mpfr_sinh_cosh(sh.backend().data(), ch.backend().data(), t.backend().data(), MPFR_RNDN);
        mp_float x = exp(mp_float(pihalf * sh));
        mp_float w = x * pihalf * ch;
        nodes->push_back(ESNode{k, std::move(x), std::move(w)});
    }
    slot = nodes;
    return slot;
}

// Shared level-doubling driver. `eval_level` appends (key, w*f) terms for the
// new nodes of the given level; the driver re-sums all stored terms in
// ascending node order and applies the acceptance test.
template <typename EvalLevel>
QuadResult refine_levels(const PrecisionContext& ctx, const mp_float& tol, EvalLevel&& eval_level,
                         const mp_float* extra_error = nullptr) {
    const unsigned W = ctx.working_digits;
    std::map<long long, mp_float> terms;
    mp_float value = make_zero(W);
    mp_float prev = make_zero(W);
    mp_float est = make_zero(W);
    const mp_float floor_rel = pow10(-static_cast<long>(W) + 8, W);
    long nodes = 0;

    for (int level = 0; level <= ctx.max_refinement; ++level) {
        eval_level(level, terms, nodes);
        mp_float h = pow(mp_float(2, W), -level);
        mp_float sum = make_zero(W);
        for (const auto& [key, term] : terms)
            sum += term;
        value = h * sum;
        if (level >= 1) {
            est = abs(value - prev);
            mp_float budget = extra_error ? mp_float(tol - *extra_error) : tol;
            if (budget < 0)
                budget = make_zero(W);
            if (est <= budget || est <= abs(value) * floor_rel) {
                QuadResult r{value, est, level, nodes};
                if (extra_error)
                    r.error_estimate += *extra_error;
                return r;
            }
        }
        prev = value;
    }
    if (extra_error)
        est += *extra_error;
    throw accuracy_error("quadrature did not converge within max_refinement", value, est);
}

} // namespace

QuadResult integrate_finite(const IntegrandF& f, const mp_float& lo, const mp_float& hi,
                            const PrecisionContext& ctx, const mp_float& tol) {
    const unsigned W = ctx.working_digits;
    const mp_float a = round_to(lo, W), b = round_to(hi, W);
    const mp_float len = b - a;
    const mp_float half = len / 2;
    if (!(len > 0))
        throw std::invalid_argument("integrate_finite: empty or reversed interval");

    auto eval_level = [&](int level, std::map<long long, mp_float>& terms, long& nodes) {
        auto tbl = ts_table(W, level);
        for (const TSNode& n : *tbl) {
            mp_float to_end = half * n.c;
            mp_float to_other = len - to_end;
            // positive t side: x near hi
            {
                mp_float x = b - to_end;
                terms[node_key(n.k, level)] = half * n.w * f(x, to_other, to_end);
                ++nodes;
            }
            if (n.k != 0) { // negative t side: x near lo
                mp_float x = a + to_end;
                terms[node_key(-n.k, level)] = half * n.w * f(x, to_end, to_other);
                ++nodes;
            }
        }
    };
    return refine_levels(ctx, round_to(tol, W), eval_level);
}

QuadResult integrate_finite(const Integrand& f, const mp_float& lo, const mp_float& hi,
                            const PrecisionContext& ctx, const mp_float& tol) {
    return integrate_finite(
        [&f](const mp_float& x, const mp_float&, const mp_float&) { return f(x); }, lo, hi, ctx,
        tol);
}

QuadResult integrate_semi_infinite(const Integrand& f, const PrecisionContext& ctx,
                                   const mp_float& tol) {
    const unsigned W = ctx.working_digits;
    auto eval_level = [&](int level, std::map<long long, mp_float>& terms, long& nodes) {
        auto tbl = es_table(W, level);
        for (const ESNode& n : *tbl) {
            terms[node_key(n.k, level)] = n.w * f(n.x);
            ++nodes;
        }
    };
    return refine_levels(ctx, round_to(tol, W), eval_level);
}

mp_float cumulative_inner(const Integrand& g, const mp_float& u, const PrecisionContext& ctx,
                          const mp_float& tol) {
    if (!(u > 0))
        throw std::domain_error("cumulative_inner: upper limit must be positive");
    return integrate_finite(g, make_zero(ctx.working_digits), u, ctx, tol).value;
}

namespace detail {

const GaussRule& gauss_rule(int n, unsigned digits) {
    thread_local std::map<std::pair<int, unsigned>, GaussRule> cache;
    auto it = cache.find({n, digits});
    if (it != cache.end())
        return it->second;

    const unsigned P = digits + 10;
    GaussRule rule;
    rule.x.assign(n, make_zero(P));
    rule.w.assign(n, make_zero(P));
    const mp_float tol_newton = pow10(-static_cast<long>(P) + 3, P);

    auto legendre = [&](const mp_float& x, mp_float& p, mp_float& dp) {
        mp_float p0 = make_float(1, P), p1 = x;
        for (int k = 2; k <= n; ++k) {
            mp_float pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        p = p1;
        dp = n * (x * p1 - p0) / (x * x - 1);
    };

    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev-flavoured initial guess, then Newton to full precision.
        double guess = std::cos(3.141592653589793 * (i + 0.75) / (n + 0.5));
        mp_float x(guess, P);
        mp_float p(0, P), dp(0, P);
        for (int iter = 0; iter < 80; ++iter) {
            legendre(x, p, dp);
            mp_float dx = p / dp;
            x -= dx;
            if (abs(dx) <= tol_newton)
                break;
        }
        legendre(x, p, dp);
        mp_float w = 2 / ((1 - x * x) * dp * dp);
        rule.x[i] = -x; // guesses start near +1; store ascending
        rule.w[i] = w;
        rule.x[n - 1 - i] = x;
        rule.w[n - 1 - i] = w;
    }
    auto [pos, _] = cache.emplace(std::make_pair(n, digits), std::move(rule));
    return pos->second;
}

namespace {

mp_float gauss_apply(const Integrand& g, int n, const mp_float& a, const mp_float& b,
                     unsigned digits, long& evals) {
    const GaussRule& rule = gauss_rule(n, digits);
    mp_float mid = (a + b) / 2;
    mp_float half = (b - a) / 2;
    mp_float sum = make_zero(digits);
    for (int i = 0; i < n; ++i) {
        sum += rule.w[i] * g(mid + half * rule.x[i]);
        ++evals;
    }
    return half * sum;
}

mp_float adaptive_panel_rec(const Integrand& g, const mp_float& a, const mp_float& b,
                            const mp_float& tol, unsigned digits, long& evals, int depth) {
    mp_float coarse = gauss_apply(g, 16, a, b, digits, evals);
    mp_float fine = gauss_apply(g, 32, a, b, digits, evals);
    if (abs(fine - coarse) <= tol || depth >= 48)
        return fine;
    mp_float mid = (a + b) / 2;
    mp_float half_tol = tol / 2;
    return adaptive_panel_rec(g, a, mid, half_tol, digits, evals, depth + 1) +
           adaptive_panel_rec(g, mid, b, half_tol, digits, evals, depth + 1);
}

} // namespace

mp_float adaptive_panel(const Integrand& g, const mp_float& a, const mp_float& b,
                        const mp_float& tol, unsigned digits, long& evals) {
    return adaptive_panel_rec(g, a, b, tol, digits, evals, 0);
}

} // namespace detail

QuadResult integrate_nested(const Integrand& f, const Integrand& g, const PrecisionContext& ctx,
                            const mp_float& tol_in) {
    const unsigned W = ctx.working_digits;
    const unsigned Wp = W + 10; // inner panels carry a little extra guard
    const mp_float tol = round_to(tol_in, W);
    const mp_float inner_tol = tol / 10;
    // Per-panel budget: enough for the worst-case panel count over all levels.
    const double trange = 2 * es_tmax(W);
    const mp_float panel_tol =
        round_to(inner_tol / (trange * std::ldexp(1.0, ctx.max_refinement + 2)), Wp);

    PrecisionContext inner_ctx = ctx;
    inner_ctx.working_digits = Wp;

    std::map<mp_float, mp_float> cumulative; // u -> int_0^u g, ascending in u
    mp_float l1 = make_zero(W);              // running  h * sum |w f|  lower bound

    auto eval_level = [&](int level, std::map<long long, mp_float>& terms, long& nodes) {
        auto tbl = es_table(W, level);
        for (const ESNode& n : *tbl) {
            mp_float fv = f(n.x);
            ++nodes;
            if (fv == 0) {
                terms[node_key(n.k, level)] = make_zero(W);
                continue;
            }
            mp_float G(0, Wp);
            auto it = cumulative.upper_bound(n.x);
            if (it == cumulative.begin()) {
                // first panel reaches down to 0; tanh-sinh absorbs any
                // integrable singularity of g there
                G = integrate_finite(g, make_zero(Wp), n.x, inner_ctx, panel_tol).value;
            } else {
                --it;
                G = it->second +
                    detail::adaptive_panel(g, it->first, n.x, panel_tol, Wp, nodes);
            }
            mp_float Gw = round_to(G, W);
            cumulative.emplace(n.x, Gw);
            terms[node_key(n.k, level)] = n.w * fv * Gw;
            l1 += abs(n.w * fv) * pow(mp_float(2, W), -level);
        }
    };

    // The inner integrals contribute at most l1 * inner_tol in total (each
    // cumulative value is accurate to the accumulated panel budget).
    // l1 grows as nodes are added; recompute the inflation lazily via a
    // conservative fixed bound after convergence.
    mp_float inflation = make_zero(W);
    auto eval_with_inflation = [&](int level, std::map<long long, mp_float>& terms, long& nodes) {
        eval_level(level, terms, nodes);
        inflation = l1 * inner_tol;
    };
    return refine_levels(ctx, tol, eval_with_inflation, &inflation);
}

QuadResult integrate_simplex(const SimplexIntegrand& h, int m, const PrecisionContext& ctx,
                             const mp_float& tol_in) {
    if (m < 1 || m > 4)
        throw std::invalid_argument("integrate_simplex: dimension must be in 1..4");
    const unsigned W = ctx.working_digits;
    const mp_float tol = round_to(tol_in, W);
    const mp_float floor_rel = pow10(-static_cast<long>(W) + 8, W);

    std::vector<mp_float> coords(static_cast<size_t>(m), make_zero(W));
    long nodes = 0;

    // Axis `axis` integrates t in (0,1); `scale` is the accurately tracked
    // product prod(1-t_j) = 1 - sum of the coordinates fixed so far, and is
    // also the Jacobian factor d x_axis / d t.
    std::function<mp_float(int, const mp_float&, const mp_float&)> axis_integral =
        [&](int axis, const mp_float& scale, const mp_float& tol_axis) -> mp_float {
        auto value_at = [&](const mp_float& t, const mp_float& t_comp) -> mp_float {
            coords[static_cast<size_t>(axis)] = scale * t;
            mp_float next_scale = scale * t_comp;
            if (axis == m - 1)
                return h(std::span<const mp_float>(coords.data(), static_cast<size_t>(m)),
                         next_scale);
            return axis_integral(axis + 1, next_scale, tol_axis / 4);
        };

        std::map<long long, mp_float> terms;
        mp_float value = make_zero(W), prev = make_zero(W), est = make_zero(W);
        const mp_float one_half = make_ratio(1, 2, W);
        for (int level = 0; level <= ctx.max_refinement; ++level) {
            auto tbl = ts_table(W, level);
            for (const TSNode& n : *tbl) {
                mp_float ch = one_half * n.c; // distance to the near endpoint
                {
                    // positive t side: t near 1
                    mp_float t = 1 - ch;
                    terms[node_key(n.k, level)] = one_half * n.w * value_at(t, ch);
                    ++nodes;
                }
                if (n.k != 0) {
                    mp_float t = ch;
                    terms[node_key(-n.k, level)] = one_half * n.w * value_at(t, 1 - ch);
                    ++nodes;
                }
            }
            mp_float hstep = pow(mp_float(2, W), -level);
            mp_float sum = make_zero(W);
            for (const auto& [key, term] : terms)
                sum += term;
            value = scale * hstep * sum;
            if (level >= 1) {
                est = abs(value - prev);
                if (est <= tol_axis || est <= abs(value) * floor_rel)
                    return value;
            }
            prev = value;
        }
        throw accuracy_error("integrate_simplex: axis did not converge", value, est);
    };

    mp_float outer_tol = tol / 2;
    mp_float value = axis_integral(0, make_float(1, W), outer_tol);
    // Outer acceptance happened at outer_tol; children consumed tol/8 budget.
    QuadResult r{value, outer_tol + tol / 8, ctx.max_refinement, nodes};
    // levels_used is not tracked per axis; report the cap. Value/error are
    // what acceptance checks care about.
    return r;
}

} // namespace bmt::quad
