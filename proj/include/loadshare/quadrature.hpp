#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "loadshare/errors.hpp"

namespace loadshare {

namespace detail {

template <class F>
double adapt_simpson(F& f, double a, double fa, double m, double fm, double b, double fb,
                     double whole, double tol, int depth, int max_depth) {
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    double flm = f(lm);
    double frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    if (depth >= max_depth)
        throw QuadratureFailure("adaptive Simpson refinement exceeded depth " +
                                std::to_string(max_depth) + " on [" + std::to_string(a) + ", " +
                                std::to_string(b) + "]");
    return adapt_simpson(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1, max_depth) +
           adapt_simpson(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1, max_depth);
}

}

// Adaptive Simpson with the /15 Richardson correction; absolute tolerance.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double abs_tol, int max_depth = 30) {
    if (a == b) return 0.0;
    double fa = f(a);
    double m = 0.5 * (a + b);
    double fm = f(m);
    double fb = f(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double tol = std::max(std::abs(abs_tol), 1e-300);
    return detail::adapt_simpson(f, a, fa, m, fm, b, fb, whole, tol, 0, max_depth);
}

// Fixed composite Simpson, used only to estimate the scale of an integral
// before choosing an absolute tolerance.
template <class F>
double composite_simpson(F&& f, double a, double b, int panels) {
    double h = (b - a) / panels;
    double sum = 0.0;
    double fl = f(a);
    for (int i = 0; i < panels; ++i) {
        double xr = (i + 1 == panels) ? b : a + (i + 1) * h;
        double xm = 0.5 * (a + i * h + xr);
        double fr = f(xr);
        sum += (xr - (a + i * h)) / 6.0 * (fl + 4.0 * f(xm) + fr);
        fl = fr;
    }
    return sum;
}

// Integral of f over [a, b] to a relative tolerance (scale taken from a coarse pass).
template <class F>
double integrate_cell(F&& f, double a, double b, double rel_tol, int max_depth = 30) {
    if (a == b) return 0.0;
    double rough = composite_simpson(f, a, b, 8);
    double tol = rel_tol * std::max(std::abs(rough), 1e-300);
    return adaptive_simpson(std::forward<F>(f), a, b, tol, max_depth);
}

// Integral of f over [0, x] for integrands behaving like C*u^q (q > 0) near the
// origin. Substituting u = e^w turns the power decay into an exponential one;
// the truncated lower tail below x*e^-40 contributes a relative error under
// e^(-40(q+1)) <= 4e-18 for q > 0, far below the quadrature tolerance.
template <class F>
double integrate_from_zero(F&& f, double x, double rel_tol, int max_depth = 30) {
    if (x == 0.0) return 0.0;
    double w1 = std::log(x);
    double w0 = w1 - 40.0;
    auto g = [&f](double w) {
        double u = std::exp(w);
        return f(u) * u;
    };
    double rough = composite_simpson(g, w0, w1, 32);
    double tol = rel_tol * std::max(std::abs(rough), 1e-300);
    return adaptive_simpson(g, w0, w1, tol, max_depth);
}

}
