#pragma once

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "loadshare/errors.hpp"

namespace loadshare {

// Brent's method on a sign-changing bracket [a, b]. Terminates when |f| <= f_tol
// or the bracket collapses below x_tol (plus the unavoidable 2*eps*|x| floor).
// The callers all pass strictly monotone continuous functions, so a root exists
// whenever the bracket signs differ.
template <class F>
double brent_root(F&& f, double a, double b, double fa, double fb,
                  double x_tol, double f_tol, int max_iter = 200) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw NoConvergence("root bracket does not change sign: f(" + std::to_string(a) + ")=" +
                            std::to_string(fa) + ", f(" + std::to_string(b) + ")=" + std::to_string(fb));

    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int iter = 0; iter < max_iter; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a; fc = fa;
            d = b - a; e = d;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * x_tol;
        double xm = 0.5 * (c - b);
        if (std::abs(fb) <= f_tol || std::abs(xm) <= tol1 || fb == 0.0) return b;

        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double s = fb / fa;
            double p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                double qq = fa / fc;
                double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            double min1 = 3.0 * xm * q - std::abs(tol1 * q);
            double min2 = std::abs(e * q);
            if (2.0 * p < (min1 < min2 ? min1 : min2)) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b; fa = fb;
        if (std::abs(d) > tol1) b += d;
        else b += (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
        if (fb == 0.0) return b;
    }
    throw NoConvergence("bracketed root search did not reach tolerance in " +
                        std::to_string(max_iter) + " iterations");
}

}
