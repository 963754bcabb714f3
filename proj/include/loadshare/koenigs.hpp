#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "loadshare/errors.hpp"
#include "loadshare/monotone_map.hpp"
#include "loadshare/root_find.hpp"

namespace loadshare {

// n-fold composition h(h(...h(x)...)).
inline double iterate(const MonotoneMap& h, int n, double x) {
    if (n < 0) throw ValidationError("iteration count must be >= 0, got " + std::to_string(n));
    double y = x;
    for (int i = 0; i < n; ++i) y = h.eval(y);
    return y;
}

struct KoenigsOptions {
    int grid_size = 257;   // cached sigma grid, geometrically graded toward 0
    double tol = 1e-10;    // relative sup-norm stop tolerance between sweeps
    int n_max = 64;        // hard iteration cap
    int n_min = 10;        // never stop before this depth (n_min = n_max forces a depth)
};

// Koenigs linearizer sigma of a contraction h: sigma(h(x)) = h'(0) * sigma(x),
// sigma(0) = 0, sigma'(0) = 1. Computed from normalized iterates
// q_n = h^n(x)/h'(0)^n, whose error is a geometric series in h'(0)^n; two
// Richardson levels with that known ratio strip the leading terms, which is
// what makes depth ~10 usable. Evaluation away from the cached grid re-runs
// the same iteration at the query point, so accuracy does not degrade to the
// interpolation error of the grid.
class KoenigsFunction {
public:
    static KoenigsFunction build(const MonotoneMap& h, const KoenigsOptions& opts = {}) {
        validate(opts);
        KoenigsFunction K(h);

        const int N = opts.grid_size;
        const double dom = h.domain_max();
        K.grid_x_.resize(N);
        K.grid_x_[0] = 0.0;
        for (int i = 1; i < N; ++i)
            K.grid_x_[i] = dom * std::pow(grid_min_frac, double(N - 1 - i) / double(N - 2));
        K.grid_x_[N - 1] = dom;

        std::vector<double> y(K.grid_x_), q(K.grid_x_);
        std::vector<double> q1(N, 0.0), q2(N, 0.0);
        std::vector<double> sigma_prev(N, 0.0), sigma_now(N, 0.0);
        double residual = std::numeric_limits<double>::infinity();
        double residual_prev = std::numeric_limits<double>::infinity();
        int n_stop = 0;
        for (int n = 1; n <= opts.n_max; ++n) {
            for (int i = 1; i < N; ++i) {
                q2[i] = q1[i];
                q1[i] = q[i];
                advance(K.h_, K.a_, y[i], q[i]);
            }
            for (int i = 1; i < N; ++i)
                sigma_now[i] = extrapolate(q2[i], q1[i], q[i], K.a_, n);
            if (n >= 2) {
                residual_prev = residual;
                residual = 0.0;
                for (int i = 1; i < N; ++i) {
                    double diff = std::abs(sigma_now[i] - sigma_prev[i]) /
                                  std::max(1.0, std::abs(sigma_now[i]));
                    residual = std::max(residual, diff);
                }
            }
            sigma_prev.swap(sigma_now);
            if (n >= opts.n_min && residual < opts.tol) {
                n_stop = n;
                break;
            }
        }
        if (n_stop == 0) {
            std::ostringstream msg;
            msg << "Koenigs sequence residual " << residual << " >= tol " << opts.tol
                << " at n_max = " << opts.n_max
                << (residual < residual_prev ? " (residual still decreasing; raise n_max)"
                                             : " (residual stagnated)");
            throw NoConvergence(msg.str());
        }
        K.n_used_ = n_stop;
        K.sup_residual_ = residual;
        K.grid_sigma_ = std::move(sigma_prev);
        K.grid_sigma_[0] = 0.0;
        K.verify_invariants();
        return K;
    }

    // sigma at an arbitrary point, by direct iteration to the build's depth.
    double sigma(double x) const {
        check_domain(x);
        if (x > h_.domain_max()) x = h_.domain_max();
        return sigma_at(x);
    }

    // Unique x in [0, domain_max] with sigma(x) = s, to |sigma(x) - s| <= 1e-12 * max(1, s).
    double sigma_inverse(double s) const {
        double smax = grid_sigma_.back();
        if (!(s >= 0.0 && s <= smax * (1.0 + 1e-12)))
            throw RangeError("target " + std::to_string(s) + " outside the image [0, " +
                             std::to_string(smax) + "] of sigma");
        if (s > smax) s = smax;
        if (s == 0.0) return 0.0;
        if (s == smax) return h_.domain_max();
        auto it = std::upper_bound(grid_sigma_.begin(), grid_sigma_.end(), s);
        size_t hi = std::min<size_t>(it - grid_sigma_.begin(), grid_sigma_.size() - 1);
        size_t lo = hi - 1;
        // Bracket endpoints are re-evaluated directly; if direct evaluation and
        // the cached grid disagree by an ulp around a node hit, the node itself
        // already satisfies the contract.
        double f_tol = 1e-12 * std::max(1.0, s);
        double flo = sigma_at(grid_x_[lo]) - s;
        if (flo >= 0.0) return grid_x_[lo];
        double fhi = sigma_at(grid_x_[hi]) - s;
        if (fhi <= 0.0) return grid_x_[hi];
        auto f = [this, s](double x) { return sigma_at(x) - s; };
        return brent_root(f, grid_x_[lo], grid_x_[hi], flo, fhi, 0.0, f_tol);
    }

    // h_t(x) = sigma^-1(h'(0)^t * sigma(x)): the t-th fractional iterate.
    // Integer t >= 0 short-circuits to plain composition.
    double fractional_iterate(double t, double x) const {
        if (!std::isfinite(t)) throw ValidationError("iterate order t must be finite");
        check_domain(x);
        if (t == 0.0) return x;
        if (t > 0.0 && t <= 1e6 && t == std::floor(t))
            return iterate(h_, static_cast<int>(t), x);
        double s = std::pow(a_, t) * sigma_at(x);
        double smax = grid_sigma_.back();
        if (s > smax * (1.0 + 1e-12))
            throw RangeError("fractional iterate with t = " + std::to_string(t) + " at x = " +
                             std::to_string(x) + " leaves the calibrated range");
        return sigma_inverse(std::min(s, smax));
    }

    const MonotoneMap& source() const noexcept { return h_; }
    double multiplier() const noexcept { return a_; }
    const std::vector<double>& grid_x() const noexcept { return grid_x_; }
    const std::vector<double>& grid_sigma() const noexcept { return grid_sigma_; }
    double sigma_max() const noexcept { return grid_sigma_.back(); }
    int n_used() const noexcept { return n_used_; }
    double sup_residual() const noexcept { return sup_residual_; }

private:
    explicit KoenigsFunction(const MonotoneMap& h) : h_(h), a_(h.derivative_at_zero()) {}

    static constexpr double grid_min_frac = 1e-5;

    static void validate(const KoenigsOptions& o) {
        if (o.grid_size < 16)
            throw ValidationError("grid_size must be >= 16, got " + std::to_string(o.grid_size));
        if (o.n_max < 3)
            throw ValidationError("n_max must be >= 3, got " + std::to_string(o.n_max));
        if (o.n_min < 3 || o.n_min > o.n_max)
            throw ValidationError("n_min must lie in [3, n_max], got " + std::to_string(o.n_min));
        if (!(o.tol > 0.0))
            throw ValidationError("tol must be positive");
    }

    // One normalized-iterate step: q <- q * h(y)/(a*y), y <- h(y). The ratio
    // form never materializes h^n or a^n, so nothing underflows; once y is tiny
    // the ratio is 1.0 to machine precision and the point is left frozen.
    static void advance(const MonotoneMap& h, double a, double& y, double& q) {
        if (y <= 0.0 || y < 1e-250) return;
        double hy = h.eval(y);
        q *= hy / (a * y);
        y = hy;
    }

    // Two Richardson levels in the known ratio a^n on the last three
    // normalized iterates. Exact agreement of all three means the sequence
    // has converged to machine precision; extrapolating would only add noise.
    static double extrapolate(double q_nm2, double q_nm1, double q_n, double a, int n) {
        if (n == 1) return q_n;
        if (q_n == q_nm1 && q_nm1 == q_nm2) return q_n;
        double r1 = (q_n - a * q_nm1) / (1.0 - a);
        if (n == 2) return r1;
        double r1p = (q_nm1 - a * q_nm2) / (1.0 - a);
        return (r1 - a * a * r1p) / (1.0 - a * a);
    }

    double sigma_at(double x) const {
        if (x == 0.0) return 0.0;
        double y = x, q = x;
        double q1 = 0.0, q2 = 0.0;
        for (int n = 1; n <= n_used_; ++n) {
            q2 = q1;
            q1 = q;
            advance(h_, a_, y, q);
        }
        return extrapolate(q2, q1, q, a_, n_used_);
    }

    void check_domain(double x) const {
        if (!(x >= 0.0 && x <= h_.domain_max() * (1.0 + 1e-12)))
            throw DomainError("argument " + std::to_string(x) + " outside [0, " +
                              std::to_string(h_.domain_max()) + "]");
    }

    void verify_invariants() const {
        for (size_t i = 0; i + 1 < grid_sigma_.size(); ++i)
            if (!(grid_sigma_[i] < grid_sigma_[i + 1]))
                throw NoConvergence("sigma estimate is not strictly increasing near x = " +
                                    std::to_string(grid_x_[i + 1]) + "; raise n_max or tol");
        double s1 = grid_sigma_[1] / grid_x_[1];
        if (!(std::abs(s1 - 1.0) <= 1e-3))
            throw NoConvergence("sigma'(0) = " + std::to_string(s1) +
                                " deviates from 1 by more than 1e-3");
        for (size_t i = 0; i < grid_x_.size(); ++i) {
            double defect = std::abs(sigma_at(h_.eval(grid_x_[i])) - a_ * grid_sigma_[i]);
            if (!(defect <= 1e-8 * std::max(1.0, std::abs(grid_sigma_[i]))))
                throw NoConvergence("conjugation defect " + std::to_string(defect) + " at x = " +
                                    std::to_string(grid_x_[i]) + " exceeds 1e-8");
        }
    }

    MonotoneMap h_;
    double a_;
    std::vector<double> grid_x_, grid_sigma_;
    int n_used_ = 0;
    double sup_residual_ = 0.0;
};

inline KoenigsFunction koenigs_build(const MonotoneMap& h, const KoenigsOptions& opts = {}) {
    return KoenigsFunction::build(h, opts);
}

}
