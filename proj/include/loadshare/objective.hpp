#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "loadshare/errors.hpp"
#include "loadshare/koenigs.hpp"
#include "loadshare/quadrature.hpp"
#include "loadshare/root_find.hpp"

namespace loadshare {

// Exponent p with J'(x) = c * sigma(x)^p solving J'(h(x)) = r_ratio * J'(x):
// substituting sigma(h) = a * sigma gives a^p = r_ratio, p = ln(r_ratio)/ln(a).
// For a contraction (0 < a < 1), p > 0 requires r_ratio < 1: the observed
// relation must map each force to the *smaller* companion share.
inline double compute_exponent(double r_ratio, double multiplier) {
    if (!(std::isfinite(r_ratio) && r_ratio > 0.0))
        throw DomainError("moment-arm ratio must be positive and finite, got " +
                          std::to_string(r_ratio));
    if (r_ratio == 1.0)
        throw DegenerateRatio("equal moment arms (r_j/r_k = 1) leave the exponent undetermined");
    double p = std::log(r_ratio) / std::log(multiplier);
    if (!(p > 0.0))
        throw NonConvexObjective("r_j/r_k = " + std::to_string(r_ratio) + " with multiplier " +
                                 std::to_string(multiplier) + " gives exponent p = " +
                                 std::to_string(p) +
                                 " <= 0 (marginal cost would be non-increasing); "
                                 "swap the pair so the weaker muscle is the response");
    return p;
}

struct SchroderPoint {
    double x;
    double residual;    // J'(h(x)) - (r_j/r_k) * J'(x)
    double normalized;  // |residual| / max(1, J'(x))
};

struct SchroderReport {
    std::vector<SchroderPoint> points;
    double sup_abs = 0.0;
    double sup_normalized = 0.0;
};

// Reconstructed objective: J'(x) = c * sigma(x)^p, gauge-fixed by
// J'(ref_force) = 1 and J(0) = 0. J is tabulated by cumulative adaptive
// quadrature over the sigma grid and interpolated between nodes with cubic
// Hermite pieces built from the exact derivative J'.
class ObjectiveModel {
public:
    static ObjectiveModel build(const KoenigsFunction& K, double r_j, double r_k,
                                double ref_force = 1.0) {
        if (!(std::isfinite(r_j) && r_j > 0.0 && std::isfinite(r_k) && r_k > 0.0))
            throw DomainError("moment arms must be positive and finite");
        double dom = K.source().domain_max();
        if (!(std::isfinite(ref_force) && ref_force > 0.0 && ref_force <= dom))
            throw DomainError("ref_force must lie in (0, domain_max], got " +
                              std::to_string(ref_force));

        ObjectiveModel m(K);
        m.ratio_ = r_j / r_k;
        m.p_ = compute_exponent(m.ratio_, K.multiplier());
        m.ref_force_ = ref_force;
        double sref = m.koenigs_.sigma(ref_force);
        m.c_ = 1.0 / std::pow(sref, m.p_);
        if (!(std::isfinite(m.c_) && m.c_ > 0.0))
            throw RangeError("normalization c = sigma(ref_force)^-p is not representable "
                             "(p = " + std::to_string(m.p_) + ")");

        const auto& gx = m.koenigs_.grid_x();
        auto f = [&m](double u) { return m.c_ * std::pow(m.koenigs_.sigma(u), m.p_); };
        m.j_value_.assign(gx.size(), 0.0);
        m.j_value_[1] = integrate_from_zero(f, gx[1], quad_rel_tol);
        for (size_t i = 1; i + 1 < gx.size(); ++i)
            m.j_value_[i + 1] = m.j_value_[i] + integrate_cell(f, gx[i], gx[i + 1], quad_rel_tol);

        auto report = m.schroder_residual(64);
        if (!(report.sup_normalized <= 1e-6))
            throw NoConvergence("Schroder residual " + std::to_string(report.sup_normalized) +
                                " exceeds 1e-6; the Koenigs build is too shallow");
        return m;
    }

    double j_prime(double x) const {
        x = clamp_domain(x);
        if (x == 0.0) return 0.0;
        return c_ * std::pow(koenigs_.sigma(x), p_);
    }

    double j_value(double x) const {
        x = clamp_domain(x);
        if (x == 0.0) return 0.0;
        const auto& gx = koenigs_.grid_x();
        auto it = std::upper_bound(gx.begin(), gx.end(), x);
        size_t i = static_cast<size_t>(it - gx.begin()) - 1;
        if (i + 1 >= gx.size()) return j_value_.back();
        if (x == gx[i]) return j_value_[i];
        if (i == 0) {
            auto f = [this](double u) { return c_ * std::pow(koenigs_.sigma(u), p_); };
            return integrate_from_zero(f, x, quad_rel_tol);
        }
        double h = gx[i + 1] - gx[i];
        double t = (x - gx[i]) / h;
        double d0 = j_prime(gx[i]), d1 = j_prime(gx[i + 1]);
        double t2 = t * t, t3 = t2 * t;
        return j_value_[i] * (2.0 * t3 - 3.0 * t2 + 1.0) + h * d0 * (t3 - 2.0 * t2 + t) +
               j_value_[i + 1] * (-2.0 * t3 + 3.0 * t2) + h * d1 * (t3 - t2);
    }

    // Unique x with J'(x) = y, to |J'(x) - y| <= 1e-12 * max(1, y).
    double j_prime_inverse(double y) const {
        if (!std::isfinite(y) || y < 0.0)
            throw RangeError("marginal cost must be finite and >= 0, got " + std::to_string(y));
        if (y == 0.0) return 0.0;
        double dom = koenigs_.source().domain_max();
        double ymax = j_prime(dom);
        if (y > ymax * (1.0 + 1e-12))
            throw RangeError("marginal cost " + std::to_string(y) + " exceeds J'(domain_max) = " +
                             std::to_string(ymax));
        if (y >= ymax) return dom;
        auto g = [this, y](double x) { return j_prime(x) - y; };
        return brent_root(g, 0.0, dom, -y, ymax - y, 0.0, 1e-12 * std::max(1.0, y));
    }

    SchroderReport schroder_residual(int grid_size = 64) const {
        if (grid_size < 8)
            throw ValidationError("residual grid must have >= 8 points, got " +
                                  std::to_string(grid_size));
        const MonotoneMap& h = koenigs_.source();
        double dom = h.domain_max();
        SchroderReport rep;
        rep.points.reserve(grid_size);
        for (int i = 0; i < grid_size; ++i) {
            double x = dom * i / (grid_size - 1.0);
            double jp = j_prime(x);
            double res = j_prime(h.eval(x)) - ratio_ * jp;
            double norm = std::abs(res) / std::max(1.0, std::abs(jp));
            rep.points.push_back({x, res, norm});
            rep.sup_abs = std::max(rep.sup_abs, std::abs(res));
            rep.sup_normalized = std::max(rep.sup_normalized, norm);
        }
        return rep;
    }

    // Same minimizers, rescaled cost: J -> kappa * J.
    ObjectiveModel scaled(double kappa) const {
        if (!(std::isfinite(kappa) && kappa > 0.0))
            throw DomainError("scale factor must be positive and finite, got " +
                              std::to_string(kappa));
        ObjectiveModel m(*this);
        m.c_ *= kappa;
        for (double& v : m.j_value_) v *= kappa;
        return m;
    }

    const KoenigsFunction& koenigs() const noexcept { return koenigs_; }
    double p() const noexcept { return p_; }
    double c() const noexcept { return c_; }
    double ref_force() const noexcept { return ref_force_; }
    double r_ratio() const noexcept { return ratio_; }
    const std::vector<double>& j_grid_x() const noexcept { return koenigs_.grid_x(); }
    const std::vector<double>& j_grid_value() const noexcept { return j_value_; }

private:
    explicit ObjectiveModel(const KoenigsFunction& K) : koenigs_(K) {}

    static constexpr double quad_rel_tol = 1e-12;

    double clamp_domain(double x) const {
        double dom = koenigs_.source().domain_max();
        if (!(x >= 0.0 && x <= dom * (1.0 + 1e-12)))
            throw DomainError("force " + std::to_string(x) + " outside [0, " +
                              std::to_string(dom) + "]");
        return x > dom ? dom : x;
    }

    KoenigsFunction koenigs_;
    double p_ = 0.0, c_ = 0.0, ref_force_ = 0.0, ratio_ = 0.0;
    std::vector<double> j_value_;
};

inline ObjectiveModel build_objective(const KoenigsFunction& K, double r_j, double r_k,
                                      double ref_force = 1.0) {
    return ObjectiveModel::build(K, r_j, r_k, ref_force);
}

}
