#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "loadshare/errors.hpp"
#include "loadshare/koenigs.hpp"
#include "loadshare/objective.hpp"
#include "loadshare/root_find.hpp"

namespace loadshare {

struct SolveResult {
    std::vector<double> forces;
    double lambda = 0.0;
    double objective_value = 0.0;
};

// Minimize sum_i J(F_i) subject to sum_i r_i F_i = M, F_i in [0, domain_max].
// Stationarity J'(F_i) = lambda * r_i reduces the problem to one scalar root:
// g(lambda) = sum_i r_i J'^-1(lambda r_i) - M, strictly increasing in lambda.
inline SolveResult solve(const ObjectiveModel& objective, std::span<const double> moment_arms,
                         double moment) {
    size_t n = moment_arms.size();
    if (n < 2)
        throw ValidationError("need at least 2 muscles, got " + std::to_string(n));
    for (double r : moment_arms)
        if (!(std::isfinite(r) && r > 0.0))
            throw ValidationError("moment arms must be positive and finite");
    if (!(std::isfinite(moment) && moment >= 0.0))
        throw ValidationError("moment must be finite and >= 0, got " + std::to_string(moment));

    SolveResult result;
    result.forces.assign(n, 0.0);
    if (moment == 0.0) return result;

    double r_max = *std::max_element(moment_arms.begin(), moment_arms.end());
    double dom = objective.koenigs().source().domain_max();
    double jp_dom = objective.j_prime(dom);
    double lambda_cap = jp_dom / r_max;

    auto g = [&](double lambda) {
        double s = 0.0;
        for (double r : moment_arms) s += r * objective.j_prime_inverse(lambda * r);
        return s - moment;
    };

    double g_cap = g(lambda_cap);
    if (g_cap < 0.0)
        throw ForceOutOfDomain("moment " + std::to_string(moment) +
                               " exceeds the calibrated capacity; the largest representable "
                               "moment for these arms is " + std::to_string(g_cap + moment));

    // Geometric doubling from a mid-domain guess, capped by the multiplier
    // that parks the strongest muscle exactly at domain_max.
    double hi = std::min(objective.j_prime(0.5 * dom) / r_max, lambda_cap);
    double g_hi = g(hi);
    while (g_hi < 0.0 && hi < lambda_cap) {
        hi = std::min(2.0 * hi, lambda_cap);
        g_hi = (hi == lambda_cap) ? g_cap : g(hi);
    }
    double lambda = brent_root(g, 0.0, hi, -moment, g_hi, 0.0, 1e-10 * std::max(1.0, moment));

    result.lambda = lambda;
    for (size_t i = 0; i < n; ++i)
        result.forces[i] = objective.j_prime_inverse(lambda * moment_arms[i]);
    for (size_t i = 0; i < n; ++i) result.objective_value += objective.j_value(result.forces[i]);
    return result;
}

struct SweepRow {
    double moment = 0.0;
    SolveResult solution;
    bool ok = false;
    std::string error_kind;
    std::string error_message;
};

// One solve per moment; failures (typically ForceOutOfDomain past the
// calibrated capacity) degrade row by row instead of aborting the sweep.
inline std::vector<SweepRow> solve_sweep(const ObjectiveModel& objective,
                                         std::span<const double> moment_arms,
                                         std::span<const double> moments) {
    std::vector<SweepRow> rows;
    rows.reserve(moments.size());
    for (double m : moments) {
        SweepRow row;
        row.moment = m;
        try {
            row.solution = solve(objective, moment_arms, m);
            row.ok = true;
        } catch (const Error& e) {
            row.error_kind = e.kind();
            row.error_message = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

struct CurvePoint {
    double moment = 0.0;
    double f_k = 0.0;
    double f_j = 0.0;
    bool ok = false;
    std::string error_kind;
};

// The (F_k, F_j) locus traced by the constrained minimizer as M varies.
inline std::vector<CurvePoint> sharing_curve(const ObjectiveModel& objective,
                                             std::span<const double> moment_arms, size_t j,
                                             size_t k, std::span<const double> moments) {
    if (j >= moment_arms.size() || k >= moment_arms.size() || j == k)
        throw ValidationError("sharing_curve needs two distinct valid muscle indices");
    std::vector<CurvePoint> pts;
    pts.reserve(moments.size());
    for (double m : moments) {
        CurvePoint pt;
        pt.moment = m;
        try {
            SolveResult sol = solve(objective, moment_arms, m);
            pt.f_k = sol.forces[k];
            pt.f_j = sol.forces[j];
            pt.ok = true;
        } catch (const Error& e) {
            pt.error_kind = e.kind();
        }
        pts.push_back(std::move(pt));
    }
    return pts;
}

struct PairPoint {
    double f_k = 0.0;
    double f_m = 0.0;
    bool ok = false;
    std::string error_kind;
};

struct PairPrediction {
    double t = 0.0;
    std::vector<PairPoint> points;
};

// Sharing between muscle m and reference muscle k, predicted from the relation
// observed for pair (j, k) alone: F_m = h_t(F_k) with t = ln(r_m/r_k)/ln(r_j/r_k),
// where h_t is the fractional iterate through the Koenigs linearization.
inline PairPrediction predict_pair_sharing(const KoenigsFunction& K, double r_m, double r_j,
                                           double r_k, std::span<const double> f_k_grid) {
    for (double r : {r_m, r_j, r_k})
        if (!(std::isfinite(r) && r > 0.0))
            throw ValidationError("moment arms must be positive and finite");
    if (r_j == r_k)
        throw DegenerateRatio("r_j = r_k: the observed pair carries no exponent information");
    PairPrediction out;
    out.t = std::log(r_m / r_k) / std::log(r_j / r_k);
    out.points.reserve(f_k_grid.size());
    for (double x : f_k_grid) {
        PairPoint pt;
        pt.f_k = x;
        try {
            pt.f_m = K.fractional_iterate(out.t, x);
            pt.ok = true;
        } catch (const Error& e) {
            pt.error_kind = e.kind();
        }
        out.points.push_back(std::move(pt));
    }
    return out;
}

}
