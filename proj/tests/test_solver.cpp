#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "loadshare/koenigs.hpp"
#include "loadshare/monotone_map.hpp"
#include "loadshare/objective.hpp"
#include "loadshare/solver.hpp"

using loadshare::build_objective;
using loadshare::koenigs_build;
using loadshare::MonotoneMap;
using loadshare::ObjectiveModel;
using loadshare::predict_pair_sharing;
using loadshare::sharing_curve;
using loadshare::solve;
using loadshare::solve_sweep;
using loadshare::SolveResult;

namespace {

void expect_optimal(const ObjectiveModel& obj, const std::vector<double>& arms, double M,
                    const SolveResult& sol) {
    double total = 0.0;
    for (size_t i = 0; i < arms.size(); ++i) {
        total += arms[i] * sol.forces[i];
        double target = sol.lambda * arms[i];
        EXPECT_LE(std::abs(obj.j_prime(sol.forces[i]) - target), 1e-9 * std::max(1.0, target));
    }
    EXPECT_LE(std::abs(total - M), 1e-9 * std::max(1.0, M));
}

}

TEST(Solve, LinearStationarityClosedForm) {
    // p = 1 makes J'(x) = x, so F_i = lambda r_i and M = lambda sum r_i^2.
    auto K = koenigs_build(MonotoneMap::linear(0.5, 4.0));
    auto obj = build_objective(K, 0.5, 1.0);
    std::vector<double> arms{1.0, 2.0};
    auto sol = solve(obj, arms, 5.0);
    EXPECT_NEAR(sol.lambda, 1.0, 1e-9);
    EXPECT_NEAR(sol.forces[0], 1.0, 1e-9);
    EXPECT_NEAR(sol.forces[1], 2.0, 1e-9);
    EXPECT_NEAR(sol.objective_value, 0.5 + 2.0, 1e-8);
}

TEST(Solve, QuadraticStationarityClosedForm) {
    // p = 2 makes J'(x) = x^2, so F_i = sqrt(lambda r_i).
    auto K = koenigs_build(MonotoneMap::linear(0.5, 4.0));
    auto obj = build_objective(K, 0.25, 1.0);
    std::vector<double> arms{1.0, 4.0};
    auto sol = solve(obj, arms, 9.0);
    EXPECT_NEAR(sol.lambda, 1.0, 1e-9);
    EXPECT_NEAR(sol.forces[0], 1.0, 1e-9);
    EXPECT_NEAR(sol.forces[1], 2.0, 1e-9);
}

TEST(Solve, ZeroMomentGivesZeroForces) {
    auto K = koenigs_build(MonotoneMap::moebius(0.5, 1.0, 2.0));
    auto obj = build_objective(K, 0.25, 1.0);
    std::vector<double> arms{1.0, 2.0, 3.0};
    auto sol = solve(obj, arms, 0.0);
    EXPECT_EQ(sol.lambda, 0.0);
    EXPECT_EQ(sol.objective_value, 0.0);
    for (double f : sol.forces) EXPECT_EQ(f, 0.0);
}

TEST(Solve, InputValidation) {
    auto K = koenigs_build(MonotoneMap::linear(0.5, 2.0));
    auto obj = build_objective(K, 0.5, 1.0);
    std::vector<double> one{1.0};
    EXPECT_THROW(solve(obj, one, 1.0), loadshare::ValidationError);
    std::vector<double> neg{1.0, -2.0};
    EXPECT_THROW(solve(obj, neg, 1.0), loadshare::ValidationError);
    std::vector<double> arms{1.0, 2.0};
    EXPECT_THROW(solve(obj, arms, -1.0), loadshare::ValidationError);
    EXPECT_THROW(solve(obj, arms, 1e9), loadshare::ForceOutOfDomain);
}

TEST(Solve, OptimalityAcrossMapsAndRatios) {
    std::vector<MonotoneMap> maps;
    maps.push_back(MonotoneMap::linear(0.5, 2.0));
    maps.push_back(MonotoneMap::moebius(0.5, 1.0, 2.0));
    maps.push_back(MonotoneMap::moebius(0.6, 0.8, 2.0));
    std::vector<double> arms{0.7, 1.3, 2.1};
    for (const auto& h : maps) {
        auto K = koenigs_build(h);
        for (double ratio : {0.25, 0.5, 0.75}) {
            auto obj = build_objective(K, ratio, 1.0);
            double cap = 0.0;  // conservative lower bound for the feasible moment
            double lam_cap = obj.j_prime(2.0) / 2.1;
            for (double r : arms) cap += r * obj.j_prime_inverse(lam_cap * r);
            for (int i = 1; i <= 7; ++i) {
                double M = 0.92 * cap * i / 7.0;
                expect_optimal(obj, arms, M, solve(obj, arms, M));
            }
        }
    }
}

TEST(Solve, ReproducesObservedSharingRelation) {
    // the defining property: at any load, the two forces lie on the curve
    // F_j = h(F_k) that the objective was reconstructed from
    auto h = MonotoneMap::moebius(0.5, 1.0, 2.0);
    auto K = koenigs_build(h);
    auto obj = build_objective(K, 0.5, 1.0);  // r_j / r_k = 0.5
    std::vector<double> arms{1.0, 2.0};       // j = 0 (weak), k = 1 (strong)
    double lam_cap = obj.j_prime(2.0) / 2.0;
    double cap = 1.0 * obj.j_prime_inverse(lam_cap) + 2.0 * 2.0;
    for (int i = 0; i <= 10; ++i) {
        double M = 0.95 * cap * i / 10.0;
        auto sol = solve(obj, arms, M);
        EXPECT_LE(std::abs(sol.forces[0] - h.eval(sol.forces[1])),
                  1e-6 * std::max(1.0, sol.forces[1]));
    }
}

TEST(SolveSweep, FlagsInfeasibleRowsInsteadOfThrowing) {
    auto K = koenigs_build(MonotoneMap::linear(0.5, 2.0));
    auto obj = build_objective(K, 0.5, 1.0);
    std::vector<double> arms{1.0, 2.0};
    std::vector<double> moments{0.0, 1.0, 1e9};
    auto rows = solve_sweep(obj, arms, moments);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_TRUE(rows[0].ok);
    EXPECT_TRUE(rows[1].ok);
    EXPECT_FALSE(rows[2].ok);
    EXPECT_EQ(rows[2].error_kind, "ForceOutOfDomain");
    EXPECT_FALSE(rows[2].error_message.empty());
}

TEST(SharingCurve, TracksSolutionLocus) {
    auto K = koenigs_build(MonotoneMap::linear(0.5, 2.0));
    auto obj = build_objective(K, 0.5, 1.0);
    std::vector<double> arms{1.0, 2.0};
    std::vector<double> moments{0.0, 1.0, 2.0};
    auto pts = sharing_curve(obj, arms, 0, 1, moments);
    ASSERT_EQ(pts.size(), 3u);
    EXPECT_TRUE(pts[0].ok);
    EXPECT_EQ(pts[0].f_j, 0.0);
    EXPECT_EQ(pts[0].f_k, 0.0);
    for (const auto& pt : pts) {
        if (!pt.ok) continue;
        EXPECT_NEAR(pt.f_j, 0.5 * pt.f_k, 1e-9);  // p = 1 linear splits by arm ratio
    }
    EXPECT_THROW(sharing_curve(obj, arms, 1, 1, moments), loadshare::ValidationError);
    EXPECT_THROW(sharing_curve(obj, arms, 0, 5, moments), loadshare::ValidationError);
}

TEST(PredictPairSharing, DegenerateAndIdentityCases) {
    auto K = koenigs_build(MonotoneMap::moebius(0.5, 1.0, 2.0));
    std::vector<double> grid{0.0, 0.5, 1.0, 1.5, 2.0};
    EXPECT_THROW(predict_pair_sharing(K, 1.0, 2.0, 2.0, grid), loadshare::DegenerateRatio);
    EXPECT_THROW(predict_pair_sharing(K, -1.0, 1.0, 2.0, grid), loadshare::ValidationError);

    auto same_as_j = predict_pair_sharing(K, 1.0, 1.0, 2.0, grid);
    EXPECT_EQ(same_as_j.t, 1.0);
    for (const auto& pt : same_as_j.points) {
        ASSERT_TRUE(pt.ok);
        EXPECT_EQ(pt.f_m, K.source().eval(pt.f_k));
    }

    auto same_as_k = predict_pair_sharing(K, 2.0, 1.0, 2.0, grid);
    EXPECT_EQ(same_as_k.t, 0.0);
    for (const auto& pt : same_as_k.points) {
        ASSERT_TRUE(pt.ok);
        EXPECT_EQ(pt.f_m, pt.f_k);
    }
}

TEST(PredictPairSharing, HalfStepOnLinearMap) {
    auto K = koenigs_build(MonotoneMap::linear(0.5, 2.0));
    std::vector<double> grid{0.2, 0.8, 1.4, 2.0};
    auto pred = predict_pair_sharing(K, std::sqrt(0.5), 0.5, 1.0, grid);
    EXPECT_NEAR(pred.t, 0.5, 1e-15);
    for (const auto& pt : pred.points) {
        ASSERT_TRUE(pt.ok);
        EXPECT_NEAR(pt.f_m, std::sqrt(0.5) * pt.f_k, 1e-9);
    }
}

TEST(PredictPairSharing, OutOfRangePointsAreFlagged) {
    // t = ln(0.5)/ln(2) = -1 runs the map backwards, which leaves the domain
    // for large reference forces; those points degrade instead of throwing
    auto K = koenigs_build(MonotoneMap::linear(0.5, 2.0));
    std::vector<double> grid{0.5, 1.5};
    auto pred = predict_pair_sharing(K, 0.5, 2.0, 1.0, grid);
    EXPECT_NEAR(pred.t, -1.0, 1e-15);
    ASSERT_EQ(pred.points.size(), 2u);
    EXPECT_TRUE(pred.points[0].ok);
    EXPECT_NEAR(pred.points[0].f_m, 1.0, 1e-9);
    EXPECT_FALSE(pred.points[1].ok);
    EXPECT_EQ(pred.points[1].error_kind, "RangeError");
}

TEST(PredictPairSharing, ThirdMuscleMatchesFullSolve) {
    // reconstruct from the (r=1, r=4) pair, predict the r=2 muscle, and check
    // against directly solved three-muscle problems
    auto K = koenigs_build(MonotoneMap::moebius(0.5, 1.0, 2.0));
    auto obj = build_objective(K, 0.25, 1.0);
    std::vector<double> arms{4.0, 2.0, 1.0};
    std::vector<double> fk;
    std::vector<double> fm;
    for (int i = 1; i <= 9; ++i) {
        double M = 1.0 * i;  // capacity is above 9.3 for these arms
        auto sol = solve(obj, arms, M);
        fk.push_back(sol.forces[0]);
        fm.push_back(sol.forces[1]);
    }
    auto pred = predict_pair_sharing(K, 2.0, 1.0, 4.0, fk);
    EXPECT_NEAR(pred.t, 0.5, 1e-15);
    for (size_t i = 0; i < fk.size(); ++i) {
        ASSERT_TRUE(pred.points[i].ok);
        EXPECT_LE(std::abs(pred.points[i].f_m - fm[i]), 1e-8 * std::max(1.0, fm[i]));
    }
}

TEST(Solve, PerturbationsNeverImproveObjective) {
    auto K = koenigs_build(MonotoneMap::moebius(0.5, 1.0, 2.0));
    auto obj = build_objective(K, 0.25, 1.0);
    std::vector<double> arms{1.0, 2.0};
    double M = 3.0;
    auto sol = solve(obj, arms, M);
    double best = sol.objective_value;
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> delta(-0.2, 0.2);
    int tested = 0;
    for (int trial = 0; trial < 200 && tested < 50; ++trial) {
        double d = delta(rng);
        double f0 = sol.forces[0] + d;
        double f1 = sol.forces[1] - d * arms[0] / arms[1];
        if (f0 < 0.0 || f1 < 0.0 || f0 > 2.0 || f1 > 2.0) continue;
        ++tested;
        double value = obj.j_value(f0) + obj.j_value(f1);
        EXPECT_GE(value, best - 1e-12 * std::max(1.0, best));
    }
    EXPECT_EQ(tested, 50);
}

TEST(Solve, ScaledObjectiveKeepsForces) {
    auto K = koenigs_build(MonotoneMap::moebius(0.6, 0.8, 2.0));
    auto obj = build_objective(K, 0.5, 1.0);
    auto big = obj.scaled(7.0);
    std::vector<double> arms{1.0, 2.0};
    for (double M : {0.5, 1.5, 3.0}) {
        auto a = solve(obj, arms, M);
        auto b = solve(big, arms, M);
        for (size_t i = 0; i < arms.size(); ++i)
            EXPECT_LE(std::abs(a.forces[i] - b.forces[i]), 1e-9 * std::max(1.0, a.forces[i]));
        EXPECT_NEAR(b.lambda / a.lambda, 7.0, 1e-6);
    }
}
