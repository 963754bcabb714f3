// End-to-end walkthrough: synthesize a Möbius sharing relation, fit it from
// samples, reconstruct the objective, sweep the constrained solver, and
// compare a third muscle's predicted locus against the forward solve.
#include <cstdio>

#include "loadshare/loadshare.hpp"

int main() {
    using namespace loadshare;

    const double a = 0.5, b = 1.0, dom = 2.0;
    MonotoneMap truth = MonotoneMap::moebius(a, b, dom);

    std::vector<std::array<double, 2>> samples;
    for (int i = 1; i <= 9; ++i) {
        double x = dom * i / 9.0;
        samples.push_back({x, truth.eval(x)});
    }
    MonotoneMap fitted = MonotoneMap::make_tabulated(samples);
    std::printf("fitted slope at zero: %.6f (generator: %.6f)\n",
                fitted.derivative_at_zero(), a);

    KoenigsFunction K = koenigs_build(truth);
    std::printf("Koenigs build: n_used=%d sup_residual=%.3e\n", K.n_used(), K.sup_residual());

    const double r[3] = {4.0, 2.0, 1.0};  // reference k = r[0], response j = r[2], m between
    ObjectiveModel obj = build_objective(K, r[2], r[0]);
    std::printf("exponent p = %.6f, J'(1) = %.6f\n", obj.p(), obj.j_prime(1.0));

    std::printf("\n%8s %10s %10s %10s %12s\n", "M", "F_a", "F_b", "F_c", "K");
    std::vector<double> arms(r, r + 3);
    for (int i = 0; i <= 8; ++i) {
        double M = 3.0 * i / 8.0;
        SolveResult sol = solve(obj, arms, M);
        std::printf("%8.3f %10.6f %10.6f %10.6f %12.6e\n", M, sol.forces[0], sol.forces[1],
                    sol.forces[2], sol.objective_value);
    }

    std::printf("\nthird-muscle prediction vs forward solve:\n");
    double worst = 0.0;
    for (int i = 1; i <= 8; ++i) {
        double M = 3.0 * i / 8.0;
        SolveResult sol = solve(obj, arms, M);
        double predicted = K.fractional_iterate(std::log(r[1] / r[0]) / std::log(r[2] / r[0]),
                                                sol.forces[0]);
        worst = std::max(worst, std::abs(predicted - sol.forces[1]));
    }
    std::printf("sup |F_m(predicted) - F_m(solved)| = %.3e\n", worst);

    SchroderReport rep = obj.schroder_residual();
    std::printf("Schroder residual sup (normalized) = %.3e\n", rep.sup_normalized);
    return 0;
}
