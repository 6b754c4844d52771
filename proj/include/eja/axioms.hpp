#pragma once

#include <cstdint>
#include <limits>

#include "eja/sampling.hpp"

namespace eja {

// Worst residuals of the Jordan-algebra axioms over randomized trials.
// J1: commutativity, J2: the Jordan identity x^2 o (x o y) = x o (x^2 o y),
// J3: associativity of the inner product.
struct AxiomReport {
    double max_residual_j1 = 0.0;
    double max_residual_j2 = 0.0;
    double max_residual_j3 = 0.0;
    double max_cone_violation = 0.0;
    int trials = 0;
};

inline AxiomReport check_axioms(const AlgebraPtr& alg, int trials, double tol, std::uint64_t seed) {
    if (trials < 1) throw ValidationError("check_axioms needs trials >= 1");
    Rng rng(seed);
    AxiomReport rep;
    rep.trials = trials;
    for (int t = 0; t < trials; ++t) {
        Element x = random_element(alg, rng);
        Element y = random_element(alg, rng);
        Element z = random_element(alg, rng);

        rep.max_residual_j1 =
            std::max(rep.max_residual_j1, norm(jordan_product(x, y) - jordan_product(y, x)));

        Element xx = jordan_product(x, x);
        Element lhs = jordan_product(xx, jordan_product(x, y));
        Element rhs = jordan_product(x, jordan_product(xx, y));
        rep.max_residual_j2 = std::max(rep.max_residual_j2, norm(lhs - rhs));

        rep.max_residual_j3 =
            std::max(rep.max_residual_j3,
                     std::abs(inner(jordan_product(x, y), z) - inner(x, jordan_product(y, z))));

        try {
            const double mineig = cone_min_eig(jordan_product(z, z), tol);
            rep.max_cone_violation = std::max(rep.max_cone_violation, std::max(0.0, -mineig));
        } catch (const Error&) {
            // Spectral machinery can legitimately refuse on composites whose
            // power-associativity is exactly what this probe measures.
            rep.max_cone_violation = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return rep;
}

}  // namespace eja
