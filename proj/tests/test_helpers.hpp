#pragma once

#include <vector>

#include "eja/eja.hpp"

namespace ejatest {

inline std::vector<eja::AlgebraPtr> simple_families() {
    return {eja::make_classical(5), eja::make_realsym(3), eja::make_cherm(3),
            eja::make_qherm(2),     eja::make_spin(4),    eja::make_oct3()};
}

// Independent Neyman-Pearson oracle: exhaustive over all deterministic sets,
// and over all (set, boundary atom) pairs for the randomized optimum.  Kept
// free of any likelihood-ratio sorting so it cannot share a bug with the
// implementation it checks.
struct BruteNp {
    double beta_randomized;
    double beta_deterministic;
};

inline BruteNp brute_force_np(const Eigen::VectorXd& p, const Eigen::VectorXd& q, double eps) {
    const int k = static_cast<int>(p.size());
    const double target = 1.0 - eps;
    BruteNp out{1.0, 1.0};
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
        double pm = 0.0, qm = 0.0;
        for (int i = 0; i < k; ++i)
            if (mask & (1u << i)) {
                pm += p[i];
                qm += q[i];
            }
        if (pm >= target) {
            out.beta_deterministic = std::min(out.beta_deterministic, qm);
            out.beta_randomized = std::min(out.beta_randomized, qm);
        } else {
            for (int b = 0; b < k; ++b) {
                if (mask & (1u << b)) continue;
                if (pm + p[b] < target || p[b] <= 0.0) continue;
                const double gamma = (target - pm) / p[b];
                out.beta_randomized = std::min(out.beta_randomized, qm + gamma * q[b]);
            }
        }
    }
    return out;
}

// High-precision classical relative entropy, evaluated in long double.
inline double precise_classical_relative(const std::vector<long double>& p,
                                         const std::vector<long double>& q) {
    long double d = 0.0L;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0L) continue;
        d += p[i] * (std::log(p[i]) - std::log(q[i]));
    }
    return static_cast<double>(d);
}

// L_x as a dim x dim matrix on coefficients.
inline Eigen::MatrixXd multiplication_operator(const eja::Element& x) {
    const Eigen::Index n = x.algebra->dim();
    Eigen::MatrixXd L(n, n);
    Eigen::VectorXd col(n);
    for (Eigen::Index b = 0; b < n; ++b) {
        x.algebra->product_into(x.coeffs, x.algebra->basis_element(b).coeffs, col);
        L.col(b) = col;
    }
    return L;
}

}  // namespace ejatest
