#pragma once

#include "eja/embedding.hpp"
#include "eja/entropy.hpp"

namespace eja {

// Randomized verification of an embedding: homomorphism and duality residuals,
// preservation of relative and sandwiched Renyi entropies, and the observed
// von Neumann entropy shift H(psi(rho)) - H(rho).  The shift is reported, not
// asserted: multiplicity inflation in the image makes it nonzero by design.
struct EmbeddingReport {
    double hom_residual = 0.0;
    double duality_residual = 0.0;
    double gram_min_eig = 0.0;
    double d_preservation_max_err = 0.0;
    double srr_preservation_max_err = 0.0;
    double h_shift_observed = 0.0;
    int trials = 0;
};

inline EmbeddingReport verify_embedding(const Embedding& emb, int trials,
                                        const std::vector<double>& s_grid, double tol,
                                        std::uint64_t seed) {
    if (trials < 1) throw ValidationError("verify_embedding needs trials >= 1");
    Rng rng(seed);
    EmbeddingReport rep;
    rep.trials = trials;
    rep.hom_residual = homomorphism_residual(emb);

    const Eigen::Index d = emb.source->dim();
    Eigen::MatrixXd gram(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i; j < d; ++j)
            gram(i, j) = gram(j, i) = inner(emb.basis_images[i], emb.basis_images[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    rep.gram_min_eig = es.eigenvalues().minCoeff();

    for (int t = 0; t < trials; ++t) {
        // Canonicity probe: phi* o psi is the identity on cone elements.
        // (phi* o phi is a scalar multiple instead whenever the matrix trace
        // inflates the source inner product, e.g. Spin(4) on two qubits.)
        Element x = random_cone_element(emb.source, rng);
        rep.duality_residual =
            std::max(rep.duality_residual, norm(pull_back(emb, push_state(emb, x)) - x));

        const State rho{random_state_element(emb.source, rng)};
        const State sigma{random_state_element(emb.source, rng)};
        const State qrho{push_state(emb, rho.element)};
        const State qsigma{push_state(emb, sigma.element)};

        rep.d_preservation_max_err =
            std::max(rep.d_preservation_max_err,
                     std::abs(relative_entropy(rho, sigma, tol) -
                              relative_entropy(qrho, qsigma, tol)));
        for (double s : s_grid)
            rep.srr_preservation_max_err =
                std::max(rep.srr_preservation_max_err,
                         std::abs(srr(rho, sigma, s, tol) - srr(qrho, qsigma, s, tol)));
        rep.h_shift_observed = std::max(
            rep.h_shift_observed, std::abs(vn_entropy(qrho, tol) - vn_entropy(rho, tol)));
    }
    return rep;
}

}  // namespace eja
