#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace eja;
using Catch::Approx;

namespace {
Eigen::MatrixXcd kron2(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return detail::kron(a, b);
}
}  // namespace

TEST_CASE("Jordan-Wigner strings") {
    // n=1: lambda_1 = sigma1, lambda_2 = sigma2
    const auto l1 = jw_lambdas(1, false);
    REQUIRE(l1.size() == 2);
    CHECK((cherm_to_matrix(l1[0]) - detail::pauli(1)).norm() < 1e-14);
    CHECK((cherm_to_matrix(l1[1]) - detail::pauli(2)).norm() < 1e-14);

    // n=2: lambda_1 = sigma1 x sigma3
    const auto l2 = jw_lambdas(2, true);
    REQUIRE(l2.size() == 5);
    CHECK((cherm_to_matrix(l2[0]) - kron2(detail::pauli(1), detail::pauli(3))).norm() < 1e-14);
    CHECK((cherm_to_matrix(l2[1]) - kron2(detail::pauli(2), detail::pauli(3))).norm() < 1e-14);
    CHECK((cherm_to_matrix(l2[2]) - kron2(detail::pauli(0), detail::pauli(1))).norm() < 1e-14);
    CHECK((cherm_to_matrix(l2[4]) - kron2(detail::pauli(3), detail::pauli(3))).norm() < 1e-14);

    // every string squares to the identity and is Jordan-orthogonal to others
    const AlgebraPtr target = l2[0].algebra;
    for (std::size_t i = 0; i < l2.size(); ++i) {
        CHECK(norm(jordan_product(l2[i], l2[i]) - target->unit()) < 1e-13);
        for (std::size_t j = i + 1; j < l2.size(); ++j)
            CHECK(norm(jordan_product(l2[i], l2[j])) < 1e-13);
    }
}

TEST_CASE("spin embedding") {
    const Embedding e2 = embed_spin(2);
    CHECK(e2.target->spec_string() == "cherm:2");
    CHECK((cherm_to_matrix(e2.basis_images[1]) - detail::pauli(1)).norm() < 1e-14);
    CHECK((cherm_to_matrix(e2.basis_images[2]) - detail::pauli(2)).norm() < 1e-14);
    CHECK(homomorphism_residual(e2) < 1e-12);

    for (Eigen::Index d : {2, 3, 4, 5}) {
        const Embedding emb = embed_spin(d);
        CAPTURE(d);
        CHECK(homomorphism_residual(emb) < 1e-12);
        CHECK(norm(emb.basis_images[0] - emb.target->unit()) < 1e-14);

        // phi(c+) is a half-dimensional projector
        Eigen::VectorXd cp = Eigen::VectorXd::Zero(d + 1);
        cp[0] = 0.5;
        cp[1] = 0.5;
        Element img = emb.target->zero();
        for (Eigen::Index a = 0; a <= d; ++a) img = img + cp[a] * emb.basis_images[a];
        const Eigen::MatrixXcd P = cherm_to_matrix(img);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(P);
        int rank_count = 0;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            const double lam = es.eigenvalues()[i];
            CHECK(std::min(std::abs(lam), std::abs(lam - 1.0)) < 1e-12);
            if (lam > 0.5) ++rank_count;
        }
        CHECK(rank_count == P.rows() / 2);
    }
}

TEST_CASE("quaternion embedding") {
    auto qh = make_qherm(2);
    // phi0(1) = I2 block, phi0(i) = diag(i, -i)
    Eigen::VectorXd one = Eigen::VectorXd::Zero(qh->dim());
    one[0] = 1.0;  // E(0,0) real unit
    const Eigen::MatrixXcd img1 = qherm_complex_image(qh->element(one));
    CHECK((img1.block(0, 0, 2, 2) - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-14);

    // basis element E(0,1; unit i) -> sqrt(1/2) * (E01 i + E10 (-i)) entrywise
    Eigen::VectorXd qi = Eigen::VectorXd::Zero(qh->dim());
    qi[2 + 1] = std::sqrt(2.0);  // pair (0,1), unit index 1 = i, undo the 1/sqrt2
    const Eigen::MatrixXcd imgi = qherm_complex_image(qh->element(qi));
    Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(4, 4);
    expect.block(0, 2, 2, 2) << std::complex<double>(0, 1), 0, 0, std::complex<double>(0, -1);
    expect.block(2, 0, 2, 2) << std::complex<double>(0, -1), 0, 0, std::complex<double>(0, 1);
    CHECK((imgi - expect).norm() < 1e-14);

    const Embedding emb = embed_quat(2);
    CHECK(emb.target->spec_string() == "cherm:4");
    CHECK(homomorphism_residual(emb) < 1e-12);

    // eigenvalues of the image come in pairs
    Rng rng(3);
    const Element A = random_element(qh, rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(qherm_complex_image(A));
    for (Eigen::Index i = 0; i + 1 < es.eigenvalues().size(); i += 2)
        CHECK(es.eigenvalues()[i] == Approx(es.eigenvalues()[i + 1]).margin(1e-10));
}

TEST_CASE("real symmetric inclusion and classical diagonal embedding") {
    const Embedding rs = embed_realsym(3);
    CHECK(homomorphism_residual(rs) < 1e-13);
    CHECK(norm(rs.basis_images[0] - rs.target->basis_element(0)) < 1e-14);

    const Embedding cl = embed_classical(3);
    CHECK(homomorphism_residual(cl) < 1e-14);
    const Embedding ch = embed_cherm(2);
    CHECK(homomorphism_residual(ch) == 0.0);
}

TEST_CASE("push and pull are metric duals") {
    Rng rng(5);
    for (const Embedding& emb :
         {embed_spin(2), embed_spin(3), embed_quat(2), embed_realsym(3)}) {
        CAPTURE(emb.name, emb.source->spec_string());

        // psi(u / rank) = I / N
        const Element mixed = push_state(emb, maximally_mixed(emb.source).element);
        const Eigen::MatrixXcd M = cherm_to_matrix(mixed);
        const Eigen::Index N = M.rows();
        CHECK((M - Eigen::MatrixXcd::Identity(N, N) / static_cast<double>(N)).norm() < 1e-10);

        for (int t = 0; t < 20; ++t) {
            const Element x = random_state_element(emb.source, rng);
            const Element back = pull_back(emb, push_state(emb, x));
            CHECK(norm(back - x) < 1e-9);
        }
    }

    // Spin(2): psi((e0 + 0.6 e1)/2) = (I + 0.6 sigma1)/2
    const Embedding e2 = embed_spin(2);
    Eigen::VectorXd c(3);
    c << 0.5, 0.3, 0.0;
    const Eigen::MatrixXcd img = cherm_to_matrix(push_state(e2, e2.source->element(c)));
    const Eigen::MatrixXcd expect =
        0.5 * (Eigen::MatrixXcd::Identity(2, 2) + 0.6 * detail::pauli(1));
    CHECK((img - expect).norm() < 1e-12);
}

TEST_CASE("verify_embedding preserves D and SRR") {
    const std::vector<double> grid{0.25, 0.5, 1.0, 2.0};
    for (const Embedding& emb : {embed_spin(2), embed_spin(4), embed_quat(2)}) {
        CAPTURE(emb.source->spec_string());
        const EmbeddingReport rep = verify_embedding(emb, 20, grid, 1e-9, 2024);
        CHECK(rep.hom_residual < 1e-12);
        CHECK(rep.duality_residual < 1e-9);
        CHECK(rep.gram_min_eig > 0.0);
        CHECK(rep.d_preservation_max_err < 1e-8);
        CHECK(rep.srr_preservation_max_err < 1e-8);
    }
}

TEST_CASE("entropy shift against the maximally mixed reference") {
    // D(rho || u/2) in Spin(d) equals the quantum D(psi rho || I/N): closed
    // form log 2 - H(rho) on the source side for rank-2 algebras.
    Rng rng(7);
    for (Eigen::Index d : {2, 4}) {
        const Embedding emb = embed_spin(d);
        const State rho = random_state(emb.source, rng);
        const State qrho{push_state(emb, rho.element)};
        const State qmix{push_state(emb, maximally_mixed(emb.source).element)};
        const double src = relative_entropy(rho, maximally_mixed(emb.source));
        CHECK(src == Approx(std::log(2.0) - vn_entropy(rho)).margin(1e-9));
        CHECK(relative_entropy(qrho, qmix) == Approx(src).margin(1e-9));

        // multiplicity inflation shifts H by log(N/rank)
        const double n_over_rank =
            static_cast<double>(cherm_to_matrix(qrho.element).rows()) / 2.0;
        CHECK(vn_entropy(qrho) - vn_entropy(rho) == Approx(std::log(n_over_rank)).margin(1e-9));
    }
}

TEST_CASE("octonions cannot be embedded") {
    CHECK_THROWS_AS(canonical_embedding(make_oct3()), UnsupportedError);
    CHECK_THROWS_AS(factor_images({make_oct3()}), UnsupportedError);
}

TEST_CASE("direct sums embed block-diagonally") {
    const Embedding emb = canonical_embedding(build_algebra("sum(classical:2,spin:2)"));
    CHECK(homomorphism_residual(emb) < 1e-12);
    Rng rng(9);
    const Element x = random_state_element(emb.source, rng);
    CHECK(norm(pull_back(emb, push_state(emb, x)) - x) < 1e-9);
}

TEST_CASE("composite embedding machinery") {
    auto sp = make_spin(2);
    auto t2 = tensor_power(sp, 2);
    const auto* ta = static_cast<const detail::TensorAlgebra*>(t2.get());
    const FactorImages fi = factor_images(ta->factors());
    CHECK(fi.total == 4);

    Rng rng(11);
    const Element x = random_element(sp, rng), y = random_element(sp, rng);
    Eigen::VectorXd c(9);
    for (Eigen::Index i = 0; i < 3; ++i) c.segment(i * 3, 3) = x.coeffs[i] * y.coeffs;

    // embedding a product element gives the Kronecker product of the images
    const Embedding single = embed_spin(2);
    const Eigen::MatrixXcd ex = embed_apply(single, x), ey = embed_apply(single, y);
    const Eigen::MatrixXcd M =
        embed_tensor_element(fi, ta->factor_dims(), ta->factor_strides(), c);
    CHECK((M - kron2(ex, ey)).norm() < 1e-12);

    // pull-back weights recover <x ox y, e_b> through the trace duality
    const Eigen::VectorXd t = tensor_pullback_weights(fi, M);
    for (Eigen::Index b = 0; b < t2->dim(); ++b) {
        const Eigen::MatrixXcd Mb = embed_tensor_element(
            fi, ta->factor_dims(), ta->factor_strides(), t2->basis_element(b).coeffs);
        CHECK(t[b] == Approx((M * Mb).trace().real()).margin(1e-10));
    }
}
