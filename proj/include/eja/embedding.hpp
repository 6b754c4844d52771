#pragma once

#include <string>
#include <vector>

#include "eja/spectral.hpp"

namespace eja {

// Injective Jordan homomorphism into a complex Hermitian matrix algebra,
// recorded through the images of the source basis.
struct Embedding {
    AlgebraPtr source;
    AlgebraPtr target;  // always ComplexHerm(N)
    std::vector<Element> basis_images;
    std::string name;
};

namespace detail {

inline Eigen::Matrix2cd pauli(int k) {
    using C = std::complex<double>;
    Eigen::Matrix2cd s;
    switch (k) {
        case 0: s << C(1, 0), C(0, 0), C(0, 0), C(1, 0); break;
        case 1: s << C(0, 0), C(1, 0), C(1, 0), C(0, 0); break;
        case 2: s << C(0, 0), C(0, -1), C(0, 1), C(0, 0); break;
        default: s << C(1, 0), C(0, 0), C(0, 0), C(-1, 0); break;
    }
    return s;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Eigen::MatrixXcd pauli_string(const std::vector<int>& word) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
    for (int k : word) m = kron(m, pauli(k));
    return m;
}

}  // namespace detail

// Jordan-Wigner strings: lambda_{2k-1} = s0^{k-1} x s1 x s3^{n-k},
// lambda_{2k} = s0^{k-1} x s2 x s3^{n-k}, plus the all-s3 string on the same
// n qubits when an odd generator count is requested.  Pairwise
// Jordan-orthogonal Hermitian involutions.
inline std::vector<Element> jw_lambdas(int n_qubits, bool odd_extra) {
    if (n_qubits < 1) throw DimensionError("jw_lambdas needs at least one qubit");
    const Eigen::Index N = Eigen::Index(1) << n_qubits;
    AlgebraPtr target = make_cherm(N);
    std::vector<Element> out;
    for (int k = 1; k <= n_qubits; ++k) {
        for (int which = 1; which <= 2; ++which) {
            std::vector<int> word(n_qubits, 3);
            for (int i = 0; i < k - 1; ++i) word[i] = 0;
            word[k - 1] = which;
            out.push_back(cherm_from_matrix(target, detail::pauli_string(word)));
        }
    }
    if (odd_extra) {
        std::vector<int> word(n_qubits, 3);
        out.push_back(cherm_from_matrix(target, detail::pauli_string(word)));
    }
    return out;
}

// Spin(d) -> ComplexHerm(2^n): e0 -> I, e_j -> lambda_j, with d = 2n or
// d = 2n+1 generators on n qubits (the odd case uses the extra all-sigma3
// string).  Spin(1) sits on a single qubit.
inline Embedding embed_spin(Eigen::Index d) {
    if (d < 1) throw DimensionError("embed_spin needs d >= 1");
    const int n_qubits = d == 1 ? 1 : static_cast<int>(d / 2);
    AlgebraPtr source = make_spin(d);
    std::vector<Element> lambdas = jw_lambdas(n_qubits, d % 2 == 1 && d > 1);
    AlgebraPtr target = lambdas.front().algebra;
    std::vector<Element> images;
    images.push_back(target->unit());
    for (Eigen::Index j = 0; j < d; ++j) images.push_back(lambdas[static_cast<std::size_t>(j)]);
    return Embedding{source, target, std::move(images), "spin-jw"};
}

// QuatHerm(m) -> ComplexHerm(2m) by the entrywise 2x2 complex block map.
inline Embedding embed_quat(Eigen::Index m) {
    AlgebraPtr source = make_qherm(m);
    AlgebraPtr target = make_cherm(2 * m);
    std::vector<Element> images;
    for (Eigen::Index a = 0; a < source->dim(); ++a)
        images.push_back(cherm_from_matrix(target, qherm_complex_image(source->basis_element(a))));
    return Embedding{source, target, std::move(images), "quat-block"};
}

// Sym(m,R) included in Herm(m,C).
inline Embedding embed_realsym(Eigen::Index m) {
    AlgebraPtr source = make_realsym(m);
    AlgebraPtr target = make_cherm(m);
    std::vector<Element> images;
    for (Eigen::Index a = 0; a < source->dim(); ++a) {
        const Eigen::MatrixXd M = realsym_to_matrix(source->basis_element(a));
        images.push_back(cherm_from_matrix(target, M.cast<std::complex<double>>()));
    }
    return Embedding{source, target, std::move(images), "realsym-inclusion"};
}

inline Embedding embed_cherm(Eigen::Index m) {
    AlgebraPtr source = make_cherm(m);
    std::vector<Element> images;
    for (Eigen::Index a = 0; a < source->dim(); ++a) images.push_back(source->basis_element(a));
    return Embedding{source, source, std::move(images), "cherm-identity"};
}

inline Embedding embed_classical(Eigen::Index d) {
    AlgebraPtr source = make_classical(d);
    AlgebraPtr target = make_cherm(d);
    std::vector<Element> images;
    for (Eigen::Index a = 0; a < d; ++a) {
        Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(d, d);
        M(a, a) = 1.0;
        images.push_back(cherm_from_matrix(target, M));
    }
    return Embedding{source, target, std::move(images), "classical-diagonal"};
}

inline Embedding canonical_embedding(const AlgebraPtr& a);

// Direct sums embed block-diagonally.
inline Embedding embed_direct_sum(const AlgebraPtr& a) {
    const auto* ds = static_cast<const detail::DirectSumAlgebra*>(a.get());
    std::vector<Embedding> parts;
    Eigen::Index total = 0;
    for (const auto& f : ds->factors()) {
        parts.push_back(canonical_embedding(f));
        total += static_cast<const detail::MatrixAlgebra*>(parts.back().target.get())->msize();
    }
    AlgebraPtr target = make_cherm(total);
    std::vector<Element> images;
    Eigen::Index off = 0;
    for (const auto& part : parts) {
        const Eigen::Index nf =
            static_cast<const detail::MatrixAlgebra*>(part.target.get())->msize();
        for (const auto& img : part.basis_images) {
            Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(total, total);
            M.block(off, off, nf, nf) = cherm_to_matrix(img);
            images.push_back(cherm_from_matrix(target, M));
        }
        off += nf;
    }
    return Embedding{a, target, std::move(images), "sum-blockdiag"};
}

// Canonical embedding into complex Hermitian matrices for the special types.
inline Embedding canonical_embedding(const AlgebraPtr& a) {
    switch (a->kind()) {
        case Kind::Classical: return embed_classical(a->dim());
        case Kind::RealSym:
            return embed_realsym(static_cast<const detail::MatrixAlgebra*>(a.get())->msize());
        case Kind::ComplexHerm:
            return embed_cherm(static_cast<const detail::MatrixAlgebra*>(a.get())->msize());
        case Kind::QuatHerm:
            return embed_quat(static_cast<const detail::MatrixAlgebra*>(a.get())->msize());
        case Kind::Spin: return embed_spin(a->dim() - 1);
        case Kind::DirectSum: return embed_direct_sum(a);
        case Kind::OctHerm3:
            throw UnsupportedError(
                "the 3x3 octonion Hermitian algebra is exceptional: it admits no canonical "
                "embedding into complex Hermitian matrices");
        default:
            throw UnsupportedError("no canonical embedding for " + a->spec_string() +
                                   "; embed the factors instead");
    }
}

// phi(x) as a raw complex matrix.
inline Eigen::MatrixXcd embed_apply(const Embedding& emb, const Element& x) {
    if (!same_algebra(x.algebra, emb.source))
        throw DimensionError("element does not belong to the embedding source");
    const Eigen::Index n = static_cast<const detail::MatrixAlgebra*>(emb.target.get())->msize();
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index a = 0; a < emb.source->dim(); ++a)
        if (x.coeffs[a] != 0.0) M += x.coeffs[a] * cherm_to_matrix(emb.basis_images[a]);
    return M;
}

// phi*(X): the source element dual to X, <phi*(X), y>_V = Tr X phi(y).
inline Element pull_back(const Embedding& emb, const Element& X) {
    Eigen::VectorXd t(emb.source->dim());
    for (Eigen::Index b = 0; b < emb.source->dim(); ++b) t[b] = inner(X, emb.basis_images[b]);
    return Element{emb.source, t.cwiseQuotient(emb.source->metric_diag())};
}

// psi(x): the unique target element in span(basis_images) with
// Tr psi(x) phi(y) = <x, y>_V; phi* o psi is the identity.
inline Element push_state(const Embedding& emb, const Element& x) {
    const Eigen::Index d = emb.source->dim();
    Eigen::MatrixXd gram(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i; j < d; ++j)
            gram(i, j) = gram(j, i) = inner(emb.basis_images[i], emb.basis_images[j]);
    Eigen::VectorXd rhs = emb.source->metric_diag().cwiseProduct(x.coeffs);
    Eigen::LDLT<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success)
        throw NumericError("embedding Gram matrix is singular; basis images not independent");
    Eigen::VectorXd w = solver.solve(rhs);
    Element out = emb.target->zero();
    for (Eigen::Index b = 0; b < d; ++b) out = out + w[b] * emb.basis_images[b];
    return out;
}

// Max over basis pairs of ||phi(e_a o e_b) - phi(e_a) o phi(e_b)||.
inline double homomorphism_residual(const Embedding& emb) {
    double worst = 0.0;
    for (Eigen::Index a = 0; a < emb.source->dim(); ++a)
        for (Eigen::Index b = a; b < emb.source->dim(); ++b) {
            Element lhs = emb.target->zero();
            const Eigen::VectorXd st = emb.source->structure(a, b);
            for (Eigen::Index c = 0; c < emb.source->dim(); ++c)
                if (st[c] != 0.0) lhs = lhs + st[c] * emb.basis_images[c];
            const Element rhs = jordan_product(emb.basis_images[a], emb.basis_images[b]);
            worst = std::max(worst, norm(lhs - rhs));
        }
    return worst;
}

// ---------------------------------------------------------------------------
// Composite (tensor) support used by the pinched-measurement pipeline.
// Works with raw per-factor basis images; composite basis images are never
// materialized.

struct FactorImages {
    std::vector<std::vector<Eigen::MatrixXcd>> images;  // [factor][basis index]
    std::vector<Eigen::Index> sizes;                    // image-space size per factor
    Eigen::Index total = 1;                             // product of sizes
};

// Trace-preserving state-side images psi = phi / gamma with gamma = N/rank:
// Tr psi(x) = tr x per factor, so composite states map to density matrices,
// pulled-back effect families sum to the unit, and sandwiched quantities on
// the matrix side agree with the source values.  Requires the factor metric
// to match the matrix trace up to one scalar, which holds for every factor
// kind with a canonical embedding here.
inline FactorImages factor_images(const std::vector<AlgebraPtr>& factors,
                                  Eigen::Index max_total = 4096) {
    FactorImages out;
    for (const auto& f : factors) {
        const Embedding emb = canonical_embedding(f);
        std::vector<Eigen::MatrixXcd> imgs;
        for (const auto& e : emb.basis_images) imgs.push_back(cherm_to_matrix(e));
        const double gamma =
            static_cast<double>(imgs.front().rows()) / static_cast<double>(f->rank());
        for (Eigen::Index a = 0; a < f->dim(); ++a) {
            for (Eigen::Index b = a; b < f->dim(); ++b) {
                const double tr_img =
                    (imgs[static_cast<std::size_t>(a)] * imgs[static_cast<std::size_t>(b)])
                        .trace()
                        .real();
                const double want = gamma * f->metric_diag()[a] * (a == b ? 1.0 : 0.0);
                if (std::abs(tr_img - want) > 1e-9 * std::max(1.0, std::abs(want)))
                    throw UnsupportedError(
                        "factor " + f->spec_string() +
                        " embeds non-isometrically; composite pull-back unavailable");
            }
        }
        for (auto& m : imgs) m /= gamma;
        out.sizes.push_back(imgs.front().rows());
        out.total *= out.sizes.back();
        if (out.total > max_total)
            throw BudgetError("composite embedding dimension exceeds matrix budget",
                              static_cast<std::size_t>(out.total));
        out.images.push_back(std::move(imgs));
    }
    return out;
}

// phi_n(x) for a generic composite element: sum_b x_b M_{b_1} x ... x M_{b_n}.
inline Eigen::MatrixXcd embed_tensor_element(const FactorImages& fi,
                                             const std::vector<Eigen::Index>& dims,
                                             const std::vector<Eigen::Index>& strides,
                                             const Eigen::VectorXd& coeffs) {
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(fi.total, fi.total);
    for (Eigen::Index idx = 0; idx < coeffs.size(); ++idx) {
        if (coeffs[idx] == 0.0) continue;
        Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(1, 1);
        Eigen::Index rem = idx;
        for (std::size_t f = 0; f < dims.size(); ++f) {
            const Eigen::Index a = rem / strides[f];
            rem %= strides[f];
            term = detail::kron(term, fi.images[f][static_cast<std::size_t>(a)]);
        }
        M += coeffs[idx] * term;
    }
    return M;
}

// t_b = Tr(C (M_{b_1} x ... x M_{b_n})) for every composite basis index b,
// contracted one factor at a time.
inline Eigen::VectorXd tensor_pullback_weights(const FactorImages& fi,
                                               const Eigen::MatrixXcd& C) {
    using Cx = std::complex<double>;
    // state[(b_1..b_k), (i_(k+1)..i_n), (j_(k+1)..j_n)] flattened with b slowest
    std::vector<Cx> state(C.size());
    const Eigen::Index N = fi.total;
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j) state[static_cast<std::size_t>(i * N + j)] = C(i, j);

    Eigen::Index rest = N;  // product of remaining image sizes
    Eigen::Index bdim = 1;  // product of processed basis dims
    for (std::size_t f = 0; f < fi.images.size(); ++f) {
        const Eigen::Index s = fi.sizes[f];
        const Eigen::Index d = static_cast<Eigen::Index>(fi.images[f].size());
        const Eigen::Index sub = rest / s;
        std::vector<Cx> next(static_cast<std::size_t>(bdim * d * sub * sub), Cx(0, 0));
        for (Eigen::Index b = 0; b < bdim; ++b)
            for (Eigen::Index a = 0; a < d; ++a) {
                const Eigen::MatrixXcd& Mf = fi.images[f][static_cast<std::size_t>(a)];
                for (Eigen::Index i1 = 0; i1 < s; ++i1)
                    for (Eigen::Index j1 = 0; j1 < s; ++j1) {
                        const Cx w = Mf(j1, i1);
                        if (w == Cx(0, 0)) continue;
                        const std::size_t src_base =
                            static_cast<std::size_t>(((b * s + i1) * sub) * (s * sub)) +
                            static_cast<std::size_t>(j1 * sub);
                        const std::size_t dst_base = static_cast<std::size_t>((b * d + a) * sub * sub);
                        for (Eigen::Index i2 = 0; i2 < sub; ++i2)
                            for (Eigen::Index j2 = 0; j2 < sub; ++j2)
                                next[dst_base + static_cast<std::size_t>(i2 * sub + j2)] +=
                                    w * state[src_base + static_cast<std::size_t>(i2 * (s * sub) + j2)];
                    }
            }
        state.swap(next);
        rest = sub;
        bdim *= d;
    }
    Eigen::VectorXd t(bdim);
    for (Eigen::Index b = 0; b < bdim; ++b) t[b] = state[static_cast<std::size_t>(b)].real();
    return t;
}

// Hermitian spectral projectors clustered at tol (ascending eigenvalues).
inline std::vector<std::pair<double, Eigen::MatrixXcd>> hermitian_projectors(
    const Eigen::MatrixXcd& M, double tol_abs) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
    if (es.info() != Eigen::Success) throw NumericError("hermitian eigendecomposition failed");
    std::vector<std::pair<double, Eigen::MatrixXcd>> out;
    const auto& ev = es.eigenvalues();
    Eigen::Index pos = 0;
    while (pos < ev.size()) {
        Eigen::Index end = pos + 1;
        while (end < ev.size() && ev[end] - ev[end - 1] <= tol_abs) ++end;
        Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(M.rows(), M.cols());
        for (Eigen::Index k = pos; k < end; ++k)
            P += es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
        out.emplace_back(ev.segment(pos, end - pos).mean(), std::move(P));
        pos = end;
    }
    return out;
}

// Pinched-measurement projectors on the matrix side: spectral blocks of B,
// refined by the spectrum of E_i A E_i inside each block, kernels included.
// out[i] holds the refined projectors of B's i-th spectral block.
inline std::vector<std::vector<Eigen::MatrixXcd>> quantum_pinched_projectors(
    const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B, double tol) {
    const double tol_b = tol * std::max(1.0, B.norm());
    std::vector<std::vector<Eigen::MatrixXcd>> out;
    for (const auto& [mu, E] : hermitian_projectors(B, tol_b)) {
        std::vector<Eigen::MatrixXcd> block;
        const Eigen::MatrixXcd Z = E * A * E;
        const double th = 1e-12 * std::max(1.0, std::abs(Z.trace().real()));
        Eigen::MatrixXcd kernel = E;
        for (const auto& [lam, P] : hermitian_projectors(Z, tol * std::max(1.0, Z.norm()))) {
            if (std::abs(lam) <= th) continue;
            block.push_back(P);
            kernel -= P;
        }
        if (kernel.norm() > 1e-8) block.push_back(kernel);
        out.push_back(std::move(block));
    }
    return out;
}

}  // namespace eja
