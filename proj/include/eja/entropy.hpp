#pragma once

#include <limits>
#include <optional>

#include "eja/embedding.hpp"
#include "eja/sampling.hpp"
#include "eja/spectral.hpp"

namespace eja {

// Eigenvalues at or below kSupportTolFactor * tr(x) are treated as kernel for
// logs and inverse powers; this separates genuine kernels from round-off.
inline constexpr double kSupportTolFactor = 1e-12;
// Absolute floor below which measured probabilities count as zero support.
inline constexpr double kDistSupportTol = 1e-14;

inline double pos_infinity() { return std::numeric_limits<double>::infinity(); }

inline double support_threshold(double trace_value) {
    return kSupportTolFactor * std::max(1.0, std::abs(trace_value));
}

// ---------------------------------------------------------------------------
// States, measurements, distributions

struct State {
    Element element;
};

inline State make_state(Element x, double tol = 1e-9) {
    const double t = trace(x);
    if (std::abs(t - 1.0) > tol)
        throw ValidationError("state trace " + std::to_string(t) + " != 1");
    if (cone_min_eig(x, tol) < -tol) throw ValidationError("state has negative eigenvalue");
    return State{std::move(x)};
}

inline State maximally_mixed(const AlgebraPtr& a) {
    return State{(1.0 / static_cast<double>(a->rank())) * a->unit()};
}

inline State random_state(const AlgebraPtr& a, Rng& rng) {
    return State{random_state_element(a, rng)};
}

struct Measurement {
    std::vector<Element> effects;
    std::vector<std::string> labels;
};

inline void validate_measurement(const Measurement& M, double tol = 1e-8) {
    if (M.effects.empty()) throw ValidationError("measurement has no effects");
    Element sum = M.effects[0].algebra->zero();
    for (const auto& e : M.effects) {
        if (cone_min_eig(e, tol) < -tol) throw ValidationError("measurement effect not in cone");
        sum = sum + e;
    }
    if (norm(sum - M.effects[0].algebra->unit()) > tol)
        throw ValidationError("measurement effects do not sum to the unit");
}

struct Distribution {
    Eigen::VectorXd probs;
    std::vector<std::string> labels;
};

// P(i) = <M_i, rho>; values in [-tol, 0) are clamped to zero and the vector is
// renormalized when the total drift stays within tol.
inline Distribution measure(const Measurement& M, const State& rho, double tol = 1e-9) {
    if (M.effects.empty()) throw ValidationError("measurement has no effects");
    require_same_algebra(M.effects.front(), rho.element);
    const Eigen::VectorXd weighted =
        rho.element.algebra->metric_diag().cwiseProduct(rho.element.coeffs);
    Eigen::VectorXd p(M.effects.size());
    for (std::size_t i = 0; i < M.effects.size(); ++i) {
        double v = M.effects[i].coeffs.dot(weighted);
        if (v < -tol)
            throw ValidationError("measurement produced probability " + std::to_string(v));
        p[static_cast<Eigen::Index>(i)] = std::max(v, 0.0);
    }
    const double total = p.sum();
    if (std::abs(total - 1.0) > tol)
        throw ValidationError("measurement probabilities sum to " + std::to_string(total));
    p /= total;
    return Distribution{std::move(p), M.labels};
}

// ---------------------------------------------------------------------------
// Classical divergences (natural log)

inline double classical_relative(const Distribution& p, const Distribution& q,
                                 double support_tol = kDistSupportTol) {
    if (p.probs.size() != q.probs.size()) throw DimensionError("distribution length mismatch");
    double d = 0.0;
    for (Eigen::Index i = 0; i < p.probs.size(); ++i) {
        if (p.probs[i] <= support_tol) continue;
        if (q.probs[i] <= support_tol) return pos_infinity();
        d += p.probs[i] * (std::log(p.probs[i]) - std::log(q.probs[i]));
    }
    return d;
}

// D_{1+s}(p||q) = (1/s) log sum p^{1+s} q^{-s}, s != 0.
inline double classical_renyi(const Distribution& p, const Distribution& q, double s,
                              double support_tol = kDistSupportTol) {
    if (p.probs.size() != q.probs.size()) throw DimensionError("distribution length mismatch");
    if (s == 0.0) throw DomainError("classical_renyi undefined at s = 0", 0.0);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < p.probs.size(); ++i) {
        if (p.probs[i] <= support_tol) continue;
        if (q.probs[i] <= support_tol) {
            if (s > 0.0) return pos_infinity();
            continue;  // q^{-s} = q^{|s|} -> 0
        }
        acc += std::pow(p.probs[i], 1.0 + s) * std::pow(q.probs[i], -s);
    }
    return std::log(acc) / s;
}

// ---------------------------------------------------------------------------
// Entropic quantities on states

// H(rho) = -tr rho o log rho.
inline double vn_entropy(const State& rho, double tol = 1e-9) {
    const SpectralDecomposition s = spectral(rho.element, tol);
    const double th = support_threshold(trace(rho.element));
    double h = 0.0;
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
        const double lam = s.eigenvalues[i];
        if (lam < -tol) throw NumericError("state eigenvalue " + std::to_string(lam));
        if (lam <= th) continue;
        h -= lam * std::log(lam) * s.multiplicities[i];
    }
    return h;
}

// D(rho||sigma) = tr(rho o log rho - rho o log sigma), +infinity when the
// support of rho is not contained in the support of sigma.
inline double relative_entropy(const State& rho, const State& sigma, double tol = 1e-9,
                               double support_tol = 1e-10) {
    require_same_algebra(rho.element, sigma.element);
    const SpectralDecomposition sr = spectral(rho.element, tol);
    const SpectralDecomposition ss = spectral(sigma.element, tol);
    const double th_r = support_threshold(trace(rho.element));
    const double th_s = support_threshold(trace(sigma.element));

    double tr_rho_log_rho = 0.0;
    for (std::size_t i = 0; i < sr.eigenvalues.size(); ++i) {
        const double lam = sr.eigenvalues[i];
        if (lam < -tol) throw NumericError("state eigenvalue " + std::to_string(lam));
        if (lam <= th_r) continue;
        tr_rho_log_rho += lam * std::log(lam) * sr.multiplicities[i];
    }
    double cross = 0.0;
    for (std::size_t j = 0; j < ss.eigenvalues.size(); ++j) {
        const double mu = ss.eigenvalues[j];
        const double w = inner(rho.element, ss.idempotents[j]);
        if (mu <= th_s) {
            if (w > support_tol) return pos_infinity();
            continue;
        }
        cross += w * std::log(mu);
    }
    return tr_rho_log_rho - cross;
}

namespace detail {

// sum over kernel blocks of sigma of <rho, c_j>.
inline double kernel_weight(const Element& rho, const SpectralDecomposition& ss, double th) {
    double w = 0.0;
    for (std::size_t j = 0; j < ss.eigenvalues.size(); ++j)
        if (ss.eigenvalues[j] <= th) w += inner(rho, ss.idempotents[j]);
    return w;
}

// sum_{mu > th} f(mu) c_j  (kernel blocks contribute nothing).
inline Element function_on_support(const SpectralDecomposition& s, double th,
                                   const std::function<double(double)>& f, const AlgebraPtr& a) {
    Element out = a->zero();
    for (std::size_t j = 0; j < s.eigenvalues.size(); ++j)
        if (s.eigenvalues[j] > th) out = out + f(s.eigenvalues[j]) * s.idempotents[j];
    return out;
}

inline void require_renyi_s(double s) {
    if (!(s > -1.0) || s == 0.0)
        throw DomainError("Renyi parameter must lie in (-1,0) or (0,inf)", s);
}

}  // namespace detail

// phi(-s|rho||sigma) = log tr(rho^{1+s} o sigma^{-s}); inverse powers of sigma
// are taken on its support.
inline double prr_phi(const State& rho, const State& sigma, double s, double tol = 1e-9,
                      double support_tol = 1e-10) {
    detail::require_renyi_s(s);
    require_same_algebra(rho.element, sigma.element);
    const SpectralDecomposition sr = spectral(rho.element, tol);
    const SpectralDecomposition ss = spectral(sigma.element, tol);
    const double th_r = support_threshold(trace(rho.element));
    const double th_s = support_threshold(trace(sigma.element));

    if (s > 0.0 && detail::kernel_weight(rho.element, ss, th_s) > support_tol)
        return pos_infinity();

    Element a = rho.element.algebra->zero();
    for (std::size_t i = 0; i < sr.eigenvalues.size(); ++i) {
        const double lam = sr.eigenvalues[i];
        if (lam < -tol) throw NumericError("state eigenvalue " + std::to_string(lam));
        if (lam <= th_r) continue;
        a = a + std::pow(lam, 1.0 + s) * sr.idempotents[i];
    }
    const Element b = detail::function_on_support(
        ss, th_s, [s](double mu) { return std::pow(mu, -s); }, sigma.element.algebra);
    return std::log(inner(a, b));
}

// Petz relative Renyi entropy D_{1+s} = phi(-s)/s.
inline double prr(const State& rho, const State& sigma, double s, double tol = 1e-9,
                  double support_tol = 1e-10) {
    const double phi = prr_phi(rho, sigma, s, tol, support_tol);
    return phi / s;
}

namespace detail {

// Composite route for the sandwiched quantity: the quadratic form of the
// canonical composite does not factorize over tensor products (same
// non-associativity as the pinching defect), so the sandwich is evaluated on
// the matrix side of the factor embeddings, where it is additive and agrees
// with the single-factor values exactly.
inline double srr_phi_composite(const State& rho, const State& sigma, double s, double tol,
                                double support_tol) {
    const auto* ta = static_cast<const TensorAlgebra*>(rho.element.algebra.get());
    const FactorImages fi = factor_images(ta->factors());
    const Eigen::MatrixXcd A =
        embed_tensor_element(fi, ta->factor_dims(), ta->factor_strides(), rho.element.coeffs);
    const Eigen::MatrixXcd B =
        embed_tensor_element(fi, ta->factor_dims(), ta->factor_strides(), sigma.element.coeffs);

    const double th_b = kSupportTolFactor * std::max(1.0, std::abs(B.trace().real()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eb(B);
    if (eb.info() != Eigen::Success) throw NumericError("matrix eigendecomposition failed");
    if (s > 0.0) {
        double kernel_weight = 0.0;
        for (Eigen::Index k = 0; k < eb.eigenvalues().size(); ++k)
            if (eb.eigenvalues()[k] <= th_b) {
                const auto v = eb.eigenvectors().col(k);
                kernel_weight += (v.adjoint() * A * v).real()(0, 0);
            }
        if (kernel_weight > support_tol) return pos_infinity();
    }
    const double expo = -s / (2.0 * (1.0 + s));
    Eigen::VectorXd wdiag = Eigen::VectorXd::Zero(B.rows());
    for (Eigen::Index k = 0; k < eb.eigenvalues().size(); ++k)
        if (eb.eigenvalues()[k] > th_b) wdiag[k] = std::pow(eb.eigenvalues()[k], expo);
    const Eigen::MatrixXcd W =
        eb.eigenvectors() * wdiag.asDiagonal() * eb.eigenvectors().adjoint();
    const Eigen::MatrixXcd M = W * A * W;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> em(0.5 * (M + M.adjoint()));
    const double th_m = kSupportTolFactor * std::max(1.0, std::abs(M.trace().real()));
    const double neg_tol = tol * std::max(1.0, M.norm());
    double acc = 0.0;
    for (Eigen::Index k = 0; k < em.eigenvalues().size(); ++k) {
        const double nu = em.eigenvalues()[k];
        if (nu < -neg_tol)
            throw NumericError("sandwiched inner element has eigenvalue " + std::to_string(nu));
        if (nu <= th_m) continue;
        acc += std::pow(nu, 1.0 + s);
    }
    return std::log(acc);
}

}  // namespace detail

// phi~(-s|rho||sigma) = log tr (P_{sigma^{-s/(2(1+s))}}(rho))^{1+s}.
inline double srr_phi(const State& rho, const State& sigma, double s, double tol = 1e-9,
                      double support_tol = 1e-10) {
    detail::require_renyi_s(s);
    require_same_algebra(rho.element, sigma.element);
    if (rho.element.algebra->kind() == Kind::Tensor && !rho.element.algebra->pointwise())
        return detail::srr_phi_composite(rho, sigma, s, tol, support_tol);
    const SpectralDecomposition ss = spectral(sigma.element, tol);
    const double th_s = support_threshold(trace(sigma.element));

    if (s > 0.0 && detail::kernel_weight(rho.element, ss, th_s) > support_tol)
        return pos_infinity();

    const double expo = -s / (2.0 * (1.0 + s));
    const Element w = detail::function_on_support(
        ss, th_s, [expo](double mu) { return std::pow(mu, expo); }, sigma.element.algebra);
    const Element m = quadratic_apply(w, rho.element);
    const SpectralDecomposition sm = spectral(m, tol);
    const double th_m = support_threshold(trace(m));
    const double neg_tol = tol * std::max(1.0, norm(m));

    double acc = 0.0;
    for (std::size_t i = 0; i < sm.eigenvalues.size(); ++i) {
        const double nu = sm.eigenvalues[i];
        if (nu < -neg_tol)
            throw NumericError("sandwiched inner element has eigenvalue " + std::to_string(nu));
        if (nu <= th_m) continue;
        acc += std::pow(nu, 1.0 + s) * sm.multiplicities[i];
    }
    return std::log(acc);
}

// Sandwiched relative Renyi entropy D~_{1+s} = phi~(-s)/s; s in (-1,0) is
// supported and is what the converse bound consumes.
inline double srr(const State& rho, const State& sigma, double s, double tol = 1e-9,
                  double support_tol = 1e-10) {
    const double phi = srr_phi(rho, sigma, s, tol, support_tol);
    return phi / s;
}

// ---------------------------------------------------------------------------
// Pinching

// kappa_C(rho) = sum_i P_{c_i}(rho).
inline State pinch(const Csoi& C, const State& rho, bool validate = true, double tol = 1e-8) {
    if (validate) validate_csoi(C, tol);
    Element out = rho.element.algebra->zero();
    for (const auto& c : C.idempotents) out = out + quadratic_apply(c, rho.element);
    return State{std::move(out)};
}

// kappa_sigma(rho): pinching by the CSOI of sigma's spectrum.
inline State pinch_by_state(const State& sigma, const State& rho, double tol = 1e-9) {
    const Csoi C = csoi_of(spectral(sigma.element, tol));
    return pinch(C, rho, /*validate=*/false, tol);
}

namespace detail {

// Composite route: non-pointwise tensor algebras are not power-associative on
// generic elements, so the in-algebra refinement is ill-posed there.  The
// measurement is instead constructed on the matrix side of the canonical
// factor embeddings and pulled back effect-by-effect through the metric
// duality; measured statistics agree with the matrix-side pinched measurement
// exactly, and the effects still sum to the unit.
inline Measurement pinched_measurement_composite(const State& rho, const State& sigma,
                                                 const std::optional<Measurement>& M, double tol) {
    const auto* ta = static_cast<const TensorAlgebra*>(rho.element.algebra.get());
    const FactorImages fi = factor_images(ta->factors());
    const auto& dims = ta->factor_dims();
    const auto& strides = ta->factor_strides();
    const Eigen::MatrixXcd A = embed_tensor_element(fi, dims, strides, rho.element.coeffs);
    const Eigen::MatrixXcd B = embed_tensor_element(fi, dims, strides, sigma.element.coeffs);
    const auto blocks = quantum_pinched_projectors(A, B, tol);

    const AlgebraPtr& alg = rho.element.algebra;
    Measurement out;
    auto add_effect = [&](const Eigen::MatrixXcd& C, const std::string& label) {
        const Eigen::VectorXd t = tensor_pullback_weights(fi, C);
        out.effects.push_back(Element{alg, t.cwiseQuotient(alg->metric_diag())});
        out.labels.push_back(label);
    };

    // Effects transfer through the unscaled homomorphism phi = Gamma * psi,
    // so that the refined family still sums to the unit.
    const double gamma_total =
        static_cast<double>(fi.total) / static_cast<double>(alg->rank());
    std::vector<Eigen::MatrixXcd> m_images;
    if (M)
        for (const auto& e : M->effects)
            m_images.push_back(gamma_total *
                               embed_tensor_element(fi, dims, strides, e.coeffs));

    for (std::size_t i = 0; i < blocks.size(); ++i)
        for (std::size_t j = 0; j < blocks[i].size(); ++j) {
            const std::string base = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
            if (!M) {
                add_effect(blocks[i][j], base);
            } else {
                for (std::size_t k = 0; k < m_images.size(); ++k)
                    add_effect(blocks[i][j] * m_images[k] * blocks[i][j],
                               base + ":" + std::to_string(k));
            }
        }
    return out;
}

}  // namespace detail

// Spectral refinement of kappa_sigma(rho) inside each block of sigma's CSOI;
// the refined family is the measurement underlying the direct part of the
// testing pipeline.  With a measurement M the effects are P_{c_{i,j}}(M_k);
// without one they are the refined idempotents themselves.
inline Measurement pinched_measurement(const State& rho, const State& sigma,
                                       const std::optional<Measurement>& M = std::nullopt,
                                       double tol = 1e-9) {
    require_same_algebra(rho.element, sigma.element);
    if (rho.element.algebra->kind() == Kind::Tensor && !rho.element.algebra->pointwise())
        return detail::pinched_measurement_composite(rho, sigma, M, tol);
    const SpectralDecomposition ss = spectral(sigma.element, tol);

    std::vector<Element> refined;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < ss.idempotents.size(); ++i) {
        const Element z = quadratic_apply(ss.idempotents[i], rho.element);
        const SpectralDecomposition sz = spectral(z, tol);
        const double th = support_threshold(trace(z));
        Element kernel = ss.idempotents[i];
        std::size_t kept = 0;
        for (std::size_t j = 0; j < sz.eigenvalues.size(); ++j) {
            if (std::abs(sz.eigenvalues[j]) <= th) continue;
            refined.push_back(sz.idempotents[j]);
            labels.push_back("(" + std::to_string(i) + "," + std::to_string(kept++) + ")");
            kernel = kernel - sz.idempotents[j];
        }
        if (norm(kernel) > 1e-8) {
            refined.push_back(std::move(kernel));
            labels.push_back("(" + std::to_string(i) + "," + std::to_string(kept) + ")");
        }
    }

    if (!M) return Measurement{std::move(refined), std::move(labels)};

    Measurement out;
    for (std::size_t b = 0; b < refined.size(); ++b)
        for (std::size_t k = 0; k < M->effects.size(); ++k) {
            out.effects.push_back(quadratic_apply(refined[b], M->effects[k]));
            out.labels.push_back(labels[b] + ":" + std::to_string(k));
        }
    return out;
}

// Random measurement with exact unit sum: M_i = P_{S^{-1/2}}(z_i^2) with
// S = sum_i z_i^2.
inline Measurement random_measurement(const AlgebraPtr& a, int outcomes, Rng& rng,
                                      double tol = 1e-9) {
    if (outcomes < 1) throw ValidationError("measurement needs at least one outcome");
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<Element> parts;
        Element total = a->zero();
        for (int i = 0; i < outcomes; ++i) {
            parts.push_back(random_cone_element(a, rng));
            total = total + parts.back();
        }
        const SpectralDecomposition st = spectral(total, tol);
        if (st.eigenvalues.front() < 1e-6 * st.eigenvalues.back()) continue;
        Element inv_half = a->zero();
        for (std::size_t j = 0; j < st.eigenvalues.size(); ++j)
            inv_half = inv_half + std::pow(st.eigenvalues[j], -0.5) * st.idempotents[j];
        Measurement M;
        for (int i = 0; i < outcomes; ++i) {
            M.effects.push_back(quadratic_apply(inv_half, parts[static_cast<std::size_t>(i)]));
            M.labels.push_back("m" + std::to_string(i));
        }
        return M;
    }
    throw NumericError("failed to draw a well-conditioned random measurement");
}

}  // namespace eja
