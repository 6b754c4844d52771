#pragma once

#include "eja/entropy.hpp"

namespace eja {

// Linear map between algebras stored as an explicit matrix on basis
// coefficients; adjoints and composition are then plain matrix operations.
struct LinearChannel {
    AlgebraPtr domain;
    AlgebraPtr codomain;
    Eigen::MatrixXd matrix;  // codomain.dim x domain.dim
    std::string name;
};

inline Element apply_channel(const LinearChannel& ch, const Element& x) {
    if (!same_algebra(x.algebra, ch.domain))
        throw DimensionError("element not in channel domain");
    return Element{ch.codomain, ch.matrix * x.coeffs};
}

inline State apply_channel(const LinearChannel& ch, const State& rho) {
    return State{apply_channel(ch, rho.element)};
}

// Partial trace over the named factors of a tensor algebra: each traced
// factor is contracted against its unit.
inline LinearChannel partial_trace(const AlgebraPtr& a, const std::vector<std::size_t>& traced) {
    if (a->kind() != Kind::Tensor) throw DimensionError("partial trace needs a tensor algebra");
    const auto* ta = static_cast<const detail::TensorAlgebra*>(a.get());
    const std::size_t nf = ta->factors().size();
    std::vector<bool> is_traced(nf, false);
    for (std::size_t f : traced) {
        if (f >= nf) throw DimensionError("partial trace factor index out of range");
        is_traced[f] = true;
    }
    std::vector<AlgebraPtr> kept;
    for (std::size_t f = 0; f < nf; ++f)
        if (!is_traced[f]) kept.push_back(ta->factors()[f]);
    if (kept.empty() || kept.size() == nf)
        throw DimensionError("partial trace needs a nonempty proper factor subset");
    AlgebraPtr cod = kept.size() == 1 ? kept[0] : tensor_algebra(kept);

    // Per-factor basis traces.
    std::vector<Eigen::VectorXd> btr(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        const auto& fa = ta->factors()[f];
        btr[f] = fa->metric_diag().cwiseProduct(fa->unit_coeffs());
    }

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(cod->dim(), a->dim());
    const auto& strides = ta->factor_strides();
    for (Eigen::Index idx = 0; idx < a->dim(); ++idx) {
        double weight = 1.0;
        Eigen::Index out_idx = 0;
        Eigen::Index rem = idx;
        for (std::size_t f = 0; f < nf; ++f) {
            const Eigen::Index af = rem / strides[f];
            rem %= strides[f];
            if (is_traced[f]) {
                weight *= btr[f][af];
            } else {
                out_idx = out_idx * ta->factors()[f]->dim() + af;
            }
        }
        if (weight != 0.0) M(out_idx, idx) += weight;
    }
    std::string nm = "tr[";
    for (std::size_t i = 0; i < traced.size(); ++i) nm += (i ? "," : "") + std::to_string(traced[i]);
    return LinearChannel{a, cod, std::move(M), nm + "]"};
}

// kappa_M(x) = sum_i tr(M_i o x) u_i into the classical algebra of outcomes.
inline LinearChannel observation_map(const Measurement& M) {
    const AlgebraPtr dom = M.effects.at(0).algebra;
    const AlgebraPtr cod = make_classical(static_cast<Eigen::Index>(M.effects.size()));
    Eigen::MatrixXd mat(cod->dim(), dom->dim());
    for (std::size_t i = 0; i < M.effects.size(); ++i)
        mat.row(static_cast<Eigen::Index>(i)) =
            M.effects[i].coeffs.cwiseProduct(dom->metric_diag()).transpose();
    return LinearChannel{dom, cod, std::move(mat), "observe"};
}

// Adjoint with respect to the two normalized metrics:
// <ch(x), y>_cod = <x, adjoint(ch)(y)>_dom.
inline LinearChannel adjoint(const LinearChannel& ch) {
    const Eigen::VectorXd gd_inv = ch.domain->metric_diag().cwiseInverse();
    Eigen::MatrixXd M = gd_inv.asDiagonal() * ch.matrix.transpose() *
                        ch.codomain->metric_diag().asDiagonal();
    return LinearChannel{ch.codomain, ch.domain, std::move(M), ch.name + "*"};
}

inline LinearChannel compose(const LinearChannel& outer, const LinearChannel& inner) {
    if (!same_algebra(inner.codomain, outer.domain))
        throw DimensionError("channel composition domain/codomain mismatch");
    return LinearChannel{inner.domain, outer.codomain, outer.matrix * inner.matrix,
                         outer.name + "." + inner.name};
}

inline LinearChannel identity_channel(const AlgebraPtr& a) {
    return LinearChannel{a, a, Eigen::MatrixXd::Identity(a->dim(), a->dim()), "id"};
}

// Randomized channel verification.  Complete positivity is probed only by
// tensoring with classical ancillas; that probe is sound because a classical
// factor keeps the composite a genuine Euclidean Jordan algebra.
struct ChannelReport {
    double tp_residual = 0.0;
    double positivity_min_eig = 0.0;
    double unit_preserved_residual = 0.0;
    double cp_ancilla_min_eig = 0.0;
    int trials = 0;
};

inline ChannelReport channel_report(const LinearChannel& ch, int trials, double tol,
                                    std::uint64_t seed, Eigen::Index ancilla_outcomes = 2) {
    if (trials < 1) throw ValidationError("channel_report needs trials >= 1");
    Rng rng(seed);
    ChannelReport rep;
    rep.trials = trials;
    rep.positivity_min_eig = std::numeric_limits<double>::infinity();
    rep.cp_ancilla_min_eig = std::numeric_limits<double>::infinity();

    for (Eigen::Index a = 0; a < ch.domain->dim(); ++a) {
        Element e = ch.domain->basis_element(a);
        rep.tp_residual =
            std::max(rep.tp_residual, std::abs(trace(apply_channel(ch, e)) - trace(e)));
    }
    rep.unit_preserved_residual =
        norm(apply_channel(adjoint(ch), ch.codomain->unit()) - ch.domain->unit());

    const AlgebraPtr anc = make_classical(ancilla_outcomes);
    const AlgebraPtr probe_dom = tensor_algebra({ch.domain, anc});
    const AlgebraPtr probe_cod = tensor_algebra({ch.codomain, anc});
    Eigen::MatrixXd ext(probe_cod->dim(), probe_dom->dim());
    ext.setZero();
    for (Eigen::Index i = 0; i < ch.matrix.rows(); ++i)
        for (Eigen::Index j = 0; j < ch.matrix.cols(); ++j)
            for (Eigen::Index b = 0; b < ancilla_outcomes; ++b)
                ext(i * ancilla_outcomes + b, j * ancilla_outcomes + b) = ch.matrix(i, j);
    const LinearChannel probe{probe_dom, probe_cod, std::move(ext), ch.name + "@id"};

    for (int t = 0; t < trials; ++t) {
        Element x = random_cone_element(ch.domain, rng);
        rep.tp_residual =
            std::max(rep.tp_residual, std::abs(trace(apply_channel(ch, x)) - trace(x)));
        rep.positivity_min_eig =
            std::min(rep.positivity_min_eig, cone_min_eig(apply_channel(ch, x), tol));
        Element xe = random_cone_element(probe_dom, rng);
        rep.cp_ancilla_min_eig =
            std::min(rep.cp_ancilla_min_eig, cone_min_eig(apply_channel(probe, xe), tol));
    }
    return rep;
}

}  // namespace eja
