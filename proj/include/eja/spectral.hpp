#pragma once

#include <algorithm>
#include <functional>
#include <map>

#include "eja/algebra.hpp"

namespace eja {

struct SpectralOptions {
    double cluster_tol = 1e-9;  // relative eigenvalue clustering tolerance
    double krylov_tol = 1e-10;  // numerical-rank cutoff for the power Gram sequence
    bool verify = true;         // sanity-check CSOI invariants after construction
    double verify_tol = 1e-6;
};

// x = sum_i lambda_i c_i with distinct eigenvalues and a complete system of
// orthogonal idempotents.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;  // strictly increasing
    std::vector<Element> idempotents;
    std::vector<double> multiplicities;  // tr(c_i)
};

struct Csoi {
    std::vector<Element> idempotents;
};

struct CsoiResiduals {
    double orthogonality = 0.0;
    double idempotency = 0.0;
    double completeness = 0.0;
};

inline CsoiResiduals csoi_residuals(const std::vector<Element>& cs) {
    CsoiResiduals r;
    if (cs.empty()) return r;
    Element sum = cs[0].algebra->zero();
    for (const auto& c : cs) {
        r.idempotency = std::max(r.idempotency, norm(jordan_product(c, c) - c));
        sum = sum + c;
    }
    r.completeness = norm(sum - cs[0].algebra->unit());
    for (std::size_t i = 0; i < cs.size(); ++i)
        for (std::size_t j = i + 1; j < cs.size(); ++j)
            r.orthogonality = std::max(r.orthogonality, norm(jordan_product(cs[i], cs[j])));
    return r;
}

inline void validate_csoi(const Csoi& C, double tol = 1e-8) {
    if (C.idempotents.empty()) throw ValidationError("empty CSOI");
    const CsoiResiduals r = csoi_residuals(C.idempotents);
    if (r.orthogonality > tol || r.idempotency > tol || r.completeness > tol)
        throw ValidationError("CSOI invariants violated (orth " + std::to_string(r.orthogonality) +
                              ", idem " + std::to_string(r.idempotency) + ", compl " +
                              std::to_string(r.completeness) + ")");
}

namespace detail {

struct RawSpectrum {
    std::vector<double> eigenvalues;  // unsorted ok
    std::vector<Element> idempotents;
};

// Merge eigenvalues within tol_abs and sum their idempotents.
inline SpectralDecomposition cluster_spectrum(const Element& x, RawSpectrum raw, double tol_abs) {
    std::vector<std::size_t> order(raw.eigenvalues.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return raw.eigenvalues[a] < raw.eigenvalues[b]; });

    SpectralDecomposition out;
    std::size_t pos = 0;
    while (pos < order.size()) {
        std::size_t end = pos + 1;
        while (end < order.size() &&
               raw.eigenvalues[order[end]] - raw.eigenvalues[order[end - 1]] <= tol_abs)
            ++end;
        Element c = raw.idempotents[order[pos]];
        for (std::size_t k = pos + 1; k < end; ++k) c = c + raw.idempotents[order[k]];
        const double m = trace(c);
        double lambda = 0.0;
        if (m > 0.5) {
            lambda = inner(x, c) / m;  // polish against the exact identity <x,c> = lambda tr c
        } else {
            for (std::size_t k = pos; k < end; ++k) lambda += raw.eigenvalues[order[k]];
            lambda /= static_cast<double>(end - pos);
        }
        out.eigenvalues.push_back(lambda);
        out.idempotents.push_back(std::move(c));
        out.multiplicities.push_back(m);
        pos = end;
    }
    return out;
}

inline void verify_spectrum(const Element& x, const SpectralDecomposition& s, double tol) {
    const double scale = std::max(1.0, norm(x));
    Element rec = x.algebra->zero();
    Element sum = x.algebra->zero();
    double idem = 0.0;
    for (std::size_t i = 0; i < s.idempotents.size(); ++i) {
        rec = rec + s.eigenvalues[i] * s.idempotents[i];
        sum = sum + s.idempotents[i];
        idem = std::max(idem, norm(jordan_product(s.idempotents[i], s.idempotents[i]) -
                                   s.idempotents[i]));
    }
    const double recon = norm(rec - x) / scale;
    const double compl_ = norm(sum - x.algebra->unit());
    if (recon > tol || compl_ > tol || idem > tol)
        throw NumericError("spectral decomposition failed verification (recon " +
                           std::to_string(recon) + ", compl " + std::to_string(compl_) +
                           ", idem " + std::to_string(idem) + ") on " +
                           x.algebra->spec_string());
}

// Pointwise algebras: eigenvalues are the coefficients themselves.  Clusters
// are formed up front so only one indicator vector per distinct eigenvalue is
// materialized.
inline RawSpectrum spectral_pointwise(const Element& x, double tol_abs) {
    const Eigen::Index n = x.coeffs.size();
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return x.coeffs[a] < x.coeffs[b]; });

    RawSpectrum raw;
    Eigen::Index pos = 0;
    while (pos < n) {
        Eigen::Index end = pos + 1;
        while (end < n && x.coeffs[order[end]] - x.coeffs[order[end - 1]] <= tol_abs) ++end;
        if ((raw.eigenvalues.size() + 1) * static_cast<std::size_t>(n) > 50'000'000)
            throw BudgetError("too many distinct eigenvalues to materialize idempotents",
                              raw.eigenvalues.size() * static_cast<std::size_t>(n));
        Eigen::VectorXd ind = Eigen::VectorXd::Zero(n);
        double lam = 0.0;
        for (Eigen::Index k = pos; k < end; ++k) {
            ind[order[k]] = 1.0;
            lam += x.coeffs[order[k]];
        }
        raw.eigenvalues.push_back(lam / static_cast<double>(end - pos));
        raw.idempotents.push_back(Element{x.algebra, std::move(ind)});
        pos = end;
    }
    return raw;
}

// Spin factor closed form: x = v0 e0 + w, eigenvalues v0 -+ |w| with
// idempotents (e0 -+ w/|w|)/2; rank-1 form {v0 : u} when w vanishes.
inline RawSpectrum spectral_spin(const Element& x, double tol_abs) {
    RawSpectrum raw;
    const Eigen::Index d = x.coeffs.size() - 1;
    const double v0 = x.coeffs[0];
    const Eigen::VectorXd w = x.coeffs.tail(d);
    const double wn = w.norm();
    if (wn <= 0.5 * tol_abs) {
        raw.eigenvalues.push_back(v0);
        raw.idempotents.push_back(x.algebra->unit());
        return raw;
    }
    Eigen::VectorXd minus(d + 1), plus(d + 1);
    minus[0] = 0.5;
    plus[0] = 0.5;
    minus.tail(d) = -0.5 / wn * w;
    plus.tail(d) = 0.5 / wn * w;
    raw.eigenvalues.push_back(v0 - wn);
    raw.idempotents.push_back(Element{x.algebra, std::move(minus)});
    raw.eigenvalues.push_back(v0 + wn);
    raw.idempotents.push_back(Element{x.algebra, std::move(plus)});
    return raw;
}

template <typename Scalar>
inline RawSpectrum spectral_matrix_eigen(
    const Element& x, double tol_abs,
    const std::function<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>(const Element&)>&
        to_mat,
    const std::function<Element(const AlgebraPtr&,
                                const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>&)>&
        from_mat) {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Mat M = to_mat(x);
    Eigen::SelfAdjointEigenSolver<Mat> es(M);
    if (es.info() != Eigen::Success) throw NumericError("matrix eigendecomposition failed");
    const auto& ev = es.eigenvalues();
    const auto& V = es.eigenvectors();

    RawSpectrum raw;
    Eigen::Index pos = 0;
    while (pos < ev.size()) {
        Eigen::Index end = pos + 1;
        while (end < ev.size() && ev[end] - ev[end - 1] <= tol_abs) ++end;
        Mat P = Mat::Zero(M.rows(), M.cols());
        for (Eigen::Index k = pos; k < end; ++k) P += V.col(k) * V.col(k).adjoint();
        raw.eigenvalues.push_back(ev.segment(pos, end - pos).mean());
        raw.idempotents.push_back(from_mat(x.algebra, P));
        pos = end;
    }
    return raw;
}

inline RawSpectrum spectral_qherm(const Element& x, double tol_abs) {
    const Eigen::MatrixXcd M = qherm_complex_image(x);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
    if (es.info() != Eigen::Success) throw NumericError("matrix eigendecomposition failed");
    const auto& ev = es.eigenvalues();
    const auto& V = es.eigenvectors();
    RawSpectrum raw;
    Eigen::Index pos = 0;
    while (pos < ev.size()) {
        Eigen::Index end = pos + 1;
        while (end < ev.size() && ev[end] - ev[end - 1] <= tol_abs) ++end;
        Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(M.rows(), M.cols());
        for (Eigen::Index k = pos; k < end; ++k) P += V.col(k) * V.col(k).adjoint();
        raw.eigenvalues.push_back(ev.segment(pos, end - pos).mean());
        raw.idempotents.push_back(qherm_from_complex_image(x.algebra, P));
        pos = end;
    }
    return raw;
}

// Generic path, valid in any EJA: detect the minimal-polynomial degree as the
// numerical rank of the power Gram sequence {u, x, x^2, ...} (built here in
// orthonormalized form), read the minimal polynomial's roots off the projected
// multiplication operator, and assemble the spectral idempotents from the same
// basis.  The projected operator is symmetric because of the associativity of
// the inner product, so its eigenvalues are real by construction.
inline RawSpectrum spectral_generic(const Element& x, const SpectralOptions& opt) {
    const AlgebraPtr& alg = x.algebra;
    const Eigen::Index dim = alg->dim();
    const Eigen::VectorXd& g = alg->metric_diag();
    auto dot = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return a.dot(g.cwiseProduct(b));
    };

    const double xnorm = norm(x);
    RawSpectrum raw;
    if (xnorm == 0.0) {
        raw.eigenvalues.push_back(0.0);
        raw.idempotents.push_back(alg->unit());
        return raw;
    }
    const Eigen::VectorXd xh = x.coeffs / xnorm;  // eigenvalues now in [-1, 1]

    const Eigen::Index maxd = std::min<Eigen::Index>(dim, alg->rank());
    std::vector<Eigen::VectorXd> Q;
    Q.reserve(maxd + 1);
    const double unorm = std::sqrt(static_cast<double>(alg->rank()));
    Q.push_back(alg->unit_coeffs() / unorm);

    // Orthogonalized power sequence.  The residual drops to round-off level
    // at the minimal-polynomial degree and rebounds on noise afterwards, so
    // closure is detected either by the fast relative threshold or by the
    // rebound off a small floor.
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(maxd, maxd);
    Eigen::VectorXd w(dim);
    Eigen::Index d = -1;
    double beta_max = 0.0, beta_min = std::numeric_limits<double>::infinity();
    Eigen::Index argmin = -1;
    for (Eigen::Index k = 0; k < maxd; ++k) {
        alg->product_into(xh, Q[k], w);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < Q.size(); ++j) {
                const double h = dot(Q[j], w);
                w -= h * Q[j];
                if (static_cast<Eigen::Index>(j) < maxd) H(j, k) += h;
            }
        }
        const double beta = std::sqrt(std::max(0.0, dot(w, w)));
        beta_max = std::max(beta_max, beta);
        if (beta <= 1e-13 || beta <= opt.krylov_tol * std::max(1.0, beta_max)) {
            d = k + 1;
            break;
        }
        if (beta < beta_min) {
            beta_min = beta;
            argmin = k;
        } else if (beta > 10.0 * beta_min && beta_min <= 1e-5 * std::max(1.0, beta_max)) {
            d = argmin + 1;  // rebound off the closure floor
            break;
        }
        if (k + 1 >= maxd) {
            if (beta <= 1e-6 * std::max(1.0, beta_max)) d = k + 1;
            if (beta_min <= 1e-5 * std::max(1.0, beta_max)) d = argmin + 1;
            break;
        }
        H(k + 1, k) = beta;
        Q.push_back(w / beta);
    }
    if (d < 0) {
        // Floors that got close to closure but never cleanly separated point
        // at clustered roots; anything larger means the power sequence is
        // genuinely not closing (composite power-associativity territory).
        if (beta_min <= 1e-3)
            throw DegeneracyError(
                "eigenvalue clusters too close to separate on " + alg->spec_string() +
                " (closure floor " + std::to_string(beta_min) + "); retry with a larger tol");
        throw NumericError("power sequence of element did not close at the algebra rank on " +
                           alg->spec_string());
    }
    Q.resize(static_cast<std::size_t>(d));
    Eigen::MatrixXd Hd = H.topLeftCorner(d, d);
    Hd = 0.5 * (Hd + Hd.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hd);
    if (es.info() != Eigen::Success) throw NumericError("projected eigendecomposition failed");

    for (Eigen::Index i = 0; i < d; ++i) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(dim);
        for (Eigen::Index j = 0; j < d; ++j) c += es.eigenvectors()(j, i) * Q[j];
        c *= unorm * es.eigenvectors()(0, i);  // scale fixed by u = sum_i c_i
        raw.eigenvalues.push_back(xnorm * es.eigenvalues()[i]);
        raw.idempotents.push_back(Element{alg, std::move(c)});
    }
    return raw;
}

inline RawSpectrum spectral_raw(const Element& x, double tol_abs, const SpectralOptions& opt);

inline RawSpectrum spectral_direct_sum(const Element& x, double tol_abs,
                                       const SpectralOptions& opt) {
    const auto* ds = static_cast<const DirectSumAlgebra*>(x.algebra.get());
    RawSpectrum raw;
    for (std::size_t f = 0; f < ds->factors().size(); ++f) {
        const auto& fa = ds->factors()[f];
        const Eigen::Index o = ds->offset(f), fd = fa->dim();
        Element xf{fa, x.coeffs.segment(o, fd)};
        RawSpectrum rf = spectral_raw(xf, tol_abs, opt);
        for (std::size_t i = 0; i < rf.eigenvalues.size(); ++i) {
            Eigen::VectorXd c = Eigen::VectorXd::Zero(x.coeffs.size());
            c.segment(o, fd) = rf.idempotents[i].coeffs;
            raw.eigenvalues.push_back(rf.eigenvalues[i]);
            raw.idempotents.push_back(Element{x.algebra, std::move(c)});
        }
    }
    return raw;
}

inline RawSpectrum spectral_raw(const Element& x, double tol_abs, const SpectralOptions& opt) {
    if (x.algebra->pointwise()) return spectral_pointwise(x, tol_abs);
    switch (x.algebra->kind()) {
        case Kind::Spin:
            return spectral_spin(x, tol_abs);
        case Kind::RealSym:
            return spectral_matrix_eigen<double>(x, tol_abs, realsym_to_matrix, realsym_from_matrix);
        case Kind::ComplexHerm:
            return spectral_matrix_eigen<std::complex<double>>(x, tol_abs, cherm_to_matrix,
                                                               cherm_from_matrix);
        case Kind::QuatHerm:
            return spectral_qherm(x, tol_abs);
        case Kind::DirectSum:
            return spectral_direct_sum(x, tol_abs, opt);
        default:
            return spectral_generic(x, opt);  // OctHerm3 and tensor composites
    }
}

}  // namespace detail

inline SpectralDecomposition spectral(const Element& x, const SpectralOptions& opt) {
    for (Eigen::Index i = 0; i < x.coeffs.size(); ++i)
        if (!std::isfinite(x.coeffs[i])) throw NumericError("non-finite coefficients in spectral");
    const double tol_abs = opt.cluster_tol * std::max(1.0, norm(x));
    SpectralDecomposition s =
        detail::cluster_spectrum(x, detail::spectral_raw(x, tol_abs, opt), tol_abs);
    if (opt.verify) detail::verify_spectrum(x, s, opt.verify_tol);
    return s;
}

inline SpectralDecomposition spectral(const Element& x, double tol = 1e-9) {
    SpectralOptions opt;
    opt.cluster_tol = tol;
    return spectral(x, opt);
}

inline Csoi csoi_of(const SpectralDecomposition& s) { return Csoi{s.idempotents}; }

// f(x) = sum_i f(lambda_i) c_i.  `f` may throw DomainError for eigenvalues
// outside its domain.
inline Element apply_function(const Element& x, const std::function<double(double)>& f,
                              double tol = 1e-9) {
    const SpectralDecomposition s = spectral(x, tol);
    Element out = x.algebra->zero();
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
        out = out + f(s.eigenvalues[i]) * s.idempotents[i];
    return out;
}

// Minimum eigenvalue; callers treat >= -tol as cone membership.
inline double cone_min_eig(const Element& x, double tol = 1e-9) {
    return spectral(x, tol).eigenvalues.front();
}

struct PeirceBlocks {
    std::vector<Element> diagonal;                       // x_i in V(c_i, 1)
    std::map<std::pair<int, int>, Element> off_diagonal; // x_{i,j} in V(c_i,1/2) cap V(c_j,1/2)
};

// x_i = P_{c_i}(x);  x_{i,j} = P_{c_i + c_j}(x) - x_i - x_j.
inline PeirceBlocks peirce_blocks(const Csoi& C, const Element& x, double tol = 1e-8) {
    validate_csoi(C, tol);
    PeirceBlocks out;
    const int n = static_cast<int>(C.idempotents.size());
    for (int i = 0; i < n; ++i) out.diagonal.push_back(quadratic_apply(C.idempotents[i], x));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Element cij = C.idempotents[i] + C.idempotents[j];
            out.off_diagonal.emplace(std::make_pair(i, j), quadratic_apply(cij, x) -
                                                               out.diagonal[i] - out.diagonal[j]);
        }
    return out;
}

}  // namespace eja
