#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eja/axioms.hpp"
#include "eja/maps.hpp"

namespace eja {

// Optimal type-II errors of the binary test p-vs-q under type-I error <= eps.
// The randomized optimum fills acceptance mass to exactly 1 - eps with a
// fractional boundary atom; the deterministic value uses the smallest
// likelihood-ratio prefix reaching that mass.
struct NpResult {
    double beta_randomized = 1.0;
    double beta_deterministic = 1.0;
    double threshold = 0.0;  // likelihood ratio at the boundary atom
    double epsilon = 0.0;
};

inline NpResult classical_np(const Distribution& p, const Distribution& q, double epsilon,
                             double support_tol = kDistSupportTol) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw ValidationError("epsilon must lie in (0,1)");
    if (p.probs.size() != q.probs.size()) throw DimensionError("distribution length mismatch");
    const Eigen::Index n = p.probs.size();

    // Sort by likelihood ratio descending, q-null atoms first, ties stable by
    // outcome index.
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto ratio = [&](Eigen::Index i) {
        if (q.probs[i] <= support_tol)
            return p.probs[i] > support_tol ? std::numeric_limits<double>::infinity() : 0.0;
        return p.probs[i] / q.probs[i];
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return ratio(a) > ratio(b); });

    NpResult out;
    out.epsilon = epsilon;
    const double target = 1.0 - epsilon;
    double pcum = 0.0, qcum = 0.0;
    bool det_done = false, rand_done = false;
    for (Eigen::Index k = 0; k < n && !(det_done && rand_done); ++k) {
        const Eigen::Index i = order[k];
        if (!rand_done && pcum + p.probs[i] >= target) {
            const double gamma = p.probs[i] > 0.0 ? (target - pcum) / p.probs[i] : 0.0;
            out.beta_randomized = qcum + gamma * q.probs[i];
            out.threshold = ratio(i);
            rand_done = true;
        }
        pcum += p.probs[i];
        qcum += q.probs[i];
        if (!det_done && pcum >= target) {
            out.beta_deterministic = qcum;
            det_done = true;
        }
    }
    if (!rand_done) out.beta_randomized = qcum;      // p summed below target (round-off)
    if (!det_done) out.beta_deterministic = qcum;
    return out;
}

// Exact n-copy test between product distributions.  Small problems enumerate
// the product sample space; larger ones aggregate by type classes, which is
// exact because the likelihood ratio is constant on each class.
inline NpResult classical_np_iid(const Distribution& p, const Distribution& q, int n,
                                 double epsilon, std::size_t budget = kDefaultBudget) {
    if (n < 1) throw ValidationError("classical_np_iid needs n >= 1");
    if (p.probs.size() != q.probs.size()) throw DimensionError("distribution length mismatch");
    const Eigen::Index k = p.probs.size();

    double atoms = 1.0;
    for (int i = 0; i < n; ++i) atoms *= static_cast<double>(k);
    if (atoms <= static_cast<double>(budget)) {
        const Eigen::Index total = static_cast<Eigen::Index>(atoms);
        Eigen::VectorXd pn(total), qn(total);
        for (Eigen::Index idx = 0; idx < total; ++idx) {
            double pp = 1.0, qq = 1.0;
            Eigen::Index rem = idx;
            for (int d = n - 1; d >= 0; --d) {
                const Eigen::Index a = rem % k;
                rem /= k;
                pp *= p.probs[a];
                qq *= q.probs[a];
            }
            pn[idx] = pp;
            qn[idx] = qq;
        }
        return classical_np(Distribution{std::move(pn), {}}, Distribution{std::move(qn), {}},
                            epsilon);
    }

    // Type classes: counts c with sum c_i = n; class mass = multinomial * prod p^c.
    std::vector<double> logp(static_cast<std::size_t>(k)), logq(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) {
        logp[static_cast<std::size_t>(i)] =
            p.probs[i] > 0.0 ? std::log(p.probs[i]) : -std::numeric_limits<double>::infinity();
        logq[static_cast<std::size_t>(i)] =
            q.probs[i] > 0.0 ? std::log(q.probs[i]) : -std::numeric_limits<double>::infinity();
    }
    std::vector<double> pc, qc;
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    const double logfact_n = std::lgamma(static_cast<double>(n) + 1.0);
    std::function<void(Eigen::Index, Eigen::Index)> rec = [&](Eigen::Index slot,
                                                              Eigen::Index remaining) {
        if (slot == k - 1) {
            counts[static_cast<std::size_t>(slot)] = remaining;
            double logmult = logfact_n;
            double lp = 0.0, lq = 0.0;
            for (Eigen::Index i = 0; i < k; ++i) {
                const auto ci = counts[static_cast<std::size_t>(i)];
                logmult -= std::lgamma(static_cast<double>(ci) + 1.0);
                if (ci > 0) {
                    lp += static_cast<double>(ci) * logp[static_cast<std::size_t>(i)];
                    lq += static_cast<double>(ci) * logq[static_cast<std::size_t>(i)];
                }
            }
            pc.push_back(std::isfinite(lp) ? std::exp(logmult + lp) : 0.0);
            qc.push_back(std::isfinite(lq) ? std::exp(logmult + lq) : 0.0);
            return;
        }
        for (Eigen::Index c = 0; c <= remaining; ++c) {
            counts[static_cast<std::size_t>(slot)] = c;
            rec(slot + 1, remaining - c);
        }
    };
    rec(0, n);
    Eigen::VectorXd pn = Eigen::Map<Eigen::VectorXd>(pc.data(), static_cast<Eigen::Index>(pc.size()));
    Eigen::VectorXd qn = Eigen::Map<Eigen::VectorXd>(qc.data(), static_cast<Eigen::Index>(qc.size()));
    return classical_np(Distribution{std::move(pn), {}}, Distribution{std::move(qn), {}}, epsilon);
}

// ---------------------------------------------------------------------------

struct PinchedBeta {
    NpResult np;
    Measurement measurement;  // the identity pinched measurement on n copies
    Distribution p, q;
};

// Measure rho^n and sigma^n with the identity pinched measurement and run the
// classical test; the resulting beta upper-bounds beta^n_eps(rho||sigma)
// since a measurement followed by a classical test is a valid effect family.
inline PinchedBeta pinched_beta(const State& rho, const State& sigma, int n, double epsilon,
                                std::size_t budget = kDefaultBudget, double tol = 1e-9) {
    const Element rn = iid_power(rho.element, static_cast<std::size_t>(n), budget);
    const Element sn = iid_power(sigma.element, static_cast<std::size_t>(n), budget);
    const State rhon{rn}, sigman{sn};
    PinchedBeta out;
    out.measurement = pinched_measurement(rhon, sigman, std::nullopt, tol);
    out.p = measure(out.measurement, rhon, 1e-8);
    out.q = measure(out.measurement, sigman, 1e-8);
    out.np = classical_np(out.p, out.q, epsilon);
    return out;
}

// Best lower bound over the grid of the type-I exponent forced by type-II
// rate r: max_s (-phi~(s) - s r) / (1 - s) with s < 0.  A positive value
// certifies that rate r drives the type-I error to one.
inline double converse_exponent_bound(const State& rho, const State& sigma, double r,
                                      const std::vector<double>& s_grid, double tol = 1e-9) {
    if (r < 0.0) throw ValidationError("converse bound needs r >= 0");
    double best = -std::numeric_limits<double>::infinity();
    for (double s : s_grid) {
        if (!(s > -1.0 && s < 0.0))
            throw ValidationError("converse s-grid must lie in (-1,0)");
        // phi~(s) at s<0 equals (-s) * SRR at order 1-s.
        const double dtilde = srr(rho, sigma, -s, tol);
        if (!std::isfinite(dtilde)) continue;
        const double phit = -s * dtilde;
        best = std::max(best, (-phit - s * r) / (1.0 - s));
    }
    return best;
}

// ---------------------------------------------------------------------------

// One finite-n experiment row.
struct SteinRecord {
    int n = 0;
    double pinched_rate = 0.0;        // (1/n) D^{I}(rho^n || sigma^n)
    double achievable_exponent = 0.0; // -(1/n) log beta from the pinched test
    double converse_bound = 0.0;      // best Lemma-style bound at that rate
    double target = 0.0;              // D(rho||sigma)
    double gap_bound = 0.0;           // (d-1) log(n+1) / n
    double beta_deterministic = 1.0;  // logged alongside the randomized value
};

struct SteinDiagnostics {
    std::vector<int> sigma_eig_counts;  // |C_{sigma^\otimes n}| per n
    std::vector<int> rho_eig_counts;
    std::vector<int> count_bounds;      // (n+1)^{d-1}
    std::vector<std::string> warnings;  // soft monotone-trend notes
};

inline std::vector<SteinRecord> stein_scan(const State& rho, const State& sigma, double epsilon,
                                           const std::vector<int>& n_list,
                                           const std::vector<double>& s_grid = {-0.5, -0.25, -0.1,
                                                                                -0.05, -0.01},
                                           std::size_t budget = kDefaultBudget, double tol = 1e-9,
                                           SteinDiagnostics* diag = nullptr) {
    const double target = relative_entropy(rho, sigma, tol);
    const SpectralDecomposition ssig = spectral(sigma.element, tol);
    const SpectralDecomposition srho = spectral(rho.element, tol);
    const int d_sigma = static_cast<int>(ssig.eigenvalues.size());
    const int d_rho = static_cast<int>(srho.eigenvalues.size());

    std::vector<SteinRecord> records;
    double prev_exponent = -std::numeric_limits<double>::infinity();
    for (int n : n_list) {
        if (n < 1) throw ValidationError("stein_scan needs n >= 1");
        SteinRecord rec;
        rec.n = n;
        rec.target = target;
        rec.gap_bound = (d_sigma - 1) * std::log(static_cast<double>(n) + 1.0) /
                        static_cast<double>(n);

        const PinchedBeta pb = pinched_beta(rho, sigma, n, epsilon, budget, tol);
        rec.pinched_rate = classical_relative(pb.p, pb.q) / static_cast<double>(n);
        rec.achievable_exponent =
            pb.np.beta_randomized > 0.0
                ? -std::log(pb.np.beta_randomized) / static_cast<double>(n)
                : std::numeric_limits<double>::infinity();
        rec.beta_deterministic = pb.np.beta_deterministic;
        rec.converse_bound =
            std::isfinite(rec.achievable_exponent)
                ? converse_exponent_bound(rho, sigma, rec.achievable_exponent, s_grid, tol)
                : std::numeric_limits<double>::infinity();

        // Achievability sandwich from the finite-n bound.
        const double slack = 1e-7;
        if (rec.pinched_rate < target - rec.gap_bound - slack ||
            rec.pinched_rate > target + slack)
            throw ValidationError("pinched rate " + std::to_string(rec.pinched_rate) +
                                  " violates the finite-n sandwich at n=" + std::to_string(n));

        if (diag) {
            const Element sn = iid_power(sigma.element, static_cast<std::size_t>(n), budget);
            const Element rn = iid_power(rho.element, static_cast<std::size_t>(n), budget);
            diag->sigma_eig_counts.push_back(
                static_cast<int>(spectral(sn, tol).eigenvalues.size()));
            diag->rho_eig_counts.push_back(static_cast<int>(spectral(rn, tol).eigenvalues.size()));
            diag->count_bounds.push_back(static_cast<int>(
                std::pow(n + 1.0, std::max(d_sigma, d_rho) - 1) + 0.5));
            if (rec.achievable_exponent + rec.gap_bound < prev_exponent)
                diag->warnings.push_back("achievable exponent dipped at n=" + std::to_string(n));
        }
        prev_exponent = std::max(prev_exponent, rec.achievable_exponent - rec.gap_bound);
        records.push_back(rec);
    }
    return records;
}

// ---------------------------------------------------------------------------

struct NpElementTest {
    Element test;         // T = sum of positive-eigenvalue idempotents
    double rho_accept;    // <rho^n, T>
    double sigma_accept;  // <sigma^n, T>
};

// EXPERIMENTAL: threshold effect T for rho^n - t sigma^n via the spectral
// positive part.  On composite algebras this requires generic-element
// power-associativity, which is exactly what the axiom probe measures; the
// construction refuses when the probe reports a J2 residual above gate_tol.
inline NpElementTest np_element_test(const State& rho, const State& sigma, int n, double t,
                                     std::size_t budget = kDefaultBudget, double tol = 1e-9,
                                     double gate_tol = 1e-8) {
    if (n < 1) throw ValidationError("np_element_test needs n >= 1");
    const Element rn = iid_power(rho.element, static_cast<std::size_t>(n), budget);
    const Element sn = iid_power(sigma.element, static_cast<std::size_t>(n), budget);
    const AlgebraPtr an = rn.algebra;
    if (an->kind() == Kind::Tensor && !an->pointwise()) {
        const AxiomReport probe = check_axioms(an, 32, tol, 0xE1AULL);
        if (!(probe.max_residual_j2 <= gate_tol))
            throw AxiomGateError(
                "refusing the spectral threshold test on " + an->spec_string() +
                ": the composite J2 probe reports residual " +
                std::to_string(probe.max_residual_j2) +
                ", so generic-element power-associativity is not established");
    }
    const Element z = rn - t * sn;
    const SpectralDecomposition s = spectral(z, tol);
    Element T = an->zero();
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
        if (s.eigenvalues[i] > 0.0) T = T + s.idempotents[i];
    return NpElementTest{T, inner(rn, T), inner(sn, T)};
}

// Exact beta^n_eps over the spectral threshold family (with boundary
// randomization), valid wherever np_element_test is.  Used by tests to
// compare exact and pinched values.
inline double np_exact_beta(const State& rho, const State& sigma, int n, double epsilon,
                            std::size_t budget = kDefaultBudget, double tol = 1e-9) {
    const Element rn = iid_power(rho.element, static_cast<std::size_t>(n), budget);
    const Element sn = iid_power(sigma.element, static_cast<std::size_t>(n), budget);
    const AlgebraPtr an = rn.algebra;
    const double target = 1.0 - epsilon;

    // Acceptance mass <rho^n, T(t)> is non-increasing in the threshold t.
    auto accept = [&](double t) {
        const Element z = rn - t * sn;
        const SpectralDecomposition s = spectral(z, tol);
        Element T = an->zero();
        for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
            if (s.eigenvalues[i] > 0.0) T = T + s.idempotents[i];
        return std::make_pair(inner(rn, T), inner(sn, T));
    };

    double lo = 0.0, hi = 1.0;
    while (accept(hi).first >= target && hi < 1e18) hi *= 2.0;
    if (accept(hi).first >= target) return accept(hi).second;  // disjoint supports
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (accept(mid).first >= target)
            lo = mid;
        else
            hi = mid;
    }
    const auto [p_lo, q_lo] = accept(lo);
    const auto [p_hi, q_hi] = accept(hi);
    if (p_lo <= p_hi + 1e-15) return q_lo;  // no boundary atom to randomize
    const double gamma = (target - p_hi) / (p_lo - p_hi);
    return q_hi + gamma * (q_lo - q_hi);
}

// Exact quantum Neyman-Pearson beta between density matrices A, B on n
// copies, by thresholding A^n - t B^n and randomizing on the boundary.
inline double quantum_np_beta(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B, int n,
                              double epsilon) {
    Eigen::MatrixXcd An = Eigen::MatrixXcd::Identity(1, 1), Bn = An;
    for (int i = 0; i < n; ++i) {
        An = detail::kron(An, A);
        Bn = detail::kron(Bn, B);
    }
    const double target = 1.0 - epsilon;
    auto accept = [&](double t) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(An - t * Bn);
        double pa = 0.0, qa = 0.0;
        for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
            if (es.eigenvalues()[k] <= 0.0) continue;
            const auto v = es.eigenvectors().col(k);
            pa += (v.adjoint() * An * v).real()(0, 0);
            qa += (v.adjoint() * Bn * v).real()(0, 0);
        }
        return std::make_pair(pa, qa);
    };
    double lo = 0.0, hi = 1.0;
    while (accept(hi).first >= target && hi < 1e18) hi *= 2.0;
    if (accept(hi).first >= target) return accept(hi).second;  // disjoint supports
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (accept(mid).first >= target)
            lo = mid;
        else
            hi = mid;
    }
    const auto [p_lo, q_lo] = accept(lo);
    const auto [p_hi, q_hi] = accept(hi);
    if (p_lo <= p_hi + 1e-15) return q_lo;
    const double gamma = (target - p_hi) / (p_lo - p_hi);
    return q_hi + gamma * (q_lo - q_hi);
}

}  // namespace eja
