#pragma once

#include "eja/algebra.hpp"
#include "eja/rng.hpp"
#include "eja/spectral.hpp"

namespace eja {

inline Element random_element(const AlgebraPtr& a, Rng& rng) {
    Eigen::VectorXd c(a->dim());
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = rng.normal();
    return Element{a, std::move(c)};
}

// Cone member z*z for standard-normal z.
inline Element random_cone_element(const AlgebraPtr& a, Rng& rng) {
    Element z = random_element(a, rng);
    return jordan_product(z, z);
}

// Unit-trace cone member z*z / tr(z*z).
inline Element random_state_element(const AlgebraPtr& a, Rng& rng) {
    Element x = random_cone_element(a, rng);
    const double t = trace(x);
    if (t <= 0.0) return 1.0 / static_cast<double>(a->rank()) * a->unit();
    return (1.0 / t) * x;
}

// CSOI of a random element's spectrum.
inline Csoi random_csoi(const AlgebraPtr& a, Rng& rng) {
    return csoi_of(spectral(random_element(a, rng)));
}

}  // namespace eja
