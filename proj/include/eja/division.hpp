#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace eja {

// Real normed division algebras R, C, H, O, built by Cayley-Dickson doubling.
// Unit multiplication is tabulated once: e_i * e_j = sign(i,j) * e_{index(i,j)}.
// Entries of matrix-type Jordan algebras are vectors over these units.
class DivisionAlgebra {
  public:
    explicit DivisionAlgebra(std::size_t dim) : dim_(dim) {
        sign_.assign(dim * dim, 1);
        index_.assign(dim * dim, 0);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) {
                auto [s, k] = unit_mul(i, j, dim);
                sign_[i * dim + j] = s;
                index_[i * dim + j] = k;
            }
    }

    std::size_t dim() const { return dim_; }

    // z += x * y (componentwise over units)
    void mul_acc(const double* x, const double* y, double* z) const {
        for (std::size_t i = 0; i < dim_; ++i) {
            if (x[i] == 0.0) continue;
            for (std::size_t j = 0; j < dim_; ++j) {
                z[index_[i * dim_ + j]] += sign_[i * dim_ + j] * x[i] * y[j];
            }
        }
    }

    // conj(x): negate imaginary units
    static void conj(double* x, std::size_t dim) {
        for (std::size_t i = 1; i < dim; ++i) x[i] = -x[i];
    }

  private:
    // Recursive Cayley-Dickson product of basis units inside an algebra of
    // dimension `dim`: (a,b)(c,d) = (ac - conj(d) b, d a + b conj(c)).
    static std::pair<int, std::size_t> unit_mul(std::size_t i, std::size_t j, std::size_t dim) {
        if (dim == 1) return {1, 0};
        const std::size_t h = dim / 2;
        const bool ib = i >= h, jb = j >= h;
        const std::size_t il = ib ? i - h : i, jl = jb ? j - h : j;
        if (!ib && !jb) {  // (a,0)(c,0) = (ac, 0)
            return unit_mul(il, jl, h);
        }
        if (!ib && jb) {  // (a,0)(0,d) = (0, d a)
            auto [s, k] = unit_mul(jl, il, h);
            return {s, k + h};
        }
        if (ib && !jb) {  // (0,b)(c,0) = (0, b conj(c))
            auto [s, k] = unit_mul(il, jl, h);
            return {jl == 0 ? s : -s, k + h};
        }
        // (0,b)(0,d) = (-conj(d) b, 0)
        auto [s, k] = unit_mul(jl, il, h);
        return {jl == 0 ? -s : s, k};
    }

    std::size_t dim_;
    std::vector<int> sign_;
    std::vector<std::size_t> index_;
};

}  // namespace eja
