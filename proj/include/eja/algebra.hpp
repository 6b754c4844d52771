#pragma once

#include <Eigen/Dense>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "eja/division.hpp"
#include "eja/errors.hpp"

namespace eja {

enum class Kind { Classical, RealSym, ComplexHerm, QuatHerm, Spin, OctHerm3, DirectSum, Tensor };

class Algebra;
using AlgebraPtr = std::shared_ptr<const Algebra>;

// Default cap on tensor coefficient counts; keeps runs at desk scale.
inline constexpr std::size_t kDefaultBudget = 100000;

// Real coefficient vector over a fixed algebra basis.
struct Element {
    AlgebraPtr algebra;
    Eigen::VectorXd coeffs;
};

// Immutable description of a Euclidean Jordan algebra: basis, normalized
// metric, unit, rank, and the Jordan product on coefficient vectors.
// Instances are created through the make_* factories below and shared by
// pointer; all operations on elements are pure.
class Algebra : public std::enable_shared_from_this<Algebra> {
  public:
    virtual ~Algebra() = default;

    Kind kind() const { return kind_; }
    Eigen::Index dim() const { return dim_; }
    Eigen::Index rank() const { return rank_; }
    const Eigen::VectorXd& metric_diag() const { return metric_diag_; }
    const Eigen::VectorXd& unit_coeffs() const { return unit_; }
    const std::vector<std::string>& basis_labels() const { return labels_; }
    const std::string& spec_string() const { return spec_; }

    // True when the Jordan product is componentwise in this basis
    // (classical systems and their sums/tensors).
    bool pointwise() const { return pointwise_; }

    // z = x o y on raw coefficient vectors; z must not alias x or y.
    virtual void product_into(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                              Eigen::VectorXd& z) const = 0;

    Element element(Eigen::VectorXd c) const {
        if (c.size() != dim_) throw DimensionError("coefficient length does not match algebra dim");
        return Element{shared_from_this(), std::move(c)};
    }
    Element zero() const { return Element{shared_from_this(), Eigen::VectorXd::Zero(dim_)}; }
    Element unit() const { return Element{shared_from_this(), unit_}; }
    Element basis_element(Eigen::Index a) const {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(dim_);
        c[a] = 1.0;
        return Element{shared_from_this(), std::move(c)};
    }

    // Coefficients of e_a o e_b.
    Eigen::VectorXd structure(Eigen::Index a, Eigen::Index b) const {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(dim_), y = Eigen::VectorXd::Zero(dim_);
        x[a] = 1.0;
        y[b] = 1.0;
        Eigen::VectorXd z(dim_);
        product_into(x, y, z);
        return z;
    }

  protected:
    Kind kind_;
    Eigen::Index dim_ = 0;
    Eigen::Index rank_ = 0;
    Eigen::VectorXd metric_diag_;
    Eigen::VectorXd unit_;
    std::vector<std::string> labels_;
    std::string spec_;
    bool pointwise_ = false;
};

inline bool same_algebra(const AlgebraPtr& a, const AlgebraPtr& b) {
    return a.get() == b.get() || a->spec_string() == b->spec_string();
}

inline void require_same_algebra(const Element& x, const Element& y) {
    if (!same_algebra(x.algebra, y.algebra))
        throw DimensionError("elements belong to different algebras: " +
                             x.algebra->spec_string() + " vs " + y.algebra->spec_string());
}

// ---------------------------------------------------------------------------
// Element arithmetic

inline Element operator+(const Element& x, const Element& y) {
    require_same_algebra(x, y);
    return Element{x.algebra, x.coeffs + y.coeffs};
}
inline Element operator-(const Element& x, const Element& y) {
    require_same_algebra(x, y);
    return Element{x.algebra, x.coeffs - y.coeffs};
}
inline Element operator*(double s, const Element& x) { return Element{x.algebra, s * x.coeffs}; }
inline Element operator*(const Element& x, double s) { return s * x; }
inline Element operator-(const Element& x) { return Element{x.algebra, -x.coeffs}; }

inline Element jordan_product(const Element& x, const Element& y) {
    require_same_algebra(x, y);
    Eigen::VectorXd z(x.algebra->dim());
    x.algebra->product_into(x.coeffs, y.coeffs, z);
    return Element{x.algebra, std::move(z)};
}

inline double inner(const Element& x, const Element& y) {
    require_same_algebra(x, y);
    return x.coeffs.dot(x.algebra->metric_diag().cwiseProduct(y.coeffs));
}

inline double trace(const Element& x) {
    return x.coeffs.dot(x.algebra->metric_diag().cwiseProduct(x.algebra->unit_coeffs()));
}

inline double norm(const Element& x) { return std::sqrt(std::max(0.0, inner(x, x))); }

// P_x(y) = 2 x o (x o y) - x^2 o y
inline Element quadratic_apply(const Element& x, const Element& y) {
    require_same_algebra(x, y);
    Element xy = jordan_product(x, y);
    Element xxy = jordan_product(x, xy);
    Element xx = jordan_product(x, x);
    return 2.0 * xxy - jordan_product(xx, y);
}

// Left-nested power x^k, x^0 = u.
inline Element power(const Element& x, unsigned k) {
    Element acc = x.algebra->unit();
    for (unsigned i = 0; i < k; ++i) acc = jordan_product(x, acc);
    return acc;
}

// Balanced-nesting power, used as a power-associativity diagnostic.
inline Element power_balanced(const Element& x, unsigned k) {
    if (k == 0) return x.algebra->unit();
    if (k == 1) return x;
    Element half = power_balanced(x, k / 2);
    Element sq = jordan_product(half, half);
    return (k % 2 == 0) ? sq : jordan_product(x, sq);
}

// || x^k (left-nested) - x^k (balanced) ||, reported by the axiom harness.
inline double power_nesting_residual(const Element& x, unsigned k) {
    return norm(power(x, k) - power_balanced(x, k));
}

// ---------------------------------------------------------------------------
// Concrete algebras

namespace detail {

class ClassicalAlgebra final : public Algebra {
  public:
    explicit ClassicalAlgebra(Eigen::Index d) {
        if (d < 1) throw DimensionError("classical dimension must be >= 1");
        kind_ = Kind::Classical;
        dim_ = d;
        rank_ = d;
        metric_diag_ = Eigen::VectorXd::Ones(d);
        unit_ = Eigen::VectorXd::Ones(d);
        pointwise_ = true;
        spec_ = "classical:" + std::to_string(d);
        for (Eigen::Index i = 0; i < d; ++i) labels_.push_back("u" + std::to_string(i));
    }
    void product_into(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                      Eigen::VectorXd& z) const override {
        z = x.cwiseProduct(y);
    }
};

class SpinAlgebra final : public Algebra {
  public:
    explicit SpinAlgebra(Eigen::Index d) {
        if (d < 1) throw DimensionError("spin vector dimension must be >= 1");
        kind_ = Kind::Spin;
        dim_ = d + 1;
        rank_ = 2;
        // Primitive idempotents (e0 +- w)/2 must have trace 1, which puts the
        // metric at twice the canonical Euclidean one.
        metric_diag_ = 2.0 * Eigen::VectorXd::Ones(d + 1);
        unit_ = Eigen::VectorXd::Zero(d + 1);
        unit_[0] = 1.0;
        spec_ = "spin:" + std::to_string(d);
        for (Eigen::Index i = 0; i <= d; ++i) labels_.push_back("e" + std::to_string(i));
    }
    void product_into(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                      Eigen::VectorXd& z) const override {
        const double x0 = x[0], y0 = y[0];
        z = x0 * y;
        z += y0 * x;
        z[0] = x.dot(y);
    }
};

// Hermitian matrices over R, C, H, or O(3x3) with X o Y = (XY + YX)/2 and the
// real trace inner product.  The basis is trace-orthonormal so the metric is
// the identity and primitive idempotents E_ii have trace 1.
class MatrixAlgebra final : public Algebra {
  public:
    MatrixAlgebra(Kind kind, Eigen::Index m) : table_(entry_dim(kind)), m_(m) {
        if (m < 1) throw DimensionError("matrix size must be >= 1");
        if (kind == Kind::OctHerm3 && m != 3)
            throw DimensionError("octonion Hermitian algebra is fixed at 3x3");
        kind_ = kind;
        k_ = static_cast<Eigen::Index>(table_.dim());
        dim_ = m + k_ * m * (m - 1) / 2;
        rank_ = m;
        metric_diag_ = Eigen::VectorXd::Ones(dim_);
        unit_ = Eigen::VectorXd::Zero(dim_);
        unit_.head(m).setOnes();
        switch (kind) {
            case Kind::RealSym: spec_ = "realsym:" + std::to_string(m); break;
            case Kind::ComplexHerm: spec_ = "cherm:" + std::to_string(m); break;
            case Kind::QuatHerm: spec_ = "qherm:" + std::to_string(m); break;
            case Kind::OctHerm3: spec_ = "oct3"; break;
            default: throw DimensionError("not a matrix kind");
        }
        for (Eigen::Index i = 0; i < m; ++i)
            labels_.push_back("E(" + std::to_string(i) + "," + std::to_string(i) + ")");
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = i + 1; j < m; ++j)
                for (Eigen::Index t = 0; t < k_; ++t)
                    labels_.push_back("E(" + std::to_string(i) + "," + std::to_string(j) + ";" +
                                      std::to_string(t) + ")");
    }

    Eigen::Index msize() const { return m_; }
    Eigen::Index entry_units() const { return k_; }

    void product_into(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                      Eigen::VectorXd& z) const override {
        std::vector<double> X(m_ * m_ * k_), Y(m_ * m_ * k_), Z(m_ * m_ * k_, 0.0);
        to_kmatrix(x, X.data());
        to_kmatrix(y, Y.data());
        // Z = (XY + YX)/2
        std::vector<double> tmp(k_);
        for (Eigen::Index i = 0; i < m_; ++i)
            for (Eigen::Index l = 0; l < m_; ++l) {
                double* zz = &Z[(i * m_ + l) * k_];
                for (Eigen::Index j = 0; j < m_; ++j) {
                    table_.mul_acc(&X[(i * m_ + j) * k_], &Y[(j * m_ + l) * k_], zz);
                    table_.mul_acc(&Y[(i * m_ + j) * k_], &X[(j * m_ + l) * k_], zz);
                }
            }
        for (auto& v : Z) v *= 0.5;
        from_kmatrix(Z.data(), z);
    }

    // Dense entry storage: row-major m x m, each entry a k-vector over units.
    void to_kmatrix(const Eigen::VectorXd& c, double* M) const {
        std::fill(M, M + m_ * m_ * k_, 0.0);
        for (Eigen::Index i = 0; i < m_; ++i) M[(i * m_ + i) * k_] = c[i];
        const double inv = 1.0 / std::sqrt(2.0);
        Eigen::Index idx = m_;
        for (Eigen::Index i = 0; i < m_; ++i)
            for (Eigen::Index j = i + 1; j < m_; ++j)
                for (Eigen::Index t = 0; t < k_; ++t, ++idx) {
                    const double v = c[idx] * inv;
                    M[(i * m_ + j) * k_ + t] += v;
                    M[(j * m_ + i) * k_ + t] += (t == 0) ? v : -v;
                }
    }

    void from_kmatrix(const double* M, Eigen::VectorXd& c) const {
        c.resize(dim_);
        for (Eigen::Index i = 0; i < m_; ++i) c[i] = M[(i * m_ + i) * k_];
        const double rt2 = std::sqrt(2.0);
        Eigen::Index idx = m_;
        for (Eigen::Index i = 0; i < m_; ++i)
            for (Eigen::Index j = i + 1; j < m_; ++j)
                for (Eigen::Index t = 0; t < k_; ++t, ++idx) c[idx] = rt2 * M[(i * m_ + j) * k_ + t];
    }

    const DivisionAlgebra& table() const { return table_; }

  private:
    static std::size_t entry_dim(Kind k) {
        switch (k) {
            case Kind::RealSym: return 1;
            case Kind::ComplexHerm: return 2;
            case Kind::QuatHerm: return 4;
            case Kind::OctHerm3: return 8;
            default: throw DimensionError("not a matrix kind");
        }
    }
    DivisionAlgebra table_;
    Eigen::Index m_;
    Eigen::Index k_;
};

class DirectSumAlgebra final : public Algebra {
  public:
    explicit DirectSumAlgebra(std::vector<AlgebraPtr> factors) : factors_(std::move(factors)) {
        if (factors_.empty()) throw DimensionError("direct sum needs at least one factor");
        kind_ = Kind::DirectSum;
        pointwise_ = true;
        std::string s = "sum(";
        for (std::size_t f = 0; f < factors_.size(); ++f) {
            const auto& a = factors_[f];
            offsets_.push_back(dim_);
            dim_ += a->dim();
            rank_ += a->rank();
            pointwise_ = pointwise_ && a->pointwise();
            if (f) s += ",";
            s += a->spec_string();
            for (const auto& l : a->basis_labels())
                labels_.push_back("f" + std::to_string(f) + "." + l);
        }
        spec_ = s + ")";
        metric_diag_.resize(dim_);
        unit_.resize(dim_);
        for (std::size_t f = 0; f < factors_.size(); ++f) {
            metric_diag_.segment(offsets_[f], factors_[f]->dim()) = factors_[f]->metric_diag();
            unit_.segment(offsets_[f], factors_[f]->dim()) = factors_[f]->unit_coeffs();
        }
    }

    const std::vector<AlgebraPtr>& factors() const { return factors_; }
    Eigen::Index offset(std::size_t f) const { return offsets_[f]; }

    void product_into(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                      Eigen::VectorXd& z) const override {
        z.resize(dim_);
        for (std::size_t f = 0; f < factors_.size(); ++f) {
            const Eigen::Index o = offsets_[f], d = factors_[f]->dim();
            Eigen::VectorXd zf(d);
            factors_[f]->product_into(x.segment(o, d).eval(), y.segment(o, d).eval(), zf);
            z.segment(o, d) = zf;
        }
    }

  private:
    std::vector<AlgebraPtr> factors_;
    std::vector<Eigen::Index> offsets_;
};

// Canonical tensor composite: product basis, factor-wise Jordan product and
// Kronecker metric.  Products of generic elements are evaluated by looping
// over nonzero coefficients of the sparser operand and applying the per-mode
// basis multiplication operators, so the full structure tensor is never
// materialized.
class TensorAlgebra final : public Algebra {
  public:
    TensorAlgebra(std::vector<AlgebraPtr> factors, std::size_t budget) : factors_(std::move(factors)) {
        if (factors_.empty()) throw DimensionError("tensor product needs at least one factor");
        kind_ = Kind::Tensor;
        pointwise_ = true;
        std::size_t total = 1;
        rank_ = 1;
        for (const auto& a : factors_) {
            total *= static_cast<std::size_t>(a->dim());
            if (total > budget)
                throw BudgetError("tensor dimension " + std::to_string(total) +
                                      " exceeds budget " + std::to_string(budget),
                                  total);
            rank_ *= a->rank();
            pointwise_ = pointwise_ && a->pointwise();
        }
        dim_ = static_cast<Eigen::Index>(total);

        bool homogeneous = true;
        for (const auto& a : factors_)
            homogeneous = homogeneous && a->spec_string() == factors_[0]->spec_string();
        if (homogeneous) {
            spec_ = "tensor(" + factors_[0]->spec_string() + ";" + std::to_string(factors_.size()) + ")";
        } else {
            spec_ = "tensor(";
            for (std::size_t f = 0; f < factors_.size(); ++f)
                spec_ += (f ? "," : "") + factors_[f]->spec_string();
            spec_ += ")";
        }

        dims_.resize(factors_.size());
        strides_.resize(factors_.size());
        Eigen::Index stride = 1;
        for (std::size_t f = factors_.size(); f-- > 0;) {
            dims_[f] = factors_[f]->dim();
            strides_[f] = stride;
            stride *= dims_[f];
        }

        auto kron = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
            Eigen::VectorXd out(a.size() * b.size());
            for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
            return out;
        };
        metric_diag_ = Eigen::VectorXd::Ones(1);
        unit_ = Eigen::VectorXd::Ones(1);
        for (const auto& a : factors_) {
            metric_diag_ = kron(metric_diag_, a->metric_diag());
            unit_ = kron(unit_, a->unit_coeffs());
        }

        basis_ops_.resize(factors_.size());
        for (std::size_t f = 0; f < factors_.size(); ++f) {
            const auto& a = factors_[f];
            basis_ops_[f].resize(a->dim());
            for (Eigen::Index b = 0; b < a->dim(); ++b) {
                Eigen::MatrixXd L(a->dim(), a->dim());
                for (Eigen::Index cidx = 0; cidx < a->dim(); ++cidx)
                    L.col(cidx) = a->structure(b, cidx);
                basis_ops_[f][b] = std::move(L);
            }
        }

        if (dim_ <= 64) {
            labels_.reserve(dim_);
            for (Eigen::Index idx = 0; idx < dim_; ++idx) {
                std::string l;
                Eigen::Index rem = idx;
                for (std::size_t f = 0; f < factors_.size(); ++f) {
                    const Eigen::Index a = rem / strides_[f];
                    rem %= strides_[f];
                    l += (f ? "*" : "") + factors_[f]->basis_labels()[a];
                }
                labels_.push_back(std::move(l));
            }
        } else {
            labels_.assign(dim_, "");  // omitted for large composites
        }
    }

    const std::vector<AlgebraPtr>& factors() const { return factors_; }
    const std::vector<Eigen::Index>& factor_dims() const { return dims_; }
    const std::vector<Eigen::Index>& factor_strides() const { return strides_; }

    void product_into(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                      Eigen::VectorXd& z) const override {
        if (pointwise_) {
            z = x.cwiseProduct(y);
            return;
        }
        const Eigen::VectorXd* sparse = &x;
        const Eigen::VectorXd* dense = &y;
        auto nnz = [](const Eigen::VectorXd& v) {
            Eigen::Index n = 0;
            for (Eigen::Index i = 0; i < v.size(); ++i) n += (v[i] != 0.0);
            return n;
        };
        if (nnz(x) > nnz(y)) std::swap(sparse, dense);

        z.setZero(dim_);
        Eigen::VectorXd buf(dim_), buf2(dim_);
        for (Eigen::Index idx = 0; idx < dim_; ++idx) {
            const double alpha = (*sparse)[idx];
            if (alpha == 0.0) continue;
            buf = *dense;
            Eigen::Index rem = idx;
            for (std::size_t f = 0; f < factors_.size(); ++f) {
                const Eigen::Index a = rem / strides_[f];
                rem %= strides_[f];
                apply_mode(basis_ops_[f][a], f, buf, buf2);
                buf.swap(buf2);
            }
            z += alpha * buf;
        }
    }

    // y = (I x...x L x...x I) x along mode f.
    void apply_mode(const Eigen::MatrixXd& L, std::size_t f, const Eigen::VectorXd& x,
                    Eigen::VectorXd& y) const {
        const Eigen::Index d = dims_[f], post = strides_[f];
        const Eigen::Index pre = dim_ / (d * post);
        y.resize(dim_);
        for (Eigen::Index p = 0; p < pre; ++p) {
            const Eigen::Index base = p * d * post;
            for (Eigen::Index q = 0; q < post; ++q) {
                for (Eigen::Index r = 0; r < d; ++r) {
                    double acc = 0.0;
                    for (Eigen::Index s = 0; s < d; ++s) acc += L(r, s) * x[base + s * post + q];
                    y[base + r * post + q] = acc;
                }
            }
        }
    }

  private:
    std::vector<AlgebraPtr> factors_;
    std::vector<Eigen::Index> dims_;
    std::vector<Eigen::Index> strides_;
    std::vector<std::vector<Eigen::MatrixXd>> basis_ops_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Factories

inline AlgebraPtr make_classical(Eigen::Index d) {
    return std::make_shared<detail::ClassicalAlgebra>(d);
}
inline AlgebraPtr make_realsym(Eigen::Index m) {
    return std::make_shared<detail::MatrixAlgebra>(Kind::RealSym, m);
}
inline AlgebraPtr make_cherm(Eigen::Index m) {
    return std::make_shared<detail::MatrixAlgebra>(Kind::ComplexHerm, m);
}
inline AlgebraPtr make_qherm(Eigen::Index m) {
    return std::make_shared<detail::MatrixAlgebra>(Kind::QuatHerm, m);
}
inline AlgebraPtr make_spin(Eigen::Index d) { return std::make_shared<detail::SpinAlgebra>(d); }
inline AlgebraPtr make_oct3() { return std::make_shared<detail::MatrixAlgebra>(Kind::OctHerm3, 3); }
inline AlgebraPtr make_direct_sum(std::vector<AlgebraPtr> factors) {
    return std::make_shared<detail::DirectSumAlgebra>(std::move(factors));
}
inline AlgebraPtr tensor_algebra(std::vector<AlgebraPtr> factors,
                                 std::size_t budget = kDefaultBudget) {
    std::vector<AlgebraPtr> flat;
    for (auto& f : factors) {
        if (f->kind() == Kind::Tensor) {
            const auto* t = static_cast<const detail::TensorAlgebra*>(f.get());
            for (const auto& g : t->factors()) flat.push_back(g);
        } else {
            flat.push_back(f);
        }
    }
    return std::make_shared<detail::TensorAlgebra>(std::move(flat), budget);
}
inline AlgebraPtr tensor_power(const AlgebraPtr& a, std::size_t n,
                               std::size_t budget = kDefaultBudget) {
    if (n < 1) throw DimensionError("tensor power needs n >= 1");
    return tensor_algebra(std::vector<AlgebraPtr>(n, a), budget);
}

// x^{ox n}: Kronecker power of the coefficient vector in tensor_power(alg, n).
inline Element iid_power(const Element& x, std::size_t n, std::size_t budget = kDefaultBudget) {
    AlgebraPtr an = tensor_power(x.algebra, n, budget);
    Eigen::VectorXd c = Eigen::VectorXd::Ones(1);
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::VectorXd next(c.size() * x.coeffs.size());
        for (Eigen::Index a = 0; a < c.size(); ++a)
            next.segment(a * x.coeffs.size(), x.coeffs.size()) = c[a] * x.coeffs;
        c.swap(next);
    }
    return an->element(std::move(c));
}

// ---------------------------------------------------------------------------
// Spec-string grammar:
//   classical:d | realsym:m | cherm:m | qherm:m | spin:d | oct3
//   sum(spec,spec,...) | tensor(spec;n) | tensor(spec,spec,...)
inline AlgebraPtr build_algebra(const std::string& spec, std::size_t budget = kDefaultBudget);

namespace detail {

inline std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    std::size_t b = s.find_last_not_of(" \t");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

// Split on top-level occurrences of `sep` (ignores separators inside parens).
inline std::vector<std::string> split_top(const std::string& s, char sep) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char ch : s) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == sep && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline Eigen::Index parse_positive_int(const std::string& s, const std::string& what) {
    const std::string t = strip(s);
    if (t.empty()) throw ParseError("missing " + what);
    for (char c : t)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw ParseError("invalid " + what + ": '" + t + "'");
    long v = std::stol(t);
    if (v < 1) throw ParseError(what + " must be >= 1");
    return static_cast<Eigen::Index>(v);
}

}  // namespace detail

inline AlgebraPtr build_algebra(const std::string& spec_in, std::size_t budget) {
    const std::string spec = detail::strip(spec_in);
    if (spec.empty()) throw ParseError("empty algebra spec");
    if (spec == "oct3") return make_oct3();

    auto prefix = [&](const char* p) {
        const std::size_t n = std::string(p).size();
        return spec.size() > n && spec.compare(0, n, p) == 0;
    };
    if (prefix("classical:")) return make_classical(detail::parse_positive_int(spec.substr(10), "dimension"));
    if (prefix("realsym:")) return make_realsym(detail::parse_positive_int(spec.substr(8), "matrix size"));
    if (prefix("cherm:")) return make_cherm(detail::parse_positive_int(spec.substr(6), "matrix size"));
    if (prefix("qherm:")) return make_qherm(detail::parse_positive_int(spec.substr(6), "matrix size"));
    if (prefix("spin:")) return make_spin(detail::parse_positive_int(spec.substr(5), "dimension"));

    if (prefix("sum(") && spec.back() == ')') {
        std::vector<AlgebraPtr> factors;
        for (const auto& part : detail::split_top(spec.substr(4, spec.size() - 5), ','))
            factors.push_back(build_algebra(part, budget));
        return make_direct_sum(std::move(factors));
    }
    if (prefix("tensor(") && spec.back() == ')') {
        const std::string body = spec.substr(7, spec.size() - 8);
        const auto semi = detail::split_top(body, ';');
        if (semi.size() == 2) {
            AlgebraPtr base = build_algebra(semi[0], budget);
            const Eigen::Index n = detail::parse_positive_int(semi[1], "tensor power");
            return tensor_power(base, static_cast<std::size_t>(n), budget);
        }
        std::vector<AlgebraPtr> factors;
        for (const auto& part : detail::split_top(body, ','))
            factors.push_back(build_algebra(part, budget));
        return tensor_algebra(std::move(factors), budget);
    }
    throw ParseError("unrecognized algebra spec: '" + spec + "'");
}

// ---------------------------------------------------------------------------
// Bridges between matrix-type elements and dense Eigen matrices.  These back
// the fast spectral paths and the canonical embeddings.

namespace detail {
inline const MatrixAlgebra& as_matrix_algebra(const AlgebraPtr& a, Kind want) {
    if (a->kind() != want) throw DimensionError("element is not of the expected matrix kind");
    return *static_cast<const MatrixAlgebra*>(a.get());
}
}  // namespace detail

inline Eigen::MatrixXd realsym_to_matrix(const Element& x) {
    const auto& alg = detail::as_matrix_algebra(x.algebra, Kind::RealSym);
    const Eigen::Index m = alg.msize();
    std::vector<double> M(m * m);
    alg.to_kmatrix(x.coeffs, M.data());
    Eigen::MatrixXd out(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) out(i, j) = M[i * m + j];
    return out;
}

inline Element realsym_from_matrix(const AlgebraPtr& a, const Eigen::MatrixXd& M) {
    const auto& alg = detail::as_matrix_algebra(a, Kind::RealSym);
    const Eigen::Index m = alg.msize();
    std::vector<double> K(m * m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) K[i * m + j] = 0.5 * (M(i, j) + M(j, i));
    Eigen::VectorXd c;
    alg.from_kmatrix(K.data(), c);
    return Element{a, std::move(c)};
}

inline Eigen::MatrixXcd cherm_to_matrix(const Element& x) {
    const auto& alg = detail::as_matrix_algebra(x.algebra, Kind::ComplexHerm);
    const Eigen::Index m = alg.msize();
    std::vector<double> M(m * m * 2);
    alg.to_kmatrix(x.coeffs, M.data());
    Eigen::MatrixXcd out(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            out(i, j) = std::complex<double>(M[(i * m + j) * 2], M[(i * m + j) * 2 + 1]);
    return out;
}

inline Element cherm_from_matrix(const AlgebraPtr& a, const Eigen::MatrixXcd& M) {
    const auto& alg = detail::as_matrix_algebra(a, Kind::ComplexHerm);
    const Eigen::Index m = alg.msize();
    std::vector<double> K(m * m * 2);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
            const std::complex<double> v = 0.5 * (M(i, j) + std::conj(M(j, i)));
            K[(i * m + j) * 2] = v.real();
            K[(i * m + j) * 2 + 1] = v.imag();
        }
    Eigen::VectorXd c;
    alg.from_kmatrix(K.data(), c);
    return Element{a, std::move(c)};
}

// Entrywise complex image of a quaternion-Hermitian matrix:
// a + bi + cj + dk  ->  [[a+bi, c+di], [-c+di, a-bi]].
inline Eigen::MatrixXcd qherm_complex_image(const Element& x) {
    const auto& alg = detail::as_matrix_algebra(x.algebra, Kind::QuatHerm);
    const Eigen::Index m = alg.msize();
    std::vector<double> M(m * m * 4);
    alg.to_kmatrix(x.coeffs, M.data());
    Eigen::MatrixXcd out(2 * m, 2 * m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
            const double* q = &M[(i * m + j) * 4];
            out(2 * i, 2 * j) = std::complex<double>(q[0], q[1]);
            out(2 * i, 2 * j + 1) = std::complex<double>(q[2], q[3]);
            out(2 * i + 1, 2 * j) = std::complex<double>(-q[2], q[3]);
            out(2 * i + 1, 2 * j + 1) = std::complex<double>(q[0], -q[1]);
        }
    return out;
}

// Orthogonal projection of a 2m x 2m Hermitian matrix back onto the image of
// the quaternionic embedding.
inline Element qherm_from_complex_image(const AlgebraPtr& a, const Eigen::MatrixXcd& Q) {
    const auto& alg = detail::as_matrix_algebra(a, Kind::QuatHerm);
    const Eigen::Index m = alg.msize();
    std::vector<double> K(m * m * 4);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
            const std::complex<double> z00 = Q(2 * i, 2 * j);
            const std::complex<double> z01 = Q(2 * i, 2 * j + 1);
            const std::complex<double> z10 = Q(2 * i + 1, 2 * j);
            const std::complex<double> z11 = Q(2 * i + 1, 2 * j + 1);
            double* q = &K[(i * m + j) * 4];
            q[0] = 0.5 * (z00.real() + z11.real());
            q[1] = 0.5 * (z00.imag() - z11.imag());
            q[2] = 0.5 * (z01.real() - z10.real());
            q[3] = 0.5 * (z01.imag() + z10.imag());
        }
    // Hermitize over the quaternionic conjugate transpose.
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i; j < m; ++j) {
            double* qij = &K[(i * m + j) * 4];
            double* qji = &K[(j * m + i) * 4];
            const double sym[4] = {0.5 * (qij[0] + qji[0]), 0.5 * (qij[1] - qji[1]),
                                   0.5 * (qij[2] - qji[2]), 0.5 * (qij[3] - qji[3])};
            qij[0] = sym[0]; qij[1] = sym[1]; qij[2] = sym[2]; qij[3] = sym[3];
            qji[0] = sym[0]; qji[1] = -sym[1]; qji[2] = -sym[2]; qji[3] = -sym[3];
        }
    Eigen::VectorXd c;
    alg.from_kmatrix(K.data(), c);
    return Element{a, std::move(c)};
}

}  // namespace eja
