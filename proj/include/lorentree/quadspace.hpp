#pragma once

#include "lorentree/matrix.hpp"
#include "lorentree/sparse_vec.hpp"

#include <functional>
#include <vector>

namespace lorentree {

// A quadratic form on R^dim, either the diagonal Minkowski form with -1 at a
// distinguished coordinate or an arbitrary symmetric Gram matrix.
template <class S>
class QuadForm {
public:
    enum class Kind { minkowski, dense };

    static QuadForm minkowski(std::size_t dim, std::size_t w)
    {
        if (w >= dim)
            throw InvalidInput("distinguished coordinate outside the form dimension");
        QuadForm f;
        f.kind_ = Kind::minkowski;
        f.dim_ = dim;
        f.w_ = w;
        return f;
    }

    static QuadForm dense(Matrix<S> gram);

    Kind kind() const { return kind_; }
    std::size_t dim() const { return dim_; }
    std::size_t distinguished() const { return w_; }

    // Gram matrix, materialized for the Minkowski kind.
    Matrix<S> gram() const;

    S entry(std::size_t i, std::size_t j) const
    {
        if (kind_ == Kind::dense)
            return gram_(i, j);
        if (i != j)
            return S(0);
        return i == w_ ? S(-1) : S(1);
    }

private:
    Kind kind_ = Kind::minkowski;
    std::size_t dim_ = 0;
    std::size_t w_ = 0;
    Matrix<S> gram_;
};

template <class S>
using DenseVec = std::vector<S>;

template <class S>
S eval_B(const QuadForm<S>& form, const SparseVec<int, S>& x, const SparseVec<int, S>& y);

template <class S>
S eval_Q(const QuadForm<S>& form, const SparseVec<int, S>& x)
{
    return eval_B(form, x, x);
}

// Dense-vector evaluation, used by the linear algebra helpers below.
template <class S>
S eval_B(const QuadForm<S>& form, const DenseVec<S>& x, const DenseVec<S>& y);

struct Inertia {
    int i_plus = 0;
    int i_minus = 0;
    int index() const { return std::min(i_plus, i_minus); }
    friend bool operator==(const Inertia&, const Inertia&) = default;
};

// Sylvester inertia. Throws DegenerateForm on a zero eigenvalue (float: within
// eps relative to the largest eigenvalue magnitude).
template <class S>
Inertia index_of(const QuadForm<S>& form);

template <class S>
struct PmDecomposition {
    std::vector<DenseVec<S>> minus;
    std::vector<DenseVec<S>> plus;
};

template <class S>
PmDecomposition<S> pm_decomposition(const QuadForm<S>& form);

// Basis of the B-orthogonal complement of span(W). Throws DegenerateForm
// naming a null vector when Q restricted to span(W) is degenerate.
template <class S>
std::vector<DenseVec<S>> orth_complement(const QuadForm<S>& form, const std::vector<DenseVec<S>>& w);

// <x,y>_pm = B(x+, y+) - B(x-, y-) for a fixed pm-decomposition.
template <class S>
class AuxProduct {
public:
    AuxProduct(QuadForm<S> form, PmDecomposition<S> decomp);
    S operator()(const DenseVec<S>& x, const DenseVec<S>& y) const;
    // Splits x into its (minus, plus) components.
    std::pair<DenseVec<S>, DenseVec<S>> split(const DenseVec<S>& x) const;

private:
    QuadForm<S> form_;
    PmDecomposition<S> decomp_;
    Matrix<S> change_inverse_;
};

template <class S>
AuxProduct<S> aux_scalar_product(const QuadForm<S>& form, const PmDecomposition<S>& decomp)
{
    return AuxProduct<S>(form, decomp);
}

// Congruence diagonalization P^T G P = D for a symmetric matrix; exact for
// rationals. Returns false when a zero pivot cannot be repaired (the form is
// degenerate); null_vector then holds a vector in the radical.
template <class S>
struct Congruence {
    Matrix<S> change;
    std::vector<S> diagonal;
    bool degenerate = false;
    DenseVec<S> null_vector;
};

template <class S>
Congruence<S> congruence_diagonalize(const Matrix<S>& gram);

} // namespace lorentree
