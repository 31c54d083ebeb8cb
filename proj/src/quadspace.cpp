#include "lorentree/quadspace.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

namespace lorentree {

namespace {

template <class S>
bool pivot_zero(const S& v, double tol)
{
    if constexpr (ScalarTraits<S>::exact)
        return ScalarTraits<S>::is_exactly_zero(v);
    else
        return std::fabs(v) <= tol;
}

template <class S>
void check_symmetric(const Matrix<S>& g)
{
    if (!g.square())
        throw InvalidInput("Gram matrix must be square");
    double scale = std::max(1.0, g.max_abs());
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < i; ++j) {
            if constexpr (ScalarTraits<S>::exact) {
                if (g(i, j) != g(j, i))
                    throw InvalidInput("Gram matrix is not symmetric");
            } else if (std::fabs(g(i, j) - g(j, i)) > eps() * scale) {
                throw InvalidInput("Gram matrix is not symmetric");
            }
        }
}

template <class S>
std::string describe(const DenseVec<S>& v)
{
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += ", ";
        out += ScalarTraits<S>::to_string(v[i]);
    }
    return out + ")";
}

Eigen::MatrixXd to_eigen(const Matrix<double>& m)
{
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            e(i, j) = m(i, j);
    return e;
}

struct SymEigen {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    double tol;
};

SymEigen sym_eigen(const Matrix<double>& g)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(g));
    if (solver.info() != Eigen::Success)
        throw Error("symmetric eigen-decomposition failed");
    double scale = std::max(1.0, solver.eigenvalues().cwiseAbs().maxCoeff());
    return {solver.eigenvalues(), solver.eigenvectors(), eps() * scale};
}

template <class S>
void check_range(const QuadForm<S>& form, const SparseVec<int, S>& x)
{
    for (const auto& [k, v] : x)
        if (k < 0 || static_cast<std::size_t>(k) >= form.dim())
            throw InvalidInput(fmt::format("index {} outside form dimension {}", k, form.dim()));
}

} // namespace

template <class S>
QuadForm<S> QuadForm<S>::dense(Matrix<S> gram)
{
    check_symmetric(gram);
    QuadForm f;
    f.kind_ = Kind::dense;
    f.dim_ = gram.rows();
    f.gram_ = std::move(gram);
    return f;
}

template <class S>
Matrix<S> QuadForm<S>::gram() const
{
    if (kind_ == Kind::dense)
        return gram_;
    Matrix<S> g = Matrix<S>::identity(dim_);
    g(w_, w_) = S(-1);
    return g;
}

template <class S>
S eval_B(const QuadForm<S>& form, const SparseVec<int, S>& x, const SparseVec<int, S>& y)
{
    check_range(form, x);
    check_range(form, y);
    if (form.kind() == QuadForm<S>::Kind::minkowski)
        return minkowski_B(static_cast<int>(form.distinguished()), x, y);
    S acc = S(0);
    for (const auto& [i, xi] : x)
        for (const auto& [j, yj] : y)
            acc += xi * form.entry(i, j) * yj;
    return acc;
}

template <class S>
S eval_B(const QuadForm<S>& form, const DenseVec<S>& x, const DenseVec<S>& y)
{
    if (x.size() != form.dim() || y.size() != form.dim())
        throw InvalidInput("vector length does not match form dimension");
    S acc = S(0);
    if (form.kind() == QuadForm<S>::Kind::minkowski) {
        for (std::size_t i = 0; i < x.size(); ++i)
            acc += form.entry(i, i) * x[i] * y[i];
        return acc;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (ScalarTraits<S>::is_exactly_zero(x[i]))
            continue;
        for (std::size_t j = 0; j < y.size(); ++j)
            acc += x[i] * form.entry(i, j) * y[j];
    }
    return acc;
}

template <class S>
Congruence<S> congruence_diagonalize(const Matrix<S>& gram)
{
    check_symmetric(gram);
    const std::size_t n = gram.rows();
    const double tol = eps() * std::max(1.0, gram.max_abs());
    Matrix<S> a = gram;
    Matrix<S> p = Matrix<S>::identity(n);
    Congruence<S> out;

    auto swap_index = [&](std::size_t i, std::size_t j) {
        for (std::size_t c = 0; c < n; ++c)
            std::swap(a(i, c), a(j, c));
        for (std::size_t r = 0; r < n; ++r) {
            std::swap(a(r, i), a(r, j));
            std::swap(p(r, i), p(r, j));
        }
    };

    for (std::size_t k = 0; k < n; ++k) {
        if (pivot_zero(a(k, k), tol)) {
            std::size_t j = k + 1;
            while (j < n && pivot_zero(a(j, j), tol))
                ++j;
            if (j < n) {
                swap_index(k, j);
            } else {
                j = k + 1;
                while (j < n && pivot_zero(a(k, j), tol))
                    ++j;
                if (j == n) {
                    if (!out.degenerate) {
                        out.degenerate = true;
                        out.null_vector = p.column(k);
                    }
                    continue;
                }
                for (std::size_t c = 0; c < n; ++c)
                    a(k, c) += a(j, c);
                for (std::size_t r = 0; r < n; ++r) {
                    a(r, k) += a(r, j);
                    p(r, k) += p(r, j);
                }
            }
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            if (ScalarTraits<S>::is_exactly_zero(a(i, k)))
                continue;
            S f = a(i, k) / a(k, k);
            for (std::size_t c = 0; c < n; ++c)
                a(i, c) -= f * a(k, c);
            for (std::size_t r = 0; r < n; ++r) {
                a(r, i) -= f * a(r, k);
                p(r, i) -= f * p(r, k);
            }
        }
    }
    out.change = std::move(p);
    out.diagonal.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.diagonal[i] = a(i, i);
    return out;
}

template <class S>
Inertia index_of(const QuadForm<S>& form)
{
    Inertia in;
    if (form.kind() == QuadForm<S>::Kind::minkowski) {
        in.i_minus = 1;
        in.i_plus = static_cast<int>(form.dim()) - 1;
        return in;
    }
    if constexpr (ScalarTraits<S>::exact) {
        auto c = congruence_diagonalize(form.gram());
        if (c.degenerate)
            throw DegenerateForm("degenerate form: null vector " + describe(c.null_vector));
        for (const auto& d : c.diagonal)
            (sgn(d) > 0 ? in.i_plus : in.i_minus)++;
    } else {
        auto e = sym_eigen(form.gram());
        for (Eigen::Index i = 0; i < e.values.size(); ++i) {
            double v = e.values(i);
            if (std::fabs(v) <= e.tol)
                throw DegenerateForm(fmt::format("degenerate form: eigenvalue {:.3e} within tolerance", v));
            (v > 0 ? in.i_plus : in.i_minus)++;
        }
    }
    return in;
}

template <class S>
PmDecomposition<S> pm_decomposition(const QuadForm<S>& form)
{
    PmDecomposition<S> out;
    const std::size_t n = form.dim();
    if (form.kind() == QuadForm<S>::Kind::minkowski) {
        for (std::size_t i = 0; i < n; ++i) {
            DenseVec<S> e(n, S(0));
            e[i] = S(1);
            (i == form.distinguished() ? out.minus : out.plus).push_back(std::move(e));
        }
        return out;
    }
    if constexpr (ScalarTraits<S>::exact) {
        auto c = congruence_diagonalize(form.gram());
        if (c.degenerate)
            throw DegenerateForm("degenerate form: null vector " + describe(c.null_vector));
        for (std::size_t i = 0; i < n; ++i)
            (sgn(c.diagonal[i]) > 0 ? out.plus : out.minus).push_back(c.change.column(i));
    } else {
        auto e = sym_eigen(form.gram());
        for (Eigen::Index i = 0; i < e.values.size(); ++i) {
            double v = e.values(i);
            if (std::fabs(v) <= e.tol)
                throw DegenerateForm(fmt::format("degenerate form: eigenvalue {:.3e} within tolerance", v));
            DenseVec<double> col(n);
            for (std::size_t r = 0; r < n; ++r)
                col[r] = e.vectors(static_cast<Eigen::Index>(r), i);
            (v > 0 ? out.plus : out.minus).push_back(std::move(col));
        }
    }
    return out;
}

template <class S>
std::vector<DenseVec<S>> orth_complement(const QuadForm<S>& form, const std::vector<DenseVec<S>>& w)
{
    const std::size_t n = form.dim();
    const std::size_t k = w.size();
    for (const auto& v : w)
        if (v.size() != n)
            throw InvalidInput("basis vector length does not match form dimension");
    if (k == 0) {
        std::vector<DenseVec<S>> all;
        for (std::size_t i = 0; i < n; ++i) {
            DenseVec<S> e(n, S(0));
            e[i] = S(1);
            all.push_back(std::move(e));
        }
        return all;
    }
    Matrix<S> gw(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            gw(i, j) = eval_B(form, w[i], w[j]);

    auto null_in_span = [&](const DenseVec<S>& coeffs) {
        DenseVec<S> x(n, S(0));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t r = 0; r < n; ++r)
                x[r] += coeffs[i] * w[i][r];
        return x;
    };

    if constexpr (ScalarTraits<S>::exact) {
        auto c = congruence_diagonalize(gw);
        if (c.degenerate)
            throw DegenerateForm("form restricted to W is degenerate: null vector " +
                                 describe(null_in_span(c.null_vector)));
    } else {
        auto e = sym_eigen(gw);
        for (Eigen::Index i = 0; i < e.values.size(); ++i)
            if (std::fabs(e.values(i)) <= e.tol) {
                DenseVec<double> coeffs(k);
                for (std::size_t r = 0; r < k; ++r)
                    coeffs[r] = e.vectors(static_cast<Eigen::Index>(r), i);
                throw DegenerateForm("form restricted to W is degenerate: null vector " +
                                     describe(null_in_span(coeffs)));
            }
    }

    // Rows: (G w_i)^T, so the null space is the B-orthogonal complement.
    Matrix<S> g = form.gram();
    Matrix<S> constraints(k, n);
    for (std::size_t i = 0; i < k; ++i) {
        auto gwi = g * w[i];
        for (std::size_t r = 0; r < n; ++r)
            constraints(i, r) = gwi[r];
    }
    double tol = 1e-12 * std::max(1.0, constraints.max_abs());
    return nullspace(constraints, tol);
}

template <class S>
AuxProduct<S>::AuxProduct(QuadForm<S> form, PmDecomposition<S> decomp)
    : form_(std::move(form)), decomp_(std::move(decomp))
{
    const std::size_t n = form_.dim();
    if (decomp_.minus.size() + decomp_.plus.size() != n)
        throw InvalidInput("decomposition does not span the space");
    Matrix<S> change(n, n);
    std::size_t c = 0;
    for (const auto& v : decomp_.minus)
        change.set_column(c++, v);
    for (const auto& v : decomp_.plus)
        change.set_column(c++, v);
    change_inverse_ = inverse(change);
}

template <class S>
std::pair<DenseVec<S>, DenseVec<S>> AuxProduct<S>::split(const DenseVec<S>& x) const
{
    const std::size_t n = form_.dim();
    auto coords = change_inverse_ * x;
    DenseVec<S> minus(n, S(0));
    DenseVec<S> plus(n, S(0));
    std::size_t c = 0;
    for (const auto& v : decomp_.minus) {
        for (std::size_t r = 0; r < n; ++r)
            minus[r] += coords[c] * v[r];
        ++c;
    }
    for (const auto& v : decomp_.plus) {
        for (std::size_t r = 0; r < n; ++r)
            plus[r] += coords[c] * v[r];
        ++c;
    }
    return {minus, plus};
}

template <class S>
S AuxProduct<S>::operator()(const DenseVec<S>& x, const DenseVec<S>& y) const
{
    auto [xm, xp] = split(x);
    auto [ym, yp] = split(y);
    return eval_B(form_, xp, yp) - eval_B(form_, xm, ym);
}

#define LORENTREE_INSTANTIATE(S)                                                                   \
    template class QuadForm<S>;                                                                    \
    template S eval_B(const QuadForm<S>&, const SparseVec<int, S>&, const SparseVec<int, S>&);    \
    template S eval_B(const QuadForm<S>&, const DenseVec<S>&, const DenseVec<S>&);                \
    template Congruence<S> congruence_diagonalize(const Matrix<S>&);                               \
    template Inertia index_of(const QuadForm<S>&);                                                 \
    template PmDecomposition<S> pm_decomposition(const QuadForm<S>&);                              \
    template std::vector<DenseVec<S>> orth_complement(const QuadForm<S>&, const std::vector<DenseVec<S>>&); \
    template class AuxProduct<S>;

LORENTREE_INSTANTIATE(double)
LORENTREE_INSTANTIATE(mpq_class)

#undef LORENTREE_INSTANTIATE

} // namespace lorentree
