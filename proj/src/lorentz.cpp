#include "lorentree/lorentz.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <fmt/format.h>

namespace lorentree {

namespace {

constexpr double kRankTol = 1e-8;
constexpr double kIsotropicTol = 1e-6;

Eigen::MatrixXd to_eigen(const Matrix<double>& m)
{
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            e(i, j) = m(i, j);
    return e;
}

Vec to_vec(const Eigen::VectorXd& v)
{
    return Vec(v.data(), v.data() + v.size());
}

double b_form(const Matrix<double>& gram, const Vec& x, const Vec& y) { return bilinear(gram, x, y); }

double euclid_norm(const Vec& v)
{
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return std::sqrt(s);
}

void require_block_shape(const LorentzOp& op)
{
    if (!op.matrix.square() || op.matrix.rows() < 2)
        throw InvalidInput("block operator needs a square matrix of size at least 2");
    if (op.gram.rows() != op.matrix.rows() || op.gram.cols() != op.matrix.cols())
        throw InvalidInput("Gram matrix dimension does not match operator");
}

// Null space of a square matrix via SVD with a relative threshold.
std::vector<Vec> svd_kernel(const Eigen::MatrixXd& a)
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double scale = std::max(1.0, sv.size() ? sv(0) : 0.0);
    std::vector<Vec> out;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= kRankTol * scale)
            out.push_back(to_vec(svd.matrixV().col(i)));
    return out;
}

// Restricts the form to span(basis) and returns the eigen-decomposition.
struct Restricted {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

Restricted restrict_form(const Matrix<double>& gram, const std::vector<Vec>& basis)
{
    const auto k = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd g(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
            g(i, j) = b_form(gram, basis[i], basis[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g);
    return {solver.eigenvalues(), solver.eigenvectors()};
}

Vec combine_basis(const std::vector<Vec>& basis, const Eigen::VectorXd& coeffs)
{
    Vec out(basis.front().size(), 0.0);
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t r = 0; r < out.size(); ++r)
            out[r] += coeffs(static_cast<Eigen::Index>(i)) * basis[i][r];
    return out;
}

Vec time_vector(const Matrix<double>& gram)
{
    HyperboloidModel model(QuadForm<double>::dense(gram));
    return model.time();
}

} // namespace

Matrix<double> lightcone_gram(std::size_t k)
{
    Matrix<double> g = Matrix<double>::identity(k + 2);
    g(0, 0) = 0.0;
    g(1, 1) = 0.0;
    g(0, 1) = 1.0;
    g(1, 0) = 1.0;
    return g;
}

LorentzOp LorentzOp::identity(std::size_t k)
{
    return {Matrix<double>::identity(k + 2), lightcone_gram(k)};
}

OrthogonalityReport is_orthogonal(const LorentzOp& op, double tol)
{
    if (!op.matrix.square() || op.gram.rows() != op.matrix.rows() || !op.gram.square())
        throw InvalidInput("operator and form dimensions do not match");
    if (tol < 0.0)
        tol = eps();
    Matrix<double> d = op.matrix.transpose() * op.gram * op.matrix - op.gram;
    OrthogonalityReport r;
    const std::size_t n = d.rows();
    const std::size_t split = std::min<std::size_t>(2, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double a = std::fabs(d(i, j));
            r.residual = std::max(r.residual, a);
            double& slot = i < split ? (j < split ? r.ll : r.lf) : (j < split ? r.fl : r.ff);
            slot = std::max(slot, a);
        }
    r.ok = r.residual <= tol;
    return r;
}

double OLPlusBlock::alpha() const
{
    double q = 0.0;
    for (double x : a3)
        q += x * x;
    return -0.5 * lambda * q;
}

Vec OLPlusBlock::a2() const
{
    const std::size_t n = k();
    Vec row(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += a4(i, j) * a3[i];
        row[j] = -lambda * acc;
    }
    return row;
}

LorentzOp make_olplus(const OLPlusBlock& b)
{
    const std::size_t k = b.k();
    if (b.a4.rows() != k || b.a4.cols() != k)
        throw InvalidInput("A4 must be a square operator on F");
    if (b.lambda == 0.0)
        throw InvalidInput("lambda must be nonzero");
    double orth = max_abs_diff(b.a4.transpose() * b.a4, Matrix<double>::identity(k));
    if (orth > std::max(eps(), 1e-9))
        throw NotOrthogonal(fmt::format("A4 is not orthogonal (residual {:.3e})", orth), orth);
    Matrix<double> m(k + 2, k + 2);
    m(0, 0) = b.lambda;
    m(0, 1) = b.alpha();
    m(1, 1) = 1.0 / b.lambda;
    Vec a2 = b.a2();
    for (std::size_t j = 0; j < k; ++j) {
        m(0, 2 + j) = a2[j];
        m(2 + j, 1) = b.a3[j];
    }
    m.set_block(2, 2, b.a4);
    return {m, lightcone_gram(k)};
}

OLPlusBlock extract_olplus(const LorentzOp& op, double tol)
{
    require_block_shape(op);
    const auto& m = op.matrix;
    const std::size_t k = m.rows() - 2;
    for (std::size_t i = 1; i < m.rows(); ++i)
        if (std::fabs(m(i, 0)) > tol)
            throw InvalidInput("operator does not fix the line of l+");
    for (std::size_t j = 0; j < m.cols(); ++j)
        if (j != 1 && std::fabs(m(1, j)) > tol)
            throw InvalidInput("operator does not have the block shape of the stabilizer of l+");
    OLPlusBlock b;
    b.lambda = m(0, 0);
    b.a3.resize(k);
    for (std::size_t i = 0; i < k; ++i)
        b.a3[i] = m(2 + i, 1);
    b.a4 = m.block(2, 2, k, k);
    return b;
}

LorentzOp invert_olplus(const LorentzOp& op)
{
    OLPlusBlock s = extract_olplus(op);
    const std::size_t k = s.k();
    const double mu = s.lambda;
    const double beta = s.alpha();
    const Vec b2 = s.a2();
    const Matrix<double> b4inv = s.a4.transpose();

    Matrix<double> inv(k + 2, k + 2);
    inv(0, 0) = 1.0 / mu;
    inv(0, 1) = beta;
    inv(1, 1) = mu;
    for (std::size_t j = 0; j < k; ++j) {
        double row = 0.0;
        double col = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            row += b2[i] * b4inv(i, j);
            col += b4inv(j, i) * s.a3[i];
        }
        inv(0, 2 + j) = -row / mu;
        inv(2 + j, 1) = -mu * col;
    }
    inv.set_block(2, 2, b4inv);
    return {inv, op.gram};
}

Conjugation conjugate(const LorentzOp& s, const LorentzOp& t)
{
    if (s.matrix.rows() != t.matrix.rows())
        throw InvalidInput("conjugation shape mismatch");
    OLPlusBlock sb = extract_olplus(s);
    OLPlusBlock tb = extract_olplus(t);
    const std::size_t k = sb.k();

    Conjugation out;
    out.product = {s.matrix * t.matrix * inverse(s.matrix), t.gram};

    const double mu = sb.lambda;
    const double lambda = tb.lambda;
    const double beta = sb.alpha();
    const double alpha = tb.alpha();
    const Vec b = sb.a2();
    const Vec a = tb.a2();
    const Vec& c = sb.a3;
    const Vec& d = tb.a3;
    const Matrix<double>& bm = sb.a4;
    const Matrix<double> binv = bm.transpose();
    const Matrix<double>& am = tb.a4;

    const Vec binv_c = binv * c;
    const Vec a_binv_c = am * binv_c;
    const Matrix<double> a_binv = am * binv;

    Matrix<double> f(k + 2, k + 2);
    f(0, 0) = lambda;
    f(1, 1) = 1.0 / lambda;
    f(0, 1) = lambda * mu * beta + mu * mu * alpha - mu * mu * dot(a, binv_c) + mu * beta / lambda +
              mu * dot(b, d) - mu * dot(b, a_binv_c);
    for (std::size_t j = 0; j < k; ++j) {
        double v = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            v += -lambda * b[i] * binv(i, j) + mu * a[i] * binv(i, j) + b[i] * a_binv(i, j);
        f(0, 2 + j) = v;
    }
    const Vec bd = bm * d;
    const Vec b_a_binv_c = bm * a_binv_c;
    for (std::size_t i = 0; i < k; ++i)
        f(2 + i, 1) = mu * c[i] / lambda + mu * bd[i] - mu * b_a_binv_c[i];
    f.set_block(2, 2, bm * a_binv);

    out.formula = {f, t.gram};
    out.gap = max_abs_diff(out.product.matrix, out.formula.matrix);
    return out;
}

OLPlusBlock normalizing_conjugator(const OLPlusBlock& t)
{
    const std::size_t k = t.k();
    if (std::fabs(std::fabs(t.lambda) - 1.0) <= eps())
        throw PreconditionFailed("normalization needs |lambda| != 1");
    Matrix<double> lhs = (1.0 / t.lambda) * Matrix<double>::identity(k) - t.a4;
    Matrix<double> rhs(k, 1);
    for (std::size_t i = 0; i < k; ++i)
        rhs(i, 0) = -t.a3[i];
    Matrix<double> sol;
    try {
        sol = solve(lhs, rhs, 1e-12);
    } catch (const DegenerateForm&) {
        throw PreconditionFailed("lambda^-1 - A4 is singular; normalization not available");
    }
    OLPlusBlock s;
    s.lambda = 1.0;
    s.a3 = sol.column(0);
    s.a4 = Matrix<double>::identity(k);
    return s;
}

std::string to_string(IsomType t)
{
    switch (t) {
    case IsomType::elliptic:
        return "elliptic";
    case IsomType::parabolic:
        return "parabolic";
    case IsomType::hyperbolic:
        return "hyperbolic";
    }
    return "unknown";
}

IsomClass classify(const LorentzOp& op)
{
    auto report = is_orthogonal(op);
    if (!report.ok)
        throw NotOrthogonal(fmt::format("operator is not orthogonal (residual {:.3e})", report.residual),
                            report.residual);
    const auto n = static_cast<Eigen::Index>(op.dim());
    const Eigen::MatrixXd m = to_eigen(op.matrix);
    const Matrix<double>& gram = op.gram;
    IsomClass out;

    // Hyperbolic: a pair of real eigenvalues rho, 1/rho with independent
    // isotropic eigenvectors.
    Eigen::EigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success)
        throw Error("eigen-decomposition failed");
    const auto& values = es.eigenvalues();
    const auto vectors = es.eigenvectors();
    double rho = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        rho = std::max(rho, std::abs(values(i)));
    if (rho > 1.0 + 1e-9) {
        auto real_isotropic = [&](Eigen::Index i, Vec& out_vec) {
            if (std::fabs(values(i).imag()) > kRankTol * rho)
                return false;
            Vec v = to_vec(vectors.col(i).real());
            double nv = euclid_norm(v);
            if (nv == 0.0)
                return false;
            for (auto& x : v)
                x /= nv;
            if (std::fabs(b_form(gram, v, v)) > kIsotropicTol)
                return false;
            out_vec = v;
            return true;
        };
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::fabs(std::abs(values(i)) - rho) > 1e-12 * rho)
                continue;
            Vec up;
            if (!real_isotropic(i, up))
                continue;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (std::fabs(std::abs(values(j)) * rho - 1.0) > kIsotropicTol)
                    continue;
                Vec down;
                if (!real_isotropic(j, down))
                    continue;
                if (std::fabs(b_form(gram, up, down)) < 1e-3)
                    continue;
                out.type = IsomType::hyperbolic;
                out.eigenvalue = values(i).real();
                out.attracting = up;
                out.repelling = down;
                return out;
            }
        }
    }

    // Elliptic: a negative vector in ker(M - I) or ker(M + I).
    std::vector<Vec> isotropic_candidates;
    for (double sign : {1.0, -1.0}) {
        Eigen::MatrixXd a = m - sign * Eigen::MatrixXd::Identity(n, n);
        auto kernel = svd_kernel(a);
        if (kernel.empty())
            continue;
        auto r = restrict_form(gram, kernel);
        if (r.values(0) < -kRankTol) {
            Vec x = combine_basis(kernel, r.vectors.col(0));
            double q = b_form(gram, x, x);
            for (auto& c : x)
                c /= std::sqrt(-q);
            out.type = IsomType::elliptic;
            out.fixed_point = x;
            return out;
        }
        for (Eigen::Index i = 0; i < r.values.size(); ++i)
            if (std::fabs(r.values(i)) <= kRankTol)
                isotropic_candidates.push_back(combine_basis(kernel, r.vectors.col(i)));
    }
    if (isotropic_candidates.empty())
        throw Error("classification failed: no fixed negative or isotropic line found");
    out.type = IsomType::parabolic;
    out.isotropic = isotropic_candidates.front();
    return out;
}

TranslationLength translation_length(const LorentzOp& op, int n_max)
{
    if (n_max < 1)
        throw InvalidInput("n_max must be positive");
    IsomClass cls = classify(op);
    if (cls.type != IsomType::hyperbolic)
        throw PreconditionFailed("translation length requires a hyperbolic operator, got " + to_string(cls.type));
    TranslationLength out;
    out.spectral = std::log(std::fabs(cls.eigenvalue));
    out.n = n_max;

    const Matrix<double>& gram = op.gram;
    Vec x = time_vector(gram);
    Vec y = x;
    for (int i = 0; i < n_max; ++i)
        y = op.matrix * y;
    double d = dist_from_pairing(b_form(gram, x, y), b_form(gram, x, x), b_form(gram, y, y));
    out.orbit = d / n_max;

    // |d(x, T^n x) - n l| <= 2 d(x, axis).
    const Vec& u = cls.attracting;
    const Vec& v = cls.repelling;
    double c2 = 2.0 * std::fabs(b_form(gram, x, u) * b_form(gram, x, v) / b_form(gram, u, v));
    double to_axis = guarded_arcosh(std::sqrt(std::max(1.0, c2)));
    out.bound = 2.0 * to_axis / n_max + 1e-9;
    out.agrees = std::fabs(out.orbit - out.spectral) <= out.bound;
    return out;
}

} // namespace lorentree
