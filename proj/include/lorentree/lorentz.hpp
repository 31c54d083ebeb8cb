#pragma once

#include "lorentree/hymodel.hpp"
#include "lorentree/matrix.hpp"

#include <string>

namespace lorentree {

// Gram matrix of the basis (l+, l-, f_1..f_k): [[0,1],[1,0]] plus identity.
Matrix<double> lightcone_gram(std::size_t k);

// Dense operator together with the Gram matrix of its basis.
struct LorentzOp {
    Matrix<double> matrix;
    Matrix<double> gram;

    std::size_t dim() const { return matrix.rows(); }
    static LorentzOp identity(std::size_t k);
};

// max |M^T J_cod M - J_dom|; works for rectangular blocks.
template <class S>
S gram_residual(const Matrix<S>& m, const Matrix<S>& gram_codomain, const Matrix<S>& gram_domain)
{
    Matrix<S> d = m.transpose() * gram_codomain * m - gram_domain;
    S worst = S(0);
    for (std::size_t i = 0; i < d.rows(); ++i)
        for (std::size_t j = 0; j < d.cols(); ++j) {
            S a = ScalarTraits<S>::abs(d(i, j));
            if (a > worst)
                worst = a;
        }
    return worst;
}

struct OrthogonalityReport {
    bool ok = false;
    double residual = 0.0;
    // Residuals of the (L,L), (L,F), (F,L), (F,F) blocks of M^T J M - J, with
    // L the first two basis vectors.
    double ll = 0.0;
    double lf = 0.0;
    double fl = 0.0;
    double ff = 0.0;
};

OrthogonalityReport is_orthogonal(const LorentzOp& op, double tol = -1.0);

// The (lambda, A3-, A4) parametrization of the stabilizer of the line R l+.
struct OLPlusBlock {
    double lambda = 1.0;
    Vec a3;
    Matrix<double> a4;

    std::size_t k() const { return a3.size(); }
    double alpha() const;
    // Row vector v -> A2+(v), as its values on the standard basis of F.
    Vec a2() const;
};

LorentzOp make_olplus(const OLPlusBlock& b);

// Reads the block parameters back; throws InvalidInput when op does not have
// the block shape within tolerance.
OLPlusBlock extract_olplus(const LorentzOp& op, double tol = 1e-9);

// Closed-form inverse of an operator in block form.
LorentzOp invert_olplus(const LorentzOp& op);

struct Conjugation {
    LorentzOp product;
    LorentzOp formula;
    double gap = 0.0;
};

// S T S^-1 computed as a matrix product and from the closed-form block entries.
Conjugation conjugate(const LorentzOp& s, const LorentzOp& t);

// For |lambda| != 1, the conjugator S = (1, B3-, Id) with
// A3- + (lambda^-1 - A4) B3- = 0, so that S T S^-1 = diag(lambda, lambda^-1, A4).
// Throws PreconditionFailed when lambda^-1 - A4 is singular.
OLPlusBlock normalizing_conjugator(const OLPlusBlock& t);

enum class IsomType { elliptic, parabolic, hyperbolic };

std::string to_string(IsomType t);

struct IsomClass {
    IsomType type = IsomType::elliptic;
    // elliptic: a fixed negative vector
    Vec fixed_point;
    // hyperbolic: eigenvalue of largest modulus and the two isotropic eigenvectors
    double eigenvalue = 1.0;
    Vec attracting;
    Vec repelling;
    // parabolic: the fixed isotropic vector
    Vec isotropic;
};

IsomClass classify(const LorentzOp& op);

struct TranslationLength {
    double spectral = 0.0;
    double orbit = 0.0;
    int n = 0;
    // Admissible gap C / n between the two values.
    double bound = 0.0;
    bool agrees = false;
};

TranslationLength translation_length(const LorentzOp& op, int n_max);

} // namespace lorentree
