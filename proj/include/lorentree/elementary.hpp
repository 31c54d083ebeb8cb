#pragma once

#include "lorentree/lorentz.hpp"
#include "lorentree/trees.hpp"

#include <map>
#include <vector>

namespace lorentree {

// Word in free generators: letter i > 0 is generator i, -i its inverse.
using Word = std::vector<int>;

Word word_inverse(const Word& w);
Word word_concat(const Word& a, const Word& b);

// Character, orthogonal representation on E = R^dim and a cocycle for
// tau = chi (x) rho, all given on generators and extended to words. Extra
// cocycle values on longer words may be supplied; they are checked against
// the cocycle rule.
struct ElemData {
    std::size_t dim = 0;
    std::map<int, double> chi;
    std::map<int, Matrix<double>> rho;
    std::map<Word, Vec> f;

    // Generators are the positive letters present in chi.
    std::vector<int> generators() const;
    void validate(double tol = 1e-9) const;

    double character(const Word& w) const;
    Matrix<double> orth(const Word& w) const;
    Matrix<double> tau(const Word& w) const;
    // f(gh) = tau(g) f(h) + f(g); f(g^-1) = -tau(g)^-1 f(g). Throws
    // DataInconsistency when a supplied value disagrees with the rule.
    Vec cocycle(const Word& w) const;
};

// The operator on (l+, l-, F) with F identified with E:
//   l+  -> chi l+
//   l-  -> a l+ + chi^-1 l- + chi^-1 f
//   v   -> -<rho v, f> l+ + rho v
// with a = -1/2 chi^-1 |f|^2.
LorentzOp reconstruct_rep(const ElemData& data, const Word& g);

struct Standardized {
    ElemData data;
    // The coboundary vector: f'(g) = f(g) + shift - tau(g) shift.
    Vec shift;
};

// Cohomologous cocycle vanishing at a; needs |chi(a)| != 1.
Standardized standardize_cocycle(const ElemData& data, const Word& a, double tol = 1e-9);

struct SigmaResult {
    Vec value;
    int tail = 0;
    double bound = 0.0;
};

// sum_{m=0}^{tail-1} tau(a)^-m v given tau(a)^-1 and |chi(a)| > 1. With
// tail <= 0 the smallest tail with bound <= 1e-12 |v| is used.
SigmaResult sigma_from_inverse(const Vec& v, const Matrix<double>& tau_a_inverse, double chi_abs, int tail = 0);
SigmaResult sigma(const Vec& v, const Matrix<double>& tau_a, int tail = 0);

// f(k) = tau(k) sigma - sigma for each supplied tau(k).
std::vector<Vec> standard_cocycle_from_v(const Vec& sigma_v, const std::vector<Matrix<double>>& tau_k);

// Orthonormal basis of the span, modified Gram-Schmidt with column pivoting.
std::vector<Vec> orthonormal_span(std::vector<Vec> vectors, double rank_tol = 1e-10);
std::vector<Vec> ieta_span(const ElemData& data, const std::vector<Word>& samples, double rank_tol = 1e-10);

// Distance from v to the span of an orthonormal family.
double distance_to_span(const Vec& v, const std::vector<Vec>& basis);

struct Decomposition {
    // Vectors in the (l+, l-, F) coordinates.
    std::vector<Vec> h1;
    std::vector<Vec> h0;
    // max over samples and basis vectors of the distance from pi(g) x to span(H1).
    double invariance_residual = 0.0;
};

Decomposition invariant_decomposition(const ElemData& data, const std::vector<Word>& samples);

// The finite model with tau(a) = 2P for the cyclic shift P on R^d, the
// symmetric group M = <t, c> permuting coordinates, f(m) = m u - u and
// f(a) = (2P - I) u + (1,...,1). Generator 1 is a, 2 is t, 3 is c.
ElemData shift_model(const Vec& u);

// Functions on the non-root vertices of the rooted (q-1)-ary tree of depth R.
// tau(a)^-1 moves delta_p to delta_{first child, p} scaled by 1/(q-1) (dropped
// below depth R); compact elements act by the tree automorphisms.
struct HorosphereModel {
    int q = 3;
    int depth = 3;
    RootedWreath tree{2, 3};
    double chi_abs = 2.0;
    Matrix<double> tau_a_inverse;
    std::vector<Matrix<double>> tau_k;
    // delta at the first child minus the mean over the children of the root.
    Vec v;

    std::size_t dim() const { return tree.vertex_count() - 1; }
};

HorosphereModel make_horosphere_model(int q, int depth);

} // namespace lorentree
