#pragma once

#include "lorentree/lorentz.hpp"
#include "lorentree/sparse_vec.hpp"
#include "lorentree/trees.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace lorentree {

template <class S>
using TreeVec = SparseVec<Address, S>;

// Operator between two finite sets of tree vertices, columns indexed by the
// domain and rows by the codomain.
template <class S>
struct BlockOp {
    std::vector<Address> domain;
    std::vector<Address> codomain;
    Matrix<S> matrix;

    // Throws DepthExceeded when x has support outside the domain.
    TreeVec<S> apply(const TreeVec<S>& x) const;
    TreeVec<S> column(const Address& v) const;
    // max |M^T J M - J| with J the diagonal form, -1 at the base vertex.
    S gram_residual() const;
};

template <class S>
class Embedding {
public:
    // lambda > 1; the exact backend needs lambda^2 - 1 to be a rational square.
    Embedding(int q, S lambda, int depth);

    int q() const { return tree_.q(); }
    int depth() const { return depth_; }
    const S& lambda() const { return lambda_; }
    // sqrt(lambda^2 - 1)
    const S& root() const { return root_; }
    const RegularTree& tree() const { return tree_; }

    // Checks the vertex against the truncation depth.
    TreeVec<S> vertex(const Address& v) const;
    // Same formula, no depth limit; used by the sparse operator paths.
    TreeVec<S> vertex_unbounded(const Address& v) const;

    // Closed forms of B on images.
    S pair_vertex_vertex(const Address& x, const Address& y) const;
    S pair_boundary_vertex(const Ray& xi, const Address& v) const;
    S pair_boundary_boundary(const Ray& xi, const Ray& eta) const;

    // delta_w + root * sum_{k=1..depth} lambda^-k delta_{xi_k}; Q = -lambda^(-2 depth).
    TreeVec<S> boundary_truncated(const Ray& xi, int depth) const;
    // lambda^(-2D) / (1 - lambda^-2), bounding the truncation error of pairings.
    double tail_bound(int depth) const;

    // Image of delta_v under pi(g), by the unitriangular solve
    // delta_v = (f_v - lambda f_parent(v)) / root.
    TreeVec<S> image_of_delta(const TreeAut& g, const Address& v) const;
    // pi(g) on a finitely supported vector, no ball restriction.
    TreeVec<S> apply(const TreeAut& g, const TreeVec<S>& x) const;

    // pi(g) from the depth-(D - t) ball into the depth-D ball, t = |g(w)|.
    BlockOp<S> represent(const TreeAut& g) const;
    // Closed-form matrix of an edge flip at (w, z) on B(w, D-1) u B(z, D-1).
    BlockOp<S> generator_op(const TreeAut& flip) const;
    // Independent construction through the amalgam factorization
    // g = k_0 s k_1 s ... k_{t-1} s g_t with s the flip at "1" and k_i, g_t
    // fixing w. Same domain and codomain as represent.
    BlockOp<S> factorized(const TreeAut& g) const;

private:
    RegularTree tree_;
    S lambda_;
    S root_;
    int depth_;
};

double to_double(double x);
double to_double(const mpq_class& x);

// Operators keyed by automorphism identity; concurrent inserts are idempotent.
template <class S>
class RepCache {
public:
    explicit RepCache(const Embedding<S>& e) : embedding_(e) {}
    std::shared_ptr<const BlockOp<S>> get(const TreeAut& g);
    std::size_t size() const;

private:
    const Embedding<S>& embedding_;
    mutable std::mutex mutex_;
    std::map<const TreeAut::Node*, std::pair<TreeAut, std::shared_ptr<const BlockOp<S>>>> cache_;
};

// Weighted finite set of pairwise distinct rays, weights positive with sum 1.
struct KleinPoint {
    std::vector<Ray> rays;
    std::vector<double> weights;

    void validate() const;
};

// psi_s(v) = sum_xi s_xi lambda^(|v| - 2 (v|xi))
double psi(const KleinPoint& kp, double lambda, const Address& v);

// Greedy descent from w, then back toward w while the value stays minimal.
Address psi_min(const RegularTree& tree, const KleinPoint& kp, double lambda);
// Exhaustive minimizer over the ball, ties to the vertex nearest w.
Address psi_min_exhaustive(const RegularTree& tree, const KleinPoint& kp, double lambda, int depth);

struct Codiameter {
    Address v0;
    double q_y = 0.0;
    double cosh_dist = 1.0;
    double dist = 0.0;
    double bound = 0.0;
};

// Distance from the Klein point y = sum s_xi f_xi to the image of its
// psi-minimizer, in closed form.
Codiameter codiameter_check(const RegularTree& tree, const KleinPoint& kp, double lambda);

// b_{Psi xi}(Psi x, Psi y) from closed-form pairings, and b_xi(x, y) ln lambda.
std::pair<double, double> busemann_compat(const Embedding<double>& e, const Ray& xi, const Address& x,
                                          const Address& y);

struct TranslationEstimate {
    double estimate = 0.0;
    double limit = 0.0;
    double bound = 0.0;
    bool within = false;
};

// d(Psi w, Psi a^n w) / n from the embedded vectors.
TranslationEstimate translation_length_estimate(const Embedding<double>& e, const TreeAut& a, int n);

// Data for the relation check along an axis: s fixes c(0) and swaps the ends,
// n lies in K_j \ K_{j-1}, h translates the axis by -2j and sends n xi_- to
// s n^-1 xi_-, so that g = s n s h n s lies in K_{-j} \ K_{-j-1}.
struct RelationSetup {
    int j = 0;
    Axis axis;
    TreeAut s;
    TreeAut n;
    TreeAut h;
    TreeAut g;
};

// n = a^j n0 b^j with n0 the transposition (2 3) at w and b the unit
// translation along the reversed axis; ray_depth bounds the approximation
// used for h. Needs q >= 3 and j >= 0.
RelationSetup make_relation_setup(int q, int j, int ray_depth = 400);

// h for given s and n: a translation by -2j along the axis followed by a
// w-fixing automorphism matching the two off-axis rays.
TreeAut build_relation_h(int q, const Axis& axis, const TreeAut& s, const TreeAut& n, int j, int ray_depth);

struct RelationReport {
    double mu = 0.0;
    double chi_g = 0.0;
    double chi_n = 0.0;
    double chi_h = 0.0;
    double alpha_n = 0.0;
    double residual_chi = 0.0;
    double residual_block = 0.0;
};

// Combinatorial membership of g in K_{-j} \ K_{-j-1}; throws PreconditionFailed.
void check_relation_membership(const RelationSetup& setup);

// Both relations, with l+ and l- the depth-D truncations of f_{xi+} and -f_{xi-}.
RelationReport parabolic_relation_check(const Embedding<double>& e, const RelationSetup& setup, int depth = 160);

// Embedding data for a finite tree through its completion to the regular tree
// of valence max(2, max degree).
struct FiniteEmbedding {
    int valence = 2;
    std::map<int, Address> address;
};

FiniteEmbedding complete_finite_tree(const FiniteTree& tree);

} // namespace lorentree
