#pragma once

#include "lorentree/errors.hpp"

#include <compare>
#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lorentree {

// Labelling of the q-regular tree used throughout: the base vertex w has
// children labelled 1..q, every other vertex has children labelled 1..q-1.
// A vertex is the reduced word of labels read along the path from w.
struct Address {
    std::vector<int> labels;

    Address() = default;
    explicit Address(std::vector<int> l) : labels(std::move(l)) {}

    std::size_t depth() const { return labels.size(); }
    bool is_root() const { return labels.empty(); }
    Address parent() const;
    Address child(int label) const;
    Address prefix(std::size_t n) const;
    bool has_prefix(const Address& p) const;

    std::string to_string() const;
    // Accepts "w", "" or "1/2/1".
    static Address parse(const std::string& text);

    auto operator<=>(const Address&) const = default;
};

constexpr int kInfiniteProduct = std::numeric_limits<int>::max();

// Geodesic ray from w, eventually periodic (prefix . period^inf) or given by a
// finite prefix only when `approximate` is set.
struct Ray {
    std::vector<int> prefix;
    std::vector<int> period;
    bool approximate = false;

    // Number of letters available (unbounded for periodic rays).
    std::size_t known_length() const;
    int letter(std::size_t i) const;
    Address vertex(std::size_t k) const;
    std::string to_string() const;
    // "1/2,(1)", "(1)" or ",(2/1)"
    static Ray parse(const std::string& text);
    static Ray finite(std::vector<int> letters);
};

class RegularTree {
public:
    explicit RegularTree(int q);

    int q() const { return q_; }

    void validate(const Address& v) const;
    void validate(const Ray& r) const;

    std::vector<Address> children(const Address& v) const;
    std::vector<Address> neighbors(const Address& v) const;
    // All vertices with depth <= d, ordered by depth then lexicographically.
    std::vector<Address> ball(int d) const;
    static std::size_t ball_size(int q, int d);

    // Ports of a vertex: 0 for the parent (absent at w), otherwise child labels.
    int port_toward(const Address& from, const Address& neighbor) const;
    Address through_port(const Address& from, int port) const;
    std::vector<int> ports(const Address& v) const;
    int child_count(const Address& v) const { return v.is_root() ? q_ : q_ - 1; }

private:
    int q_;
};

int tree_dist(const Address& x, const Address& y);

int gromov_product(const Address& x, const Address& y);
int gromov_product(const Address& x, const Ray& r);
int gromov_product(const Ray& a, const Ray& b);

// b_xi(x, y) = (|x| - 2(x|xi)) - (|y| - 2(y|xi))
int tree_busemann(const Ray& xi, const Address& x, const Address& y);

using Perm = std::vector<int>;

// Completes a partial assignment src -> dst of {0..n-1} to a permutation by
// sending the remaining sources, in increasing order, to the remaining targets
// in increasing order.
Perm complete_permutation(int n, const std::vector<std::pair<int, int>>& constraints);

// Automorphism of the q-regular tree: image of w plus a local permutation at
// each vertex. The permutation at x sends child index c-1 to an index into the
// sorted list of ports of g(x), with the port toward g(parent(x)) removed.
class TreeAut {
public:
    static constexpr int kUnbounded = 1 << 20;

    static TreeAut identity(int q);
    static TreeAut portrait(int q, Address base, std::map<Address, Perm> perms, int depth_bound = kUnbounded);
    static TreeAut lazy(int q, Address base, std::function<Perm(const Address&)> perm_at,
                        int depth_bound = kUnbounded);

    int q() const;
    int depth_bound() const;

    Address apply(const Address& v) const;
    Address apply_inverse(const Address& v) const;
    Address base_image() const { return apply(Address{}); }
    // Local permutation at x, recomputed from the vertex map.
    Perm local_perm(const Address& x) const;

    TreeAut inverse() const;
    // (g * h)(v) = g(h(v))
    friend TreeAut operator*(const TreeAut& g, const TreeAut& h);
    TreeAut power(int n) const;

    struct Node;
    explicit TreeAut(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    const Node* node() const { return node_.get(); }

private:
    std::shared_ptr<const Node> node_;
};

// Transposition of two child labels at w; fixes w.
TreeAut root_transposition(int q, int a, int b);

// Bi-infinite geodesic c with c(0) = w, c(k) = plus.vertex(k), c(-k) = minus.vertex(k).
struct Axis {
    Ray plus;
    Ray minus;

    Address at(int k) const;
    // Index k with at(k) == v, if v lies on the axis.
    std::optional<int> index_of(const Address& v) const;
};

// c(k) = 1^k for k >= 0 and c(-k) = 2 1^(k-1).
Axis standard_axis();

// Translation of length one along the axis: g(c(k)) = c(k+1).
TreeAut translation_aut(int q, const Axis& axis);

// Swaps w with its neighbor z; an involution.
TreeAut edge_flip_aut(int q, const Address& z);

// Points of the horosphere through c(j), centered at the plus end, at
// distance 2 ell from c(j). Throws DepthExceeded beyond the truncation depth.
std::set<Address> horosphere_points(const RegularTree& tree, const Axis& axis, int j, int ell, int truncation);

// Orbit of a point of H_j(2 ell) under the stabilizer K_r of c(r) and the plus
// end, generated by single-transposition portraits.
std::set<Address> stabilizer_orbit(const RegularTree& tree, const Axis& axis, int r, int j, const Address& point,
                                   int truncation);

// Finite tree with integer vertex ids and a base vertex.
class FiniteTree {
public:
    FiniteTree(std::map<int, std::vector<int>> adjacency, std::optional<int> base = std::nullopt);
    static FiniteTree parse(std::istream& in, std::optional<int> base = std::nullopt);

    int base() const { return base_; }
    const std::vector<int>& vertices() const { return order_; }
    const std::vector<int>& neighbors(int v) const;
    int max_degree() const;
    // Path from the base to v, inclusive of both ends.
    std::vector<int> path_from_base(int v) const;
    int depth(int v) const;
    int dist(int u, int v) const;

private:
    std::map<int, std::vector<int>> adj_;
    std::map<int, int> parent_;
    std::map<int, int> depth_;
    std::vector<int> order_;
    int base_;
};

// Automorphism group of the rooted k-ary tree of depth m, enumerated
// explicitly. Vertices are numbered breadth first with the root at 0.
class RootedWreath {
public:
    RootedWreath(int k, int m);

    int arity() const { return k_; }
    int height() const { return m_; }
    std::size_t vertex_count() const { return parent_.size(); }
    int parent(int v) const { return parent_[v]; }
    int depth(int v) const { return depth_[v]; }
    const std::vector<int>& children(int v) const { return children_[v]; }
    const std::vector<int>& leaves() const { return leaves_; }
    // Ancestor of v at the given height above the leaves (height 0 = v itself for a leaf).
    int ancestor(int v, int levels_up) const;

    // Every automorphism as a vertex permutation. Size (k!)^(internal vertices).
    std::vector<std::vector<int>> elements() const;
    // Automorphisms applying one transposition of children at one vertex.
    std::vector<std::vector<int>> transpositions() const;
    // Orbits of the subgroup generated by the given permutations on `points`.
    static std::vector<std::set<int>> orbits(const std::vector<std::vector<int>>& generators,
                                             const std::vector<int>& points);

private:
    int k_;
    int m_;
    std::vector<int> parent_;
    std::vector<int> depth_;
    std::vector<std::vector<int>> children_;
    std::vector<int> leaves_;
};

} // namespace lorentree
