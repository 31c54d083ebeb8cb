#pragma once

#include "lorentree/errors.hpp"
#include "lorentree/trees.hpp"

#include <gmpxx.h>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lorentree {

// kappa_0 1_{K_0} + sum_{l >= 1} kappa_l 1_{K_l \ K_{l-1}}, trailing zeros trimmed.
struct ShellFn {
    int q = 3;
    std::vector<mpq_class> coeffs;

    ShellFn() = default;
    ShellFn(int q_, std::vector<mpq_class> c);

    // Basis element: shell 0 is 1_{K_0}, shell n > 0 is chi_n.
    static ShellFn basis(int q, int shell);
    static ShellFn zero(int q) { return ShellFn(q, {}); }

    mpq_class at(int shell) const;
    int max_shell() const { return static_cast<int>(coeffs.size()) - 1; }
    bool is_zero() const { return coeffs.empty(); }
    std::string to_string() const;

    friend bool operator==(const ShellFn& a, const ShellFn& b) { return a.q == b.q && a.coeffs == b.coeffs; }
    friend ShellFn operator+(const ShellFn& a, const ShellFn& b);
    friend ShellFn operator-(const ShellFn& a, const ShellFn& b);
    friend ShellFn operator*(const mpq_class& c, const ShellFn& f);
};

// mu(K_n) = (q-1)^n with mu(K_0) = 1.
mpq_class haar_ball(int q, int n);
// mu(K_n \ K_{n-1}) for n >= 1, and mu(K_0) for n = 0.
mpq_class haar_shell(int q, int n);

ShellFn convolve(const ShellFn& f, const ShellFn& g);
ShellFn commutator_residual(const ShellFn& f, const ShellFn& g);

// 1_{K_0} - 1/(q-2) chi_1; needs q >= 3.
ShellFn spherical_phi0(int q);

struct SphericalCheck {
    bool ok = true;
    // shell -> c_f with phi * f = c_f phi
    std::map<int, mpq_class> constants;
    std::optional<int> failing_shell;
};

// Tests phi * f = c_f phi for f = 1_{K_0}, chi_1, ..., chi_max_shell.
SphericalCheck check_spherical(const ShellFn& phi, int max_shell);

// c with phi * phi_check = c phi and c >= 0; throws PreconditionFailed otherwise.
mpq_class positive_definite_witness(const ShellFn& phi);

// K_m as the automorphism group of the rooted (q-1)-ary tree of depth m; the
// leaf l0 plays the role of c(0) and K_j is the stabilizer of its ancestor at
// height j.
class WreathModel {
public:
    WreathModel(int q, int depth);

    int q() const { return q_; }
    int depth() const { return tree_.height(); }
    const RootedWreath& tree() const { return tree_; }
    const std::vector<std::vector<int>>& elements() const { return elements_; }
    int base_leaf() const { return tree_.leaves().front(); }

    // Smallest j with x in K_j: the height of the meet of l0 and x(l0).
    int shell_of_leaf(int leaf) const;
    int shell(const std::vector<int>& x) const { return shell_of_leaf(x[static_cast<std::size_t>(base_leaf())]); }
    // |K_n| / |K_0| counted in the model.
    mpq_class index_of(int n) const;

private:
    int q_;
    RootedWreath tree_;
    std::vector<std::vector<int>> elements_;
};

// (f * g)(x) = (1/|K_0|) sum_y f(y) g(y^-1 x), summed over the finite group and
// read back on shells. Throws DepthExceeded when a support does not fit and
// DataInconsistency when the result is not constant on shells.
ShellFn wreath_oracle_convolve(const ShellFn& f, const ShellFn& g, const WreathModel& model);

// Same sum with g replaced by its reflection g_check(x) = g(x^-1), evaluated
// honestly on group elements.
ShellFn wreath_oracle_convolve_check(const ShellFn& f, const ShellFn& g, const WreathModel& model);

struct DimensionOne {
    // Basis of the solution space in shell coordinates 0..depth.
    std::vector<std::vector<mpq_class>> basis;
    std::size_t orbit_count = 0;
};

// K_0-invariant functions on the leaves whose sum over every K_1-orbit vanishes.
DimensionOne spherical_space(const WreathModel& model);

} // namespace lorentree
