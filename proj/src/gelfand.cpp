#include "lorentree/gelfand.hpp"

#include "lorentree/matrix.hpp"

#include <fmt/format.h>

namespace lorentree {

namespace {

void trim(std::vector<mpq_class>& c)
{
    while (!c.empty() && sgn(c.back()) == 0)
        c.pop_back();
}

void require_same_q(const ShellFn& f, const ShellFn& g)
{
    if (f.q != g.q)
        throw InvalidInput(fmt::format("valence mismatch: {} vs {}", f.q, g.q));
}

mpq_class power(int base, int n)
{
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), static_cast<unsigned long>(n));
    return mpq_class(r);
}

// 1_{K_n} = 1_{K_0} + chi_1 + ... + chi_n
ShellFn ball_indicator(int q, int n) { return ShellFn(q, std::vector<mpq_class>(static_cast<std::size_t>(n + 1), 1)); }

ShellFn basis_product(int q, int n, int m)
{
    if (n == 0)
        return ShellFn::basis(q, m);
    if (m == 0)
        return ShellFn::basis(q, n);
    if (n < m)
        return haar_shell(q, n) * ShellFn::basis(q, m);
    if (m < n)
        return haar_shell(q, m) * ShellFn::basis(q, n);
    return haar_shell(q, n) * ball_indicator(q, n) - haar_ball(q, n - 1) * ShellFn::basis(q, n);
}

} // namespace

ShellFn::ShellFn(int q_, std::vector<mpq_class> c) : q(q_), coeffs(std::move(c))
{
    if (q < 3)
        throw InvalidInput("shell functions need valence at least 3");
    trim(coeffs);
}

ShellFn ShellFn::basis(int q, int shell)
{
    if (shell < 0)
        throw InvalidInput("shell index must be nonnegative");
    std::vector<mpq_class> c(static_cast<std::size_t>(shell + 1), 0);
    c.back() = 1;
    return ShellFn(q, std::move(c));
}

mpq_class ShellFn::at(int shell) const
{
    if (shell < 0 || shell >= static_cast<int>(coeffs.size()))
        return 0;
    return coeffs[static_cast<std::size_t>(shell)];
}

std::string ShellFn::to_string() const
{
    std::string out = "(";
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (i)
            out += ", ";
        out += coeffs[i].get_str();
    }
    return out + ")";
}

ShellFn operator+(const ShellFn& a, const ShellFn& b)
{
    require_same_q(a, b);
    std::vector<mpq_class> c(std::max(a.coeffs.size(), b.coeffs.size()));
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] = a.at(static_cast<int>(i)) + b.at(static_cast<int>(i));
    return ShellFn(a.q, std::move(c));
}

ShellFn operator-(const ShellFn& a, const ShellFn& b) { return a + mpq_class(-1) * b; }

ShellFn operator*(const mpq_class& s, const ShellFn& f)
{
    std::vector<mpq_class> c = f.coeffs;
    for (auto& x : c)
        x *= s;
    return ShellFn(f.q, std::move(c));
}

mpq_class haar_ball(int q, int n)
{
    if (n < 0)
        throw InvalidInput("Haar weight of a negative ball");
    return power(q - 1, n);
}

mpq_class haar_shell(int q, int n)
{
    if (n == 0)
        return 1;
    return haar_ball(q, n) - haar_ball(q, n - 1);
}

ShellFn convolve(const ShellFn& f, const ShellFn& g)
{
    require_same_q(f, g);
    ShellFn out = ShellFn::zero(f.q);
    for (int n = 0; n <= f.max_shell(); ++n) {
        if (sgn(f.at(n)) == 0)
            continue;
        for (int m = 0; m <= g.max_shell(); ++m)
            if (sgn(g.at(m)) != 0)
                out = out + (f.at(n) * g.at(m)) * basis_product(f.q, n, m);
    }
    return out;
}

ShellFn commutator_residual(const ShellFn& f, const ShellFn& g) { return convolve(f, g) - convolve(g, f); }

ShellFn spherical_phi0(int q)
{
    if (q < 3)
        throw InvalidInput("phi0 needs valence at least 3");
    return ShellFn(q, {mpq_class(1), mpq_class(-1, q - 2)});
}

SphericalCheck check_spherical(const ShellFn& phi, int max_shell)
{
    if (sgn(phi.at(0)) == 0)
        throw PreconditionFailed("spherical check needs phi(e) != 0");
    SphericalCheck out;
    for (int s = 0; s <= max_shell; ++s) {
        ShellFn p = convolve(phi, ShellFn::basis(phi.q, s));
        mpq_class c = p.at(0) / phi.at(0);
        if (!(p == c * phi)) {
            out.ok = false;
            out.failing_shell = s;
            return out;
        }
        out.constants[s] = c;
    }
    return out;
}

mpq_class positive_definite_witness(const ShellFn& phi)
{
    if (sgn(phi.at(0)) == 0)
        throw PreconditionFailed("positive definiteness witness needs phi(e) != 0");
    // Shells are closed under inversion, so phi_check = phi.
    ShellFn p = convolve(phi, phi);
    mpq_class c = p.at(0) / phi.at(0);
    if (!(p == c * phi))
        throw PreconditionFailed("phi * phi_check is not proportional to phi");
    if (sgn(c) < 0)
        throw PreconditionFailed("negative constant " + c.get_str() + " in phi * phi_check");
    return c;
}

// ---------------------------------------------------------------- oracle

WreathModel::WreathModel(int q, int depth) : q_(q), tree_(q - 1, depth)
{
    if (q < 3)
        throw InvalidInput("wreath model needs valence at least 3");
    elements_ = tree_.elements();
}

int WreathModel::shell_of_leaf(int leaf) const
{
    int a = base_leaf();
    int b = leaf;
    int h = 0;
    while (a != b) {
        a = tree_.parent(a);
        b = tree_.parent(b);
        ++h;
    }
    return h;
}

mpq_class WreathModel::index_of(int n) const
{
    long inside = 0;
    long base = 0;
    for (const auto& x : elements_) {
        int s = shell(x);
        if (s <= n)
            ++inside;
        if (s == 0)
            ++base;
    }
    mpq_class r(inside, base);
    r.canonicalize();
    return r;
}

namespace {

std::vector<std::vector<int>> inverses(const std::vector<std::vector<int>>& elements)
{
    std::vector<std::vector<int>> inv;
    inv.reserve(elements.size());
    for (const auto& x : elements) {
        std::vector<int> y(x.size());
        for (std::size_t v = 0; v < x.size(); ++v)
            y[static_cast<std::size_t>(x[v])] = static_cast<int>(v);
        inv.push_back(std::move(y));
    }
    return inv;
}

ShellFn oracle(const ShellFn& f, const ShellFn& g, const WreathModel& model, bool reflect)
{
    require_same_q(f, g);
    if (f.q != model.q())
        throw InvalidInput("model valence differs from the functions'");
    if (f.max_shell() > model.depth() || g.max_shell() > model.depth())
        throw DepthExceeded(fmt::format("supports exceed the model depth {}", model.depth()));

    const auto& els = model.elements();
    const auto inv = inverses(els);
    const auto l0 = static_cast<std::size_t>(model.base_leaf());
    std::vector<mpq_class> fy(els.size());
    long base_order = 0;
    for (std::size_t i = 0; i < els.size(); ++i) {
        fy[i] = f.at(model.shell(els[i]));
        if (model.shell(els[i]) == 0)
            ++base_order;
    }

    std::vector<std::optional<mpq_class>> value(static_cast<std::size_t>(model.depth() + 1));
    for (std::size_t xi = 0; xi < els.size(); ++xi) {
        const auto& x = els[xi];
        mpq_class acc = 0;
        for (std::size_t yi = 0; yi < els.size(); ++yi) {
            if (sgn(fy[yi]) == 0)
                continue;
            int z_leaf;
            if (reflect) {
                // z = y^-1 x, g_check(z) = g(z^-1) with z^-1 = x^-1 y
                z_leaf = inv[xi][static_cast<std::size_t>(els[yi][l0])];
            } else {
                z_leaf = inv[yi][static_cast<std::size_t>(x[l0])];
            }
            acc += fy[yi] * g.at(model.shell_of_leaf(z_leaf));
        }
        acc /= base_order;
        auto& slot = value[static_cast<std::size_t>(model.shell(x))];
        if (!slot)
            slot = acc;
        else if (*slot != acc)
            throw DataInconsistency("oracle convolution is not constant on a shell");
    }
    std::vector<mpq_class> c;
    for (const auto& v : value)
        c.push_back(v.value_or(0));
    return ShellFn(f.q, std::move(c));
}

} // namespace

ShellFn wreath_oracle_convolve(const ShellFn& f, const ShellFn& g, const WreathModel& model)
{
    return oracle(f, g, model, false);
}

ShellFn wreath_oracle_convolve_check(const ShellFn& f, const ShellFn& g, const WreathModel& model)
{
    return oracle(f, g, model, true);
}

DimensionOne spherical_space(const WreathModel& model)
{
    if (model.depth() < 1)
        throw DepthExceeded("spherical space needs model depth at least 1");
    const auto& tree = model.tree();
    const auto c1 = static_cast<std::size_t>(tree.parent(model.base_leaf()));
    std::vector<std::vector<int>> gens;
    for (auto& t : tree.transpositions())
        if (static_cast<std::size_t>(t[c1]) == c1)
            gens.push_back(std::move(t));
    auto orbits = RootedWreath::orbits(gens, tree.leaves());

    const auto cols = static_cast<std::size_t>(model.depth() + 1);
    Matrix<mpq_class> system(orbits.size(), cols);
    for (std::size_t r = 0; r < orbits.size(); ++r)
        for (int leaf : orbits[r])
            system(r, static_cast<std::size_t>(model.shell_of_leaf(leaf))) += 1;
    return DimensionOne{nullspace(system), orbits.size()};
}

} // namespace lorentree
