#include "lorentree/embed.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fmt/format.h>
#include <limits>

namespace lorentree {

double to_double(double x) { return x; }
double to_double(const mpq_class& x) { return x.get_d(); }

namespace {

template <class S>
std::map<Address, std::size_t> index_map(const std::vector<Address>& v)
{
    std::map<Address, std::size_t> m;
    for (std::size_t i = 0; i < v.size(); ++i)
        m.emplace(v[i], i);
    return m;
}

template <class S>
BlockOp<S> from_columns(std::vector<Address> domain, std::vector<Address> codomain,
                        const std::function<TreeVec<S>(const Address&)>& column)
{
    auto rows = index_map<S>(codomain);
    Matrix<S> m(codomain.size(), domain.size());
    for (std::size_t c = 0; c < domain.size(); ++c)
        for (const auto& [u, coeff] : column(domain[c])) {
            auto it = rows.find(u);
            if (it == rows.end())
                throw DepthExceeded("image of '" + domain[c].to_string() + "' leaves the codomain ball");
            m(it->second, c) = coeff;
        }
    return BlockOp<S>{std::move(domain), std::move(codomain), std::move(m)};
}

} // namespace

template <class S>
TreeVec<S> BlockOp<S>::apply(const TreeVec<S>& x) const
{
    auto cols = index_map<S>(domain);
    TreeVec<S> out;
    for (const auto& [v, c] : x) {
        auto it = cols.find(v);
        if (it == cols.end())
            throw DepthExceeded("vector support '" + v.to_string() + "' outside the operator domain");
        for (std::size_t r = 0; r < codomain.size(); ++r)
            if (!ScalarTraits<S>::is_exactly_zero(matrix(r, it->second)))
                out.add(codomain[r], c * matrix(r, it->second));
    }
    return out;
}

template <class S>
TreeVec<S> BlockOp<S>::column(const Address& v) const
{
    return apply(TreeVec<S>::delta(v));
}

template <class S>
S BlockOp<S>::gram_residual() const
{
    auto form = [](const std::vector<Address>& basis) {
        std::vector<S> d(basis.size(), S(1));
        for (std::size_t i = 0; i < basis.size(); ++i)
            if (basis[i].is_root())
                d[i] = S(-1);
        return Matrix<S>::diagonal(d);
    };
    return lorentree::gram_residual(matrix, form(codomain), form(domain));
}

template <class S>
Embedding<S>::Embedding(int q, S lambda, int depth) : tree_(q), lambda_(std::move(lambda)), depth_(depth)
{
    if (!(lambda_ > S(1)))
        throw PreconditionFailed("lambda must exceed 1");
    if (depth < 0)
        throw InvalidInput("depth must be nonnegative");
    S disc = lambda_ * lambda_ - S(1);
    try {
        root_ = ScalarTraits<S>::sqrt(disc);
    } catch (const InvalidInput&) {
        throw PreconditionFailed("exact backend needs lambda^2 - 1 to be a rational square (lambda = " +
                                 ScalarTraits<S>::to_string(lambda_) + ")");
    }
}

template <class S>
TreeVec<S> Embedding<S>::vertex(const Address& v) const
{
    tree_.validate(v);
    if (static_cast<int>(v.depth()) > depth_)
        throw DepthExceeded(fmt::format("vertex '{}' beyond depth {}", v.to_string(), depth_));
    return vertex_unbounded(v);
}

template <class S>
TreeVec<S> Embedding<S>::vertex_unbounded(const Address& v) const
{
    int k = static_cast<int>(v.depth());
    TreeVec<S> f;
    f.set(Address{}, pow_int(lambda_, k));
    for (int i = 1; i <= k; ++i)
        f.set(v.prefix(static_cast<std::size_t>(i)), root_ * pow_int(lambda_, k - i));
    return f;
}

template <class S>
S Embedding<S>::pair_vertex_vertex(const Address& x, const Address& y) const
{
    return -pow_int(lambda_, tree_dist(x, y));
}

template <class S>
S Embedding<S>::pair_boundary_vertex(const Ray& xi, const Address& v) const
{
    int b = static_cast<int>(v.depth()) - 2 * gromov_product(v, xi);
    return -pow_int(lambda_, b);
}

template <class S>
S Embedding<S>::pair_boundary_boundary(const Ray& xi, const Ray& eta) const
{
    int gp = gromov_product(xi, eta);
    if (gp == kInfiniteProduct)
        return S(0);
    return -pow_int(lambda_, -2 * gp);
}

template <class S>
TreeVec<S> Embedding<S>::boundary_truncated(const Ray& xi, int depth) const
{
    TreeVec<S> f = TreeVec<S>::delta(Address{});
    Address v;
    S scale = root_;
    for (int k = 1; k <= depth; ++k) {
        v = v.child(xi.letter(static_cast<std::size_t>(k - 1)));
        scale /= lambda_;
        f.set(v, scale);
    }
    return f;
}

template <class S>
double Embedding<S>::tail_bound(int depth) const
{
    double l = to_double(lambda_);
    return std::pow(l, -2.0 * depth) / (1.0 - 1.0 / (l * l));
}

template <class S>
TreeVec<S> Embedding<S>::image_of_delta(const TreeAut& g, const Address& v) const
{
    if (v.is_root())
        return vertex_unbounded(g.apply(v));
    Address gv = g.apply(v);
    Address gp = g.apply(v.parent());
    if (!gv.is_root() && gv.parent() == gp)
        return TreeVec<S>::delta(gv);
    // g reverses the edge: g(parent v) is a child of g(v).
    TreeVec<S> out = vertex_unbounded(gv);
    out *= -root_;
    out.add(gp, -lambda_);
    return out;
}

template <class S>
TreeVec<S> Embedding<S>::apply(const TreeAut& g, const TreeVec<S>& x) const
{
    TreeVec<S> out;
    for (const auto& [v, c] : x)
        out.axpy(c, image_of_delta(g, v));
    return out;
}

template <class S>
BlockOp<S> Embedding<S>::represent(const TreeAut& g) const
{
    int t = static_cast<int>(g.base_image().depth());
    if (t > depth_)
        throw DepthExceeded(fmt::format("displacement {} exceeds depth {}", t, depth_));
    S inv_root = S(1) / root_;
    return from_columns<S>(tree_.ball(depth_ - t), tree_.ball(depth_), [&](const Address& v) {
        TreeVec<S> col = vertex(g.apply(v));
        if (v.is_root())
            return col;
        col.axpy(-lambda_, vertex(g.apply(v.parent())));
        col *= inv_root;
        return col;
    });
}

template <class S>
BlockOp<S> Embedding<S>::generator_op(const TreeAut& flip) const
{
    Address z = flip.base_image();
    if (z.depth() != 1 || !flip.apply(z).is_root())
        throw InvalidInput("generator_op needs an edge flip at the base vertex");
    if (depth_ < 1)
        throw DepthExceeded("generator_op needs depth at least 1");
    std::vector<Address> basis = tree_.ball(depth_ - 1);
    for (const auto& v : tree_.ball(depth_))
        if (static_cast<int>(v.depth()) == depth_ && v.has_prefix(z))
            basis.push_back(v);
    return from_columns<S>(basis, basis, [&](const Address& u) {
        TreeVec<S> col;
        if (u.is_root()) {
            col.set(Address{}, lambda_);
            col.set(z, root_);
        } else if (u == z) {
            col.set(Address{}, -root_);
            col.set(z, -lambda_);
        } else {
            col.set(flip.apply(u), S(1));
        }
        return col;
    });
}

template <class S>
BlockOp<S> Embedding<S>::factorized(const TreeAut& g) const
{
    int t = static_cast<int>(g.base_image().depth());
    if (t > depth_)
        throw DepthExceeded(fmt::format("displacement {} exceeds depth {}", t, depth_));
    const int q = tree_.q();
    const Address z({1});
    TreeAut flip = edge_flip_aut(q, z);

    // Factors listed left to right; nullopt stands for the flip.
    std::vector<std::optional<TreeAut>> factors;
    TreeAut rest = g;
    while (!rest.base_image().is_root()) {
        int a = rest.base_image().labels.front();
        TreeAut k = a == 1 ? TreeAut::identity(q) : root_transposition(q, a, 1);
        factors.emplace_back(k);
        factors.emplace_back(std::nullopt);
        rest = flip * (k * rest);
    }
    factors.emplace_back(rest);

    auto apply_flip = [&](const TreeVec<S>& x) {
        TreeVec<S> out;
        for (const auto& [u, c] : x) {
            if (u.is_root()) {
                out.add(Address{}, c * lambda_);
                out.add(z, c * root_);
            } else if (u == z) {
                out.add(Address{}, -c * root_);
                out.add(z, -c * lambda_);
            } else {
                out.add(flip.apply(u), c);
            }
        }
        return out;
    };
    auto apply_perm = [](const TreeAut& k, const TreeVec<S>& x) {
        TreeVec<S> out;
        for (const auto& [u, c] : x)
            out.add(k.apply(u), c);
        return out;
    };

    return from_columns<S>(tree_.ball(depth_ - t), tree_.ball(depth_), [&](const Address& v) {
        TreeVec<S> x = TreeVec<S>::delta(v);
        for (auto it = factors.rbegin(); it != factors.rend(); ++it)
            x = *it ? apply_perm(**it, x) : apply_flip(x);
        return x;
    });
}

template <class S>
std::shared_ptr<const BlockOp<S>> RepCache<S>::get(const TreeAut& g)
{
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(g.node());
        if (it != cache_.end())
            return it->second.second;
    }
    auto op = std::make_shared<const BlockOp<S>>(embedding_.represent(g));
    std::lock_guard<std::mutex> lock(mutex_);
    auto [it, inserted] = cache_.emplace(g.node(), std::make_pair(g, op));
    return it->second.second;
}

template <class S>
std::size_t RepCache<S>::size() const
{
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.size();
}

template struct BlockOp<double>;
template struct BlockOp<mpq_class>;
template class Embedding<double>;
template class Embedding<mpq_class>;
template class RepCache<double>;
template class RepCache<mpq_class>;

// ------------------------------------------------------------ Klein model

void KleinPoint::validate() const
{
    if (rays.size() < 2)
        throw InvalidInput("a Klein point needs at least two rays");
    if (weights.size() != rays.size())
        throw InvalidInput("one weight per ray expected");
    double sum = 0.0;
    for (double s : weights) {
        if (!(s > 0.0))
            throw InvalidInput("Klein weights must be positive");
        sum += s;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw InvalidInput(fmt::format("Klein weights sum to {} instead of 1", sum));
    for (std::size_t i = 0; i < rays.size(); ++i)
        for (std::size_t k = i + 1; k < rays.size(); ++k)
            if (gromov_product(rays[i], rays[k]) == kInfiniteProduct)
                throw InvalidInput("Klein point rays must be distinct");
}

double psi(const KleinPoint& kp, double lambda, const Address& v)
{
    double total = 0.0;
    for (std::size_t i = 0; i < kp.rays.size(); ++i) {
        int b = static_cast<int>(v.depth()) - 2 * gromov_product(v, kp.rays[i]);
        total += kp.weights[i] * std::pow(lambda, b);
    }
    return total;
}

namespace {

constexpr double kTieTolerance = 1e-12;

bool same_value(double a, double b) { return std::fabs(a - b) <= kTieTolerance * std::max(a, b); }

} // namespace

Address psi_min(const RegularTree& tree, const KleinPoint& kp, double lambda)
{
    kp.validate();
    Address v;
    double cur = psi(kp, lambda, v);
    while (true) {
        Address best = v;
        double best_val = cur;
        for (const auto& nb : tree.neighbors(v)) {
            double val = psi(kp, lambda, nb);
            if (val < best_val && !same_value(val, best_val)) {
                best = nb;
                best_val = val;
            }
        }
        if (best == v)
            break;
        v = best;
        cur = best_val;
    }
    // The minimizing set is a subtree; its point nearest w lies between v and w.
    while (!v.is_root() && same_value(psi(kp, lambda, v.parent()), cur))
        v = v.parent();
    return v;
}

Address psi_min_exhaustive(const RegularTree& tree, const KleinPoint& kp, double lambda, int depth)
{
    kp.validate();
    auto ball = tree.ball(depth);
    std::vector<double> values(ball.size());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ball.size(); ++i) {
        values[i] = psi(kp, lambda, ball[i]);
        best = std::min(best, values[i]);
    }
    // ball() is ordered by depth, so the first tie is nearest to w.
    for (std::size_t i = 0; i < ball.size(); ++i)
        if (same_value(values[i], best))
            return ball[i];
    throw Error("exhaustive search found no minimizer");
}

Codiameter codiameter_check(const RegularTree& tree, const KleinPoint& kp, double lambda)
{
    Codiameter out;
    out.v0 = psi_min(tree, kp, lambda);
    double q = 0.0;
    for (std::size_t i = 0; i < kp.rays.size(); ++i)
        for (std::size_t k = 0; k < kp.rays.size(); ++k)
            if (i != k)
                q -= kp.weights[i] * kp.weights[k] *
                     std::pow(lambda, -2.0 * gromov_product(kp.rays[i], kp.rays[k]));
    if (!(q < 0.0))
        throw Error(fmt::format("Klein point has Q(y) = {} >= 0", q));
    out.q_y = q;
    out.cosh_dist = psi(kp, lambda, out.v0) / std::sqrt(-q);
    out.dist = guarded_arcosh(out.cosh_dist);
    out.bound = std::acosh(std::sqrt(1.0 + lambda));
    return out;
}

std::pair<double, double> busemann_compat(const Embedding<double>& e, const Ray& xi, const Address& x,
                                          const Address& y)
{
    double lhs = busemann_from_pairings(e.pair_boundary_vertex(xi, x), e.pair_boundary_vertex(xi, y), -1.0, -1.0);
    double rhs = tree_busemann(xi, x, y) * std::log(e.lambda());
    return {lhs, rhs};
}

TranslationEstimate translation_length_estimate(const Embedding<double>& e, const TreeAut& a, int n)
{
    if (n < 1)
        throw InvalidInput("n must be positive");
    Address target = a.power(n).base_image();
    auto fw = e.vertex(Address{});
    auto fa = e.vertex(target);
    const Address w;
    double d = dist_from_pairing(minkowski_B(w, fw, fa), minkowski_Q(w, fw), minkowski_Q(w, fa));
    TranslationEstimate out;
    out.estimate = d / n;
    out.limit = std::log(e.lambda());
    out.bound = std::log(2.0) / n;
    out.within = std::fabs(out.estimate - out.limit) <= out.bound + 1e-12;
    return out;
}

// ---------------------------------------------------- axis relation check

TreeAut build_relation_h(int q, const Axis& axis, const TreeAut& s, const TreeAut& n, int j, int ray_depth)
{
    if (j < 0)
        throw InvalidInput("j must be nonnegative");
    if (n.apply(axis.at(j)) != axis.at(j) || n.apply(axis.at(j + 6)) != axis.at(j + 6))
        throw PreconditionFailed("n must fix c(j) and the attracting end");
    if (n.apply(axis.at(j - 1)) == axis.at(j - 1))
        throw PreconditionFailed(fmt::format("n lies in K_{} and is degenerate for j = {}", j - 1, j));

    Axis reversed{axis.minus, axis.plus};
    TreeAut shift = translation_aut(q, reversed).power(2 * j);
    const int far = ray_depth + 4 * j + 8;
    Address deep = axis.minus.vertex(static_cast<std::size_t>(far));
    Address zeta = shift.apply(n.apply(deep)).prefix(static_cast<std::size_t>(ray_depth));
    Address theta = s.apply(n.inverse().apply(deep)).prefix(static_cast<std::size_t>(ray_depth));
    if (static_cast<int>(std::min(zeta.depth(), theta.depth())) < ray_depth)
        throw Error("ray approximation too short");

    const Address branch = axis.at(-j);
    if (!zeta.has_prefix(branch) || !theta.has_prefix(branch))
        throw PreconditionFailed("rays do not pass through c(-j)");
    auto on_axis = [&](const Address& v) { return axis.index_of(v).has_value(); };
    if (on_axis(zeta.prefix(branch.depth() + 1)) || on_axis(theta.prefix(branch.depth() + 1)))
        throw PreconditionFailed("rays do not leave the axis at c(-j)");

    RegularTree tree(q);
    auto perm_at = [=](const Address& x) -> Perm {
        std::size_t i = x.depth();
        if (i < branch.depth() || i + 1 >= zeta.depth() || zeta.prefix(i) != x)
            return {};
        int n_children = tree.child_count(x);
        std::vector<std::pair<int, int>> constraints;
        if (x.is_root()) {
            // Ports at w are 1..q, so the index is the label minus one.
            constraints.emplace_back(axis.plus.letter(0) - 1, axis.plus.letter(0) - 1);
            constraints.emplace_back(axis.minus.letter(0) - 1, axis.minus.letter(0) - 1);
        } else if (i == branch.depth()) {
            int down = axis.minus.letter(i);
            constraints.emplace_back(down - 1, down - 1);
        }
        constraints.emplace_back(zeta.labels[i] - 1, theta.labels[i] - 1);
        return complete_permutation(n_children, constraints);
    };
    TreeAut k = TreeAut::lazy(q, Address{}, perm_at, ray_depth - 1);
    return k * shift;
}

RelationSetup make_relation_setup(int q, int j, int ray_depth)
{
    if (q < 3)
        throw InvalidInput("relation setup needs valence at least 3");
    Axis axis = standard_axis();
    TreeAut a = translation_aut(q, axis);
    TreeAut b = translation_aut(q, Axis{axis.minus, axis.plus});
    TreeAut s = root_transposition(q, 1, 2);
    TreeAut n = a.power(j) * root_transposition(q, 2, 3) * b.power(j);
    TreeAut h = build_relation_h(q, axis, s, n, j, ray_depth);
    TreeAut g = s * n * s * h * n * s;
    return RelationSetup{j, axis, s, n, h, g};
}

void check_relation_membership(const RelationSetup& setup)
{
    const Axis& c = setup.axis;
    for (int m = -setup.j; m <= -setup.j + 8; ++m)
        if (setup.g.apply(c.at(m)) != c.at(m))
            throw PreconditionFailed(fmt::format("g moves c({}), so it is not in K_{}", m, -setup.j));
    if (setup.g.apply(c.at(-setup.j - 1)) == c.at(-setup.j - 1))
        throw PreconditionFailed(fmt::format("g fixes c({}), so it lies in K_{}", -setup.j - 1, -setup.j - 1));
}

RelationReport parabolic_relation_check(const Embedding<double>& e, const RelationSetup& setup, int depth)
{
    check_relation_membership(setup);
    const Address w;
    TreeVec<double> lp = e.boundary_truncated(setup.axis.plus, depth);
    TreeVec<double> lm = -e.boundary_truncated(setup.axis.minus, depth);
    auto B = [&](const TreeVec<double>& x, const TreeVec<double>& y) { return minkowski_B(w, x, y); };
    auto chi = [&](const TreeAut& t) { return B(e.apply(t, lp), lm); };
    auto alpha = [&](const TreeAut& t) { return B(e.apply(t, lm), lm); };
    auto f_part = [&](TreeVec<double> v) {
        double cp = B(v, lm);
        double cm = B(v, lp);
        v.axpy(-cp, lp);
        v.axpy(-cm, lm);
        return v;
    };

    RelationReport r;
    r.mu = B(e.apply(setup.s, lm), lm);
    r.chi_g = chi(setup.g);
    r.chi_n = chi(setup.n);
    r.chi_h = chi(setup.h);
    r.alpha_n = alpha(setup.n);
    r.residual_chi = std::fabs(r.chi_g - r.chi_h / r.chi_n * r.alpha_n / r.mu);

    TreeVec<double> n3 = f_part(e.apply(setup.n, lm));
    TreeVec<double> m3 = f_part(e.apply(setup.g, lm));
    TreeVec<double> rhs = f_part(e.apply(setup.s, n3));
    rhs *= r.chi_h * r.chi_n;
    r.residual_block = (m3 - rhs).l2_norm();
    return r;
}

FiniteEmbedding complete_finite_tree(const FiniteTree& tree)
{
    FiniteEmbedding out;
    out.valence = std::max(2, tree.max_degree());
    out.address[tree.base()] = Address{};
    std::deque<int> queue{tree.base()};
    std::map<int, int> parent{{tree.base(), tree.base()}};
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        int label = 0;
        for (int u : tree.neighbors(v)) {
            if (parent.count(u))
                continue;
            parent[u] = v;
            out.address[u] = out.address[v].child(++label);
            queue.push_back(u);
        }
    }
    return out;
}

} // namespace lorentree
