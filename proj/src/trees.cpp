#include "lorentree/trees.hpp"

#include <algorithm>
#include <deque>
#include <fmt/format.h>
#include <istream>
#include <mutex>
#include <numeric>
#include <sstream>

namespace lorentree {

// ---------------------------------------------------------------- addresses

Address Address::parent() const
{
    if (labels.empty())
        throw InvalidInput("the base vertex has no parent");
    return Address(std::vector<int>(labels.begin(), labels.end() - 1));
}

Address Address::child(int label) const
{
    Address a = *this;
    a.labels.push_back(label);
    return a;
}

Address Address::prefix(std::size_t n) const
{
    n = std::min(n, labels.size());
    return Address(std::vector<int>(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n)));
}

bool Address::has_prefix(const Address& p) const
{
    return p.labels.size() <= labels.size() && std::equal(p.labels.begin(), p.labels.end(), labels.begin());
}

std::string Address::to_string() const
{
    if (labels.empty())
        return "w";
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i)
            out += '/';
        out += std::to_string(labels[i]);
    }
    return out;
}

namespace {

std::vector<int> parse_word(const std::string& text)
{
    std::vector<int> out;
    if (text.empty())
        return out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, '/')) {
        if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
            throw InvalidInput("malformed address '" + text + "'");
        out.push_back(std::stoi(part));
    }
    return out;
}

} // namespace

Address Address::parse(const std::string& text)
{
    if (text == "w")
        return Address{};
    return Address(parse_word(text));
}

// --------------------------------------------------------------------- rays

std::size_t Ray::known_length() const
{
    if (approximate || period.empty())
        return prefix.size();
    return std::numeric_limits<std::size_t>::max();
}

int Ray::letter(std::size_t i) const
{
    if (i < prefix.size())
        return prefix[i];
    if (approximate || period.empty())
        throw DepthExceeded(fmt::format("ray approximation known only to depth {}", prefix.size()));
    return period[(i - prefix.size()) % period.size()];
}

Address Ray::vertex(std::size_t k) const
{
    std::vector<int> l(k);
    for (std::size_t i = 0; i < k; ++i)
        l[i] = letter(i);
    return Address(std::move(l));
}

std::string Ray::to_string() const
{
    std::string out = Address(prefix).to_string();
    if (prefix.empty())
        out.clear();
    if (approximate || period.empty())
        return out.empty() ? "w" : out;
    return out + ",(" + Address(period).to_string() + ")";
}

Ray Ray::parse(const std::string& text)
{
    auto open = text.find('(');
    if (open == std::string::npos) {
        Ray r;
        r.prefix = parse_word(text == "w" ? "" : text);
        r.approximate = true;
        return r;
    }
    auto close = text.find(')', open);
    if (close == std::string::npos || close != text.size() - 1)
        throw InvalidInput("malformed ray '" + text + "'");
    std::string head = text.substr(0, open);
    if (!head.empty() && head.back() == ',')
        head.pop_back();
    Ray r;
    r.prefix = parse_word(head);
    r.period = parse_word(text.substr(open + 1, close - open - 1));
    if (r.period.empty())
        throw InvalidInput("ray period must be nonempty in '" + text + "'");
    return r;
}

Ray Ray::finite(std::vector<int> letters)
{
    Ray r;
    r.prefix = std::move(letters);
    r.approximate = true;
    return r;
}

// ------------------------------------------------------------ regular tree

RegularTree::RegularTree(int q) : q_(q)
{
    if (q < 2)
        throw InvalidInput("valence must be at least 2");
}

void RegularTree::validate(const Address& v) const
{
    for (std::size_t i = 0; i < v.labels.size(); ++i) {
        int limit = i == 0 ? q_ : q_ - 1;
        if (v.labels[i] < 1 || v.labels[i] > limit)
            throw InvalidInput(fmt::format("label {} at position {} out of range in '{}'", v.labels[i], i,
                                           v.to_string()));
    }
}

void RegularTree::validate(const Ray& r) const
{
    if (!r.approximate && r.period.empty())
        throw InvalidInput("ray needs a nonempty period");
    for (std::size_t i = 0; i < r.prefix.size(); ++i) {
        int limit = i == 0 ? q_ : q_ - 1;
        if (r.prefix[i] < 1 || r.prefix[i] > limit)
            throw InvalidInput("ray prefix label out of range in '" + r.to_string() + "'");
    }
    for (std::size_t i = 0; i < r.period.size(); ++i) {
        int limit = (r.prefix.empty() && i == 0) ? q_ - 1 : q_ - 1;
        if (r.period[i] < 1 || r.period[i] > limit)
            throw InvalidInput("ray period label out of range in '" + r.to_string() + "'");
    }
}

std::vector<Address> RegularTree::children(const Address& v) const
{
    std::vector<Address> out;
    for (int c = 1; c <= child_count(v); ++c)
        out.push_back(v.child(c));
    return out;
}

std::vector<Address> RegularTree::neighbors(const Address& v) const
{
    std::vector<Address> out;
    if (!v.is_root())
        out.push_back(v.parent());
    for (int c = 1; c <= child_count(v); ++c)
        out.push_back(v.child(c));
    return out;
}

std::vector<Address> RegularTree::ball(int d) const
{
    std::vector<Address> out{Address{}};
    std::size_t start = 0;
    for (int level = 0; level < d; ++level) {
        std::size_t end = out.size();
        for (std::size_t i = start; i < end; ++i) {
            Address v = out[i];
            for (int c = 1; c <= child_count(v); ++c)
                out.push_back(v.child(c));
        }
        start = end;
    }
    return out;
}

std::size_t RegularTree::ball_size(int q, int d)
{
    std::size_t total = 1;
    std::size_t level = static_cast<std::size_t>(q);
    for (int i = 1; i <= d; ++i) {
        total += level;
        level *= static_cast<std::size_t>(q - 1);
    }
    return total;
}

int RegularTree::port_toward(const Address& from, const Address& neighbor) const
{
    if (!from.is_root() && neighbor == from.parent())
        return 0;
    if (neighbor.depth() == from.depth() + 1 && neighbor.has_prefix(from))
        return neighbor.labels.back();
    throw InvalidInput(fmt::format("'{}' is not adjacent to '{}'", neighbor.to_string(), from.to_string()));
}

Address RegularTree::through_port(const Address& from, int port) const
{
    if (port == 0)
        return from.parent();
    if (port < 1 || port > child_count(from))
        throw InvalidInput(fmt::format("port {} out of range at '{}'", port, from.to_string()));
    return from.child(port);
}

std::vector<int> RegularTree::ports(const Address& v) const
{
    std::vector<int> out;
    if (!v.is_root())
        out.push_back(0);
    for (int c = 1; c <= child_count(v); ++c)
        out.push_back(c);
    return out;
}

// ------------------------------------------------------ metric quantities

namespace {

int common_prefix(const Address& x, const Address& y)
{
    std::size_t n = std::min(x.depth(), y.depth());
    std::size_t i = 0;
    while (i < n && x.labels[i] == y.labels[i])
        ++i;
    return static_cast<int>(i);
}

} // namespace

int tree_dist(const Address& x, const Address& y)
{
    return static_cast<int>(x.depth() + y.depth()) - 2 * common_prefix(x, y);
}

int gromov_product(const Address& x, const Address& y) { return common_prefix(x, y); }

int gromov_product(const Address& x, const Ray& r)
{
    std::size_t limit = std::min(x.depth(), r.known_length());
    std::size_t i = 0;
    while (i < limit && x.labels[i] == r.letter(i))
        ++i;
    return static_cast<int>(i);
}

int gromov_product(const Ray& a, const Ray& b)
{
    std::size_t bound;
    if (a.approximate || b.approximate || a.period.empty() || b.period.empty()) {
        bound = std::min(a.known_length(), b.known_length());
    } else {
        bound = std::max(a.prefix.size(), b.prefix.size()) + std::lcm(a.period.size(), b.period.size());
    }
    for (std::size_t i = 0; i < bound; ++i)
        if (a.letter(i) != b.letter(i))
            return static_cast<int>(i);
    return kInfiniteProduct;
}

int tree_busemann(const Ray& xi, const Address& x, const Address& y)
{
    int bx = static_cast<int>(x.depth()) - 2 * gromov_product(x, xi);
    int by = static_cast<int>(y.depth()) - 2 * gromov_product(y, xi);
    return bx - by;
}

Perm complete_permutation(int n, const std::vector<std::pair<int, int>>& constraints)
{
    Perm p(static_cast<std::size_t>(n), -1);
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (auto [src, dst] : constraints) {
        if (src < 0 || src >= n || dst < 0 || dst >= n)
            throw InvalidInput("permutation constraint out of range");
        if (p[src] != -1 && p[src] != dst)
            throw InvalidInput("conflicting permutation constraints");
        if (p[src] == -1 && used[dst])
            throw InvalidInput("permutation constraints are not injective");
        p[src] = dst;
        used[dst] = true;
    }
    int next = 0;
    for (int src = 0; src < n; ++src) {
        if (p[src] != -1)
            continue;
        while (used[next])
            ++next;
        p[src] = next;
        used[next] = true;
    }
    return p;
}

// ----------------------------------------------------------- automorphisms

struct TreeAut::Node {
    explicit Node(int q_, int bound_) : q(q_), bound(bound_) {}
    virtual ~Node() = default;
    virtual Address apply(const Address& v) const = 0;

    Address eval(const Address& v) const
    {
        if (static_cast<int>(v.depth()) > bound)
            throw DepthExceeded(fmt::format("vertex '{}' beyond automorphism depth bound {}", v.to_string(), bound));
        return apply(v);
    }

    int q;
    int bound;
};

namespace {

using NodePtr = std::shared_ptr<const TreeAut::Node>;

class PortraitNode : public TreeAut::Node {
public:
    PortraitNode(int q_, Address base, std::function<Perm(const Address&)> perm_at, int bound_)
        : Node(q_, bound_), tree_(q_), base_(std::move(base)), perm_at_(std::move(perm_at))
    {
        tree_.validate(base_);
    }

    Address apply(const Address& v) const override
    {
        Address img = base_;
        Address prev;
        bool has_prev = false;
        Address x;
        for (int c : v.labels) {
            std::vector<int> avail = tree_.ports(img);
            if (has_prev) {
                int excluded = tree_.port_toward(img, prev);
                avail.erase(std::find(avail.begin(), avail.end(), excluded));
            }
            if (c < 1 || c > static_cast<int>(avail.size()))
                throw InvalidInput("label out of range in '" + v.to_string() + "'");
            Perm p = perm_at_(x);
            int idx = c - 1;
            if (!p.empty()) {
                if (p.size() != avail.size())
                    throw InvalidInput("local permutation of wrong size at '" + x.to_string() + "'");
                idx = p[static_cast<std::size_t>(c - 1)];
            }
            Address next = tree_.through_port(img, avail[static_cast<std::size_t>(idx)]);
            prev = std::move(img);
            img = std::move(next);
            has_prev = true;
            x = x.child(c);
        }
        return img;
    }

private:
    RegularTree tree_;
    Address base_;
    std::function<Perm(const Address&)> perm_at_;
};

class ComposeNode : public TreeAut::Node {
public:
    ComposeNode(NodePtr outer, NodePtr inner, int bound_)
        : Node(outer->q, bound_), outer_(std::move(outer)), inner_(std::move(inner))
    {
    }
    Address apply(const Address& v) const override { return outer_->eval(inner_->eval(v)); }

    const NodePtr& outer() const { return outer_; }
    const NodePtr& inner() const { return inner_; }

private:
    NodePtr outer_;
    NodePtr inner_;
};

// Inverse by descent: from w, repeatedly step to the neighbor whose image is
// one step closer to the target. Results are memoized under a mutex.
class InverseNode : public TreeAut::Node {
public:
    explicit InverseNode(NodePtr inner) : Node(inner->q, inner->bound), inner_(std::move(inner)), tree_(q) {}

    Address apply(const Address& v) const override
    {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = memo_.find(v);
            if (it != memo_.end())
                return it->second;
        }
        Address x;
        Address gx = inner_->eval(x);
        std::vector<std::pair<Address, Address>> seen{{gx, x}};
        while (gx != v) {
            Address next = v.has_prefix(gx) ? gx.child(v.labels[gx.depth()]) : gx.parent();
            bool moved = false;
            for (const auto& nb : tree_.neighbors(x)) {
                Address gn = inner_->eval(nb);
                if (gn == next) {
                    x = nb;
                    gx = std::move(gn);
                    moved = true;
                    break;
                }
            }
            if (!moved)
                throw Error("inverse search failed: map is not a tree automorphism");
            seen.emplace_back(gx, x);
        }
        std::lock_guard<std::mutex> lock(mutex_);
        for (auto& [img, src] : seen)
            memo_.emplace(img, src);
        return x;
    }

    const NodePtr& inner() const { return inner_; }

private:
    NodePtr inner_;
    RegularTree tree_;
    mutable std::mutex mutex_;
    mutable std::map<Address, Address> memo_;
};

void check_perm(const Perm& p, std::size_t size, const Address& at)
{
    if (p.size() != size)
        throw InvalidInput(fmt::format("local permutation at '{}' must have size {}", at.to_string(), size));
    std::vector<bool> seen(size, false);
    for (int x : p) {
        if (x < 0 || static_cast<std::size_t>(x) >= size || seen[static_cast<std::size_t>(x)])
            throw InvalidInput("local permutation at '" + at.to_string() + "' is not a permutation");
        seen[static_cast<std::size_t>(x)] = true;
    }
}

} // namespace

TreeAut TreeAut::identity(int q)
{
    return lazy(q, Address{}, [](const Address&) { return Perm{}; });
}

TreeAut TreeAut::portrait(int q, Address base, std::map<Address, Perm> perms, int depth_bound)
{
    RegularTree tree(q);
    for (const auto& [x, p] : perms) {
        tree.validate(x);
        check_perm(p, static_cast<std::size_t>(tree.child_count(x)), x);
    }
    auto shared = std::make_shared<const std::map<Address, Perm>>(std::move(perms));
    return lazy(
        q, std::move(base),
        [shared](const Address& x) {
            auto it = shared->find(x);
            return it == shared->end() ? Perm{} : it->second;
        },
        depth_bound);
}

TreeAut TreeAut::lazy(int q, Address base, std::function<Perm(const Address&)> perm_at, int depth_bound)
{
    return TreeAut(std::make_shared<PortraitNode>(q, std::move(base), std::move(perm_at), depth_bound));
}

int TreeAut::q() const { return node_->q; }
int TreeAut::depth_bound() const { return node_->bound; }

Address TreeAut::apply(const Address& v) const { return node_->eval(v); }

Address TreeAut::apply_inverse(const Address& v) const { return inverse().apply(v); }

Perm TreeAut::local_perm(const Address& x) const
{
    RegularTree tree(q());
    Address gx = apply(x);
    std::vector<int> avail = tree.ports(gx);
    if (!x.is_root()) {
        int excluded = tree.port_toward(gx, apply(x.parent()));
        avail.erase(std::find(avail.begin(), avail.end(), excluded));
    }
    Perm p;
    for (int c = 1; c <= tree.child_count(x); ++c) {
        int port = tree.port_toward(gx, apply(x.child(c)));
        p.push_back(static_cast<int>(std::find(avail.begin(), avail.end(), port) - avail.begin()));
    }
    return p;
}

TreeAut TreeAut::inverse() const
{
    if (auto inv = dynamic_cast<const InverseNode*>(node_.get()))
        return TreeAut(inv->inner());
    if (auto comp = dynamic_cast<const ComposeNode*>(node_.get()))
        return TreeAut(comp->inner()).inverse() * TreeAut(comp->outer()).inverse();
    return TreeAut(std::make_shared<InverseNode>(node_));
}

TreeAut operator*(const TreeAut& g, const TreeAut& h)
{
    if (g.q() != h.q())
        throw InvalidInput("composing automorphisms of different trees");
    int shift = static_cast<int>(h.base_image().depth());
    int bound = std::max(0, std::min(h.depth_bound(), g.depth_bound() - shift));
    return TreeAut(std::make_shared<ComposeNode>(g.node_, h.node_, bound));
}

TreeAut TreeAut::power(int n) const
{
    if (n < 0)
        return inverse().power(-n);
    TreeAut out = identity(q());
    for (int i = 0; i < n; ++i)
        out = *this * out;
    return out;
}

TreeAut root_transposition(int q, int a, int b)
{
    if (a < 1 || a > q || b < 1 || b > q)
        throw InvalidInput("root labels out of range");
    Perm p(static_cast<std::size_t>(q));
    std::iota(p.begin(), p.end(), 0);
    std::swap(p[static_cast<std::size_t>(a - 1)], p[static_cast<std::size_t>(b - 1)]);
    return TreeAut::portrait(q, Address{}, {{Address{}, p}});
}

// --------------------------------------------------------------------- axis

Address Axis::at(int k) const
{
    return k >= 0 ? plus.vertex(static_cast<std::size_t>(k)) : minus.vertex(static_cast<std::size_t>(-k));
}

std::optional<int> Axis::index_of(const Address& v) const
{
    if (v.is_root())
        return 0;
    auto along = [&](const Ray& r) {
        if (v.depth() > r.known_length())
            return false;
        for (std::size_t i = 0; i < v.depth(); ++i)
            if (v.labels[i] != r.letter(i))
                return false;
        return true;
    };
    if (along(plus))
        return static_cast<int>(v.depth());
    if (along(minus))
        return -static_cast<int>(v.depth());
    return std::nullopt;
}

Axis standard_axis()
{
    Axis a;
    a.plus.period = {1};
    a.minus.prefix = {2};
    a.minus.period = {1};
    return a;
}

TreeAut translation_aut(int q, const Axis& axis)
{
    RegularTree tree(q);
    tree.validate(axis.plus);
    tree.validate(axis.minus);
    if (axis.plus.known_length() < 2 || axis.minus.known_length() < 1)
        throw InvalidInput("axis rays too short");
    if (axis.plus.letter(0) == axis.minus.letter(0))
        throw InvalidInput("axis rays must diverge at the base vertex");
    int bound = TreeAut::kUnbounded;
    if (axis.plus.approximate || axis.minus.approximate)
        bound = static_cast<int>(std::min(axis.plus.known_length(), axis.minus.known_length())) - 2;

    auto perm_at = [q, axis](const Address& x) -> Perm {
        auto k = axis.index_of(x);
        if (!k)
            return {};
        auto known = [&](const Ray& r, std::size_t i) { return i < r.known_length(); };
        const Ray& P = axis.plus;
        const Ray& M = axis.minus;
        if (*k == 0) {
            // w -> c(1): toward c(1) goes to c(2), toward c(-1) goes back to w.
            return complete_permutation(q, {{P.letter(0) - 1, P.letter(1)}, {M.letter(0) - 1, 0}});
        }
        if (*k > 0) {
            auto kk = static_cast<std::size_t>(*k);
            if (!known(P, kk + 1))
                return {};
            return complete_permutation(q - 1, {{P.letter(kk) - 1, P.letter(kk + 1) - 1}});
        }
        auto m = static_cast<std::size_t>(-*k);
        if (!known(M, m))
            return {};
        if (m == 1) {
            std::vector<int> avail;
            for (int port = 1; port <= q; ++port)
                if (port != P.letter(0))
                    avail.push_back(port);
            int target = static_cast<int>(std::find(avail.begin(), avail.end(), M.letter(0)) - avail.begin());
            return complete_permutation(q - 1, {{M.letter(1) - 1, target}});
        }
        return complete_permutation(q - 1, {{M.letter(m) - 1, M.letter(m - 1) - 1}});
    };
    return TreeAut::lazy(q, axis.plus.vertex(1), perm_at, bound);
}

TreeAut edge_flip_aut(int q, const Address& z)
{
    if (z.depth() != 1)
        throw InvalidInput("edge flip needs a neighbor of the base vertex");
    RegularTree(q).validate(z);
    int a = z.labels[0];
    return TreeAut::portrait(q, z, {{Address{}, complete_permutation(q, {{a - 1, 0}})}});
}

// -------------------------------------------------------------- horospheres

namespace {

void check_truncation(const Address& v, int truncation)
{
    if (static_cast<int>(v.depth()) > truncation)
        throw DepthExceeded(fmt::format("vertex '{}' beyond truncation depth {}", v.to_string(), truncation));
}

} // namespace

std::set<Address> horosphere_points(const RegularTree& tree, const Axis& axis, int j, int ell, int truncation)
{
    if (ell < 0)
        throw InvalidInput("ell must be nonnegative");
    Address cj = axis.at(j);
    check_truncation(cj, truncation);
    if (ell == 0)
        return {cj};
    Address top = axis.at(j + ell);
    Address up = axis.at(j + ell + 1);
    Address back = axis.at(j + ell - 1);
    check_truncation(top, truncation);

    std::vector<std::pair<Address, Address>> frontier; // (vertex, previous)
    for (const auto& nb : tree.neighbors(top))
        if (nb != up && nb != back) {
            check_truncation(nb, truncation);
            frontier.emplace_back(nb, top);
        }
    for (int step = 1; step < ell; ++step) {
        std::vector<std::pair<Address, Address>> next;
        for (const auto& [v, prev] : frontier)
            for (const auto& nb : tree.neighbors(v))
                if (nb != prev) {
                    check_truncation(nb, truncation);
                    next.emplace_back(nb, v);
                }
        frontier = std::move(next);
    }
    std::set<Address> out;
    for (const auto& [v, prev] : frontier)
        out.insert(v);
    return out;
}

std::set<Address> stabilizer_orbit(const RegularTree& tree, const Axis& axis, int r, int j, const Address& point,
                                   int truncation)
{
    if (r > j)
        throw PreconditionFailed("stabilizer index r must not exceed the horosphere index j");
    tree.validate(point);
    Address cj = axis.at(j);
    int d = tree_dist(point, cj);
    if (d % 2 != 0 || tree_busemann(axis.plus, point, cj) != 0)
        throw InvalidInput("point '" + point.to_string() + "' is not on the stated horosphere");
    check_truncation(point, truncation);

    if (r > 0) {
        TreeAut a = translation_aut(tree.q(), axis);
        Address shifted = a.power(-r).apply(point);
        auto base_orbit = stabilizer_orbit(tree, axis, 0, j - r, shifted, truncation + r);
        TreeAut ar = a.power(r);
        std::set<Address> out;
        for (const auto& p : base_orbit) {
            Address img = ar.apply(p);
            check_truncation(img, truncation);
            out.insert(img);
        }
        return out;
    }

    auto fixed = [&](const Address& v) {
        auto k = axis.index_of(v);
        return k && *k >= r;
    };
    std::set<Address> orbit{point};
    std::deque<Address> queue{point};
    while (!queue.empty()) {
        Address p = queue.front();
        queue.pop_front();
        for (std::size_t len = 0; len < p.depth(); ++len) {
            Address x = p.prefix(len);
            int n = tree.child_count(x);
            for (int a = 1; a <= n; ++a)
                for (int b = a + 1; b <= n; ++b) {
                    if (fixed(x.child(a)) || fixed(x.child(b)))
                        continue;
                    Perm swap(static_cast<std::size_t>(n));
                    std::iota(swap.begin(), swap.end(), 0);
                    std::swap(swap[static_cast<std::size_t>(a - 1)], swap[static_cast<std::size_t>(b - 1)]);
                    TreeAut g = TreeAut::portrait(tree.q(), Address{}, {{x, swap}});
                    Address img = g.apply(p);
                    check_truncation(img, truncation);
                    if (orbit.insert(img).second)
                        queue.push_back(img);
                }
        }
    }
    return orbit;
}

// -------------------------------------------------------------- finite tree

FiniteTree::FiniteTree(std::map<int, std::vector<int>> adjacency, std::optional<int> base)
    : adj_(std::move(adjacency))
{
    if (adj_.empty())
        throw InvalidInput("tree has no vertices");
    std::size_t edge_ends = 0;
    for (auto& [v, nbs] : adj_) {
        std::sort(nbs.begin(), nbs.end());
        if (std::adjacent_find(nbs.begin(), nbs.end()) != nbs.end())
            throw InvalidInput(fmt::format("duplicate edge at vertex {}", v));
        for (int u : nbs) {
            if (u == v)
                throw InvalidInput(fmt::format("self loop at vertex {}", v));
            auto it = adj_.find(u);
            if (it == adj_.end() || !std::binary_search(it->second.begin(), it->second.end(), v))
                if (it == adj_.end() || std::find(it->second.begin(), it->second.end(), v) == it->second.end())
                    throw InvalidInput("adjacency is not symmetric");
        }
        edge_ends += nbs.size();
    }
    base_ = base.value_or(adj_.begin()->first);
    if (!adj_.count(base_))
        throw InvalidInput(fmt::format("base vertex {} not in tree", base_));
    if (edge_ends / 2 + 1 != adj_.size())
        throw InvalidInput("input is not a tree (edge count mismatch)");
    std::deque<int> queue{base_};
    parent_[base_] = base_;
    depth_[base_] = 0;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        order_.push_back(v);
        for (int u : adj_.at(v))
            if (!depth_.count(u)) {
                depth_[u] = depth_[v] + 1;
                parent_[u] = v;
                queue.push_back(u);
            }
    }
    if (order_.size() != adj_.size())
        throw InvalidInput("input is not connected");
}

FiniteTree FiniteTree::parse(std::istream& in, std::optional<int> base)
{
    std::map<int, std::vector<int>> adj;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.resize(hash);
        std::istringstream ss(line);
        long u = 0;
        long v = 0;
        if (!(ss >> u)) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw InvalidInput(fmt::format("line {}: expected 'u v'", lineno));
            continue;
        }
        std::string rest;
        if (!(ss >> v) || (ss >> rest))
            throw InvalidInput(fmt::format("line {}: expected 'u v'", lineno));
        adj[static_cast<int>(u)].push_back(static_cast<int>(v));
        adj[static_cast<int>(v)].push_back(static_cast<int>(u));
    }
    return FiniteTree(std::move(adj), base);
}

const std::vector<int>& FiniteTree::neighbors(int v) const
{
    auto it = adj_.find(v);
    if (it == adj_.end())
        throw InvalidInput(fmt::format("unknown vertex {}", v));
    return it->second;
}

int FiniteTree::max_degree() const
{
    std::size_t m = 0;
    for (const auto& [v, nbs] : adj_)
        m = std::max(m, nbs.size());
    return static_cast<int>(m);
}

std::vector<int> FiniteTree::path_from_base(int v) const
{
    if (!depth_.count(v))
        throw InvalidInput(fmt::format("unknown vertex {}", v));
    std::vector<int> path{v};
    while (v != base_) {
        v = parent_.at(v);
        path.push_back(v);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

int FiniteTree::depth(int v) const
{
    auto it = depth_.find(v);
    if (it == depth_.end())
        throw InvalidInput(fmt::format("unknown vertex {}", v));
    return it->second;
}

int FiniteTree::dist(int u, int v) const
{
    auto pu = path_from_base(u);
    auto pv = path_from_base(v);
    std::size_t i = 0;
    while (i < pu.size() && i < pv.size() && pu[i] == pv[i])
        ++i;
    return static_cast<int>(pu.size() + pv.size() - 2 * i);
}

// ----------------------------------------------------------- rooted wreath

RootedWreath::RootedWreath(int k, int m) : k_(k), m_(m)
{
    if (k < 1 || m < 0)
        throw InvalidInput("rooted tree needs arity >= 1 and depth >= 0");
    parent_.push_back(-1);
    depth_.push_back(0);
    children_.emplace_back();
    std::size_t start = 0;
    for (int level = 0; level < m; ++level) {
        std::size_t end = parent_.size();
        for (std::size_t v = start; v < end; ++v)
            for (int c = 0; c < k; ++c) {
                int id = static_cast<int>(parent_.size());
                parent_.push_back(static_cast<int>(v));
                depth_.push_back(level + 1);
                children_.emplace_back();
                children_[v].push_back(id);
            }
        start = end;
    }
    for (std::size_t v = 0; v < parent_.size(); ++v)
        if (depth_[v] == m)
            leaves_.push_back(static_cast<int>(v));
}

int RootedWreath::ancestor(int v, int levels_up) const
{
    for (int i = 0; i < levels_up; ++i) {
        if (parent_[v] < 0)
            throw InvalidInput("ancestor above the root");
        v = parent_[v];
    }
    return v;
}

std::vector<std::vector<int>> RootedWreath::elements() const
{
    std::vector<int> internal;
    for (std::size_t v = 0; v < parent_.size(); ++v)
        if (depth_[v] < m_)
            internal.push_back(static_cast<int>(v));
    std::vector<Perm> local;
    Perm p(static_cast<std::size_t>(k_));
    std::iota(p.begin(), p.end(), 0);
    do
        local.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));

    std::vector<std::size_t> choice(internal.size(), 0);
    std::vector<std::vector<int>> out;
    while (true) {
        std::vector<int> image(parent_.size(), -1);
        image[0] = 0;
        std::vector<std::size_t> slot(parent_.size(), 0);
        for (std::size_t i = 0; i < internal.size(); ++i)
            slot[static_cast<std::size_t>(internal[i])] = choice[i];
        for (std::size_t v = 0; v < parent_.size(); ++v) {
            if (depth_[v] == m_)
                continue;
            const Perm& lp = local[slot[v]];
            const auto& src = children_[v];
            const auto& dst = children_[static_cast<std::size_t>(image[v])];
            for (int c = 0; c < k_; ++c)
                image[static_cast<std::size_t>(src[c])] = dst[static_cast<std::size_t>(lp[c])];
        }
        out.push_back(std::move(image));
        std::size_t i = 0;
        while (i < choice.size() && ++choice[i] == local.size()) {
            choice[i] = 0;
            ++i;
        }
        if (i == choice.size())
            break;
    }
    return out;
}

std::vector<std::vector<int>> RootedWreath::transpositions() const
{
    std::vector<std::vector<int>> out;
    const std::size_t n = parent_.size();
    for (std::size_t v = 0; v < n; ++v) {
        if (depth_[v] == m_)
            continue;
        for (int a = 0; a < k_; ++a)
            for (int b = a + 1; b < k_; ++b) {
                std::vector<int> image(n);
                std::iota(image.begin(), image.end(), 0);
                // Swap the subtrees below children a and b, preserving order.
                std::vector<int> sa{children_[v][a]};
                std::vector<int> sb{children_[v][b]};
                for (std::size_t i = 0; i < sa.size(); ++i) {
                    image[static_cast<std::size_t>(sa[i])] = sb[i];
                    image[static_cast<std::size_t>(sb[i])] = sa[i];
                    for (std::size_t c = 0; c < children_[sa[i]].size(); ++c) {
                        sa.push_back(children_[sa[i]][c]);
                        sb.push_back(children_[sb[i]][c]);
                    }
                }
                out.push_back(std::move(image));
            }
    }
    return out;
}

std::vector<std::set<int>> RootedWreath::orbits(const std::vector<std::vector<int>>& generators,
                                                const std::vector<int>& points)
{
    std::vector<std::set<int>> out;
    std::set<int> assigned;
    for (int p : points) {
        if (assigned.count(p))
            continue;
        std::set<int> orbit{p};
        std::deque<int> queue{p};
        while (!queue.empty()) {
            int x = queue.front();
            queue.pop_front();
            for (const auto& g : generators) {
                int y = g[static_cast<std::size_t>(x)];
                if (orbit.insert(y).second)
                    queue.push_back(y);
            }
        }
        assigned.insert(orbit.begin(), orbit.end());
        out.push_back(std::move(orbit));
    }
    return out;
}

} // namespace lorentree
