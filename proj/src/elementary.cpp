#include "lorentree/elementary.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

namespace lorentree {

namespace {

Vec add(const Vec& a, const Vec& b)
{
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        r[i] = a[i] + b[i];
    return r;
}

Vec sub(const Vec& a, const Vec& b)
{
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        r[i] = a[i] - b[i];
    return r;
}

Vec scale(const Vec& a, double c)
{
    Vec r = a;
    for (auto& x : r)
        x *= c;
    return r;
}

double norm(const Vec& v) { return std::sqrt(dot(v, v)); }

double max_abs(const Vec& v)
{
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::fabs(x));
    return m;
}

} // namespace

Word word_inverse(const Word& w)
{
    Word r(w.rbegin(), w.rend());
    for (auto& x : r)
        x = -x;
    return r;
}

Word word_concat(const Word& a, const Word& b)
{
    Word r = a;
    r.insert(r.end(), b.begin(), b.end());
    return r;
}

std::vector<int> ElemData::generators() const
{
    std::vector<int> g;
    for (const auto& [k, v] : chi)
        g.push_back(k);
    return g;
}

void ElemData::validate(double tol) const
{
    for (const auto& [k, c] : chi) {
        if (k <= 0)
            throw InvalidInput("generators are positive integers");
        if (c == 0.0)
            throw InvalidInput(fmt::format("character vanishes on generator {}", k));
        auto r = rho.find(k);
        if (r == rho.end() || r->second.rows() != dim || r->second.cols() != dim)
            throw InvalidInput(fmt::format("missing or misshapen rho for generator {}", k));
        double res = max_abs_diff(r->second.transpose() * r->second, Matrix<double>::identity(dim));
        if (res > tol)
            throw NotOrthogonal(fmt::format("rho({}) is not orthogonal", k), res);
        auto fv = f.find(Word{k});
        if (fv == f.end() || fv->second.size() != dim)
            throw InvalidInput(fmt::format("missing cocycle value on generator {}", k));
    }
    for (const auto& [w, v] : f) {
        if (v.size() != dim)
            throw InvalidInput("cocycle value of wrong dimension");
        for (int x : w)
            if (!chi.count(std::abs(x)))
                throw InvalidInput(fmt::format("unknown generator {}", x));
    }
}

double ElemData::character(const Word& w) const
{
    double c = 1.0;
    for (int x : w) {
        double v = chi.at(std::abs(x));
        c *= x > 0 ? v : 1.0 / v;
    }
    return c;
}

Matrix<double> ElemData::orth(const Word& w) const
{
    Matrix<double> m = Matrix<double>::identity(dim);
    for (int x : w) {
        const auto& r = rho.at(std::abs(x));
        m = m * (x > 0 ? r : r.transpose());
    }
    return m;
}

Matrix<double> ElemData::tau(const Word& w) const { return character(w) * orth(w); }

Vec ElemData::cocycle(const Word& w) const
{
    if (w.empty())
        return Vec(dim, 0.0);
    Vec by_rule;
    if (w.size() == 1) {
        int x = w.front();
        if (x > 0)
            return f.at(w);
        // f(g^-1) = -tau(g)^-1 f(g), tau(g)^-1 = chi^-1 rho^T
        Word g{-x};
        return scale(orth(g).transpose() * f.at(g), -1.0 / character(g));
    }
    Word head{w.front()};
    Word tail(w.begin() + 1, w.end());
    by_rule = add(tau(head) * cocycle(tail), cocycle(head));
    auto it = f.find(w);
    if (it != f.end()) {
        double gap = max_abs(sub(it->second, by_rule));
        if (gap > eps() * std::max(1.0, max_abs(by_rule)))
            throw DataInconsistency(fmt::format("cocycle identity violated by {:.3e} on a word of length {}", gap,
                                                w.size()));
    }
    return by_rule;
}

LorentzOp reconstruct_rep(const ElemData& data, const Word& g)
{
    const std::size_t k = data.dim;
    double c = data.character(g);
    Matrix<double> r = data.orth(g);
    Vec fg = data.cocycle(g);
    double a = -0.5 / c * dot(fg, fg);

    Matrix<double> m(k + 2, k + 2);
    m(0, 0) = c;
    m(0, 1) = a;
    m(1, 1) = 1.0 / c;
    for (std::size_t i = 0; i < k; ++i)
        m(2 + i, 1) = fg[i] / c;
    for (std::size_t col = 0; col < k; ++col) {
        double pair = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            m(2 + i, 2 + col) = r(i, col);
            pair += r(i, col) * fg[i];
        }
        m(0, 2 + col) = -pair;
    }
    return {m, lightcone_gram(k)};
}

Standardized standardize_cocycle(const ElemData& data, const Word& a, double tol)
{
    double c = data.character(a);
    if (std::fabs(std::fabs(c) - 1.0) <= tol)
        throw PreconditionFailed("standardization needs |chi(a)| != 1");
    Matrix<double> t = data.tau(a) - Matrix<double>::identity(data.dim);
    Vec fa = data.cocycle(a);
    Matrix<double> rhs(data.dim, 1);
    rhs.set_column(0, fa);
    Vec shift = solve(t, rhs).column(0);

    Standardized out{data, shift};
    for (auto& [w, v] : out.data.f)
        v = sub(add(data.cocycle(w), shift), data.tau(w) * shift);
    return out;
}

SigmaResult sigma_from_inverse(const Vec& v, const Matrix<double>& tau_a_inverse, double chi_abs, int tail)
{
    if (!(chi_abs > 1.0))
        throw PreconditionFailed("sigma needs |chi(a)| > 1");
    double ratio = 1.0 / chi_abs;
    double vn = norm(v);
    auto bound_for = [&](int t) { return std::pow(ratio, t) * vn / (1.0 - ratio); };
    if (tail <= 0) {
        tail = 1;
        while (bound_for(tail) > 1e-12 * vn && tail < 100000)
            ++tail;
    }
    SigmaResult out{Vec(v.size(), 0.0), tail, bound_for(tail)};
    Vec term = v;
    for (int m = 0; m < tail; ++m) {
        out.value = add(out.value, term);
        term = tau_a_inverse * term;
    }
    return out;
}

SigmaResult sigma(const Vec& v, const Matrix<double>& tau_a, int tail)
{
    // tau^T tau = chi^2 I because rho(a) is orthogonal.
    Matrix<double> gram = tau_a.transpose() * tau_a;
    double chi_abs = std::sqrt(gram(0, 0));
    return sigma_from_inverse(v, inverse(tau_a), chi_abs, tail);
}

std::vector<Vec> standard_cocycle_from_v(const Vec& sigma_v, const std::vector<Matrix<double>>& tau_k)
{
    std::vector<Vec> out;
    out.reserve(tau_k.size());
    for (const auto& t : tau_k)
        out.push_back(sub(t * sigma_v, sigma_v));
    return out;
}

std::vector<Vec> orthonormal_span(std::vector<Vec> vectors, double rank_tol)
{
    std::vector<Vec> basis;
    double scale_ref = 0.0;
    for (const auto& v : vectors)
        scale_ref = std::max(scale_ref, norm(v));
    if (scale_ref == 0.0)
        return basis;
    while (!vectors.empty()) {
        std::size_t best = 0;
        double best_norm = -1.0;
        for (std::size_t i = 0; i < vectors.size(); ++i) {
            double n = norm(vectors[i]);
            if (n > best_norm) {
                best_norm = n;
                best = i;
            }
        }
        if (best_norm <= rank_tol * scale_ref)
            break;
        Vec e = scale(vectors[best], 1.0 / best_norm);
        basis.push_back(e);
        vectors.erase(vectors.begin() + static_cast<std::ptrdiff_t>(best));
        for (auto& v : vectors)
            v = sub(v, scale(e, dot(e, v)));
    }
    return basis;
}

std::vector<Vec> ieta_span(const ElemData& data, const std::vector<Word>& samples, double rank_tol)
{
    std::vector<Vec> values;
    for (const auto& g : samples)
        values.push_back(data.cocycle(g));
    return orthonormal_span(std::move(values), rank_tol);
}

double distance_to_span(const Vec& v, const std::vector<Vec>& basis)
{
    Vec r = v;
    for (const auto& e : basis)
        r = sub(r, scale(e, dot(e, r)));
    return norm(r);
}

Decomposition invariant_decomposition(const ElemData& data, const std::vector<Word>& samples)
{
    bool hyperbolic = false;
    for (const auto& g : samples)
        if (std::fabs(std::fabs(data.character(g)) - 1.0) > 1e-9)
            hyperbolic = true;
    if (!hyperbolic)
        throw PreconditionFailed("elementary-type mismatch: |chi| = 1 on every sample");

    const std::size_t k = data.dim;
    auto lift = [&](const Vec& u) {
        Vec x(k + 2, 0.0);
        std::copy(u.begin(), u.end(), x.begin() + 2);
        return x;
    };
    auto ieta = ieta_span(data, samples);

    Decomposition out;
    Vec lp(k + 2, 0.0);
    Vec lm(k + 2, 0.0);
    lp[0] = 1.0;
    lm[1] = 1.0;
    out.h1 = {lp, lm};
    for (const auto& u : ieta)
        out.h1.push_back(lift(u));

    std::vector<Vec> all = ieta;
    for (std::size_t i = 0; i < k; ++i) {
        Vec e(k, 0.0);
        e[i] = 1.0;
        all.push_back(e);
    }
    auto full = orthonormal_span(all);
    for (std::size_t i = ieta.size(); i < full.size(); ++i)
        out.h0.push_back(lift(full[i]));

    for (const auto& g : samples) {
        LorentzOp op = reconstruct_rep(data, g);
        for (const auto& x : out.h1)
            out.invariance_residual = std::max(out.invariance_residual, distance_to_span(op.matrix * x, out.h1));
    }
    return out;
}

ElemData shift_model(const Vec& u)
{
    const std::size_t d = u.size();
    if (d < 2)
        throw InvalidInput("shift model needs dimension at least 2");
    auto perm_matrix = [d](const std::vector<std::size_t>& p) {
        Matrix<double> m(d, d);
        for (std::size_t i = 0; i < d; ++i)
            m(p[i], i) = 1.0;
        return m;
    };
    std::vector<std::size_t> cyc(d);
    for (std::size_t i = 0; i < d; ++i)
        cyc[i] = (i + 1) % d;
    std::vector<std::size_t> swap(d);
    std::iota(swap.begin(), swap.end(), 0);
    std::swap(swap[0], swap[1]);

    ElemData e;
    e.dim = d;
    Matrix<double> p = perm_matrix(cyc);
    e.chi = {{1, 2.0}, {2, 1.0}, {3, 1.0}};
    e.rho = {{1, p}, {2, perm_matrix(swap)}, {3, p}};
    Vec ones(d, 1.0);
    e.f[{1}] = add(sub(2.0 * p * u, u), ones);
    e.f[{2}] = sub(e.rho[2] * u, u);
    e.f[{3}] = sub(e.rho[3] * u, u);
    return e;
}

HorosphereModel make_horosphere_model(int q, int depth)
{
    if (q < 3 || depth < 1)
        throw InvalidInput("horosphere model needs q >= 3 and depth >= 1");
    HorosphereModel m;
    m.q = q;
    m.depth = depth;
    m.tree = RootedWreath(q - 1, depth);
    m.chi_abs = q - 1;
    const std::size_t n = m.dim();
    // Coordinate of vertex id is id - 1 (the root is not a coordinate).
    m.tau_a_inverse = Matrix<double>(n, n);
    const int first = m.tree.children(0).front();
    for (std::size_t id = 1; id <= n; ++id) {
        // Path of child positions from the root.
        std::vector<int> path;
        for (int v = static_cast<int>(id); v != 0; v = m.tree.parent(v)) {
            const auto& sib = m.tree.children(m.tree.parent(v));
            path.push_back(static_cast<int>(std::find(sib.begin(), sib.end(), v) - sib.begin()));
        }
        std::reverse(path.begin(), path.end());
        if (static_cast<int>(path.size()) >= depth)
            continue;
        int target = first;
        for (int c : path)
            target = m.tree.children(target)[static_cast<std::size_t>(c)];
        m.tau_a_inverse(static_cast<std::size_t>(target - 1), id - 1) = 1.0 / m.chi_abs;
    }
    for (const auto& g : m.tree.elements()) {
        Matrix<double> t(n, n);
        for (std::size_t id = 1; id <= n; ++id)
            t(static_cast<std::size_t>(g[id] - 1), id - 1) = 1.0;
        m.tau_k.push_back(std::move(t));
    }
    m.v = Vec(n, 0.0);
    const auto& top = m.tree.children(0);
    for (int c : top)
        m.v[static_cast<std::size_t>(c - 1)] -= 1.0 / static_cast<double>(top.size());
    m.v[static_cast<std::size_t>(first - 1)] += 1.0;
    return m;
}

} // namespace lorentree
