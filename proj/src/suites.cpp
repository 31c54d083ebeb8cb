#include "lorentree/suites.hpp"

#include "lorentree/elementary.hpp"
#include "lorentree/embed.hpp"
#include "lorentree/gelfand.hpp"
#include "lorentree/hymodel.hpp"
#include "lorentree/lorentz.hpp"
#include "lorentree/quadspace.hpp"

#include <cmath>
#include <fmt/format.h>
#include <functional>
#include <random>

namespace lorentree {

namespace {

using Rng = std::mt19937_64;

CheckResult measured(std::string name, double residual, double tol, std::string detail = {})
{
    return {std::move(name), residual, tol, false, residual <= tol, std::move(detail)};
}

CheckResult exact_check(std::string name, bool ok, std::string detail = {})
{
    return {std::move(name), ok ? 0.0 : 1.0, 0.0, true, ok, std::move(detail)};
}

// Runs one check, turning a library error into a named failure.
void guarded(std::vector<CheckResult>& out, const std::string& name, const std::function<CheckResult()>& fn)
{
    try {
        out.push_back(fn());
    } catch (const std::exception& e) {
        out.push_back({name, 0.0, 0.0, false, false, e.what()});
    }
}

Matrix<double> random_matrix(Rng& rng, std::size_t r, std::size_t c, double lo = -1.0, double hi = 1.0)
{
    std::uniform_real_distribution<double> u(lo, hi);
    Matrix<double> m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            m(i, j) = u(rng);
    return m;
}

Matrix<double> random_orthogonal(Rng& rng, std::size_t k)
{
    std::vector<Vec> cols;
    Matrix<double> a = random_matrix(rng, k, k);
    for (std::size_t j = 0; j < k; ++j)
        cols.push_back(a.column(j));
    auto basis = orthonormal_span(cols, 1e-8);
    if (basis.size() != k)
        return Matrix<double>::identity(k);
    Matrix<double> q(k, k);
    for (std::size_t j = 0; j < k; ++j)
        q.set_column(j, basis[j]);
    return q;
}

OLPlusBlock random_block(Rng& rng, std::size_t k, double lambda)
{
    OLPlusBlock b;
    b.lambda = lambda;
    b.a3 = random_matrix(rng, k, 1).column(0);
    b.a4 = random_orthogonal(rng, k);
    return b;
}

std::vector<CheckResult> quad_suite(const SuiteOptions& o)
{
    std::vector<CheckResult> out;
    Rng rng(o.seed);
    guarded(out, "quad.index_of_random_index_one", [&] {
        int bad = 0;
        for (int trial = 0; trial < 20; ++trial) {
            Matrix<double> p = random_matrix(rng, 4, 4);
            p = p + 2.0 * Matrix<double>::identity(4);
            Matrix<double> g = p.transpose() * Matrix<double>::diagonal({-1, 1, 1, 1}) * p;
            Inertia in = index_of(QuadForm<double>::dense(g));
            if (!(in == Inertia{3, 1}))
                ++bad;
        }
        return exact_check("quad.index_of_random_index_one", bad == 0, fmt::format("{} mismatches", bad));
    });
    guarded(out, "quad.pm_decomposition_orthogonality", [&] {
        Matrix<double> p = random_matrix(rng, 5, 5) + 2.0 * Matrix<double>::identity(5);
        auto form = QuadForm<double>::dense(p.transpose() * Matrix<double>::diagonal({-1, 1, 1, 1, 1}) * p);
        auto d = pm_decomposition(form);
        double worst = 0.0;
        for (const auto& m : d.minus)
            for (const auto& x : d.plus)
                worst = std::max(worst, std::fabs(eval_B(form, m, x)));
        bool signs = d.minus.size() == 1 && d.plus.size() == 4;
        for (const auto& m : d.minus)
            signs = signs && eval_B(form, m, m) < 0;
        for (const auto& x : d.plus)
            signs = signs && eval_B(form, x, x) > 0;
        return measured("quad.pm_decomposition_orthogonality", signs ? worst : 1.0, 1e-9);
    });
    guarded(out, "quad.exact_signature", [&] {
        Matrix<mpq_class> g(3, 3);
        g(0, 1) = g(1, 0) = 1;
        g(2, 2) = mpq_class(3, 2);
        Inertia in = index_of(QuadForm<mpq_class>::dense(g));
        return exact_check("quad.exact_signature", in == Inertia{2, 1});
    });
    return out;
}

std::vector<CheckResult> hymodel_suite(const SuiteOptions& o)
{
    std::vector<CheckResult> out;
    Rng rng(o.seed);
    HyperboloidModel model(QuadForm<double>::minkowski(4, 0));
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    auto random_tangent = [&] { return Vec{0.0, u(rng), u(rng), u(rng)}; };
    guarded(out, "hymodel.exp_pair_formula", [&] {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            Vec v = random_tangent();
            Vec w = random_tangent();
            HPoint a = model.exp_map(v);
            HPoint b = model.exp_map(w);
            double lhs = std::cosh(model.dist(a, b));
            double rhs = std::fabs(-model.B(v, w) + std::sqrt(1 + model.Q(v)) * std::sqrt(1 + model.Q(w)));
            worst = std::max(worst, std::fabs(lhs - rhs) / rhs);
        }
        return measured("hymodel.exp_pair_formula", worst, 1e-9);
    });
    guarded(out, "hymodel.exp_log_round_trip", [&] {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            Vec v = random_tangent();
            Vec back = model.log_map(model.exp_map(v));
            for (std::size_t k = 0; k < v.size(); ++k)
                worst = std::max(worst, std::fabs(back[k] - v[k]));
        }
        return measured("hymodel.exp_log_round_trip", worst, 1e-9);
    });
    guarded(out, "hymodel.busemann_cocycle", [&] {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            Vec d = random_tangent();
            double n = std::sqrt(model.Q(d));
            BPoint xi = model.boundary({1.0, d[1] / n, d[2] / n, d[3] / n});
            HPoint x = model.exp_map(random_tangent());
            HPoint y = model.exp_map(random_tangent());
            HPoint z = model.exp_map(random_tangent());
            double gap = model.busemann(xi, x, y) + model.busemann(xi, y, z) - model.busemann(xi, x, z);
            worst = std::max(worst, std::fabs(gap));
        }
        return measured("hymodel.busemann_cocycle", worst, 1e-9);
    });
    return out;
}

std::vector<CheckResult> lorentz_suite(const SuiteOptions& o)
{
    std::vector<CheckResult> out;
    Rng rng(o.seed);
    std::uniform_real_distribution<double> lam(1.1, 3.0);
    std::bernoulli_distribution flip(0.5);
    guarded(out, "lorentz.invert_olplus", [&] {
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            LorentzOp t = make_olplus(random_block(rng, 3, flip(rng) ? lam(rng) : -lam(rng)));
            worst = std::max(worst, max_abs_diff(invert_olplus(t).matrix, inverse(t.matrix)));
        }
        return measured("lorentz.invert_olplus", worst, 1e-12);
    });
    guarded(out, "lorentz.conjugation_formula", [&] {
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            LorentzOp s = make_olplus(random_block(rng, 3, lam(rng)));
            LorentzOp t = make_olplus(random_block(rng, 3, 1.0 / lam(rng)));
            worst = std::max(worst, conjugate(s, t).gap);
        }
        return measured("lorentz.conjugation_formula", worst, 1e-12);
    });
    guarded(out, "lorentz.normalization", [&] {
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            OLPlusBlock b = random_block(rng, 3, (flip(rng) ? 1.0 : -1.0) * lam(rng));
            LorentzOp s = make_olplus(normalizing_conjugator(b));
            LorentzOp n = conjugate(s, make_olplus(b)).product;
            OLPlusBlock target{b.lambda, Vec(3, 0.0), b.a4};
            worst = std::max(worst, max_abs_diff(n.matrix, make_olplus(target).matrix));
        }
        return measured("lorentz.normalization", worst, 1e-9);
    });
    guarded(out, "lorentz.classification_examples", [&] {
        bool ok = classify(LorentzOp::identity(1)).type == IsomType::elliptic;
        LorentzOp h{Matrix<double>::diagonal({2.0, 0.5, 1.0}), lightcone_gram(1)};
        ok = ok && classify(h).type == IsomType::hyperbolic;
        OLPlusBlock p{1.0, Vec{1.0}, Matrix<double>::identity(1)};
        ok = ok && classify(make_olplus(p)).type == IsomType::parabolic;
        return exact_check("lorentz.classification_examples", ok);
    });
    return out;
}

std::vector<CheckResult> embed_suite(const SuiteOptions& o)
{
    std::vector<CheckResult> out;
    Rng rng(o.seed);
    Embedding<double> e(o.valence, o.lambda, o.depth);
    const Address w;
    auto ball = e.tree().ball(o.depth);
    std::vector<TreeVec<double>> images;
    for (const auto& v : ball)
        images.push_back(e.vertex(v));
    guarded(out, "embed.normalization", [&] {
        double worst = 0.0;
        for (const auto& f : images)
            worst = std::max(worst, std::fabs(minkowski_Q(w, f) + 1.0));
        return measured("embed.normalization", worst, 1e-9);
    });
    guarded(out, "embed.distance_identity", [&] {
        double worst = 0.0;
        for (std::size_t i = 0; i < ball.size(); ++i)
            for (std::size_t k = i; k < ball.size(); ++k) {
                double c = std::fabs(minkowski_B(w, images[i], images[k]));
                double target = std::pow(o.lambda, tree_dist(ball[i], ball[k]));
                worst = std::max(worst, std::fabs(c - target) / target);
            }
        return measured("embed.distance_identity", worst, 1e-9,
                        fmt::format("{} vertices, lambda {}", ball.size(), o.lambda));
    });
    guarded(out, "embed.equivariance", [&] {
        double worst = 0.0;
        TreeAut a = translation_aut(o.valence, standard_axis());
        std::vector<TreeAut> samples{a, edge_flip_aut(o.valence, Address({2})), root_transposition(o.valence, 1, 2) * a};
        for (const auto& g : samples) {
            BlockOp<double> op = e.represent(g);
            for (const auto& v : op.domain)
                worst = std::max(worst, max_coeff_gap(op.apply(e.vertex(v)), e.vertex(g.apply(v))));
        }
        return measured("embed.equivariance", worst, 1e-9);
    });
    guarded(out, "embed.orthogonality", [&] {
        double worst = 0.0;
        TreeAut a = translation_aut(o.valence, standard_axis());
        worst = std::max(worst, e.represent(a).gram_residual());
        worst = std::max(worst, e.generator_op(edge_flip_aut(o.valence, Address({1}))).gram_residual());
        return measured("embed.orthogonality", worst, 1e-9);
    });
    guarded(out, "embed.codiameter", [&] {
        double worst = 0.0;
        double bound = std::acosh(std::sqrt(1.0 + o.lambda));
        std::uniform_real_distribution<double> wt(0.1, 1.0);
        KleinPoint kp;
        kp.rays = {Ray::parse("(1)"), Ray::parse("2,(1)"), Ray::parse("3,(2)")};
        if (o.valence < 3)
            kp.rays.pop_back();
        for (int i = 0; i < 50; ++i) {
            kp.weights.clear();
            double sum = 0.0;
            for (std::size_t r = 0; r < kp.rays.size(); ++r)
                sum += kp.weights.emplace_back(wt(rng));
            for (auto& s : kp.weights)
                s /= sum;
            worst = std::max(worst, codiameter_check(e.tree(), kp, o.lambda).dist - bound);
        }
        return measured("embed.codiameter_excess", std::max(0.0, worst), 1e-9);
    });
    return out;
}

std::vector<CheckResult> elementary_suite(const SuiteOptions& o)
{
    std::vector<CheckResult> out;
    Rng rng(o.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ElemData data = shift_model({u(rng), u(rng), u(rng), u(rng)});
    guarded(out, "elementary.homomorphism", [&] {
        std::uniform_int_distribution<int> len(1, 5);
        std::uniform_int_distribution<int> gen(1, 3);
        std::bernoulli_distribution inv(0.5);
        auto word = [&] {
            Word w;
            for (int i = len(rng); i > 0; --i)
                w.push_back(inv(rng) ? -gen(rng) : gen(rng));
            return w;
        };
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            Word g = word();
            Word h = word();
            Matrix<double> lhs = reconstruct_rep(data, word_concat(g, h)).matrix;
            Matrix<double> rhs = reconstruct_rep(data, g).matrix * reconstruct_rep(data, h).matrix;
            worst = std::max(worst, max_abs_diff(lhs, rhs));
        }
        return measured("elementary.homomorphism", worst, 1e-9);
    });
    guarded(out, "elementary.standard_vanishes_on_compact", [&] {
        Standardized s = standardize_cocycle(data, {1});
        double worst = 0.0;
        for (const Word& m : {Word{2}, Word{3}, Word{2, 3}, Word{3, -2, 3}})
            for (double x : s.data.cocycle(m))
                worst = std::max(worst, std::fabs(x));
        return measured("elementary.standard_vanishes_on_compact", worst, 1e-9);
    });
    guarded(out, "elementary.sigma_geometric", [&] {
        Matrix<double> t(1, 1);
        t(0, 0) = 2.0;
        double r1 = std::fabs(sigma({1.0}, t).value[0] - 2.0);
        t(0, 0) = 3.0;
        double r2 = std::fabs(sigma({1.0}, t).value[0] - 1.5);
        return measured("elementary.sigma_geometric", std::max(r1, r2), 1e-10);
    });
    return out;
}

std::vector<CheckResult> gelfand_suite(const SuiteOptions&)
{
    std::vector<CheckResult> out;
    guarded(out, "gelfand.commutative_associative", [&] {
        bool ok = true;
        for (int q : {3, 4, 5})
            for (int a = 0; a <= 5; ++a)
                for (int b = 0; b <= 5; ++b) {
                    ShellFn f = ShellFn::basis(q, a);
                    ShellFn g = ShellFn::basis(q, b);
                    ok = ok && commutator_residual(f, g).is_zero();
                    for (int c = 0; c <= 4; ++c) {
                        ShellFn h = ShellFn::basis(q, c);
                        ok = ok && convolve(convolve(f, g), h) == convolve(f, convolve(g, h));
                    }
                }
        return exact_check("gelfand.commutative_associative", ok);
    });
    guarded(out, "gelfand.phi0_identities", [&] {
        bool ok = true;
        for (int q : {3, 4, 5}) {
            auto c = check_spherical(spherical_phi0(q), 5);
            ok = ok && c.ok && c.constants.at(0) == 1 && c.constants.at(1) == -1;
            for (int m = 2; m <= 5; ++m)
                ok = ok && c.constants.at(m) == 0;
            ok = ok && positive_definite_witness(spherical_phi0(q)) >= 0;
        }
        return exact_check("gelfand.phi0_identities", ok);
    });
    guarded(out, "gelfand.oracle_equivalence", [&] {
        bool ok = true;
        WreathModel model(3, 2);
        for (int a = 0; a <= 2; ++a)
            for (int b = 0; b <= 2; ++b)
                ok = ok && wreath_oracle_convolve(ShellFn::basis(3, a), ShellFn::basis(3, b), model) ==
                               convolve(ShellFn::basis(3, a), ShellFn::basis(3, b));
        return exact_check("gelfand.oracle_equivalence", ok, "q=3, depth 2");
    });
    return out;
}

} // namespace

std::vector<std::string> suite_names() { return {"quad", "hymodel", "lorentz", "embed", "elementary", "gelfand"}; }

std::vector<CheckResult> run_suite(const std::string& name, const SuiteOptions& options)
{
    if (name == "all") {
        std::vector<CheckResult> all;
        for (const auto& n : suite_names()) {
            auto part = run_suite(n, options);
            all.insert(all.end(), part.begin(), part.end());
        }
        return all;
    }
    if (name == "quad")
        return quad_suite(options);
    if (name == "hymodel")
        return hymodel_suite(options);
    if (name == "lorentz")
        return lorentz_suite(options);
    if (name == "embed")
        return embed_suite(options);
    if (name == "elementary")
        return elementary_suite(options);
    if (name == "gelfand")
        return gelfand_suite(options);
    throw InvalidInput("unknown suite '" + name + "'");
}

std::string format_check(const CheckResult& r)
{
    std::string status = r.ok ? "ok" : "FAIL";
    std::string value = r.exact ? (r.ok ? "0 (exact)" : "mismatch (exact)")
                                : fmt::format("{:.3e} (tol {:.0e})", r.residual, r.tolerance);
    std::string line = fmt::format("{:<44} {:<24} {}", r.name, value, status);
    if (!r.detail.empty())
        line += "  [" + r.detail + "]";
    return line;
}

} // namespace lorentree
