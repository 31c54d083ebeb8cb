// One line per acceptance criterion; exit status 1 if any fails.

#include "lorentree/elementary.hpp"
#include "lorentree/embed.hpp"
#include "lorentree/gelfand.hpp"
#include "lorentree/lorentz.hpp"

#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <functional>
#include <iostream>
#include <random>

using namespace lorentree;

namespace {

using Rng = std::mt19937_64;

struct Outcome {
    bool ok = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string title;
    double time_limit;
    std::function<Outcome()> run;
};

// ---------------------------------------------------------------- helpers

double pow_int(double x, int n) { return std::pow(x, n); }

Perm random_perm(Rng& rng, int n)
{
    Perm p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        p[static_cast<std::size_t>(i)] = i;
    std::shuffle(p.begin(), p.end(), rng);
    return p;
}

TreeAut random_w_fixing(Rng& rng, const RegularTree& tree, int depth)
{
    std::map<Address, Perm> perms;
    for (const auto& v : tree.ball(depth))
        perms[v] = random_perm(rng, tree.child_count(v));
    return TreeAut::portrait(tree.q(), Address(), std::move(perms));
}

Ray random_ray(Rng& rng, int q)
{
    std::uniform_int_distribution<int> plen(0, 3);
    std::uniform_int_distribution<int> per(1, 2);
    std::uniform_int_distribution<int> root_label(1, q);
    std::uniform_int_distribution<int> label(1, q - 1);
    Ray r;
    int n = plen(rng);
    for (int i = 0; i < n; ++i)
        r.prefix.push_back(i == 0 ? root_label(rng) : label(rng));
    int m = per(rng);
    for (int i = 0; i < m; ++i)
        r.period.push_back(label(rng));
    return r;
}

bool same_ray(const Ray& a, const Ray& b) { return gromov_product(a, b) == kInfiniteProduct; }

KleinPoint random_klein_point(Rng& rng, int q)
{
    std::uniform_int_distribution<int> count(2, 5);
    std::uniform_real_distribution<double> weight(0.1, 1.0);
    KleinPoint kp;
    int want = count(rng);
    while (static_cast<int>(kp.rays.size()) < want) {
        Ray r = random_ray(rng, q);
        bool fresh = true;
        for (const auto& s : kp.rays)
            fresh = fresh && !same_ray(r, s);
        if (fresh)
            kp.rays.push_back(r);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < kp.rays.size(); ++i)
        sum += kp.weights.emplace_back(weight(rng));
    for (auto& w : kp.weights)
        w /= sum;
    kp.validate();
    return kp;
}

Matrix<double> random_matrix(Rng& rng, std::size_t r, std::size_t c)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
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
    Matrix<double> q(k, k);
    for (std::size_t j = 0; j < k; ++j)
        q.set_column(j, basis.at(j));
    return q;
}

OLPlusBlock random_block(Rng& rng, std::size_t k, double lambda)
{
    return OLPlusBlock{lambda, random_matrix(rng, k, 1).column(0), random_orthogonal(rng, k)};
}

double random_lambda(Rng& rng)
{
    std::uniform_real_distribution<double> mag(1.1, 3.0);
    std::bernoulli_distribution flip(0.5);
    double l = mag(rng);
    if (flip(rng))
        l = 1.0 / l;
    return flip(rng) ? -l : l;
}

// Exchanges l+ and l-; an isometry of the light-cone basis.
Matrix<double> swap_ends(std::size_t k)
{
    Matrix<double> s = Matrix<double>::identity(k + 2);
    s(0, 0) = s(1, 1) = 0;
    s(0, 1) = s(1, 0) = 1;
    return s;
}

// ---------------------------------------------------------------- criteria

Outcome distance_identity()
{
    double worst = 0.0;
    std::size_t pairs = 0;
    for (double lambda : {1.25, 2.0}) {
        Embedding<double> e(3, lambda, 6);
        auto ball = e.tree().ball(6);
        std::vector<TreeVec<double>> f;
        for (const auto& v : ball)
            f.push_back(e.vertex(v));
        for (std::size_t i = 0; i < ball.size(); ++i)
            for (std::size_t k = i; k < ball.size(); ++k) {
                double target = pow_int(lambda, tree_dist(ball[i], ball[k]));
                double c = std::cosh(dist_from_pairing(minkowski_B(Address(), f[i], f[k]), -1.0, -1.0));
                worst = std::max(worst, std::fabs(c - target) / target);
                ++pairs;
            }
    }
    Embedding<mpq_class> ex(3, mpq_class(5, 4), 6);
    auto ball = ex.tree().ball(6);
    std::vector<TreeVec<mpq_class>> f;
    for (const auto& v : ball)
        f.push_back(ex.vertex(v));
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < ball.size(); ++i)
        for (std::size_t k = i; k < ball.size(); ++k) {
            mpq_class target = 1;
            for (int t = tree_dist(ball[i], ball[k]); t > 0; --t)
                target *= mpq_class(5, 4);
            if (-minkowski_B(Address(), f[i], f[k]) != target)
                ++mismatches;
        }
    return {worst <= 1e-9 && mismatches == 0 && ball.size() >= 190,
            fmt::format("{} vertices, float max rel residual {:.2e}, exact mismatches {}", ball.size(), worst,
                        mismatches)};
}

Outcome normalization()
{
    Embedding<mpq_class> e(3, mpq_class(5, 4), 6);
    std::size_t bad = 0;
    auto ball = e.tree().ball(6);
    for (const auto& v : ball)
        if (minkowski_Q(Address(), e.vertex(v)) != -1)
            ++bad;
    return {bad == 0, fmt::format("Q(f_v) = -1 exactly on {} vertices, {} failures", ball.size(), bad)};
}

struct SampledAuts {
    std::vector<TreeAut> w_fixing;
    std::vector<TreeAut> flips;
    std::vector<TreeAut> translations;
};

const SampledAuts& sampled_auts()
{
    static const SampledAuts auts = [] {
        Rng rng(2024);
        RegularTree tree(3);
        SampledAuts s;
        std::uniform_int_distribution<int> neighbor(1, 3);
        std::uniform_int_distribution<int> shift(1, 3);
        std::bernoulli_distribution back(0.5);
        TreeAut a = translation_aut(3, standard_axis());
        for (int i = 0; i < 50; ++i)
            s.w_fixing.push_back(random_w_fixing(rng, tree, 6));
        for (int i = 0; i < 25; ++i)
            s.flips.push_back(edge_flip_aut(3, Address({neighbor(rng)})));
        for (int i = 0; i < 25; ++i) {
            int k = shift(rng) * (back(rng) ? -1 : 1);
            s.translations.push_back(a.power(k) * random_w_fixing(rng, tree, 6));
        }
        return s;
    }();
    return auts;
}

Outcome equivariance()
{
    const auto& auts = sampled_auts();
    double worst = 0.0;
    double generator_gap = 0.0;
    std::size_t checked = 0;
    // 5/4 keeps every coefficient dyadic; 2 brings in sqrt(3).
    for (double lambda : {1.25, 2.0}) {
        Embedding<double> e(3, lambda, 6);
        auto run = [&](const TreeAut& g) {
            BlockOp<double> op = e.represent(g);
            for (const auto& v : op.domain) {
                double scale = e.vertex(g.apply(v)).max_abs();
                worst = std::max(worst, max_coeff_gap(op.apply(e.vertex(v)), e.vertex(g.apply(v))) / scale);
                ++checked;
            }
        };
        for (const auto& g : auts.w_fixing)
            run(g);
        for (const auto& g : auts.flips)
            run(g);
        for (const auto& g : auts.translations)
            run(g);

        for (const auto& f : auts.flips) {
            BlockOp<double> gen = e.generator_op(f);
            BlockOp<double> rep = e.represent(f);
            for (const auto& v : rep.domain)
                generator_gap = std::max(generator_gap, max_coeff_gap(gen.column(v), rep.column(v)));
        }
    }
    return {worst <= 1e-9 && generator_gap <= 1e-12,
            fmt::format("100 automorphisms, lambda 5/4 and 2, {} vertex checks, max rel gap {:.2e}; "
                        "generator formula gap {:.2e}",
                        checked, worst, generator_gap)};
}

Outcome orthogonality()
{
    const auto& auts = sampled_auts();
    Embedding<double> e(3, 2.0, 6);
    double worst = 0.0;
    std::size_t ops = 0;
    auto note = [&](const BlockOp<double>& op) {
        worst = std::max(worst, op.gram_residual());
        ++ops;
    };
    for (const auto* group : {&auts.w_fixing, &auts.flips, &auts.translations})
        for (const auto& g : *group)
            note(e.represent(g));
    for (const auto& f : auts.flips)
        note(e.generator_op(f));

    Embedding<mpq_class> ex(3, mpq_class(5, 4), 5);
    std::size_t exact_bad = 0;
    std::size_t exact_ops = 0;
    for (std::size_t i = 0; i < 10; ++i)
        for (const auto* group : {&auts.w_fixing, &auts.flips, &auts.translations}) {
            const TreeAut& g = (*group)[i];
            exact_bad += ex.represent(g).gram_residual() != 0;
            exact_bad += ex.factorized(g).gram_residual() != 0;
            exact_ops += 2;
        }
    for (const auto& f : auts.flips) {
        exact_bad += ex.generator_op(f).gram_residual() != 0;
        ++exact_ops;
    }
    return {worst <= 1e-9 && exact_bad == 0,
            fmt::format("{} float operators max residual {:.2e}; {} exact operators, {} nonzero", ops, worst,
                        exact_ops, exact_bad)};
}

Outcome codiameter()
{
    Rng rng(77);
    RegularTree tree(3);
    const double lambda = 1.25;
    const double bound = std::acosh(1.5);
    double worst = 0.0;
    int disagree = 0;
    int address_ties = 0;
    for (int i = 0; i < 200; ++i) {
        KleinPoint kp = random_klein_point(rng, 3);
        Codiameter c = codiameter_check(tree, kp, lambda);
        worst = std::max(worst, c.dist);
        Address fast = psi_min(tree, kp, lambda);
        Address slow = psi_min_exhaustive(tree, kp, lambda, 14);
        if (fast != slow) {
            double a = psi(kp, lambda, fast);
            double b = psi(kp, lambda, slow);
            if (std::fabs(a - b) <= 1e-12 * b)
                ++address_ties;
            else
                ++disagree;
        }
    }
    return {worst <= bound + 1e-9 && disagree == 0,
            fmt::format("200 Klein points, max distance {:.10f} vs bound {:.10f}; minimizer disagreements {}, "
                        "equal-value ties {}",
                        worst, bound, disagree, address_ties)};
}

Outcome busemann()
{
    Rng rng(5);
    Embedding<double> e(3, 1.25, 8);
    auto ball = e.tree().ball(6);
    std::uniform_int_distribution<std::size_t> pick(0, ball.size() - 1);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        Ray xi = random_ray(rng, 3);
        auto [lhs, rhs] = busemann_compat(e, xi, ball[pick(rng)], ball[pick(rng)]);
        worst = std::max(worst, std::fabs(lhs - rhs));
    }
    return {worst <= 1e-9, fmt::format("100 triples, max gap {:.2e}", worst)};
}

Outcome translation()
{
    TreeAut a = translation_aut(3, standard_axis());
    double worst_excess = -1.0;
    bool ok = true;
    for (double lambda : {1.25, 2.0}) {
        Embedding<double> e(3, lambda, 10);
        for (int n = 1; n <= 8; ++n) {
            auto t = translation_length_estimate(e, a, n);
            double direct = std::acosh(std::pow(lambda, n)) / n;
            double gap = std::fabs(t.estimate - std::log(lambda));
            ok = ok && t.within && std::fabs(t.estimate - direct) <= 1e-9 && gap <= std::log(2.0) / n;
            worst_excess = std::max(worst_excess, gap - std::log(2.0) / n);
        }
    }
    return {ok, fmt::format("n <= 8, lambda in {{5/4, 2}}; max of gap - ln2/n = {:.3e}", worst_excess)};
}

Outcome gelfand()
{
    bool comm = true;
    bool assoc = true;
    bool lemma = true;
    bool witness = true;
    for (int q : {3, 4, 5}) {
        for (int a = 0; a <= 5; ++a)
            for (int b = 0; b <= 5; ++b) {
                ShellFn f = ShellFn::basis(q, a);
                ShellFn g = ShellFn::basis(q, b);
                comm = comm && commutator_residual(f, g).is_zero();
                for (int c = 0; c <= 5; ++c) {
                    ShellFn h = ShellFn::basis(q, c);
                    assoc = assoc && convolve(convolve(f, g), h) == convolve(f, convolve(g, h));
                }
            }
        ShellFn phi = spherical_phi0(q);
        const mpq_class mu0 = haar_ball(q, 0);
        lemma = lemma && convolve(phi, ShellFn::basis(q, 0)) == mu0 * phi;
        lemma = lemma && convolve(phi, ShellFn::basis(q, 1)) == -mu0 * phi;
        for (int m = 2; m <= 5; ++m)
            lemma = lemma && convolve(phi, ShellFn::basis(q, m)).is_zero();
        witness = witness && sgn(positive_definite_witness(phi)) >= 0;
    }
    return {comm && assoc && lemma && witness,
            fmt::format("q in {{3,4,5}}, shells <= 5: commutative {}, associative {}, phi0 identities {}, "
                        "witness >= 0 {}",
                        comm, assoc, lemma, witness)};
}

Outcome oracle()
{
    int pairs = 0;
    int bad = 0;
    for (int q : {3, 4}) {
        WreathModel m(q, 2);
        for (int a = 0; a <= 2; ++a)
            for (int b = 0; b <= 2; ++b) {
                ShellFn f = ShellFn::basis(q, a);
                ShellFn g = ShellFn::basis(q, b);
                bad += !(wreath_oracle_convolve(f, g, m) == convolve(f, g));
                ++pairs;
            }
    }
    return {bad == 0, fmt::format("{} basis pairs, {} mismatches", pairs, bad)};
}

Outcome elementary()
{
    Rng rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ElemData data = shift_model({u(rng), u(rng), u(rng), u(rng)});
    std::uniform_int_distribution<int> len(1, 6);
    std::uniform_int_distribution<int> gen(1, 3);
    std::bernoulli_distribution inv(0.5);
    auto word = [&] {
        Word w;
        for (int i = len(rng); i > 0; --i)
            w.push_back(inv(rng) ? -gen(rng) : gen(rng));
        return w;
    };
    double hom = 0.0;
    for (int i = 0; i < 50; ++i) {
        Word g = word();
        Word h = word();
        hom = std::max(hom, max_abs_diff(reconstruct_rep(data, word_concat(g, h)).matrix,
                                         reconstruct_rep(data, g).matrix * reconstruct_rep(data, h).matrix));
    }

    auto vec_gap = [](const Vec& a, const Vec& b) {
        double m = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            m = std::max(m, std::fabs(a[i] - b[i]));
        return m;
    };

    // A cohomologous cocycle standardizes to the same one.
    Vec shift{u(rng), u(rng), u(rng), u(rng)};
    ElemData moved = data;
    moved.f.clear();
    for (int g : data.generators()) {
        Vec fg = data.cocycle({g});
        Matrix<double> t = data.tau({g});
        for (std::size_t i = 0; i < fg.size(); ++i) {
            fg[i] += shift[i];
            for (std::size_t j = 0; j < fg.size(); ++j)
                fg[i] -= t(i, j) * shift[j];
        }
        moved.f[{g}] = fg;
    }
    Standardized s1 = standardize_cocycle(data, {1});
    Standardized s2 = standardize_cocycle(moved, {1});
    Standardized s3 = standardize_cocycle(s1.data, {1});
    double unique = 0.0;
    double idem = 0.0;
    double vanish = 0.0;
    for (int i = 0; i < 20; ++i) {
        Word g = word();
        unique = std::max(unique, vec_gap(s1.data.cocycle(g), s2.data.cocycle(g)));
        idem = std::max(idem, vec_gap(s1.data.cocycle(g), s3.data.cocycle(g)));
    }
    for (const Word& m : {Word{2}, Word{3}, Word{2, 3}, Word{3, 3, -2}, Word{2, 3, 2, -3}})
        vanish = std::max(vanish, vec_gap(s1.data.cocycle(m), Vec(4, 0.0)));

    Matrix<double> t(1, 1);
    t(0, 0) = 2.0;
    double s_two = std::fabs(sigma({1.0}, t).value[0] - 2.0);
    t(0, 0) = 3.0;
    double s_three = std::fabs(sigma({1.0}, t).value[0] - 1.5);

    bool ok = hom <= 1e-9 && unique <= 1e-9 && idem <= 1e-9 && vanish <= 1e-9 && s_two <= 1e-12 &&
              s_three <= 1e-12;
    return {ok, fmt::format("homomorphism {:.2e}, uniqueness {:.2e}, idempotence {:.2e}, vanishing {:.2e}, "
                            "sigma {:.2e}/{:.2e}",
                            hom, unique, idem, vanish, s_two, s_three)};
}

Outcome block_calculus()
{
    Rng rng(3);
    double inv = 0.0;
    double conj = 0.0;
    double norm = 0.0;
    for (int i = 0; i < 50; ++i) {
        LorentzOp t = make_olplus(random_block(rng, 3, random_lambda(rng)));
        inv = std::max(inv, max_abs_diff(invert_olplus(t).matrix, inverse(t.matrix)));
    }
    for (int i = 0; i < 50; ++i) {
        LorentzOp s = make_olplus(random_block(rng, 3, random_lambda(rng)));
        LorentzOp t = make_olplus(random_block(rng, 3, random_lambda(rng)));
        conj = std::max(conj, conjugate(s, t).gap);
    }
    std::uniform_real_distribution<double> mag(1.1, 3.0);
    std::bernoulli_distribution flip(0.5);
    for (int i = 0; i < 20; ++i) {
        double lambda = (flip(rng) ? -1.0 : 1.0) * mag(rng);
        OLPlusBlock b = random_block(rng, 3, lambda);
        LorentzOp s = make_olplus(normalizing_conjugator(b));
        Matrix<double> got = s.matrix * make_olplus(b).matrix * inverse(s.matrix);
        Matrix<double> want = Matrix<double>::identity(5);
        want(0, 0) = lambda;
        want(1, 1) = 1.0 / lambda;
        want.set_block(2, 2, b.a4);
        norm = std::max(norm, max_abs_diff(got, want));
    }
    return {inv <= 1e-12 && conj <= 1e-12 && norm <= 1e-9,
            fmt::format("inverse {:.2e}, conjugation {:.2e}, normalization {:.2e}", inv, conj, norm)};
}

Outcome relations()
{
    Embedding<double> e(3, 1.25, 6);
    bool ok = true;
    std::string detail;
    for (int j : {1, 2}) {
        RelationSetup setup = make_relation_setup(3, j);
        check_relation_membership(setup);
        RelationReport r = parabolic_relation_check(e, setup);
        ok = ok && r.residual_chi <= 1e-9 && r.residual_block <= 1e-9;
        detail += fmt::format("{}j={}: mu {:.3f}, chi(g) {:.12f}, residuals {:.1e}/{:.1e}", j == 1 ? "" : "; ", j,
                              r.mu, r.chi_g, r.residual_chi, r.residual_block);
    }
    return {ok, detail};
}

Outcome classification()
{
    Rng rng(9);
    LorentzOp id = LorentzOp::identity(2);
    LorentzOp hyp{Matrix<double>::identity(4), lightcone_gram(2)};
    hyp.matrix(0, 0) = 2.0;
    hyp.matrix(1, 1) = 0.5;
    Vec e1{1.0, 0.0};
    LorentzOp par = make_olplus(OLPlusBlock{1.0, e1, Matrix<double>::identity(2)});

    bool ok = classify(id).type == IsomType::elliptic;
    IsomClass h = classify(hyp);
    ok = ok && h.type == IsomType::hyperbolic && std::fabs(std::log(std::fabs(h.eigenvalue)) - std::log(2.0)) <= 1e-9;
    ok = ok && classify(par).type == IsomType::parabolic;

    int stable = 0;
    const Matrix<double> swap = swap_ends(2);
    for (int i = 0; i < 20; ++i) {
        // product of a random stabilizer of l+ and a conjugated one of l-
        Matrix<double> p = make_olplus(random_block(rng, 2, random_lambda(rng))).matrix;
        Matrix<double> m = make_olplus(random_block(rng, 2, random_lambda(rng))).matrix;
        Matrix<double> c = p * swap * m * swap;
        Matrix<double> ci = inverse(c);
        bool same = true;
        for (const LorentzOp* op : {&id, &hyp, &par}) {
            LorentzOp conj{c * op->matrix * ci, op->gram};
            IsomClass before = classify(*op);
            IsomClass after = classify(conj);
            same = same && before.type == after.type;
            if (before.type == IsomType::hyperbolic)
                same = same && std::fabs(std::log(std::fabs(after.eigenvalue)) - std::log(2.0)) <= 1e-9;
        }
        stable += same;
    }
    ok = ok && stable == 20;
    return {ok, fmt::format("examples elliptic/hyperbolic (length {:.12f})/parabolic; {} of 20 conjugations stable",
                            std::log(std::fabs(h.eigenvalue)), stable)};
}

} // namespace

int main()
{
    std::vector<Criterion> criteria{
        {1, "distance identity", 10.0, distance_identity},
        {2, "normalization", 0.0, normalization},
        {3, "equivariance", 0.0, equivariance},
        {4, "orthogonality", 0.0, orthogonality},
        {5, "codiameter", 0.0, codiameter},
        {6, "busemann compatibility", 0.0, busemann},
        {7, "translation length", 0.0, translation},
        {8, "gelfand suite", 1.0, gelfand},
        {9, "oracle equivalence", 5.0, oracle},
        {10, "elementary reconstruction", 0.0, elementary},
        {11, "block calculus", 0.0, block_calculus},
        {12, "parabolic relations", 0.0, relations},
        {13, "classification", 0.0, classification},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("error: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::string timing = fmt::format("{:.2f}s", secs);
        if (c.time_limit > 0) {
            timing += fmt::format(" (limit {:.0f}s)", c.time_limit);
            if (secs > c.time_limit)
                out.ok = false;
        }
        failures += !out.ok;
        std::cout << fmt::format("[{}] {:>2} {}: {} [{}]\n", out.ok ? "PASS" : "FAIL", c.id, c.title, out.detail,
                                 timing);
    }
    std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures),
                             criteria.size());
    return failures ? 1 : 0;
}
