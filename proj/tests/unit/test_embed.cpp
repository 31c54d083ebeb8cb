#include "lorentree/embed.hpp"

#include <cmath>
#include <doctest.h>
#include <sstream>

using namespace lorentree;

namespace {

Address A(const std::string& s) { return Address::parse(s); }

const mpq_class kLambda(5, 4);
const mpq_class kRoot(3, 4);

// lambda^|v| delta_w + root * sum_k lambda^(|v| - k) delta_{v_k}, written out.
TreeVec<mpq_class> expected_image(const Address& v)
{
    const int n = static_cast<int>(v.depth());
    auto pw = [](int e) {
        mpq_class r = 1;
        for (int i = 0; i < e; ++i)
            r *= kLambda;
        return r;
    };
    TreeVec<mpq_class> f;
    f.set(Address(), pw(n));
    for (int k = 1; k <= n; ++k)
        f.set(v.prefix(static_cast<std::size_t>(k)), kRoot * pw(n - k));
    return f;
}

void check_same_columns(const BlockOp<mpq_class>& a, const BlockOp<mpq_class>& b)
{
    REQUIRE(a.domain == b.domain);
    for (const auto& v : a.domain)
        CHECK(a.column(v) == b.column(v));
}

} // namespace

TEST_CASE("images of vertices, exactly")
{
    Embedding<mpq_class> e(3, kLambda, 4);
    CHECK(e.root() == kRoot);
    CHECK(e.vertex(A("w")) == TreeVec<mpq_class>::delta(Address()));
    TreeVec<mpq_class> f1 = e.vertex(A("1/1"));
    CHECK(f1.get(A("w")) == mpq_class(25, 16));
    CHECK(f1.get(A("1")) == mpq_class(15, 16));
    CHECK(f1.get(A("1/1")) == mpq_class(3, 4));
    for (const auto& v : e.tree().ball(4)) {
        CHECK(e.vertex(v) == expected_image(v));
        CHECK(minkowski_Q(Address(), e.vertex(v)) == -1);
    }
}

TEST_CASE("constructor preconditions")
{
    CHECK_THROWS_AS(Embedding<double>(3, 1.0, 4), PreconditionFailed);
    CHECK_THROWS_AS(Embedding<double>(3, 0.5, 4), PreconditionFailed);
    CHECK_THROWS_AS(Embedding<mpq_class>(3, mpq_class(13, 10), 4), PreconditionFailed);
    CHECK_NOTHROW(Embedding<mpq_class>(3, mpq_class(5, 3), 4));
    Embedding<double> e(3, 1.25, 3);
    CHECK_THROWS_AS(e.vertex(A("1/1/1/1")), DepthExceeded);
    CHECK_THROWS_AS(e.vertex(A("4")), InvalidInput);
}

TEST_CASE("closed-form pairings match the vectors")
{
    Embedding<mpq_class> e(3, kLambda, 5);
    auto ball = e.tree().ball(3);
    for (const auto& x : ball)
        for (const auto& y : ball) {
            mpq_class b = minkowski_B(Address(), e.vertex(x), e.vertex(y));
            CHECK(b == e.pair_vertex_vertex(x, y));
            mpq_class target = 1;
            for (int k = tree_dist(x, y); k > 0; --k)
                target *= kLambda;
            CHECK(-b == target);
        }
}

TEST_CASE("truncated boundary vectors")
{
    Embedding<mpq_class> e(3, kLambda, 8);
    Ray xi = Ray::parse("2,(1)");
    auto f = e.boundary_truncated(xi, 4);
    mpq_class expect = 1;
    for (int k = 0; k < 8; ++k)
        expect /= kLambda;
    CHECK(minkowski_Q(Address(), f) == -expect);

    Embedding<double> d(3, 1.25, 40);
    Ray eta = Ray::parse("(1)");
    auto fx = d.boundary_truncated(xi, 40);
    auto fe = d.boundary_truncated(eta, 40);
    CHECK(std::fabs(minkowski_B(Address(), fx, d.vertex(A("2/1"))) - d.pair_boundary_vertex(xi, A("2/1"))) <=
          d.tail_bound(40));
    CHECK(std::fabs(minkowski_B(Address(), fx, fe) - d.pair_boundary_boundary(xi, eta)) <= d.tail_bound(40));
    CHECK(d.pair_boundary_boundary(xi, xi) == 0);
}

TEST_CASE("represent is orthogonal and equivariant")
{
    Embedding<mpq_class> e(3, kLambda, 5);
    TreeAut a = translation_aut(3, standard_axis());
    std::vector<TreeAut> gs{a, a.power(-2), edge_flip_aut(3, A("3")), root_transposition(3, 1, 2) * a};
    for (const auto& g : gs) {
        BlockOp<mpq_class> op = e.represent(g);
        CHECK(op.gram_residual() == 0);
        for (const auto& v : op.domain)
            CHECK(op.apply(e.vertex(v)) == e.vertex(g.apply(v)));
    }
}

TEST_CASE("generator formula agrees with the triangular solve")
{
    Embedding<mpq_class> e(3, kLambda, 5);
    for (const char* z : {"1", "2", "3"}) {
        TreeAut flip = edge_flip_aut(3, A(z));
        BlockOp<mpq_class> gen = e.generator_op(flip);
        BlockOp<mpq_class> rep = e.represent(flip);
        CHECK(gen.gram_residual() == 0);
        for (const auto& v : rep.domain)
            CHECK(gen.column(v) == rep.column(v));
    }
}

TEST_CASE("amalgam factorization agrees with represent")
{
    Embedding<mpq_class> e(3, kLambda, 6);
    TreeAut a = translation_aut(3, standard_axis());
    for (const auto& g : {a.power(2), root_transposition(3, 2, 3) * a, edge_flip_aut(3, A("2")) * a})
        check_same_columns(e.factorized(g), e.represent(g));
}

TEST_CASE("sparse image of delta avoids the ball")
{
    Embedding<double> e(3, 1.25, 4);
    TreeAut a = translation_aut(3, standard_axis());
    TreeAut g = a.power(30);
    // pi(g) f_v = f_{gv} far beyond the truncation depth
    Address v = A("2/2");
    TreeVec<double> image = e.apply(g, e.vertex_unbounded(v));
    TreeVec<double> target = e.vertex_unbounded(g.apply(v));
    CHECK(max_coeff_gap(image, target) / target.max_abs() < 1e-12);
}

TEST_CASE("rep cache returns shared operators")
{
    Embedding<double> e(3, 1.25, 4);
    RepCache<double> cache(e);
    TreeAut a = translation_aut(3, standard_axis());
    auto first = cache.get(a);
    auto second = cache.get(a);
    CHECK(first == second);
    CHECK(cache.size() == 1);
    cache.get(a.inverse());
    CHECK(cache.size() == 2);
}

TEST_CASE("psi minimizer")
{
    RegularTree tree(3);
    KleinPoint kp{{Ray::parse("(1)"), Ray::parse("(2)")}, {0.5, 0.5}};
    CHECK(psi(kp, 1.25, Address()) == doctest::Approx(1.0));
    CHECK(psi_min(tree, kp, 1.25) == Address());

    // 0.9 lambda^-k + 0.1 lambda^k is least at k = 5 for lambda = 5/4
    kp.weights = {0.9, 0.1};
    CHECK(psi_min(tree, kp, 1.25) == A("1/1/1/1/1"));
    CHECK(psi_min_exhaustive(tree, kp, 1.25, 8) == A("1/1/1/1/1"));

    KleinPoint bad{{Ray::parse("(1)"), Ray::parse("(1)")}, {0.5, 0.5}};
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
    KleinPoint unnormalized{{Ray::parse("(1)")}, {0.5}};
    CHECK_THROWS_AS(unnormalized.validate(), InvalidInput);
}

TEST_CASE("codiameter bound")
{
    RegularTree tree(3);
    KleinPoint kp{{Ray::parse("(1)"), Ray::parse("2,(1)"), Ray::parse("3/1,(2)")}, {0.2, 0.3, 0.5}};
    Codiameter c = codiameter_check(tree, kp, 1.25);
    CHECK(c.bound == doctest::Approx(std::acosh(1.5)));
    CHECK(c.dist <= c.bound + 1e-9);
    CHECK(c.v0 == psi_min_exhaustive(tree, kp, 1.25, 10));
}

TEST_CASE("busemann compatibility")
{
    Embedding<double> e(3, 1.25, 8);
    Ray xi = Ray::parse("2,(1)");
    for (const auto& [x, y] : {std::pair{"w", "1/1"}, std::pair{"2/1/1", "3"}, std::pair{"2/2", "2/1/2"}}) {
        auto [lhs, rhs] = busemann_compat(e, xi, A(x), A(y));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        CHECK(rhs == doctest::Approx(tree_busemann(xi, A(x), A(y)) * std::log(1.25)));
    }
}

TEST_CASE("translation length scaling")
{
    Embedding<double> e(3, 2.0, 10);
    TreeAut a = translation_aut(3, standard_axis());
    for (int n = 1; n <= 8; ++n) {
        auto t = translation_length_estimate(e, a, n);
        CHECK(t.estimate == doctest::Approx(std::acosh(std::pow(2.0, n)) / n));
        CHECK(t.limit == doctest::Approx(std::log(2.0)));
        CHECK(t.within);
    }
}

TEST_CASE("relation check along the axis")
{
    Embedding<double> e(3, 1.25, 6);
    RelationSetup setup = make_relation_setup(3, 1);
    CHECK_NOTHROW(check_relation_membership(setup));
    RelationReport r = parabolic_relation_check(e, setup);
    CHECK(r.mu == doctest::Approx(-1.0));
    CHECK(r.chi_g == doctest::Approx(1.0));
    CHECK(r.chi_h == doctest::Approx(std::pow(1.25, -2)));
    CHECK(r.alpha_n == doctest::Approx(-std::pow(1.25, 2)));
    CHECK(r.residual_chi <= 1e-9);
    CHECK(r.residual_block <= 1e-9);
    CHECK_THROWS_AS(make_relation_setup(2, 1), Error);
}

TEST_CASE("finite trees embed through their regular completion")
{
    std::istringstream in("0 1\n0 2\n0 3\n3 4\n4 5\n");
    FiniteTree t = FiniteTree::parse(in, 0);
    FiniteEmbedding fe = complete_finite_tree(t);
    CHECK(fe.valence == 3);
    CHECK(fe.address.at(0) == Address());
    for (int u : t.vertices())
        for (int v : t.vertices())
            CHECK(tree_dist(fe.address.at(u), fe.address.at(v)) == t.dist(u, v));

    std::istringstream path("7 8\n");
    FiniteEmbedding p = complete_finite_tree(FiniteTree::parse(path, 7));
    CHECK(p.valence == 2);
    CHECK(p.address.at(8).depth() == 1);
}

TEST_CASE("coefficient gaps see below the zero filter")
{
    TreeVec<double> a{{Address(), 1.0}};
    TreeVec<double> b{{Address(), 1.0 + 1e-12}, {Address({1}), 2e-11}};
    CHECK((a - b).empty());
    CHECK(max_coeff_gap(a, b) == doctest::Approx(2e-11));
}
