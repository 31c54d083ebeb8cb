#include "lorentree/trees.hpp"

#include <doctest.h>
#include <sstream>

using namespace lorentree;

namespace {

Address A(const std::string& s) { return Address::parse(s); }

} // namespace

TEST_CASE("addresses")
{
    CHECK(Address().to_string() == "w");
    CHECK(A("w").is_root());
    CHECK(A("").is_root());
    CHECK(A("1/2/1").to_string() == "1/2/1");
    CHECK(A("1/2/1").parent() == A("1/2"));
    CHECK(A("1").child(2) == A("1/2"));
    CHECK(A("1/2/1").has_prefix(A("1/2")));
    CHECK_FALSE(A("1/2").has_prefix(A("2")));
    CHECK_THROWS_AS(A("1/x"), InvalidInput);
    CHECK_THROWS_AS(A("1//2"), InvalidInput);
}

TEST_CASE("ball sizes")
{
    RegularTree t(3);
    CHECK(t.ball(4).size() == 46);
    CHECK(t.ball(6).size() == 190);
    CHECK(t.ball(3).size() == 22);
    CHECK(RegularTree::ball_size(4, 2) == 1 + 4 + 12);
    CHECK(t.ball(1) == std::vector<Address>{A("w"), A("1"), A("2"), A("3")});
}

TEST_CASE("labels are validated")
{
    RegularTree t(3);
    CHECK_NOTHROW(t.validate(A("3/2")));
    CHECK_THROWS_AS(t.validate(A("4")), InvalidInput);
    CHECK_THROWS_AS(t.validate(A("1/3")), InvalidInput);
    CHECK_THROWS_AS(t.validate(Ray::parse("(3)")), InvalidInput);
}

TEST_CASE("ports")
{
    RegularTree t(3);
    CHECK(t.ports(A("w")) == std::vector<int>{1, 2, 3});
    CHECK(t.ports(A("2")) == std::vector<int>{0, 1, 2});
    CHECK(t.port_toward(A("2/1"), A("2")) == 0);
    CHECK(t.through_port(A("2"), 2) == A("2/2"));
    CHECK(t.neighbors(A("1")).size() == 3);
}

TEST_CASE("rays")
{
    Ray r = Ray::parse("1/2,(1)");
    CHECK(r.vertex(0) == A("w"));
    CHECK(r.vertex(4) == A("1/2/1/1"));
    CHECK(r.to_string() == "1/2,(1)");
    Ray p = Ray::parse("(2/1)");
    CHECK(p.vertex(3) == A("2/1/2"));
    Ray a = Ray::parse("3/1");
    CHECK(a.approximate);
    CHECK(a.known_length() == 2);
    CHECK_THROWS_AS(Ray::parse("1,(2"), InvalidInput);
}

TEST_CASE("distances and gromov products")
{
    CHECK(tree_dist(A("1/2"), A("1/1")) == 2);
    CHECK(tree_dist(A("1"), A("2/1")) == 3);
    CHECK(tree_dist(A("w"), A("3/1/1")) == 3);
    CHECK(gromov_product(A("1/2"), A("1/1")) == 1);
    CHECK(gromov_product(A("1/1/2"), Ray::parse("(1)")) == 2);
    CHECK(gromov_product(Ray::parse("(1)"), Ray::parse("2,(1)")) == 0);
    CHECK(gromov_product(Ray::parse("1,(2)"), Ray::parse("1/2,(1)")) == 2);
    CHECK(gromov_product(Ray::parse("(1)"), Ray::parse("(1)")) == kInfiniteProduct);
}

TEST_CASE("tree busemann")
{
    Ray xi = Ray::parse("(1)");
    CHECK(tree_busemann(xi, A("1/1"), A("w")) == -2);
    CHECK(tree_busemann(xi, A("2"), A("w")) == 1);
    CHECK(tree_busemann(xi, A("1/2"), A("w")) == 0);
    // cocycle
    CHECK(tree_busemann(xi, A("2/2"), A("1/1/2")) ==
          tree_busemann(xi, A("2/2"), A("3")) + tree_busemann(xi, A("3"), A("1/1/2")));
}

TEST_CASE("permutation completion")
{
    CHECK(complete_permutation(3, {{0, 2}}) == Perm{2, 0, 1});
    CHECK(complete_permutation(3, {}) == Perm{0, 1, 2});
    CHECK_THROWS_AS(complete_permutation(3, {{0, 1}, {2, 1}}), InvalidInput);
}

TEST_CASE("portraits act on addresses")
{
    TreeAut swap = TreeAut::portrait(3, Address(), {{Address(), Perm{1, 0, 2}}});
    CHECK(swap.apply(A("1/2")) == A("2/2"));
    CHECK(swap.apply(A("3/1")) == A("3/1"));
    TreeAut t = root_transposition(3, 1, 2);
    for (const auto& v : RegularTree(3).ball(3))
        CHECK(t.apply(v) == swap.apply(v));
}

TEST_CASE("automorphisms preserve adjacency")
{
    const int q = 3;
    RegularTree tree(q);
    Axis axis = standard_axis();
    std::vector<TreeAut> gs{translation_aut(q, axis), edge_flip_aut(q, A("2")),
                            root_transposition(q, 2, 3) * translation_aut(q, axis).power(-2)};
    for (const auto& g : gs)
        for (const auto& v : tree.ball(4)) {
            if (!v.is_root())
                CHECK(tree_dist(g.apply(v), g.apply(v.parent())) == 1);
            CHECK(g.apply_inverse(g.apply(v)) == v);
            CHECK(g.inverse().apply(g.apply(v)) == v);
        }
}

TEST_CASE("standard axis and its translation")
{
    Axis axis = standard_axis();
    CHECK(axis.at(0) == A("w"));
    CHECK(axis.at(2) == A("1/1"));
    CHECK(axis.at(-1) == A("2"));
    CHECK(axis.at(-3) == A("2/1/1"));
    CHECK(axis.index_of(A("2/1")) == -2);
    CHECK_FALSE(axis.index_of(A("1/2")).has_value());

    TreeAut a = translation_aut(3, axis);
    for (int k = -4; k <= 4; ++k)
        CHECK(a.apply(axis.at(k)) == axis.at(k + 1));
    CHECK(a.power(3).apply(A("w")) == A("1/1/1"));
}

TEST_CASE("edge flips are involutions")
{
    TreeAut f = edge_flip_aut(3, A("1"));
    CHECK(f.apply(A("w")) == A("1"));
    CHECK(f.apply(A("1")) == A("w"));
    for (const auto& v : RegularTree(3).ball(4))
        CHECK(f.apply(f.apply(v)) == v);
}

TEST_CASE("local permutations round trip through a portrait")
{
    TreeAut g = root_transposition(3, 1, 3) * translation_aut(3, standard_axis());
    std::map<Address, Perm> perms;
    for (const auto& v : RegularTree(3).ball(5))
        perms[v] = g.local_perm(v);
    TreeAut rebuilt = TreeAut::portrait(3, g.base_image(), perms, 5);
    for (const auto& v : RegularTree(3).ball(5))
        CHECK(rebuilt.apply(v) == g.apply(v));
}

TEST_CASE("horosphere points")
{
    RegularTree tree(3);
    Axis axis = standard_axis();
    CHECK(horosphere_points(tree, axis, 0, 1, 10) == std::set<Address>{A("1/2")});
    CHECK(horosphere_points(tree, axis, 0, 2, 10) == std::set<Address>{A("1/1/2/1"), A("1/1/2/2")});
    // (q - 2)(q - 1)^(l - 1) points
    CHECK(horosphere_points(RegularTree(4), axis, 1, 2, 10).size() == 2 * 3);
    CHECK_THROWS_AS(horosphere_points(tree, axis, 0, 3, 4), DepthExceeded);

    auto pts = horosphere_points(tree, axis, 0, 2, 10);
    CHECK(stabilizer_orbit(tree, axis, 0, 0, A("1/1/2/1"), 10) == pts);
    auto deeper = horosphere_points(RegularTree(4), axis, 2, 2, 12);
    CHECK(stabilizer_orbit(RegularTree(4), axis, 1, 2, *deeper.begin(), 12) == deeper);
    CHECK(stabilizer_orbit(tree, axis, 0, 0, A("w"), 10) == std::set<Address>{A("w")});
    CHECK_THROWS(stabilizer_orbit(tree, axis, 0, 0, A("2/2"), 10));
}

TEST_CASE("finite trees")
{
    std::istringstream in("# a star with a tail\n0 1\n0 2\n0 3\n3 4\n");
    FiniteTree t = FiniteTree::parse(in, 0);
    CHECK(t.base() == 0);
    CHECK(t.vertices().size() == 5);
    CHECK(t.max_degree() == 3);
    CHECK(t.dist(1, 4) == 3);
    CHECK(t.depth(4) == 2);
    CHECK(t.path_from_base(4) == std::vector<int>{0, 3, 4});

    std::istringstream cycle("0 1\n1 2\n2 0\n");
    CHECK_THROWS_AS(FiniteTree::parse(cycle), InvalidInput);
    std::istringstream split("0 1\n2 3\n");
    CHECK_THROWS_AS(FiniteTree::parse(split), InvalidInput);
    std::istringstream junk("0 x\n");
    CHECK_THROWS_AS(FiniteTree::parse(junk), InvalidInput);
}

TEST_CASE("rooted wreath products")
{
    RootedWreath t(2, 2);
    CHECK(t.vertex_count() == 7);
    CHECK(t.leaves().size() == 4);
    CHECK(t.elements().size() == 8);
    CHECK(RootedWreath(3, 2).elements().size() == 1296);
    CHECK(t.transpositions().size() == 3);
    auto orbits = RootedWreath::orbits(t.transpositions(), t.leaves());
    CHECK(orbits.size() == 1);
}
