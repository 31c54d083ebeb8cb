#include "lorentree/gelfand.hpp"

#include <doctest.h>

using namespace lorentree;

namespace {

ShellFn fn(int q, std::vector<mpq_class> c) { return ShellFn(q, std::move(c)); }

} // namespace

TEST_CASE("shell functions")
{
    CHECK(ShellFn::basis(3, 2).to_string() == "(0, 0, 1)");
    CHECK(fn(3, {1, 0, 0}).max_shell() == 0);
    CHECK(ShellFn::zero(4).is_zero());
    CHECK(spherical_phi0(4).to_string() == "(1, -1/2)");
    CHECK_THROWS_AS(ShellFn::basis(2, 1), InvalidInput);
    CHECK_THROWS_AS(ShellFn::basis(3, 2) + ShellFn::basis(4, 2), InvalidInput);
}

TEST_CASE("haar measure of balls and shells")
{
    CHECK(haar_ball(3, 0) == 1);
    CHECK(haar_ball(4, 2) == 9);
    CHECK(haar_shell(4, 2) == 6);
    CHECK(haar_shell(5, 1) == 3);
}

TEST_CASE("products of basis elements")
{
    // chi_1 * chi_1 = (q-2) 1_K0 + (q-3) chi_1
    CHECK(convolve(ShellFn::basis(3, 1), ShellFn::basis(3, 1)) == fn(3, {1}));
    CHECK(convolve(ShellFn::basis(4, 1), ShellFn::basis(4, 1)) == fn(4, {2, 1}));
    CHECK(convolve(ShellFn::basis(5, 1), ShellFn::basis(5, 1)) == fn(5, {3, 2}));
    // chi_1 * chi_2 = mu(K_1 \ K_0) chi_2
    CHECK(convolve(ShellFn::basis(4, 1), ShellFn::basis(4, 2)) == fn(4, {0, 0, 2}));
    CHECK(convolve(ShellFn::basis(4, 0), ShellFn::basis(4, 3)) == ShellFn::basis(4, 3));
}

TEST_CASE("convolution is commutative and associative")
{
    for (int q : {3, 4})
        for (int a = 0; a <= 3; ++a)
            for (int b = 0; b <= 3; ++b) {
                CHECK(commutator_residual(ShellFn::basis(q, a), ShellFn::basis(q, b)).is_zero());
                ShellFn f = fn(q, {1, mpq_class(-1, 3), 2});
                CHECK(convolve(convolve(f, ShellFn::basis(q, a)), ShellFn::basis(q, b)) ==
                      convolve(f, convolve(ShellFn::basis(q, a), ShellFn::basis(q, b))));
            }
}

TEST_CASE("phi0 is spherical")
{
    for (int q : {3, 4, 5}) {
        SphericalCheck c = check_spherical(spherical_phi0(q), 5);
        CHECK(c.ok);
        CHECK(c.constants.at(0) == 1);
        CHECK(c.constants.at(1) == -1);
        for (int m = 2; m <= 5; ++m)
            CHECK(c.constants.at(m) == 0);
    }
}

TEST_CASE("a non-spherical function fails at the first bad shell")
{
    SphericalCheck c = check_spherical(fn(3, {1, 1}), 4);
    CHECK_FALSE(c.ok);
    REQUIRE(c.failing_shell.has_value());
    CHECK(*c.failing_shell == 2);
    CHECK(c.constants.at(1) == 1);
    CHECK_THROWS_AS(check_spherical(ShellFn::basis(3, 1), 2), PreconditionFailed);
}

TEST_CASE("positive definiteness witness")
{
    // c = 1 + mu(K_1 \ K_0) / (q-2)^2 = 1 + 1/(q-2)
    CHECK(positive_definite_witness(spherical_phi0(3)) == 2);
    CHECK(positive_definite_witness(spherical_phi0(4)) == mpq_class(3, 2));
    CHECK(positive_definite_witness(spherical_phi0(5)) == mpq_class(4, 3));
    // 1_{K_1} * 1_{K_1} = mu(K_1) 1_{K_1}
    CHECK(positive_definite_witness(fn(3, {1, 1})) == 2);
    // (1, 2) * (1, 2) = (5, 4) is not proportional
    CHECK_THROWS_AS(positive_definite_witness(fn(3, {1, 2})), PreconditionFailed);
}

TEST_CASE("wreath model")
{
    WreathModel m(3, 2);
    CHECK(m.elements().size() == 8);
    CHECK(m.index_of(0) == 1);
    CHECK(m.index_of(1) == 2);
    CHECK(m.index_of(2) == 4);
    CHECK(m.shell_of_leaf(m.base_leaf()) == 0);
}

TEST_CASE("oracle convolution matches the closed form")
{
    for (int q : {3, 4}) {
        WreathModel m(q, 2);
        for (int a = 0; a <= 2; ++a)
            for (int b = 0; b <= 2; ++b) {
                ShellFn f = ShellFn::basis(q, a);
                ShellFn g = ShellFn::basis(q, b);
                CHECK(wreath_oracle_convolve(f, g, m) == convolve(f, g));
                CHECK(wreath_oracle_convolve_check(f, g, m) == convolve(f, g));
            }
        CHECK_THROWS_AS(wreath_oracle_convolve(ShellFn::basis(q, 3), ShellFn::basis(q, 1), m), DepthExceeded);
    }
}

TEST_CASE("spherical functions form a line")
{
    for (int q : {3, 4}) {
        DimensionOne d = spherical_space(WreathModel(q, 2));
        REQUIRE(d.basis.size() == 1);
        const auto& v = d.basis[0];
        REQUIRE(sgn(v[0]) != 0);
        ShellFn phi = spherical_phi0(q);
        for (int s = 0; s <= 2; ++s)
            CHECK(v[static_cast<std::size_t>(s)] / v[0] == phi.at(s));
    }
}
