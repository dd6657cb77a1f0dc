#include "doctest.h"
#include "sodatlas/intmath.hpp"

using namespace sodatlas;

TEST_CASE("determinant and rank")
{
    CHECK(determinant({{2, 1}, {1, 1}}) == 1);
    CHECK(determinant({{0, 1, 2}, {1, 0, 3}, {4, -3, 8}}) == -2);
    CHECK(determinant({{1, 2}, {2, 4}}) == 0);
    CHECK(rank({{1, 2}, {2, 4}, {0, 1}}) == 2);
}

TEST_CASE("unimodular inverse round trip")
{
    const Mat a = {{1, 3, 6}, {0, 1, 3}, {0, 0, 1}};
    const Mat inv = inverse_unimodular(a);
    CHECK(multiply(a, inv) == identity(3));
    CHECK(inv == Mat{{1, -3, 3}, {0, 1, -3}, {0, 0, 1}});
    CHECK_THROWS_AS(inverse_unimodular({{2, 0}, {0, 1}}), std::domain_error);
    CHECK(power(a, -2) == multiply(inv, inv));
    CHECK(power(a, 0) == identity(3));
}

TEST_CASE("kernel is saturated")
{
    // x + 2y + 3z = 0 has the saturated kernel spanned by (2,-1,0),(3,0,-1).
    const Mat k = kernel_basis({{1, 2, 3}}, 3);
    REQUIRE(k.size() == 2);
    for (const auto& row : k)
        CHECK(row[0] + 2 * row[1] + 3 * row[2] == 0);
    CHECK(same_row_lattice(k, {{2, -1, 0}, {3, 0, -1}}, 3));
    // 2x = 0 over Z^2: kernel is the y axis.
    CHECK(same_row_lattice(kernel_basis({{2, 0}}, 2), {{0, 1}}, 2));
}

TEST_CASE("lattice membership")
{
    const Mat b = {{2, 0}, {0, 3}};
    CHECK(solve_in_row_lattice(b, {4, 9}) == Vec{2, 3});
    CHECK_FALSE(solve_in_row_lattice(b, {1, 0}).has_value());
    CHECK_FALSE(same_row_lattice({{1, 0}, {0, 1}}, {{2, 0}, {0, 1}}, 2));
}

TEST_CASE("smith invariants")
{
    CHECK(smith_invariants({{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}}) == Vec{2, 6, 12});
    CHECK(smith_invariants({{2}}) == Vec{2});
    CHECK(smith_invariants({{0, 0}}).empty());
    CHECK(smith_invariants({{1, 1}, {-1, -1}}) == Vec{1});
}

TEST_CASE("rational arithmetic")
{
    const Rational a(1, 3), b(-1, 6);
    CHECK(a + b == Rational(1, 6));
    CHECK(a * b == Rational(-1, 18));
    CHECK(a / b == Rational(-2));
    CHECK(Rational(7, 2).floor() == 3);
    CHECK(Rational(-7, 2).floor() == -4);
    CHECK(Rational(-7, 2).ceil() == -3);
    CHECK(b < a);
}

TEST_CASE("checked arithmetic and isqrt")
{
    CHECK_THROWS_AS(mul_checked(INT64_MAX, 2), OverflowError);
    CHECK(isqrt_floor(0) == 0);
    CHECK(isqrt_floor(15) == 3);
    CHECK(isqrt_floor(16) == 4);
    CHECK(gcd(-12, 18) == 6);
}
