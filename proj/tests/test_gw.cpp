#include <doctest.h>

#include "support/kontsevich.hpp"
#include "tautgw/gw.hpp"

using namespace tautgw;

TEST_CASE("plane curve counts match the quadratic recursion")
{
    auto p2 = TargetModel::projective_space(2);
    auto n = oracle::kontsevich_numbers(5);
    for (int d = 1; d <= 5; ++d) {
        std::vector<int> pts(static_cast<std::size_t>(3 * d - 1), 2);
        CHECK(pure_gw(p2, d, pts) == n[static_cast<std::size_t>(d)]);
    }
    CHECK(n[4] == Rational(620));
    CHECK(n[5] == Rational(87304));
}

TEST_CASE("projective line invariants")
{
    auto p1 = TargetModel::projective_space(1);
    CHECK(pure_gw(p1, 1, {}) == Rational(1));
    CHECK(pure_gw(p1, 1, {1, 1, 1}) == Rational(1));
    CHECK(pure_gw(p1, 1, {0, 1}) == Rational(0));
    CHECK(pure_gw(p1, 0, {0, 0, 1}) == Rational(1));
    CHECK(pure_gw(p1, 2, {1, 1, 1, 1}) == Rational(0));
}

TEST_CASE("lines and conics in space")
{
    auto p3 = TargetModel::projective_space(3);
    CHECK(pure_gw(p3, 1, {3, 3}) == Rational(1));
    CHECK(pure_gw(p3, 1, {2, 2, 2, 2}) == Rational(2));
    CHECK(pure_gw(p3, 2, std::vector<int>(8, 2)) == Rational(92));
}

TEST_CASE("point target and unstable keys")
{
    auto pt = TargetModel::projective_space(0);
    CHECK(pure_gw(pt, 0, {0, 0, 0}) == Rational(1));
    CHECK(pure_gw(pt, 1, {0, 0, 0}) == Rational(0));
    auto p2 = TargetModel::projective_space(2);
    CHECK(pure_gw(p2, 0, {2, 2}) == Rational(0));
}

TEST_CASE("gromov-witten potential of the plane")
{
    auto p2 = TargetModel::projective_space(2);
    auto reg = potential_registry(*p2);
    auto tr = Truncation::uniform(*reg, 5, 2);
    auto f = gw_potential_series(p2, reg, tr);
    // x2^{3d-1}/(3d-1)! q^d
    CHECK(f.coefficient({{"x2", 2}, {"q", 1}}) == Rational(1, 2));
    CHECK(f.coefficient({{"x2", 5}, {"q", 2}}) == Rational(1, 120));
    CHECK(f.coefficient({{"x0", 1}, {"x1", 2}}) == Rational(1, 2));
    CHECK(f.homogeneous_grading() == 2 * (2 - 3));
}
