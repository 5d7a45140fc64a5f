#include <doctest.h>

#include <string>
#include <vector>

#include "tautgw/series.hpp"

using namespace tautgw;

namespace {

std::shared_ptr<const VarRegistry> cp1_registry(std::vector<std::string> names)
{
    std::vector<int> gr{0, 2};
    return VarRegistry::from_names(names, gr, 2);
}

} // namespace

TEST_CASE("variable names and gradings")
{
    auto reg = cp1_registry({"x0", "x1", "t1_0", "s-1_1", "s0_0", "q"});
    CHECK((*reg)[0].grading == -2);
    CHECK((*reg)[1].grading == 0);
    CHECK((*reg)[2].grading == 0);
    CHECK((*reg)[3].grading == 0);
    CHECK((*reg)[4].grading == 0);
    CHECK((*reg)[5].grading == -4);
    CHECK(reg->find("t0_1") == reg->find("x1"));
    CHECK((*reg)[3].name() == "s-1_1");
    CHECK_THROWS_AS(parse_var_name("s-2_0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_var_name("y1"), std::invalid_argument);
}

TEST_CASE("registry rejects duplicates")
{
    std::vector<int> gr{0, 2};
    std::vector<std::string> names{"x0", "t0_0"};
    CHECK_THROWS_AS(VarRegistry::from_names(names, gr, 2), std::invalid_argument);
}

TEST_CASE("truncated product and exp")
{
    auto reg = cp1_registry({"x0", "x1", "q"});
    auto tr = Truncation::uniform(*reg, 3, 2);
    auto x = QSeries::variable(reg, tr, "x0");
    auto q = QSeries::variable(reg, tr, "q");
    auto e = exp_series(x);
    CHECK(e.coefficient({{"x0", 3}}) == Rational(1, 6));
    auto p = q * q * q;
    CHECK(p.is_zero());
    CHECK_THROWS_AS(e.coefficient({{"x0", 4}}), std::out_of_range);
    CHECK_THROWS_AS(exp_series(e), std::invalid_argument);
}

TEST_CASE("total degree bound")
{
    auto reg = cp1_registry({"x0", "x1"});
    auto tr = Truncation::uniform(*reg, 6, 0, 2);
    auto s = QSeries::variable(reg, tr, "x0") + QSeries::variable(reg, tr, "x1");
    auto sq = s * s * s;
    CHECK(sq.is_zero());
    CHECK(enumerate_monomials(*reg, tr).size() == 6);
}

TEST_CASE("derivatives and grading")
{
    auto reg = cp1_registry({"x0", "x1", "q"});
    auto tr = Truncation::uniform(*reg, 4, 3);
    auto f = QSeries::monomial(reg, tr, {2, 1, 1}, Rational(3));
    auto fx = f.partial_derivative("x0");
    CHECK(fx.coefficient({{"x0", 1}, {"x1", 1}, {"q", 1}}) == Rational(6));
    CHECK(f.q_log_derivative() == f);
    CHECK(f.homogeneous_grading() == -8);
}

TEST_CASE("mismatched truncations are refused")
{
    auto reg = cp1_registry({"x0", "q"});
    auto a = QSeries::variable(reg, Truncation::uniform(*reg, 3, 2), "x0");
    auto b = QSeries::variable(reg, Truncation::uniform(*reg, 2, 2), "x0");
    CHECK_THROWS_AS(a + b, std::invalid_argument);
    auto c = a.restricted(meet(a.truncation(), b.truncation())) + b;
    CHECK(c.coefficient({{"x0", 1}}) == Rational(2));
}
