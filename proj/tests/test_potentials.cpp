#include <doctest.h>

#include "tautgw/potentials.hpp"

using namespace tautgw;

namespace {

Rational coef(const QSeries& s, std::initializer_list<std::pair<std::string_view, int>> mono)
{
    return s.coefficient(mono);
}

} // namespace

TEST_CASE("projective line potential in the primary variables")
{
    auto spec = PotentialSpec::make(TargetModel::projective_space(1), {"x0", "x1"}, 6, 3);
    QSeries h = build_H_series(spec);
    // q exp(x1): only degree one contributes
    QSeries qexp(spec.reg, spec.trunc);
    qexp.add_term({2, 1, 0}, Rational(1, 2));
    for (int k = 0; k <= 6; ++k)
        qexp.add_term({0, k, 1}, Rational(1) / factorial(k));
    CHECK(h == qexp);
}

TEST_CASE("five-variable potential agrees with the closed form")
{
    auto spec = cp1_five_variable_spec(3, 6, 5);
    QSeries h = build_H_series(spec);
    QSeries closed = cp1_closed_form_series(3, spec);
    CHECK(h == closed);
    CHECK(coef(h, {{"q", 2}, {"s0_1", 2}}) == Rational(1, 4));
    CHECK(coef(h, {{"q", 1}}) == Rational(1));
    CHECK(coef(h, {{"x0", 3}, {"s0_1", 1}}) == Rational(1, 6));
}

TEST_CASE("worker count does not change the potential")
{
    auto spec = cp1_five_variable_spec(2, 4, 4);
    CHECK(build_H_series(spec, 1) == build_H_series(spec, 3));
}

TEST_CASE("h sequence")
{
    auto h = cp1_h_sequence(4);
    REQUIRE(h.size() == 4);
    CHECK(h[0] == Rational(1));
    CHECK(h[1] == Rational(1, 2));
    CHECK(h[2] == Rational(4));
    CHECK(h[3] == Rational(120));
    // coefficients printed in the first few terms of the potential
    CHECK(h[2] / factorial(4) == Rational(1, 6));
    CHECK(h[3] / factorial(6) == Rational(1, 6));
    CHECK_THROWS_AS(cp1_h_sequence(0), std::invalid_argument);
}

TEST_CASE("kappa powers on the projective line equal h")
{
    auto p1 = TargetModel::projective_space(1);
    auto h = cp1_h_sequence(5);
    for (int n = 1; n <= 5; ++n) {
        MultiIndex k(-1);
        if (n > 1)
            k.add(0, 1, 2 * n - 2);
        CHECK(evaluate(CorrelatorKey(p1, MultiIndex(0), k, Degree(n))) == h[static_cast<std::size_t>(n - 1)]);
    }
}

TEST_CASE("penultimate equation")
{
    CHECK(cp1_penult_residual(4).is_zero());
    auto h = cp1_h_sequence(4);
    h[2] += Rational(1);
    CHECK_FALSE(cp1_penult_residual(4, h).is_zero());
}

TEST_CASE("closed form puncture and dilaton")
{
    auto spec = cp1_five_variable_spec(3, 5);
    QSeries ht = cp1_closed_form_series(3, spec, false);
    for (const auto& r : cp1_puncture_dilaton_residuals(ht))
        CHECK_MESSAGE(r.residual.is_zero(), r.relation);
}

TEST_CASE("WDVV for the primary potentials")
{
    for (int r : {1, 2}) {
        auto target = TargetModel::projective_space(r);
        std::vector<std::string> names;
        for (int a = 0; a <= r; ++a)
            names.push_back("x" + std::to_string(a));
        auto spec = PotentialSpec::make(target, names, 5, r == 1 ? 3 : 3, 7);
        QSeries f = build_H_series(spec);
        CHECK(wdvv_residuals(f, *target).empty());
        CHECK(wdvv_residual(f, *target).is_zero());
        if (r == 2) {
            QSeries bad = f;
            bad.add_term(bad.exponents({{"x2", 4}, {"q", 1}}), Rational(1));
            CHECK_FALSE(wdvv_residual(bad, *target).is_zero());
        }
    }
}

TEST_CASE("differential equations for the descendant potential")
{
    auto p1 = TargetModel::projective_space(1);
    auto spec = PotentialSpec::make(p1, {"x0", "x1", "t1_0", "t1_1", "s-1_1", "s0_0", "s0_1", "s1_1"}, 4, 2, 5);
    QSeries h = build_H_series(spec);
    auto residuals = trr_pde_residuals(h, *p1);
    CHECK(residuals.size() > 20);
    for (const auto& r : residuals)
        CHECK_MESSAGE(r.residual.is_zero(), r.relation);

    QSeries bad = h;
    bad.add_term(bad.exponents({{"t1_0", 1}, {"x1", 2}, {"q", 1}}), Rational(1, 3));
    bool detected = false;
    for (const auto& r : trr_pde_residuals(bad, *p1))
        detected = detected || !r.residual.is_zero();
    CHECK(detected);
}

TEST_CASE("missing lower variables are reported")
{
    auto p1 = TargetModel::projective_space(1);
    auto spec = PotentialSpec::make(p1, {"x0", "x1", "t2_1"}, 2, 1);
    QSeries h = build_H_series(spec);
    CHECK_THROWS_AS(trr_pde_residuals(h, *p1), std::invalid_argument);
}

TEST_CASE("potential gradings")
{
    for (int r : {1, 2}) {
        auto target = TargetModel::projective_space(r);
        std::vector<std::string> names{"x0", "x1", "t1_0", "s0_1"};
        auto spec = PotentialSpec::make(target, names, 3, 2);
        QSeries h = build_H_series(spec);
        REQUIRE_FALSE(h.is_zero());
        CHECK(h.homogeneous_grading() == std::optional<int>(2 * (r - 3)));
    }
}

TEST_CASE("closed form with a point-free registry")
{
    auto spec = PotentialSpec::make(TargetModel::projective_space(1), {"x0", "x1", "q"}, 4, 2);
    QSeries ht = cp1_closed_form_series(2, spec, true);
    CHECK(ht == build_H_series(spec));
    CHECK_THROWS_AS(cp1_closed_form_series(2, PotentialSpec::make(TargetModel::projective_space(1), {"t1_0"}, 2, 1)),
                    std::invalid_argument);
}

TEST_CASE("series json")
{
    auto spec = PotentialSpec::make(TargetModel::projective_space(1), {"x0", "x1"}, 2, 1);
    auto j = series_to_json(build_H_series(spec));
    CHECK(j["vars"] == nlohmann::json({"x0", "x1", "q"}));
    CHECK(j["terms"].size() == 4);
    CHECK(j["terms"][0]["coef"] == "1/1");
}

TEST_CASE("WDVV with kappa variables as parameters")
{
    auto p1 = TargetModel::projective_space(1);
    auto spec = PotentialSpec::make(p1, {"x0", "x1", "s0_1", "s-1_1", "s0_0"}, 5, 3, 7);
    QSeries h = build_H_series(spec);
    CHECK(wdvv_residual(h, *p1).is_zero());
    auto p2 = TargetModel::projective_space(2);
    auto spec2 = PotentialSpec::make(p2, {"x0", "x1", "x2", "s0_2", "s1_1"}, 6, 2, 8);
    CHECK(wdvv_residuals(build_H_series(spec2), *p2).empty());
}

TEST_CASE("degree-zero part is the cup product")
{
    auto p2 = TargetModel::projective_space(2);
    auto spec = PotentialSpec::make(p2, {"x0", "x1", "x2", "s0_1", "s0_2"}, 3, 0, 4);
    QSeries h = build_H_series(spec);
    // ⟨e_a e_b e_c⟩_0 = δ_{a+b+c,2}; κ_{0,α} at three points acts as e_α
    CHECK(coef(h, {{"x0", 2}, {"x2", 1}}) == Rational(1, 2));
    CHECK(coef(h, {{"x0", 1}, {"x1", 2}}) == Rational(1, 2));
    CHECK(coef(h, {{"x0", 3}, {"s0_2", 1}}) == Rational(1, 6));
    CHECK(coef(h, {{"x0", 2}, {"x1", 1}, {"s0_1", 1}}) == Rational(1, 2));
    CHECK(coef(h, {{"x1", 3}}) == Rational(0));
}

TEST_CASE("penultimate equation below the first recursion step")
{
    CHECK(cp1_penult_residual(1).is_zero());
}
