#include <doctest.h>

#include "tautgw/correlators.hpp"

using namespace tautgw;

namespace {

TargetPtr p1() { return TargetModel::projective_space(1); }
TargetPtr p2() { return TargetModel::projective_space(2); }

CorrelatorKey key(TargetPtr t, std::vector<std::array<int, 3>> tau, std::vector<std::array<int, 3>> kappa, int d)
{
    MultiIndex m(0), p(-1);
    for (auto [a, al, k] : tau)
        m.add(a, al, k);
    for (auto [a, al, k] : kappa)
        p.add(a, al, k);
    return CorrelatorKey(std::move(t), m, p, Degree(d));
}

} // namespace

TEST_CASE("multi-index sizes")
{
    MultiIndex m(0);
    m.add(0, 1, 2).add(2, 0);
    CHECK(m.norm() == 3);
    CHECK(m.weight() == 2);
    MultiIndex p(-1);
    p.add(-1, 1).add(1, 1, 2);
    CHECK(p.norm() == 2);
    CHECK(p.size() == 3);
    CHECK(p.weight() == 2);
    CHECK(p.factorial() == Rational(2));
    CHECK_THROWS_AS(m.add(-1, 0), std::invalid_argument);
    MultiIndex sub(0);
    sub.add(0, 1);
    CHECK(multi_binomial(m, sub) == Rational(2));
}

TEST_CASE("selection rule")
{
    CHECK(selection(key(p1(), {{0, 1, 2}}, {}, 1)));
    CHECK_FALSE(selection(key(p1(), {{0, 0, 3}}, {}, 0)));
    CHECK(selection(key(p1(), {}, {{0, 1, 2}}, 2)));
    CHECK(expected_dimension(key(p1(), {{0, 1, 2}}, {}, 1)) == 2);
}

TEST_CASE("values read off the projective line potential")
{
    CHECK(evaluate(key(p1(), {{0, 0, 2}, {0, 1, 1}}, {}, 0)) == Rational(1));
    CHECK(evaluate(key(p1(), {}, {{0, 1, 2}}, 2)) == Rational(1, 2));
    CHECK(evaluate(key(p1(), {}, {{0, 1, 2}}, 1)) == Rational(0));
    CHECK(evaluate(key(p1(), {}, {}, 1)) == Rational(1));
    CHECK(evaluate(key(p1(), {{0, 1, 3}}, {}, 1)) == Rational(1));
}

TEST_CASE("kappa_{0,0} counts points minus two")
{
    CHECK(evaluate(key(p1(), {{0, 1, 2}}, {{0, 0, 1}}, 1)) == Rational(0));
    CHECK(evaluate(key(p1(), {{0, 0, 2}, {0, 1, 1}}, {{0, 0, 1}}, 0)) == Rational(1));
    CHECK(evaluate(key(p1(), {{0, 1, 3}}, {{0, 0, 1}}, 1)) == Rational(1));
    CHECK(evaluate(key(p1(), {{0, 1, 4}}, {{0, 0, 1}}, 1)) == Rational(2));
    CHECK(evaluate(key(p1(), {{0, 0, 4}}, {{1, 1, 1}}, 0)) == Rational(1));
}

TEST_CASE("kappa relation does not depend on co-pivots")
{
    auto k = key(p1(), {{0, 0, 2}, {0, 1, 1}}, {{0, 0, 1}}, 0);
    auto a = apply_trr_kappa(k, {0, 0}, std::make_pair(Slot{0, 0}, Slot{0, 0}));
    auto b = apply_trr_kappa(k, {0, 0}, std::make_pair(Slot{0, 0}, Slot{0, 1}));
    CHECK(evaluate(a) == Rational(1));
    CHECK(evaluate(b) == Rational(1));
    CHECK_THROWS_AS(apply_trr_kappa(key(p1(), {{0, 1, 1}}, {{0, 1, 1}}, 1), {0, 1}), std::invalid_argument);
}

TEST_CASE("psi relation on a small key")
{
    auto k = key(p1(), {{1, 0, 1}, {0, 1, 2}}, {}, 1);
    auto rhs = apply_trr_psi(k, {1, 0}, {0, 1}, {0, 1});
    CHECK(evaluate(rhs) == evaluate(k));
    CHECK(evaluate(k) == Rational(0));
    auto k0 = key(p1(), {{1, 0, 1}, {0, 0, 1}, {0, 1, 1}}, {}, 0);
    CHECK(evaluate(apply_trr_psi(k0, {1, 0}, {0, 0}, {0, 1})) == Rational(0));
    CHECK_THROWS_AS(apply_trr_psi(k, {0, 1}, {0, 1}, {1, 0}), std::invalid_argument);
}

TEST_CASE("psi relation bookkeeping")
{
    // two copies of τ_0^1 outside the pivots; splitting one off weighs 2
    auto k = key(p2(), {{1, 1, 1}, {0, 2, 1}, {0, 1, 3}}, {}, 1);
    auto rhs = apply_trr_psi(k, {1, 1}, {0, 2}, {0, 1});
    bool saw_two = false;
    for (const auto& term : rhs.terms())
        if (term.coef == Rational(2) && term.factors.size() == 2)
            saw_two = true;
    CHECK(saw_two);
    CHECK(evaluate(k) != Rational(0));
    CHECK(evaluate(rhs) == evaluate(k));
}

TEST_CASE("puncture and dilaton analogue")
{
    auto k = key(p1(), {{1, 0, 1}, {0, 1, 2}}, {}, 1);
    auto c = apply_puncture_dilaton(k, {1, 0});
    CHECK(evaluate(c) == Rational(0));
    auto k2 = key(p1(), {{0, 1, 1}}, {{0, 1, 1}}, 1);
    auto c2 = apply_puncture_dilaton(k2, {0, 1});
    REQUIRE(c2.size() == 1);
    CHECK(c2.terms()[0].factors[0].kappa.count(-1, 1) == 1);
    CHECK_THROWS_AS(apply_puncture_dilaton(key(p1(), {{1, 0, 1}, {0, 1, 2}}, {}, 0), {1, 0}), std::invalid_argument);
}

TEST_CASE("kappa_{-1} lifts to an extra insertion")
{
    auto k = key(p1(), {{0, 1, 2}}, {{-1, 1, 1}}, 1);
    auto g = lift_kappa_minus_one(k);
    CHECK(g.classes == std::vector<int>{1, 1, 1});
    CHECK(evaluate(k) == Rational(1));
    CHECK(evaluate(key(p1(), {{0, 0, 2}, {0, 1, 1}}, {{-1, 1, 1}}, 0)) == Rational(0));
    auto k3 = key(p2(), {{0, 2, 2}}, {{-1, 1, 1}}, 2);
    CHECK(evaluate(k3) == Rational(2) * evaluate(key(p2(), {{0, 2, 2}}, {}, 2)));
    CHECK_THROWS_AS(lift_kappa_minus_one(key(p1(), {{1, 1, 1}}, {}, 1)), std::invalid_argument);
}

TEST_CASE("unstable degree-zero keys vanish")
{
    CHECK(evaluate(key(p2(), {{0, 2, 1}, {0, 0, 1}}, {{0, 2, 1}}, 0)) == Rational(0));
    CHECK(evaluate(key(p2(), {}, {{0, 2, 1}}, 0)) == Rational(0));
}

TEST_CASE("reduction count and json round trip")
{
    auto j = nlohmann::json::parse(R"({"r":2,"degree":3,"tau":[[0,2,8]],"kappa":[]})");
    auto k = key_from_json(j);
    clear_correlator_cache();
    auto e = evaluate_counted(k);
    CHECK(e.value == Rational(12));
    CHECK(e.reductions >= 1);
    CHECK(key_from_json(key_to_json(k)) == k);
    CHECK_THROWS_AS(key_from_json(nlohmann::json::parse(R"({"degree":1})")), std::invalid_argument);
}

TEST_CASE("tree integration reproduces kappa_{0,0} = n - 2")
{
    auto t = p1();
    auto pres = kappa_boundary_presentation(3, 1, 0, 0);
    CHECK(integrate_tree_sum(pres, t, {{1, 1}, {2, 1}, {3, 1}}) == Rational(1));
    auto pres4 = kappa_boundary_presentation(4, 1, 0, 0);
    CHECK(integrate_tree_sum(pres4, t, {{1, 1}, {2, 1}, {3, 1}, {4, 1}}) == Rational(2));
}

TEST_CASE("tree integration of psi powers matches the evaluator")
{
    auto t = p2();
    // ψ_1^2 on M_{0,4}(P^2,1) against points and lines
    auto pres = psi_boundary_presentation(4, 1, 2);
    auto direct = key(t, {{2, 2, 1}, {0, 2, 1}, {0, 0, 2}}, {}, 1);
    Rational via_trees = integrate_tree_sum(pres, t, {{1, 2}, {2, 2}, {3, 0}, {4, 0}});
    CHECK(via_trees == evaluate(direct));
    CHECK(via_trees != Rational(0));
    int nonzero = 0;
    for (int n = 3; n <= 4; ++n)
        for (int a = 0; a <= 2; ++a)
            for (int alpha = 0; alpha < 3; ++alpha) {
                auto kp = kappa_boundary_presentation(n, 1, a, alpha);
                int combos = 1;
                for (int i = 0; i < n; ++i)
                    combos *= 3;
                for (int c = 0; c < combos; ++c) {
                    std::map<int, int> classes;
                    MultiIndex m(0), p(-1);
                    p.add(a, alpha);
                    for (int i = 0, x = c; i < n; ++i, x /= 3) {
                        classes[i + 1] = x % 3;
                        m.add(0, x % 3);
                    }
                    CorrelatorKey k(t, m, p, Degree(1));
                    Rational lhs = integrate_tree_sum(kp, t, classes);
                    CHECK(lhs == evaluate(k));
                    nonzero += !lhs.is_zero();
                }
            }
    CHECK(nonzero > 10);
}
