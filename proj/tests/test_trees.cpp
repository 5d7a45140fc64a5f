#include <doctest.h>

#include <algorithm>
#include <random>

#include "tautgw/trees.hpp"

using namespace tautgw;

namespace {

// Center with tails 1..3 and two tail-less leaves.
DecoratedTree star(int b1, int b2)
{
    DecoratedTree t;
    t.vertices = {{0, {}}, {b1, {}}, {b2, {}}};
    t.edges = {{0, 1}, {0, 2}};
    t.tails = {{1, 0}, {2, 0}, {3, 0}};
    return t;
}

// The five-tail example: tails 1,2,3 on the β1 vertex, 4,5 on the β2 vertex.
DecoratedTree five_tail(int b1, int b2, Decoration right)
{
    auto t = DecoratedTree::two_vertex(b1, {1, 2, 3}, b2, {4, 5});
    t.vertices[1].decorations.push_back(right);
    return t;
}

} // namespace

TEST_CASE("automorphism orders")
{
    auto t = DecoratedTree::two_vertex(0, {1, 2}, 1, {3});
    t.vertices[0].decorations.push_back(Decoration::opaque("g", 1));
    CHECK(t.aut_order() == 1);
    CHECK(star(1, 1).aut_order() == 2);
    CHECK(star(1, 2).aut_order() == 1);
    auto decorated = star(1, 1);
    decorated.vertices[1].decorations.push_back(Decoration::kappa(0, 1));
    CHECK(decorated.aut_order() == 1);
    CHECK(DecoratedTree::two_vertex(1, {}, 1, {}).aut_order() == 2);
}

TEST_CASE("canonical form ignores vertex numbering")
{
    std::mt19937_64 rng(7);
    DecoratedTree t;
    t.vertices = {{0, {}}, {1, {}}, {0, {}}, {2, {}}, {1, {}}};
    t.edges = {{0, 1}, {0, 2}, {2, 3}, {2, 4}};
    t.tails = {{1, 0}, {2, 2}};
    t.validate();
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<int> perm(5);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        DecoratedTree u;
        u.vertices.resize(5);
        for (int v = 0; v < 5; ++v)
            u.vertices[static_cast<std::size_t>(perm[static_cast<std::size_t>(v)])] = t.vertices[static_cast<std::size_t>(v)];
        for (auto [a, b] : t.edges)
            u.edges.emplace_back(perm[static_cast<std::size_t>(b)], perm[static_cast<std::size_t>(a)]);
        for (auto [l, v] : t.tails)
            u.tails[l] = perm[static_cast<std::size_t>(v)];
        CHECK(u.canonical() == t.canonical());
        CHECK(u.aut_order() == t.aut_order());
    }
    auto other = t;
    other.tails = {{1, 2}, {2, 0}};
    CHECK(other.canonical() != t.canonical());
}

TEST_CASE("validation")
{
    auto bad = DecoratedTree::two_vertex(0, {1}, 1, {2});
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    DecoratedTree cyc;
    cyc.vertices = {{1, {}}, {1, {}}};
    cyc.edges = {{0, 1}, {1, 0}};
    CHECK_THROWS_AS(cyc.validate(), std::invalid_argument);
    auto j = star(1, 2).to_json();
    CHECK(DecoratedTree::from_json(j).canonical() == star(1, 2).canonical());
}

TEST_CASE("two-vertex divisors")
{
    SplitConstraints pin;
    pin.on_second = {1};
    pin.second_exact = true;
    auto a = enumerate_two_vertex_divisors(3, 2, pin);
    CHECK(a.size() == 2);
    for (const auto& e : a)
        CHECK(e.tree.vertices[1].beta != 0);

    auto m04 = enumerate_two_vertex_divisors(4, 0);
    CHECK(m04.size() == 3);

    auto n0 = enumerate_two_vertex_divisors(0, 2);
    REQUIRE(n0.size() == 1);
    CHECK(n0[0].aut == 2);

    for (int n = 0; n <= 5; ++n)
        for (int d = 0; d <= 2; ++d)
            for (const auto& e : enumerate_two_vertex_divisors(n, d))
                CHECK_NOTHROW(e.tree.validate());
}

TEST_CASE("push-forward of the five-tail example")
{
    auto generic = five_tail(1, 1, Decoration::opaque("g'", 1, true));
    auto pushed = forgetful_pushforward(generic, 5);
    REQUIRE(pushed.size() == 1);
    const auto& e = pushed.terms().begin()->second;
    CHECK(e.coef == Rational(1));
    CHECK(e.tree.tails.count(5) == 0);
    CHECK(e.tree.vertices.size() == 2);
    CHECK(e.tree.vertices[1].decorations.front().label == "push(g')");

    auto vanishing = five_tail(1, 0, Decoration::opaque("g'", 1, true));
    CHECK(forgetful_pushforward(vanishing, 5).is_zero());

    auto unit = five_tail(1, 0, Decoration::opaque("1", 0));
    auto st = forgetful_pushforward(unit, 5);
    REQUIRE(st.size() == 1);
    const auto& s = st.terms().begin()->second;
    CHECK(s.coef == Rational(1));
    CHECK(s.tree.vertices.size() == 1);
    CHECK(s.tree.tails.size() == 4);
    CHECK(s.tree.vertices[0].beta == 1);
}

TEST_CASE("push-forward of psi classes gives kappa classes")
{
    auto t = DecoratedTree::single_vertex(1, {1, 2, 3});
    t.vertices[0].decorations.push_back(Decoration::psi(3, 2, 1));
    auto r = forgetful_pushforward(t, 3);
    REQUIRE(r.size() == 1);
    auto d = r.terms().begin()->second.tree.vertices[0].decorations.front();
    CHECK(d.kind == DecorationKind::Kappa);
    CHECK(d.power == 1);
    CHECK(d.alpha == 1);
    CHECK(forgetful_pushforward(DecoratedTree::single_vertex(1, {1, 2, 3}), 3).is_zero());
}

TEST_CASE("pull-back coefficients")
{
    auto one = forgetful_pullback_terms(DecoratedTree::single_vertex(1, {1, 2, 3}), 4);
    REQUIRE(one.size() == 1);
    CHECK(one[0].second == Rational(1));

    auto two = forgetful_pullback_terms(DecoratedTree::two_vertex(0, {1, 2}, 1, {3}), 4);
    REQUIRE(two.size() == 2);
    CHECK(two[0].second == Rational(1));
    CHECK(two[1].second == Rational(1));

    auto s = forgetful_pullback_terms(star(1, 1), 4);
    REQUIRE(s.size() == 3);
    CHECK(s[0].second == Rational(1));
    CHECK(s[1].second == Rational(1, 2));
    CHECK(s[2].second == Rational(1, 2));
    auto sum = forgetful_pullback(star(1, 1), 4);
    CHECK(sum.size() == 2);
    CHECK_THROWS_AS(forgetful_pullback(star(1, 1), 2), std::invalid_argument);
}

TEST_CASE("pushing forward a pulled-back decorated tree")
{
    // π_*(ψ_4 · π^*Γ) = (number of vertices) · Γ when every copy stays stable
    auto g = DecoratedTree::two_vertex(1, {1, 2}, 1, {3});
    TreeSum total;
    for (auto& [tree, c] : forgetful_pullback_terms(g, 4)) {
        auto dec = tree;
        dec.vertices[static_cast<std::size_t>(dec.tails.at(4))].decorations.push_back(Decoration::psi(4, 1, 0));
        total += forgetful_pushforward(dec, 4).scaled(c);
    }
    int kappa_terms = 0;
    for (const auto& [k, e] : total.terms()) {
        CHECK(e.coef == Rational(1));
        ++kappa_terms;
    }
    CHECK(kappa_terms == 2);
}

TEST_CASE("psi presentation")
{
    CHECK(psi_boundary_presentation(3, 2, 1).size() == 2);
    CHECK(psi_boundary_presentation(3, 0, 1).is_zero());
    CHECK_THROWS_AS(psi_boundary_presentation(3, 1, 0), std::invalid_argument);
    for (int n = 3; n <= 6; ++n)
        for (int d = 0; d <= 2; ++d) {
            auto up = psi_boundary_presentation(n + 1, d, 1);
            auto down = psi_boundary_presentation(n, d, 1);
            TreeSum pulled;
            for (const auto& [k, e] : down.terms())
                pulled += forgetful_pullback(e.tree, n + 1).scaled(e.coef);
            std::vector<int> rest;
            for (int l = 2; l <= n; ++l)
                rest.push_back(l);
            TreeSum d1;
            d1.add(DecoratedTree::two_vertex(d, rest, 0, {1, n + 1}), Rational(1));
            CHECK(up == pulled + d1);
        }
}

TEST_CASE("kappa presentation")
{
    SplitConstraints pin;
    pin.on_first = {1, 2};
    pin.second_exact = true;
    CHECK(kappa_boundary_presentation(2, 1, 1, 1).size() == enumerate_two_vertex_divisors(2, 1, pin).size());
    auto z = kappa_boundary_presentation(3, 0, 0, 0);
    REQUIRE(z.size() == 1);
    CHECK(z.terms().begin()->second.tree.vertices.size() == 1);
    CHECK_THROWS_AS(kappa_boundary_presentation(3, 1, -1, 0), std::invalid_argument);
}
