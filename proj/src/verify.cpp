#include "tautgw/verify.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "tautgw/potentials.hpp"
#include "tautgw/trees.hpp"

namespace tautgw {

namespace {

int uniform(std::mt19937_64& rng, int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

std::vector<int> targets_for(const VerifyOptions& o)
{
    if (o.r)
        return {*o.r};
    return {1, 2};
}

class Reporter {
public:
    explicit Reporter(SuiteReport& r) : r_(r) {}

    void check(bool ok, const std::string& what)
    {
        r_.lines.push_back((ok ? "ok   " : "FAIL ") + what);
        r_.passed = r_.passed && ok;
    }
    void note(const std::string& what) { r_.lines.push_back("     " + what); }

private:
    SuiteReport& r_;
};

std::string eq_str(const Rational& a, const Rational& b)
{
    return a.str() + (a == b ? " == " : " != ") + b.str();
}

void run_cp1(const VerifyOptions& o, Reporter& rep)
{
    auto p1 = TargetModel::projective_space(1);
    int n_max = o.cp1_n;
    auto h = cp1_h_sequence(n_max);

    auto spec = PotentialSpec::make(p1, {"s0_1", "q"}, std::max(0, 2 * n_max - 2), n_max);
    QSeries closed = cp1_closed_form_series(n_max, spec, false, h);
    for (int n = 1; n <= n_max; ++n) {
        MultiIndex k(-1);
        if (n > 1)
            k.add(0, 1, 2 * n - 2);
        Rational engine = evaluate(CorrelatorKey(p1, MultiIndex(0), k, Degree(n)));
        Rational from_closed = closed.coefficient({{"s0_1", 2 * n - 2}, {"q", n}}) * factorial(2 * n - 2);
        rep.check(engine == h[static_cast<std::size_t>(n - 1)] && from_closed == engine,
                  "h_" + std::to_string(n) + ": engine " + engine.str() + ", closed form " + from_closed.str() +
                      ", recursion " + h[static_cast<std::size_t>(n - 1)].str());
    }

    QSeries pen = cp1_penult_residual(o.cp1_pde_q);
    rep.check(pen.is_zero(), "penultimate equation through q^" + std::to_string(o.cp1_pde_q) + " (" +
                                 std::to_string(pen.size()) + " nonzero residual terms)");

    auto five = cp1_five_variable_spec(o.cp1_pde_q, 4, 6);
    QSeries ht = cp1_closed_form_series(o.cp1_pde_q, five, false);
    for (const auto& r : cp1_puncture_dilaton_residuals(ht))
        rep.check(r.residual.is_zero(), r.relation + " equation of the closed form through q^" +
                                            std::to_string(o.cp1_pde_q));

    auto small = cp1_five_variable_spec(std::min(o.qmax, 3), 5, 5);
    QSeries engine_h = build_H_series(small, o.jobs);
    rep.check(engine_h == cp1_closed_form_series(std::min(o.qmax, 3), small),
              "closed form equals the engine potential on five variables (" + std::to_string(engine_h.size()) +
                  " terms)");

    auto desc = PotentialSpec::make(p1, {"x0", "x1", "t1_0", "t1_1", "s-1_1", "s0_0", "s0_1", "s1_1"}, 3,
                                    std::min(o.qmax, 2), 5);
    QSeries hd = build_H_series(desc, o.jobs);
    int bad = 0, total = 0;
    for (const auto& r : trr_pde_residuals(hd, *p1)) {
        ++total;
        if (!r.residual.is_zero()) {
            ++bad;
            rep.note("violated: " + r.relation);
        }
    }
    rep.check(bad == 0, "differential equations for H: " + std::to_string(total - bad) + "/" +
                            std::to_string(total) + " hold");
}

void run_wdvv(const VerifyOptions& o, Reporter& rep)
{
    for (int r : targets_for(o)) {
        auto target = TargetModel::projective_space(r);
        std::vector<std::string> names;
        for (int a = 0; a <= r; ++a)
            names.push_back("x" + std::to_string(a));
        int cap = (r + 1) * o.qmax + r + 1;
        auto spec = PotentialSpec::make(target, names, cap, o.qmax, cap);
        QSeries f = build_H_series(spec, o.jobs);
        auto res = wdvv_residuals(f, *target);
        std::string label = "P^" + std::to_string(r) + " through q^" + std::to_string(o.qmax);
        rep.check(res.empty(), "WDVV for " + label + " (" + std::to_string(f.size()) + " potential terms, " +
                                   std::to_string(res.size()) + " violating quadruples)");
    }
}

void run_trr(const VerifyOptions& o, Reporter& rep, std::mt19937_64& rng)
{
    auto ts = targets_for(o);
    std::map<std::string, int> counts;
    int failures = 0;
    for (int i = 0; i < o.samples; ++i) {
        auto target = TargetModel::projective_space(ts[static_cast<std::size_t>(i) % ts.size()]);
        CorrelatorKey key = random_admissible_key(target, o.max_degree, rng);
        auto checks = check_relations(key, rng);
        for (const auto& c : checks) {
            ++counts[c.relation];
            if (!c.holds()) {
                ++failures;
                rep.check(false, c.relation + " at " + key.str() + " " + c.detail + ": " + eq_str(c.lhs, c.rhs));
            }
        }
    }
    for (const char* rel : {"psi", "kappa", "kappa0", "pullback"}) {
        int n = counts[rel];
        rep.check(n > 0, std::string(rel) + " relation checked " + std::to_string(n) + " times");
    }
    rep.check(failures == 0, std::to_string(o.samples) + " sampled keys, " + std::to_string(failures) + " failures");
}

void run_dilaton(const VerifyOptions& o, Reporter& rep, std::mt19937_64& rng)
{
    auto ts = targets_for(o);
    int bad = 0, checked = 0;
    for (int i = 0; i < o.samples; ++i) {
        auto target = TargetModel::projective_space(ts[static_cast<std::size_t>(i) % ts.size()]);
        CorrelatorKey key = random_admissible_key(target, o.max_degree, rng);
        Rational base = evaluate(key);

        Rational with00 = evaluate(CorrelatorKey(target, key.tau, key.kappa.plus(0, 0), key.beta));
        Rational expect00 = base * Rational(key.n() - 2);
        ++checked;
        if (with00 != expect00) {
            ++bad;
            rep.check(false, "kappa_{0,0} at " + key.str() + ": " + eq_str(with00, expect00));
        }

        auto div = target->divisor_index();
        if (div) {
            Rational with_m1 = evaluate(CorrelatorKey(target, key.tau, key.kappa.plus(-1, *div), key.beta));
            Rational expect_m1 = base * target->integral_over_beta(*div, key.beta);
            ++checked;
            if (with_m1 != expect_m1) {
                ++bad;
                rep.check(false, "kappa_{-1} at " + key.str() + ": " + eq_str(with_m1, expect_m1));
            }
        }

        // degree zero with fewer than three points
        int n = uniform(rng, 0, 2);
        MultiIndex m(0), p(-1);
        for (int j = 0; j < n; ++j)
            m.add(uniform(rng, 0, 2), uniform(rng, 0, target->rank() - 1));
        for (int j = uniform(rng, 0, 2); j > 0; --j)
            p.add(uniform(rng, -1, 2), uniform(rng, 0, target->rank() - 1));
        CorrelatorKey unstable(target, m, p, Degree(0));
        Rational u = evaluate(unstable);
        ++checked;
        if (!u.is_zero()) {
            ++bad;
            rep.check(false, "unstable " + unstable.str() + " = " + u.str());
        }
    }
    rep.check(bad == 0, std::to_string(checked) + " special-value checks, " + std::to_string(bad) + " failures");
}

DecoratedTree five_tail(int b1, int b2, Decoration right)
{
    auto t = DecoratedTree::two_vertex(b1, {1, 2, 3}, b2, {4, 5});
    t.vertices[1].decorations.push_back(std::move(right));
    return t;
}

void run_trees(const VerifyOptions&, Reporter& rep)
{
    DecoratedTree star;
    star.vertices = {{0, {}}, {1, {}}, {1, {}}};
    star.edges = {{0, 1}, {0, 2}};
    star.tails = {{1, 0}, {2, 0}, {3, 0}};
    rep.check(star.aut_order() == 2, "swapping two equal leaves: |Aut| = " + std::to_string(star.aut_order()));
    star.vertices[2].beta = 2;
    rep.check(star.aut_order() == 1, "unequal leaves: |Aut| = " + std::to_string(star.aut_order()));
    auto bare = DecoratedTree::two_vertex(1, {}, 1, {});
    rep.check(bare.aut_order() == 2, "tail-less edge with equal degrees: |Aut| = " + std::to_string(bare.aut_order()));

    auto generic = forgetful_pushforward(five_tail(1, 1, Decoration::opaque("g'", 1, true)), 5);
    bool ok = generic.size() == 1 && generic.terms().begin()->second.coef == Rational(1) &&
              generic.terms().begin()->second.tree.vertices[1].decorations.front().label == "push(g')";
    rep.check(ok, "push-forward, stable after forgetting: one tree with push(g')");
    rep.check(forgetful_pushforward(five_tail(1, 0, Decoration::opaque("g'", 1, true)), 5).is_zero(),
              "push-forward, destabilized vertex with a positive-degree class: zero");
    auto stab = forgetful_pushforward(five_tail(1, 0, Decoration::opaque("1", 0)), 5);
    ok = stab.size() == 1 && stab.terms().begin()->second.tree.vertices.size() == 1 &&
         stab.terms().begin()->second.tree.tails.size() == 4;
    rep.check(ok, "push-forward, destabilized vertex with the unit: contracted to one vertex");

    for (int d = 0; d <= 4; ++d) {
        auto psi = psi_boundary_presentation(3, d, 1);
        rep.check(static_cast<int>(psi.size()) == d,
                  "psi_(3," + std::to_string(d) + ") has " + std::to_string(psi.size()) + " boundary divisors");
    }

    auto p1 = TargetModel::projective_space(1);
    int agree = 0, total = 0;
    for (int n = 3; n <= 4; ++n)
        for (int d = 0; d <= 2; ++d)
            for (int a = 0; a <= 2; ++a)
                for (int alpha = 0; alpha <= 1; ++alpha) {
                    auto sum = kappa_boundary_presentation(n, d, a, alpha);
                    for (int mask = 0; mask < (1 << n); ++mask) {
                        std::map<int, int> classes;
                        MultiIndex m(0);
                        for (int i = 0; i < n; ++i) {
                            int c = (mask >> i) & 1;
                            classes[i + 1] = c;
                            m.add(0, c);
                        }
                        CorrelatorKey key(p1, m, MultiIndex(-1).add(a, alpha), Degree(d));
                        ++total;
                        if (integrate_tree_sum(sum, p1, classes) == evaluate(key))
                            ++agree;
                    }
                }
    rep.check(agree == total, "kappa presentations integrate to the recursive values: " + std::to_string(agree) +
                                  "/" + std::to_string(total));
}

} // namespace

const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"cp1", "wdvv", "trr", "dilaton", "trees"};
    return names;
}

SuiteReport run_suite(const std::string& name, const VerifyOptions& opts)
{
    SuiteReport report;
    report.name = name;
    report.seed = opts.seed;
    Reporter rep(report);
    std::mt19937_64 rng(opts.seed);
    if (name == "cp1")
        run_cp1(opts, rep);
    else if (name == "wdvv")
        run_wdvv(opts, rep);
    else if (name == "trr")
        run_trr(opts, rep, rng);
    else if (name == "dilaton")
        run_dilaton(opts, rep, rng);
    else if (name == "trees")
        run_trees(opts, rep);
    else
        throw std::invalid_argument("unknown suite '" + name + "'");
    return report;
}

CorrelatorKey random_admissible_key(const TargetPtr& target, int max_degree, std::mt19937_64& rng, int max_points)
{
    int rank = target->rank();
    int dmax = target->has_curves() ? max_degree : 0;
    for (int attempt = 0; attempt < 10000; ++attempt) {
        int d = uniform(rng, 0, dmax);
        int n = uniform(rng, d == 0 ? 3 : 0, std::max(d == 0 ? 3 : 0, max_points));
        int budget = target->moduli_dimension(n, Degree(d));
        std::vector<std::pair<int, int>> tau;
        for (int i = 0; i < n; ++i) {
            int alpha = uniform(rng, 0, rank - 1);
            tau.emplace_back(0, alpha);
            budget -= target->grading(alpha) / 2;
        }
        if (budget < 0)
            continue;
        MultiIndex p(-1);
        // an occasional degree-zero κ class
        if (uniform(rng, 0, 3) == 0)
            p.add(0, 0);
        while (budget > 0) {
            if (n > 0 && uniform(rng, 0, 1) == 0) {
                ++tau[static_cast<std::size_t>(uniform(rng, 0, n - 1))].first;
                --budget;
                continue;
            }
            int nu = uniform(rng, 0, rank - 1);
            int g = target->grading(nu) / 2;
            int lo = std::max(-1, 1 - g), hi = budget - g;
            if (lo > hi)
                continue;
            int k = uniform(rng, lo, std::min(hi, lo + 2));
            p.add(k, nu);
            budget -= k + g;
        }
        MultiIndex m(0);
        for (auto [a, alpha] : tau)
            m.add(a, alpha);
        CorrelatorKey key(target, m, p, Degree(d));
        if (selection(key))
            return key;
    }
    throw std::runtime_error("no admissible key found");
}

std::vector<RelationCheck> check_relations(const CorrelatorKey& key, std::mt19937_64& rng)
{
    std::vector<RelationCheck> out;
    Rational lhs = evaluate(key);
    auto tau = key.tau.expanded();
    int n = static_cast<int>(tau.size());
    auto slot_str = [](Slot s) { return "(" + std::to_string(s.first) + "," + std::to_string(s.second) + ")"; };

    auto pick_copivots = [&](std::optional<std::size_t> exclude) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < tau.size(); ++i)
            if (!exclude || i != *exclude)
                idx.push_back(i);
        std::shuffle(idx.begin(), idx.end(), rng);
        return std::make_pair(tau[idx[0]], tau[idx[1]]);
    };

    std::vector<std::size_t> psi_pivots;
    for (std::size_t i = 0; i < tau.size(); ++i)
        if (tau[i].first >= 1)
            psi_pivots.push_back(i);
    if (n >= 3 && !psi_pivots.empty()) {
        std::size_t pi = psi_pivots[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(psi_pivots.size()) - 1))];
        auto [c1, c2] = pick_copivots(pi);
        Rational rhs = evaluate(apply_trr_psi(key, tau[pi], c1, c2));
        out.push_back({"psi", "pivot " + slot_str(tau[pi]) + " co-pivots " + slot_str(c1) + slot_str(c2), lhs, rhs});
    }

    std::vector<Slot> kappa_pivots;
    for (auto [s, mult] : key.kappa.entries())
        if (s.first >= 0)
            kappa_pivots.push_back(s);
    if (n >= 2 && !kappa_pivots.empty()) {
        Slot piv = kappa_pivots[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(kappa_pivots.size()) - 1))];
        auto cps = pick_copivots(std::nullopt);
        Rational rhs = evaluate(apply_trr_kappa(key, piv, cps));
        out.push_back({piv.first == 0 ? "kappa0" : "kappa",
                       "pivot " + slot_str(piv) + " co-pivots " + slot_str(cps.first) + slot_str(cps.second), lhs,
                       rhs});
    }

    if (!(key.beta.d == 0 && n == 3) && TargetModel::is_stable(n - 1, key.beta)) {
        bool all_level0 = std::all_of(tau.begin(), tau.end(), [](Slot s) { return s.first == 0; });
        std::vector<Slot> pivots;
        for (Slot s : tau)
            if (s.first >= 1)
                pivots.push_back(s);
            else if (s.first == 0 && all_level0)
                pivots.push_back(s);
        if (!pivots.empty()) {
            Slot piv = pivots[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(pivots.size()) - 1))];
            Rational rhs = evaluate(apply_puncture_dilaton(key, piv));
            out.push_back({"pullback", "pivot " + slot_str(piv), lhs, rhs});
        }
    }
    return out;
}

} // namespace tautgw
