#pragma once

#include <map>
#include <stdexcept>

#include "tautgw/correlators.hpp"
#include "tautgw/gw.hpp"

namespace oracle {

// Second route to ⟨τ^m κ^p⟩_β that removes the κ classes first and only then
// the ψ classes. κ_{k,ν} with k >= 0 is traded for a τ_{k+1}^ν insertion by
// reading the forgetful pullback relation backwards, κ_{-1,γ} becomes an
// extra marked point with class γ, and the remaining descendants go through
// the first splitting relation and the divisor equation.
class AltEvaluator {
public:
    using Key = tautgw::CorrelatorKey;
    using MultiIndex = tautgw::MultiIndex;
    using Rational = tautgw::Rational;

    Rational operator()(const Key& key) { return eval(key); }

private:
    std::map<Key, Rational> memo_;

    static bool stable(const Key& k) { return k.n() >= 3 || k.beta.d > 0; }

    // coefficient of e_mu in e_nu times the product of the classes in p
    static Rational structure(const tautgw::TargetModel& t, const MultiIndex& p, int nu, int mu)
    {
        tautgw::CohomologyClass c = t.basis_class(nu);
        for (const auto& [slot, mult] : p.entries())
            for (int i = 0; i < mult; ++i)
                c = t.multiply(c, slot.second);
        return c[static_cast<std::size_t>(mu)];
    }

    Rational eval(const Key& key)
    {
        if (!stable(key) || !tautgw::selection(key))
            return Rational(0);
        if (!key.target->has_curves() && key.beta.d > 0)
            return Rational(0);
        auto it = memo_.find(key);
        if (it != memo_.end())
            return it->second;
        Rational v = compute(key);
        memo_.emplace(key, v);
        return v;
    }

    Rational compute(const Key& key)
    {
        const auto& t = *key.target;
        for (const auto& [slot, mult] : key.kappa.entries()) {
            (void)mult;
            if (slot.first >= 0)
                return eliminate_kappa(key, slot);
        }
        if (!key.kappa.empty())
            return eliminate_kappa_minus_one(key, key.kappa.entries().begin()->first);

        bool has_psi = key.tau.max_level().value_or(0) > 0;
        if (!has_psi) {
            std::vector<int> cls;
            for (auto [a, alpha] : key.tau.expanded())
                cls.push_back(alpha);
            return tautgw::pure_gw(key.target, key.beta.d, cls);
        }
        if (key.n() >= 3)
            return split_psi(key);
        auto div = t.divisor_index();
        if (key.beta.d == 0 || !div)
            throw std::logic_error("no route for " + key.str());
        return divisor(key, *div);
    }

    // ⟨τ^m κ^{rest+δ_k^ν}⟩ from ⟨τ^{m+δ_{k+1}^ν} κ^rest⟩
    Rational eliminate_kappa(const Key& key, tautgw::Slot pivot)
    {
        const auto& t = *key.target;
        auto [k, nu] = pivot;
        MultiIndex rest = key.kappa.minus(k, nu);
        Rational v = eval(Key(key.target, key.tau.plus(k + 1, nu), rest, key.beta));
        MultiIndex nonneg(-1), negative(-1);
        for (const auto& [slot, mult] : rest.entries())
            (slot.first >= 0 ? nonneg : negative).add(slot.first, slot.second, mult);
        tautgw::for_each_submultiset(nonneg, [&](const MultiIndex& sub, const MultiIndex& remain, const Rational& w) {
            if (sub.empty())
                return;
            int level = sub.weight() + k;
            for (int mu = 0; mu < t.rank(); ++mu) {
                Rational c = structure(t, sub, nu, mu);
                if (c.is_zero())
                    continue;
                MultiIndex p = (remain + negative).plus(level, mu);
                v -= w * c * eval(Key(key.target, key.tau, p, key.beta));
            }
        });
        return v;
    }

    // ⟨τ^m κ_{-1,γ} κ^rest⟩ with only level -1 classes in κ
    Rational eliminate_kappa_minus_one(const Key& key, tautgw::Slot slot)
    {
        if (key.beta.d == 0)
            return Rational(0);
        const auto& t = *key.target;
        int gamma = slot.second;
        MultiIndex rest = key.kappa.minus(-1, gamma);
        Rational v = eval(Key(key.target, key.tau.plus(0, gamma), rest, key.beta));
        v -= string_terms(key.target, key.tau, rest, key.beta, gamma, t);
        return v;
    }

    // Σ m_d^μ c^ν_{μ,γ} ⟨τ^{m-δ_d^μ+δ_{d-1}^ν} κ^p⟩
    Rational string_terms(const tautgw::TargetPtr& target, const MultiIndex& m, const MultiIndex& p,
                          tautgw::Degree beta, int gamma, const tautgw::TargetModel& t)
    {
        Rational s;
        for (const auto& [slot, mult] : m.entries()) {
            auto [d, mu] = slot;
            if (d < 1)
                continue;
            for (int nu = 0; nu < t.rank(); ++nu) {
                const Rational& c = t.cup_coefficient(nu, mu, gamma);
                if (c.is_zero())
                    continue;
                s += Rational(mult) * c * eval(Key(target, m.minus(d, mu).plus(d - 1, nu), p, beta));
            }
        }
        return s;
    }

    // ψ_1 = D(1 | 2,3) for pure descendants
    Rational split_psi(const Key& key)
    {
        const auto& t = *key.target;
        auto slots = key.tau.expanded();
        tautgw::Slot pivot = slots.back();
        slots.pop_back();
        tautgw::Slot c1 = slots[0], c2 = slots[1];
        MultiIndex rest = key.tau.minus(pivot.first, pivot.second).minus(c1.first, c1.second).minus(c2.first, c2.second);
        Rational v;
        for (int b1 = 0; b1 <= key.beta.d; ++b1) {
            tautgw::Degree d1(b1), d2(key.beta.d - b1);
            tautgw::for_each_submultiset(rest, [&](const MultiIndex& s1, const MultiIndex& s2, const Rational& w) {
                for (int sg = 0; sg < t.rank(); ++sg)
                    for (int sp = 0; sp < t.rank(); ++sp) {
                        const Rational& g = t.eta_inverse(sg, sp);
                        if (g.is_zero())
                            continue;
                        MultiIndex left = s1.plus(pivot.first - 1, pivot.second).plus(0, sg);
                        MultiIndex right = s2.plus(c1.first, c1.second).plus(c2.first, c2.second).plus(0, sp);
                        Rational l = eval(Key(key.target, left, MultiIndex(-1), d1));
                        if (l.is_zero())
                            continue;
                        v += w * g * l * eval(Key(key.target, right, MultiIndex(-1), d2));
                    }
            });
        }
        return v;
    }

    // ⟨τ^m⟩ ∫_β div = ⟨τ^m τ_0^div⟩ - string terms
    Rational divisor(const Key& key, int div)
    {
        const auto& t = *key.target;
        Rational pairing = t.integral_over_beta(div, key.beta);
        Rational v = eval(Key(key.target, key.tau.plus(0, div), key.kappa, key.beta));
        v -= string_terms(key.target, key.tau, key.kappa, key.beta, div, t);
        return v / pairing;
    }
};

} // namespace oracle
