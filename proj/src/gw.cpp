#include "tautgw/gw.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <stdexcept>
#include <string>

namespace tautgw {

namespace {

using Classes = std::vector<int>;
using Key = std::pair<int, Classes>;

struct GwCache {
    std::shared_mutex mutex;
    std::map<std::string, std::map<Key, Rational>> values;
};

GwCache& cache()
{
    static GwCache c;
    return c;
}

thread_local std::set<std::pair<std::string, Key>> in_progress;

std::string describe(int d, const Classes& cls)
{
    std::string s = "<";
    for (std::size_t i = 0; i < cls.size(); ++i)
        s += (i ? "," : "") + std::string("e") + std::to_string(cls[i]);
    return s + ">_" + std::to_string(d);
}

// Multiset over basis indices as counts.
using Counts = std::map<int, int>;

Counts to_counts(const Classes& c)
{
    Counts m;
    for (int a : c)
        ++m[a];
    return m;
}

// Visits every sub-multiset S1 of s with the weight Π C(count, k).
template <class F>
void for_each_split(const Counts& s, F&& f)
{
    std::vector<std::pair<int, int>> items(s.begin(), s.end());
    Classes first, second;
    auto rec = [&](auto&& self, std::size_t i, const Rational& w) -> void {
        if (i == items.size()) {
            f(first, second, w);
            return;
        }
        auto [cls, cnt] = items[i];
        for (int k = 0; k <= cnt; ++k) {
            for (int j = 0; j < k; ++j)
                first.push_back(cls);
            for (int j = k; j < cnt; ++j)
                second.push_back(cls);
            self(self, i + 1, w * binomial(cnt, k));
            first.resize(first.size() - static_cast<std::size_t>(k));
            second.resize(second.size() - static_cast<std::size_t>(cnt - k));
        }
    };
    rec(rec, 0, Rational(1));
}

Rational compute(const TargetPtr& t, int d, const Classes& cls);

Rational lookup(const TargetPtr& t, int d, Classes cls)
{
    std::sort(cls.begin(), cls.end());
    return compute(t, d, cls);
}

Classes joined(std::initializer_list<int> head, const Classes& tail)
{
    Classes c(head);
    c.insert(c.end(), tail.begin(), tail.end());
    return c;
}

// Σ_{d1+d2=d, S1⊔S2=S, σ,σ'} ⟨p q S1 e_σ⟩_{d1} η^{σσ'} ⟨e_σ' u v S2⟩_{d2},
// optionally leaving out the d1 = 0, S1 = ∅ block.
Rational wdvv_side(const TargetPtr& t, int d, int p, int q, int u, int v, const Counts& rest, bool skip_block)
{
    Rational total;
    int r = t->rank();
    for (int d1 = 0; d1 <= d; ++d1) {
        int d2 = d - d1;
        for_each_split(rest, [&](const Classes& s1, const Classes& s2, const Rational& w) {
            if (skip_block && d1 == 0 && s1.empty())
                return;
            // Degree-zero factors vanish unless they have exactly three points.
            if (d1 == 0 && s1.size() + 3 != 3)
                return;
            if (d2 == 0 && s2.size() + 3 != 3)
                return;
            for (int sg = 0; sg < r; ++sg)
                for (int sg2 = 0; sg2 < r; ++sg2) {
                    const Rational& g = t->eta_inverse(sg, sg2);
                    if (g.is_zero())
                        continue;
                    Rational left = lookup(t, d1, joined({p, q, sg}, s1));
                    if (left.is_zero())
                        continue;
                    Rational right = lookup(t, d2, joined({sg2, u, v}, s2));
                    if (right.is_zero())
                        continue;
                    total += w * left * g * right;
                }
        });
    }
    return total;
}

Rational reconstruct(const TargetPtr& t, int d, const Classes& cls)
{
    int n = static_cast<int>(cls.size());
    if (n < 3)
        throw std::runtime_error("no reconstruction seed for " + describe(d, cls) +
                                 " on this target; supply it in gw_seeds");
    // Break the class of least grading as e_D · e_γ.
    std::size_t ia = 0;
    for (std::size_t i = 1; i < cls.size(); ++i)
        if (t->grading(cls[i]) < t->grading(cls[ia]))
            ia = i;
    int alpha = cls[ia];
    int div = -1, gamma = -1;
    Rational c;
    std::vector<int> divisors;
    if (auto di = t->divisor_index())
        divisors.push_back(*di);
    for (int a = 0; a < t->rank(); ++a)
        if (t->grading(a) == 2 && (divisors.empty() || a != divisors.front()))
            divisors.push_back(a);
    for (int dv : divisors) {
        for (int g = 0; g < t->rank() && div < 0; ++g) {
            auto prod = t->cup_product(dv, g);
            bool single = !prod[alpha].is_zero();
            for (int nu = 0; nu < t->rank() && single; ++nu)
                if (nu != alpha && !prod[nu].is_zero())
                    single = false;
            if (single) {
                div = dv;
                gamma = g;
                c = prod[alpha];
            }
        }
        if (div >= 0)
            break;
    }
    if (div < 0)
        throw std::runtime_error("cannot reconstruct " + describe(d, cls) + ": e" + std::to_string(alpha) +
                                 " is not a multiple of a divisor class; supply it in gw_seeds");
    Classes others = cls;
    others.erase(others.begin() + static_cast<std::ptrdiff_t>(ia));
    std::size_t ic = 0;
    for (std::size_t i = 1; i < others.size(); ++i)
        if (t->grading(others[i]) > t->grading(others[ic]))
            ic = i;
    int cc = others[ic];
    others.erase(others.begin() + static_cast<std::ptrdiff_t>(ic));
    int dd = others.front();
    others.erase(others.begin());
    Counts rest = to_counts(others);

    // (D γ | C D') = (D C | γ D'); the skipped block of the left side is c·target.
    Rational rhs = wdvv_side(t, d, div, cc, gamma, dd, rest, false);
    Rational lhs = wdvv_side(t, d, div, gamma, cc, dd, rest, true);
    return (rhs - lhs) / c;
}

Rational compute(const TargetPtr& t, int d, const Classes& cls)
{
    int n = static_cast<int>(cls.size());
    Degree beta(d);
    if (!TargetModel::is_stable(n, beta))
        return Rational(0);
    if (d > 0 && !t->has_curves())
        return Rational(0);
    int degree_sum = 0;
    for (int a : cls)
        degree_sum += t->grading(a);
    if (degree_sum != 2 * t->moduli_dimension(n, beta))
        return Rational(0);
    if (d == 0)
        return n == 3 ? t->triple_integral(cls[0], cls[1], cls[2]) : Rational(0);

    if (auto it = t->gw_seeds().find({d, cls}); it != t->gw_seeds().end())
        return it->second;
    if (std::find(cls.begin(), cls.end(), 0) != cls.end())
        return Rational(0);
    for (std::size_t i = 0; i < cls.size(); ++i)
        if (t->grading(cls[i]) == 2) {
            Classes rest = cls;
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
            Rational pair = t->integral_over_beta(cls[i], beta);
            return pair.is_zero() ? Rational(0) : pair * compute(t, d, rest);
        }

    Key key{d, cls};
    auto& c = cache();
    {
        std::shared_lock lock(c.mutex);
        auto tit = c.values.find(t->identity());
        if (tit != c.values.end()) {
            auto it = tit->second.find(key);
            if (it != tit->second.end())
                return it->second;
        }
    }
    auto marker = std::make_pair(t->identity(), key);
    if (!in_progress.insert(marker).second)
        throw std::logic_error("reconstruction cycle at " + describe(d, cls));
    Rational value;
    try {
        value = reconstruct(t, d, cls);
    } catch (...) {
        in_progress.erase(marker);
        throw;
    }
    in_progress.erase(marker);
    {
        std::unique_lock lock(c.mutex);
        c.values[t->identity()][key] = value;
    }
    return value;
}

} // namespace

PureGWKey::PureGWKey(TargetPtr t, Degree d, std::vector<int> cls) : target(std::move(t)), beta(d), classes(std::move(cls))
{
    if (!target)
        throw std::invalid_argument("Gromov-Witten key without a target");
    for (int a : classes)
        if (a < 0 || a >= target->rank())
            throw std::out_of_range("class index " + std::to_string(a) + " outside the target");
    std::sort(classes.begin(), classes.end());
}

Rational pure_gw(const PureGWKey& key)
{
    return compute(key.target, key.beta.d, key.classes);
}

Rational pure_gw(const TargetPtr& target, int degree, std::vector<int> classes)
{
    return pure_gw(PureGWKey(target, Degree(degree), std::move(classes)));
}

std::shared_ptr<const VarRegistry> potential_registry(const TargetModel& target)
{
    std::vector<std::string> names;
    for (int a = 0; a < target.rank(); ++a)
        names.push_back("x" + std::to_string(a));
    names.push_back("q");
    return VarRegistry::from_names(names, target.gradings(), target.c1_degree());
}

QSeries gw_potential_series(const TargetPtr& target, std::shared_ptr<const VarRegistry> reg, Truncation trunc)
{
    for (const auto& v : reg->variables())
        if (v.kind != VarKind::X && v.kind != VarKind::Q)
            throw std::invalid_argument("Gromov-Witten potential takes only x-variables and q, got " + v.name());
    QSeries out(reg, trunc);
    auto qi = reg->q_index();
    int qcap = qi ? trunc.caps[*qi] : 0;
    for (const Exponents& e : enumerate_monomials(*reg, trunc)) {
        Classes cls;
        Rational weight(1);
        for (std::size_t i = 0; i < e.size(); ++i) {
            if ((*reg)[i].kind != VarKind::X)
                continue;
            for (int k = 0; k < e[i]; ++k)
                cls.push_back((*reg)[i].alpha);
            weight /= factorial(e[i]);
        }
        for (int d = 0; d <= qcap; ++d) {
            if (d > 0 && !qi)
                break;
            Rational v = pure_gw(target, d, cls);
            if (v.is_zero())
                continue;
            Exponents m = e;
            if (qi)
                m[*qi] = d;
            out.add_term(m, v * weight);
        }
    }
    return out;
}

void clear_gw_cache()
{
    auto& c = cache();
    std::unique_lock lock(c.mutex);
    c.values.clear();
}

} // namespace tautgw
