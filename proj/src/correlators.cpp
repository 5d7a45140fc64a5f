#include "tautgw/correlators.hpp"

#include <mutex>
#include <set>
#include <shared_mutex>
#include <stdexcept>

namespace tautgw {

// ---- MultiIndex -------------------------------------------------------------

int MultiIndex::count(int a, int alpha) const
{
    auto it = entries_.find({a, alpha});
    return it == entries_.end() ? 0 : it->second;
}

MultiIndex& MultiIndex::add(int a, int alpha, int mult)
{
    if (a < min_level_)
        throw std::invalid_argument("level " + std::to_string(a) + " below " + std::to_string(min_level_));
    if (alpha < 0 || mult < 0)
        throw std::invalid_argument("negative class index or multiplicity");
    if (mult > 0)
        entries_[{a, alpha}] += mult;
    return *this;
}

MultiIndex& MultiIndex::remove(int a, int alpha, int mult)
{
    auto it = entries_.find({a, alpha});
    if (mult < 0 || (mult > 0 && (it == entries_.end() || it->second < mult)))
        throw std::invalid_argument("slot (" + std::to_string(a) + "," + std::to_string(alpha) + ") not present");
    if (mult == 0)
        return *this;
    it->second -= mult;
    if (it->second == 0)
        entries_.erase(it);
    return *this;
}

MultiIndex MultiIndex::operator+(const MultiIndex& o) const
{
    MultiIndex r(std::min(min_level_, o.min_level_));
    r.entries_ = entries_;
    for (const auto& [s, k] : o.entries_)
        r.entries_[s] += k;
    return r;
}

int MultiIndex::weight() const
{
    int w = 0;
    for (const auto& [s, k] : entries_)
        if (s.first >= 0)
            w += s.first * k;
    return w;
}

int MultiIndex::norm() const
{
    int w = 0;
    for (const auto& [s, k] : entries_)
        if (s.first >= 0)
            w += k;
    return w;
}

int MultiIndex::size() const
{
    int w = 0;
    for (const auto& kv : entries_)
        w += kv.second;
    return w;
}

std::optional<int> MultiIndex::max_level() const
{
    if (entries_.empty())
        return std::nullopt;
    return entries_.rbegin()->first.first;
}

Rational MultiIndex::factorial() const
{
    Rational f(1);
    for (const auto& kv : entries_)
        f *= tautgw::factorial(kv.second);
    return f;
}

std::vector<Slot> MultiIndex::expanded() const
{
    std::vector<Slot> out;
    for (const auto& [s, k] : entries_)
        for (int i = 0; i < k; ++i)
            out.push_back(s);
    return out;
}

std::string MultiIndex::str(char symbol) const
{
    std::string s;
    for (const auto& [slot, k] : entries_) {
        if (!s.empty())
            s += " ";
        s += symbol + std::to_string(slot.first) + "," + std::to_string(slot.second);
        if (k > 1)
            s += "^" + std::to_string(k);
    }
    return s;
}

Rational multi_binomial(const MultiIndex& m, const MultiIndex& sub)
{
    Rational r(1);
    for (const auto& [s, k] : sub.entries()) {
        int total = m.count(s.first, s.second);
        if (k > total)
            return Rational(0);
        r *= binomial(total, k);
    }
    return r;
}

void for_each_submultiset(const MultiIndex& m,
                          const std::function<void(const MultiIndex&, const MultiIndex&, const Rational&)>& f)
{
    std::vector<std::pair<Slot, int>> items(m.entries().begin(), m.entries().end());
    MultiIndex sub(m.min_level()), rest(m.min_level());
    auto rec = [&](auto&& self, std::size_t i, const Rational& w) -> void {
        if (i == items.size()) {
            f(sub, rest, w);
            return;
        }
        auto [slot, cnt] = items[i];
        for (int k = 0; k <= cnt; ++k) {
            sub.add(slot.first, slot.second, k);
            rest.add(slot.first, slot.second, cnt - k);
            self(self, i + 1, w * binomial(cnt, k));
            sub.remove(slot.first, slot.second, k);
            rest.remove(slot.first, slot.second, cnt - k);
        }
    };
    rec(rec, 0, Rational(1));
}

// ---- keys --------------------------------------------------------------------

CorrelatorKey::CorrelatorKey(TargetPtr t, MultiIndex m, MultiIndex p, Degree d)
    : target(std::move(t)), tau(std::move(m)), kappa(std::move(p)), beta(d)
{
    if (!target)
        throw std::invalid_argument("correlator without a target");
    for (const auto& [s, k] : tau.entries()) {
        if (s.first < 0)
            throw std::invalid_argument("tau level must be >= 0");
        if (s.second >= target->rank())
            throw std::invalid_argument("tau class index " + std::to_string(s.second) + " outside the target");
    }
    for (const auto& [s, k] : kappa.entries()) {
        if (s.first < -1)
            throw std::invalid_argument("kappa level must be >= -1");
        if (s.second >= target->rank())
            throw std::invalid_argument("kappa class index " + std::to_string(s.second) + " outside the target");
    }
}

std::string CorrelatorKey::str() const
{
    std::string s = "<" + tau.str('t');
    if (!kappa.empty())
        s += (tau.empty() ? "" : " ") + kappa.str('k');
    return s + ">_" + std::to_string(beta.d);
}

bool operator==(const CorrelatorKey& a, const CorrelatorKey& b)
{
    return a.beta == b.beta && a.tau == b.tau && a.kappa == b.kappa &&
           (a.target == b.target || a.target->identity() == b.target->identity());
}

bool operator<(const CorrelatorKey& a, const CorrelatorKey& b)
{
    if (a.beta.d != b.beta.d)
        return a.beta.d < b.beta.d;
    if (a.tau != b.tau)
        return a.tau < b.tau;
    if (a.kappa != b.kappa)
        return a.kappa < b.kappa;
    if (a.target == b.target)
        return false;
    return a.target->identity() < b.target->identity();
}

void CorrelatorCombination::add(const Rational& coef, std::vector<CorrelatorKey> factors)
{
    if (coef.is_zero())
        return;
    std::sort(factors.begin(), factors.end());
    auto it = index_.find(factors);
    if (it != index_.end()) {
        terms_[it->second].coef += coef;
        return;
    }
    index_.emplace(factors, terms_.size());
    terms_.push_back({coef, std::move(factors)});
}

int expected_dimension(const CorrelatorKey& key)
{
    return key.target->moduli_dimension(key.n(), key.beta);
}

bool selection(const CorrelatorKey& key)
{
    if (!TargetModel::is_stable(key.n(), key.beta))
        return false;
    int deg = 0;
    for (const auto& [s, k] : key.tau.entries())
        deg += k * (2 * s.first + key.target->grading(s.second));
    for (const auto& [s, k] : key.kappa.entries())
        deg += k * (2 * s.first + key.target->grading(s.second));
    return deg == 2 * expected_dimension(key);
}

// ---- relations ----------------------------------------------------------------

namespace {

// Splitting sums grow quickly; factors failing the selection rule vanish and
// are not listed.
bool worth_keeping(const CorrelatorKey& k)
{
    return selection(k);
}

// Twice the complex degree of the insertions.
int doubled_degree(const TargetModel& t, const MultiIndex& m)
{
    int deg = 0;
    for (const auto& [s, k] : m.entries())
        deg += k * (2 * s.first + t.grading(s.second));
    return deg;
}

struct Split {
    MultiIndex first, second;
    Rational weight;
    int first_degree;
};

std::vector<Split> all_splits(const TargetModel& t, const MultiIndex& m)
{
    std::vector<Split> out;
    for_each_submultiset(m, [&](const MultiIndex& a, const MultiIndex& b, const Rational& w) {
        out.push_back({a, b, w, doubled_degree(t, a)});
    });
    return out;
}

// The splitting sum shared by the three boundary relations: the first factor
// receives `first_tau`/`first_kappa`, the second the co-pivots. For each
// split of the τ insertions the selection rule fixes the degree of the κ part
// on the first factor, so only matching κ splits are visited.
void add_splitting_terms(CorrelatorCombination& out, const CorrelatorKey& key, const MultiIndex& rest_m,
                         const MultiIndex& rest_p, const MultiIndex& first_tau, const MultiIndex& first_kappa,
                         const MultiIndex& second_tau)
{
    const auto& t = key.target;
    int r = t->rank();
    auto m_splits = all_splits(*t, rest_m);
    auto p_splits = all_splits(*t, rest_p);
    std::map<int, std::vector<const Split*>> p_by_degree;
    for (const auto& sp : p_splits)
        p_by_degree[sp.first_degree].push_back(&sp);
    int fixed = doubled_degree(*t, first_tau) + doubled_degree(*t, first_kappa);

    for (int b1 = 0; b1 <= key.beta.d; ++b1) {
        int b2 = key.beta.d - b1;
        for (const auto& ms : m_splits) {
            int n1 = ms.first.norm() + first_tau.norm() + 1;
            if (!TargetModel::is_stable(n1, Degree(b1)))
                continue;
            int dim1 = 2 * t->moduli_dimension(n1, Degree(b1));
            MultiIndex tau1 = ms.first + first_tau;
            MultiIndex tau2 = ms.second + second_tau;
            for (int s1 = 0; s1 < r; ++s1) {
                auto bucket = p_by_degree.find(dim1 - fixed - ms.first_degree - t->grading(s1));
                if (bucket == p_by_degree.end())
                    continue;
                for (const Split* ps : bucket->second)
                    for (int s2 = 0; s2 < r; ++s2) {
                        const Rational& g = t->eta_inverse(s1, s2);
                        if (g.is_zero())
                            continue;
                        CorrelatorKey f2(t, tau2.plus(0, s2), ps->second, Degree(b2));
                        if (!worth_keeping(f2))
                            continue;
                        CorrelatorKey f1(t, tau1.plus(0, s1), ps->first + first_kappa, Degree(b1));
                        out.add(ms.weight * ps->weight * g, {f1, f2});
                    }
            }
        }
    }
}

MultiIndex take(const MultiIndex& m, std::initializer_list<Slot> slots, const char* what)
{
    MultiIndex r = m;
    for (auto s : slots) {
        if (r.count(s.first, s.second) == 0)
            throw std::invalid_argument(std::string(what) + " (" + std::to_string(s.first) + "," +
                                        std::to_string(s.second) + ") is not an insertion of the key");
        r.remove(s.first, s.second);
    }
    return r;
}

} // namespace

CorrelatorCombination apply_trr_psi(const CorrelatorKey& key, Slot pivot, Slot co1, Slot co2)
{
    if (pivot.first < 1)
        throw std::invalid_argument("psi relation needs a pivot of level >= 1");
    MultiIndex rest = take(key.tau, {pivot, co1, co2}, "pivot");
    MultiIndex first(0), second(0), none(-1);
    first.add(pivot.first - 1, pivot.second);
    second.add(co1.first, co1.second).add(co2.first, co2.second);
    CorrelatorCombination out;
    add_splitting_terms(out, key, rest, key.kappa, first, none, second);
    return out;
}

CorrelatorCombination apply_trr_kappa(const CorrelatorKey& key, Slot pivot, std::optional<std::pair<Slot, Slot>> copivots)
{
    if (pivot.first < 0)
        throw std::invalid_argument("kappa relation needs a pivot of level >= 0");
    MultiIndex rest_p = take(key.kappa, {pivot}, "kappa pivot");
    Slot co1, co2;
    if (copivots) {
        std::tie(co1, co2) = *copivots;
    } else {
        auto ex = key.tau.expanded();
        if (ex.size() < 2)
            throw std::invalid_argument("kappa relation needs two tau insertions as co-pivots");
        co1 = ex[0];
        co2 = ex[1];
    }
    MultiIndex rest_m = take(key.tau, {co1, co2}, "co-pivot");
    MultiIndex first_kappa(-1), second(0), none(0);
    first_kappa.add(pivot.first - 1, pivot.second);
    second.add(co1.first, co1.second).add(co2.first, co2.second);
    CorrelatorCombination out;
    add_splitting_terms(out, key, rest_m, rest_p, none, first_kappa, second);
    if (pivot.first == 0) {
        const auto& t = key.target;
        for (const auto& [s, k] : rest_m.entries())
            for (int nu = 0; nu < t->rank(); ++nu) {
                const Rational& c = t->cup_coefficient(nu, s.second, pivot.second);
                if (c.is_zero())
                    continue;
                CorrelatorKey f(t, (rest_m.minus(s.first, s.second).plus(s.first, nu)) + second, rest_p, key.beta);
                out.add(Rational(k) * c, {f});
            }
    }
    return out;
}

CorrelatorCombination apply_puncture_dilaton(const CorrelatorKey& key, Slot pivot, bool include_empty)
{
    auto [a, alpha] = pivot;
    MultiIndex m = take(key.tau, {pivot}, "pivot");
    if (a == 0)
        for (const auto& [s, k] : m.entries())
            if (s.first > 0)
                throw std::invalid_argument("a level-0 pivot requires every other tau insertion at level 0");
    if (key.beta.d == 0 && key.n() == 3)
        throw std::invalid_argument("the relation does not apply at degree 0 with three points");
    if (!TargetModel::is_stable(key.n() - 1, key.beta))
        throw std::invalid_argument("the relation needs a stable space after forgetting the pivot");
    MultiIndex low(-1), high(0);
    for (const auto& [s, k] : key.kappa.entries())
        (s.first < 0 ? low : high).add(s.first, s.second, k);
    const auto& t = key.target;
    CorrelatorCombination out;
    for_each_submultiset(high, [&](const MultiIndex& pp, const MultiIndex& rest, const Rational& w) {
        if (!include_empty && pp.empty())
            return;
        CohomologyClass cls = t->basis_class(alpha);
        for (auto s : pp.expanded())
            cls = t->multiply(cls, s.second);
        int level = pp.weight() + a - 1;
        MultiIndex base = low + rest;
        for (int nu = 0; nu < t->rank(); ++nu) {
            if (cls[static_cast<std::size_t>(nu)].is_zero())
                continue;
            out.add(w * cls[static_cast<std::size_t>(nu)], {CorrelatorKey(t, m, base.plus(level, nu), key.beta)});
        }
    });
    return out;
}

PureGWKey lift_kappa_minus_one(const CorrelatorKey& key)
{
    std::vector<int> classes;
    for (const auto& [s, k] : key.tau.entries()) {
        if (s.first != 0)
            throw std::invalid_argument("lift needs every tau insertion at level 0");
        classes.insert(classes.end(), static_cast<std::size_t>(k), s.second);
    }
    for (const auto& [s, k] : key.kappa.entries()) {
        if (s.first != -1)
            throw std::invalid_argument("lift needs every kappa insertion at level -1");
        classes.insert(classes.end(), static_cast<std::size_t>(k), s.second);
    }
    return PureGWKey(key.target, key.beta, std::move(classes));
}

// ---- evaluation ---------------------------------------------------------------

namespace {

struct Cache {
    std::shared_mutex mutex;
    std::map<CorrelatorKey, Rational> values;
};

Cache& cache()
{
    static Cache c;
    return c;
}

thread_local std::set<CorrelatorKey> in_progress;
thread_local std::uint64_t reductions = 0;

Rational reduce(const CorrelatorKey& key)
{
    const auto& t = key.target;
    int n = key.n();
    if (auto lvl = key.tau.max_level(); lvl && *lvl >= 1) {
        // ψ classes vanish on M_{0,3}(V,0).
        if (key.beta.d == 0 && n == 3)
            return Rational(0);
        ++reductions;
        Slot pivot = key.tau.entries().rbegin()->first;
        if (n >= 3) {
            auto others = key.tau.minus(pivot.first, pivot.second).expanded();
            return evaluate(apply_trr_psi(key, pivot, others[0], others[1]));
        }
        return evaluate(apply_puncture_dilaton(key, pivot));
    }
    if (auto lvl = key.kappa.max_level(); lvl && *lvl >= 0) {
        Slot pivot = key.kappa.entries().rbegin()->first;
        if (n >= 2) {
            ++reductions;
            return evaluate(apply_trr_kappa(key, pivot));
        }
        // n <= 1 and β != 0: add a divisor insertion and solve for the p'' = ∅ term.
        auto div = t->divisor_index();
        if (!div)
            throw std::runtime_error("evaluating " + key.str() + " needs a divisor class with nonzero degree pairing");
        ++reductions;
        CorrelatorKey aug(t, key.tau.plus(0, *div), key.kappa, key.beta);
        Rational total = evaluate(aug);
        Rational others = evaluate(apply_puncture_dilaton(aug, {0, *div}, false));
        return (total - others) / t->integral_over_beta(*div, key.beta);
    }
    if (key.beta.d == 0 && !key.kappa.empty())
        return Rational(0);
    ++reductions;
    return pure_gw(lift_kappa_minus_one(key));
}

} // namespace

Rational evaluate(const CorrelatorKey& key)
{
    if (key.beta.d == 0 && key.n() < 3)
        return Rational(0);
    if (!selection(key))
        return Rational(0);
    if (key.beta.d > 0 && !key.target->has_curves())
        return Rational(0);
    auto& c = cache();
    {
        std::shared_lock lock(c.mutex);
        auto it = c.values.find(key);
        if (it != c.values.end())
            return it->second;
    }
    if (!in_progress.insert(key).second)
        throw std::logic_error("reduction cycle at " + key.str());
    Rational value;
    try {
        value = reduce(key);
    } catch (...) {
        in_progress.erase(key);
        throw;
    }
    in_progress.erase(key);
    std::unique_lock lock(c.mutex);
    c.values.insert_or_assign(key, value);
    return value;
}

Evaluation evaluate_counted(const CorrelatorKey& key)
{
    std::uint64_t saved = reductions;
    reductions = 0;
    Evaluation e;
    try {
        e.value = evaluate(key);
    } catch (...) {
        reductions += saved;
        throw;
    }
    e.reductions = reductions;
    reductions += saved;
    return e;
}

Rational evaluate(const CorrelatorCombination& comb)
{
    Rational total;
    for (const auto& term : comb.terms()) {
        Rational prod = term.coef;
        for (const auto& f : term.factors) {
            prod *= evaluate(f);
            if (prod.is_zero())
                break;
        }
        total += prod;
    }
    return total;
}

void clear_correlator_cache()
{
    auto& c = cache();
    std::unique_lock lock(c.mutex);
    c.values.clear();
}

// ---- trees ---------------------------------------------------------------------

namespace {

struct VertexData {
    int beta = 0;
    std::vector<std::pair<int, CohomologyClass>> tails;  // (ψ power, class)
    MultiIndex kappa{-1};
};

// Σ over basis expansions of the tail classes of the vertex correlator.
Rational vertex_value(const TargetPtr& t, const VertexData& v, const std::vector<int>& edge_classes)
{
    Rational total;
    MultiIndex tau(0);
    for (int s : edge_classes)
        tau.add(0, s);
    auto rec = [&](auto&& self, std::size_t i, const Rational& w) -> void {
        if (i == v.tails.size()) {
            total += w * evaluate(CorrelatorKey(t, tau, v.kappa, Degree(v.beta)));
            return;
        }
        const auto& [power, cls] = v.tails[i];
        for (int b = 0; b < t->rank(); ++b) {
            if (cls[static_cast<std::size_t>(b)].is_zero())
                continue;
            tau.add(power, b);
            self(self, i + 1, w * cls[static_cast<std::size_t>(b)]);
            tau.remove(power, b);
        }
    };
    rec(rec, 0, Rational(1));
    return total;
}

} // namespace

Rational integrate_tree_sum(const TreeSum& s, const TargetPtr& target, const std::map<int, int>& tail_classes)
{
    Rational total;
    int r = target->rank();
    for (const auto& [code, entry] : s.terms()) {
        const DecoratedTree& tree = entry.tree;
        tree.validate();
        std::vector<VertexData> vs(tree.vertices.size());
        std::map<int, std::pair<std::size_t, std::size_t>> where;  // tail -> (vertex, slot)
        for (std::size_t v = 0; v < vs.size(); ++v) {
            vs[v].beta = tree.vertices[v].beta;
            for (int l : tree.tails_at(static_cast<int>(v))) {
                auto it = tail_classes.find(l);
                int cls = it == tail_classes.end() ? 0 : it->second;
                where[l] = {v, vs[v].tails.size()};
                vs[v].tails.emplace_back(0, target->basis_class(cls));
            }
        }
        for (std::size_t v = 0; v < vs.size(); ++v)
            for (const auto& d : tree.vertices[v].decorations) {
                switch (d.kind) {
                case DecorationKind::Psi: {
                    auto [vv, slot] = where.at(d.tail);
                    auto& tl = vs[vv].tails[slot];
                    tl.first += d.power;
                    tl.second = target->multiply(tl.second, d.alpha);
                    break;
                }
                case DecorationKind::Kappa:
                    vs[v].kappa.add(d.power, d.alpha);
                    break;
                case DecorationKind::Opaque:
                    throw std::invalid_argument("cannot integrate the opaque decoration '" + d.label + "'");
                }
            }
        // Sum over the classes σ, σ' placed at the two ends of every edge.
        std::vector<std::vector<int>> half(vs.size());
        Rational tree_total;
        auto rec = [&](auto&& self, std::size_t e, const Rational& w) -> void {
            if (e == tree.edges.size()) {
                Rational prod = w;
                for (std::size_t v = 0; v < vs.size() && !prod.is_zero(); ++v)
                    prod *= vertex_value(target, vs[v], half[v]);
                tree_total += prod;
                return;
            }
            auto [a, b] = tree.edges[e];
            for (int s1 = 0; s1 < r; ++s1)
                for (int s2 = 0; s2 < r; ++s2) {
                    const Rational& g = target->eta_inverse(s1, s2);
                    if (g.is_zero())
                        continue;
                    half[static_cast<std::size_t>(a)].push_back(s1);
                    half[static_cast<std::size_t>(b)].push_back(s2);
                    self(self, e + 1, w * g);
                    half[static_cast<std::size_t>(a)].pop_back();
                    half[static_cast<std::size_t>(b)].pop_back();
                }
        };
        rec(rec, 0, Rational(1));
        total += entry.coef * tree_total / Rational(static_cast<long>(tree.aut_order()));
    }
    return total;
}

// ---- JSON ----------------------------------------------------------------------

namespace {

MultiIndex parse_slots(const nlohmann::json& j, int min_level, const char* what)
{
    MultiIndex m(min_level);
    if (j.is_null())
        return m;
    if (!j.is_array())
        throw std::invalid_argument(std::string(what) + " must be an array of [a, alpha, mult]");
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 3)
            throw std::invalid_argument(std::string(what) + " entries must be [a, alpha, mult]");
        int a = e[0].get<int>(), alpha = e[1].get<int>(), mult = e[2].get<int>();
        if (mult < 0)
            throw std::invalid_argument(std::string(what) + " multiplicity must be >= 0");
        m.add(a, alpha, mult);
    }
    return m;
}

nlohmann::json slots_json(const MultiIndex& m)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [s, k] : m.entries())
        out.push_back({s.first, s.second, k});
    return out;
}

} // namespace

CorrelatorKey key_from_json(const nlohmann::json& j)
{
    if (!j.is_object())
        throw std::invalid_argument("correlator spec must be a JSON object");
    TargetPtr target;
    if (j.contains("target"))
        target = TargetModel::from_json(j.at("target"));
    else if (j.contains("r"))
        target = TargetModel::projective_space(j.at("r").get<int>());
    else
        throw std::invalid_argument("correlator spec needs \"target\" or \"r\"");
    if (!j.contains("degree"))
        throw std::invalid_argument("correlator spec needs \"degree\"");
    int d = j.at("degree").get<int>();
    if (d < 0)
        throw std::invalid_argument("degree must be >= 0");
    MultiIndex m = parse_slots(j.value("tau", nlohmann::json::array()), 0, "tau");
    MultiIndex p = parse_slots(j.value("kappa", nlohmann::json::array()), -1, "kappa");
    return CorrelatorKey(target, std::move(m), std::move(p), Degree(d));
}

nlohmann::json key_to_json(const CorrelatorKey& key)
{
    return {{"target", key.target->to_json()},
            {"degree", key.beta.d},
            {"tau", slots_json(key.tau)},
            {"kappa", slots_json(key.kappa)}};
}

} // namespace tautgw
